#pragma once

#include <string>
#include <vector>

#include "normspec/eval.hpp"
#include "normspec/kb.hpp"
#include "normspec/registry.hpp"

namespace normspec {

struct ClosureReport {
    std::vector<std::vector<std::string>> strata;
    int iterations = 0;    // fixpoint passes across all strata
    bool usedOracle = false;
};

// Closes the knowledge base under all derivation rules: stratum-by-stratum
// least fixpoint, with Conditioned-by clauses suppressing derived instances
// whose conditions fail. Rejects non-stratified specifications unless
// opts.oracleFallback is set, in which case the brute-force stable-model
// enumerator decides (unique model: use it; zero or several: error).
//
// Lenient mode lets a rule that raises an open-type interrupt derive nothing
// instead of aborting; it is used when installing declarations (a spec whose
// rules await external input must still load) and when discarding a request's
// input layer. Statement and query execution close strictly, so missing
// input surfaces exactly where the work is requested.
KnowledgeBase close(const KnowledgeBase& kb, const Registry& reg,
                    const SemanticsOptions& opts = {}, ClosureReport* report = nullptr,
                    bool lenient = false);

} // namespace normspec
