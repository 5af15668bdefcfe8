#pragma once

#include <string>
#include <vector>

#include "normspec/registry.hpp"

namespace normspec {

// Scenario-search encoding: breadth (one chosen action per state), depth
// (bounded state generator), root (initial facts/triggers for state 1), and
// a counterexample criterion.
struct SearchSpec {
    std::string breadthAction; // action/event type name, e.g. "raise-hand"
    int depth = 1;
    std::vector<std::string> rootFacts;    // ground constructor expressions
    std::vector<std::string> rootTriggers; // may be partial (given args only)
    std::vector<std::string> criterionBodies; // raw rule bodies for `counterexample`
};

// Deterministic answer-set-program text for the whole specification:
// name-map comments, generic frame rules, then per type an enumeration rule,
// derivation rules, suppression rules and effect rules. Identifier mangling
// maps hyphens to underscores; the comment table records the mapping.
std::string emit_specification(const Registry& reg);

// The four search sections in breadth/depth/root/criterion order.
std::string emit_search(const Registry& reg, const SearchSpec& spec);

std::string asp_mangle(const std::string& name);

} // namespace normspec
