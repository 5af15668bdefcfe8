#pragma once

#include <optional>
#include <string>
#include <vector>

#include "normspec/ast.hpp"
#include "normspec/closure.hpp"
#include "normspec/eval.hpp"
#include "normspec/kb.hpp"
#include "normspec/registry.hpp"

namespace normspec {

struct Violation {
    enum class Kind { DisabledAction, Duty };
    Kind kind;
    Instance instance;
    int violatedClause = -1; // Duty only: index of the satisfied condition

    bool operator==(const Violation& o) const {
        return kind == o.kind && instance == o.instance;
    }
};

// `VIOLATION disabled-action <instance>` / `VIOLATION duty <instance>`
std::string to_string(const Violation& v);

// Effects of one transition, gathered before anything is applied. Creation
// trumps termination of the same instance; obfuscation ranks below both.
struct EffectSet {
    std::set<Instance> created, terminated, obfuscated;
    std::vector<Instance> triggered; // sync closure, trigger order
    std::vector<Violation> actionViolations;

    void merge(const EffectSet& other);
};

struct StepOutcome {
    KnowledgeBase kb; // post-state, closed
    std::vector<Instance> triggered;
    std::vector<Instance> created, terminated, obfuscated;
    std::vector<Violation> violations; // disabled actions, then duty violations
};

// Sync closure plus per-member enablement checks and effect evaluation, all
// against the given pre-state. Does not apply anything.
EffectSet compute_trigger_effects(const Registry& reg, const KnowledgeBase& preState,
                                  const Instance& actionInstance, const SemanticsOptions& opts);

// Asserts/retracts/obfuscates with Var and Function displacement, in
// obfuscate < terminate < create order so conflicts resolve by precedence.
KnowledgeBase apply_effects(const Registry& reg, const KnowledgeBase& kb, const EffectSet& effects,
                            const SemanticsOptions& opts);

std::vector<Violation> duty_violations(const Registry& reg, const KnowledgeBase& closedKb,
                                       const SemanticsOptions& opts);

// Statement execution: the expression expands to ground instances in the
// pre-state; effects apply atomically; the post-state is re-closed and duty
// violations are computed.
StepOutcome exec_statement(const Registry& reg, const KnowledgeBase& closedPre,
                           const Statement& stmt, const SemanticsOptions& opts);

StepOutcome trigger_transition(const Registry& reg, const KnowledgeBase& closedPre,
                               const Instance& actionInstance, const SemanticsOptions& opts);

bool query_bool(const Registry& reg, const KnowledgeBase& closedKb, const ExprPtr& expr,
                const SemanticsOptions& opts);

std::vector<Instance> query_instances(const Registry& reg, const KnowledgeBase& closedKb,
                                      const ExprPtr& expr, const SemanticsOptions& opts);

} // namespace normspec
