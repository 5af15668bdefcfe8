#pragma once

#include <set>
#include <string>
#include <vector>

#include "normspec/eval.hpp"
#include "normspec/kb.hpp"
#include "normspec/registry.hpp"

namespace normspec {

// Test-support oracle: grounds one closure state to propositional rules and
// enumerates stable models by brute force. Desk-scale validation only.
struct GroundRule {
    Instance head;
    std::vector<Instance> positiveBody;
    std::vector<Instance> negativeBody;
};

struct StableModelReport {
    enum class Verdict { Zero, Unique, Multiple };
    Verdict verdict = Verdict::Zero;
    std::vector<std::set<Instance>> models;
    int count() const { return static_cast<int>(models.size()); }
};

struct GroundProgram {
    std::vector<GroundRule> rules;
    std::vector<Instance> atoms;     // candidate atoms, canonical order
    std::set<Instance> forcedTrue;   // asserted/additional-input truths
    std::set<Instance> forcedFalse;  // asserted falsities (trump derivation)
};

// Grounds every derivation rule over the finite universe spanned by declared
// finite domains and instances present in the base knowledge base, iterating
// until the universe is stable. Throws UniverseTooLargeError past atomCap.
GroundProgram ground(const Registry& reg, const KnowledgeBase& base, int atomCap = 20);

// Gelfond-Lifschitz check over every subset of the candidate atoms.
StableModelReport enumerate_stable_models(const GroundProgram& program);

} // namespace normspec
