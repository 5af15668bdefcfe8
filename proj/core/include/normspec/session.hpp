#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "normspec/parser.hpp"
#include "normspec/registry.hpp"
#include "normspec/transition.hpp"

namespace normspec {

// One step of exploration history. The knowledge base is always post-closure.
struct State {
    RegistryPtr registry;
    KnowledgeBase kb;
    int id = 0;
    int parent = -1;
    std::string phraseText; // what produced this state
};

struct QueryRecord {
    std::string text;
    bool isInstanceQuery = false;
    bool boolResult = false;
    std::vector<Instance> instances;
};

struct PhraseOutcome {
    int stateId = 0; // head after execution (unchanged for pure queries)
    bool newState = false;
    std::vector<QueryRecord> queries;
    std::vector<Violation> violations;
    std::vector<Instance> triggered, created, terminated, obfuscated;
};

// Request-scoped truth assignments; they outrank everything else and are
// discarded when the request completes.
using AdditionalInput = std::vector<std::pair<Instance, bool>>;

// A serialized execution thread over a growing state tree. Reverting moves
// the head; replaying a recorded phrase reproduces the child state exactly.
class Session {
public:
    explicit Session(SemanticsOptions opts = {});

    const SemanticsOptions& options() const { return opts_; }
    const State& head() const { return states_[static_cast<size_t>(head_)]; }
    const State* state(int id) const;
    const std::vector<State>& history() const { return states_; }

    PhraseOutcome execute(const PhrasePtr& phrase, const AdditionalInput* input = nullptr);
    PhraseOutcome executeText(const std::string& text, const AdditionalInput* input = nullptr);

    void revert(int stateId); // throws Error on unknown id

    // enabled action/event instances over enumerable domains, for exploration
    std::vector<Instance> enabledActions() const;

    // parses "type(arg, ...)" into a ground instance of a declared type
    Instance parseInstance(const std::string& text) const;

private:
    SemanticsOptions opts_;
    std::vector<State> states_;
    int head_ = 0;

    PhraseOutcome executeOn(const State& base, const PhrasePtr& phrase,
                            const AdditionalInput* input);
    int pushState(RegistryPtr reg, KnowledgeBase kb, const std::string& text);
};

} // namespace normspec
