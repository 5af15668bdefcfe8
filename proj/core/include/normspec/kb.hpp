#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "normspec/registry.hpp"
#include "normspec/value.hpp"

namespace normspec {

enum class Truth { True, False, Unknown };

// Assertion polarity in the middle layer. Obfuscated withdraws knowledge:
// it reads as Unknown for open types and as False for closed ones.
enum class Polarity { True, False, Obfuscated };

// Layered map Instance -> Truth. Lookup resolves top-down: request-scoped
// additional input, then asserted facts, then derived facts, then the
// openness default. All layers are finite by construction.
class KnowledgeBase {
public:
    const std::map<Instance, bool>& additional() const { return additional_; }
    const std::map<Instance, Polarity>& asserted() const { return asserted_; }
    const std::set<Instance>& derived() const { return derived_; }

    Truth truthOf(const Registry& reg, const Instance& inst) const;

    // Writes into the asserted layer. Asserting True on a Var type writes
    // False to every other instance of the type; on a Function type, to every
    // other instance sharing the all-but-last-field key.
    void assertInstance(const Registry& reg, const Instance& inst, Polarity pol,
                        bool functionDisplacement = true);

    void setAdditional(std::map<Instance, bool> layer) { additional_ = std::move(layer); }
    void clearAdditional() { additional_.clear(); }
    void setDerived(std::set<Instance> derived) { derived_ = std::move(derived); }
    void clearDerived() { derived_.clear(); }

    bool hasAdditionalForType(const std::string& type) const;
    std::vector<Instance> additionalTrueOfType(const std::string& type) const;
    bool hasAssertedForType(const std::string& type) const;
    std::vector<Instance> assertedTrueOfType(const std::string& type) const;

    // Instances of `type` whose truth is True, in canonical order.
    std::vector<Instance> heldOfType(const Registry& reg, const std::string& type) const;

    // Every string literal occurring in a True instance, sorted and unique.
    // This is the extension of the built-in actor type.
    std::vector<std::string> activeStrings(const Registry& reg) const;

    bool operator==(const KnowledgeBase& o) const = default;

private:
    std::map<Instance, bool> additional_;
    std::map<Instance, Polarity> asserted_;
    std::set<Instance> derived_;

    void displace(const Registry& reg, const Instance& winner, bool functionDisplacement);
};

} // namespace normspec
