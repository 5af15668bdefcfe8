#include "normspec/kb.hpp"

#include <algorithm>

#include "normspec/diag.hpp"

namespace normspec {

Truth KnowledgeBase::truthOf(const Registry& reg, const Instance& inst) const {
    const TypeRecord& rec = reg.get(inst.type);
    if (auto it = additional_.find(inst); it != additional_.end())
        return it->second ? Truth::True : Truth::False;
    if (auto it = asserted_.find(inst); it != asserted_.end()) {
        switch (it->second) {
            case Polarity::True: return Truth::True;
            case Polarity::False: return Truth::False;
            case Polarity::Obfuscated: return rec.open ? Truth::Unknown : Truth::False;
        }
    }
    if (derived_.count(inst)) return Truth::True;
    return rec.open ? Truth::Unknown : Truth::False;
}

namespace {

bool sameFunctionKey(const Instance& a, const Instance& b) {
    if (a.args.size() != b.args.size() || a.args.empty()) return false;
    for (size_t i = 0; i + 1 < a.args.size(); ++i)
        if (!(a.args[i] == b.args[i])) return false;
    return true;
}

} // namespace

void KnowledgeBase::displace(const Registry& reg, const Instance& winner,
                             bool functionDisplacement) {
    const TypeRecord& rec = reg.get(winner.type);
    if (!rec.isVar && !(rec.isFunction && functionDisplacement)) return;

    std::vector<Instance> losers;
    auto consider = [&](const Instance& cand) {
        if (cand == winner) return;
        if (rec.isVar || sameFunctionKey(cand, winner)) losers.push_back(cand);
    };
    for (auto it = asserted_.lower_bound(Instance(winner.type, {})); it != asserted_.end(); ++it) {
        if (it->first.type != winner.type) break;
        consider(it->first);
    }
    for (auto it = derived_.lower_bound(Instance(winner.type, {})); it != derived_.end(); ++it) {
        if (it->type != winner.type) break;
        consider(*it);
    }
    for (const Instance& l : losers) asserted_[l] = Polarity::False;
}

void KnowledgeBase::assertInstance(const Registry& reg, const Instance& inst, Polarity pol,
                                   bool functionDisplacement) {
    reg.get(inst.type); // UnknownType check
    if (pol == Polarity::True) displace(reg, inst, functionDisplacement);
    asserted_[inst] = pol;
}

bool KnowledgeBase::hasAdditionalForType(const std::string& type) const {
    auto it = additional_.lower_bound(Instance(type, {}));
    return it != additional_.end() && it->first.type == type;
}

std::vector<Instance> KnowledgeBase::additionalTrueOfType(const std::string& type) const {
    std::vector<Instance> out;
    for (auto it = additional_.lower_bound(Instance(type, {})); it != additional_.end(); ++it) {
        if (it->first.type != type) break;
        if (it->second) out.push_back(it->first);
    }
    return out;
}

bool KnowledgeBase::hasAssertedForType(const std::string& type) const {
    auto it = asserted_.lower_bound(Instance(type, {}));
    return it != asserted_.end() && it->first.type == type;
}

std::vector<Instance> KnowledgeBase::assertedTrueOfType(const std::string& type) const {
    std::vector<Instance> out;
    for (auto it = asserted_.lower_bound(Instance(type, {})); it != asserted_.end(); ++it) {
        if (it->first.type != type) break;
        if (it->second == Polarity::True) out.push_back(it->first);
    }
    return out;
}

std::vector<Instance> KnowledgeBase::heldOfType(const Registry& reg, const std::string& type) const {
    std::set<Instance> out;
    auto scan = [&](const Instance& cand) {
        if (truthOf(reg, cand) == Truth::True) out.insert(cand);
    };
    for (auto it = additional_.lower_bound(Instance(type, {})); it != additional_.end(); ++it) {
        if (it->first.type != type) break;
        scan(it->first);
    }
    for (auto it = asserted_.lower_bound(Instance(type, {})); it != asserted_.end(); ++it) {
        if (it->first.type != type) break;
        scan(it->first);
    }
    for (auto it = derived_.lower_bound(Instance(type, {})); it != derived_.end(); ++it) {
        if (it->type != type) break;
        scan(*it);
    }
    return {out.begin(), out.end()};
}

namespace {

void collectStrings(const Value& v, std::set<std::string>& out) {
    if (v.isLiteral()) {
        if (v.literal().isStr()) out.insert(v.literal().str());
        return;
    }
    for (const Value& a : v.instance().args) collectStrings(a, out);
}

} // namespace

std::vector<std::string> KnowledgeBase::activeStrings(const Registry& reg) const {
    std::set<std::string> out;
    auto scan = [&](const Instance& inst) {
        if (truthOf(reg, inst) != Truth::True) return;
        for (const Value& a : inst.args) collectStrings(a, out);
    };
    for (const auto& [inst, pol] : additional_)
        if (pol) scan(inst);
    for (const auto& [inst, pol] : asserted_)
        if (pol == Polarity::True) scan(inst);
    for (const Instance& inst : derived_) scan(inst);
    return {out.begin(), out.end()};
}

} // namespace normspec
