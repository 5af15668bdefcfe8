#include "normspec/stable.hpp"

#include <algorithm>
#include <functional>
#include <map>

#include "normspec/diag.hpp"
#include "normspec/printer.hpp"

namespace normspec {

namespace {

// One way a subexpression can be satisfied: the truth atoms it requires plus
// the value it produces. Disjunction multiplies branches; the rule driver
// emits one ground rule per surviving branch.
struct Branch {
    std::optional<EvalValue> value; // nullopt: guard-filtered
    std::vector<Instance> pos;
    std::vector<Instance> neg;
};

constexpr size_t kBranchCap = 4096;

struct Grounder {
    const Registry& reg;
    std::map<std::string, std::set<Instance>> universe;
    int atomCap;

    std::vector<Instance> universeOf(const std::string& varName) {
        auto base = reg.resolveVarType(varName);
        if (!base) throw TypeError("'" + varName + "' names no declared type");
        Registry::DomainInfo dom = reg.domainOf(*base);
        if (dom.finite) return dom.instances;
        const auto& set = universe[*base];
        return {set.begin(), set.end()};
    }

    // enumerating an infinite type only yields held instances, so every
    // witness over such a type becomes a positive body atom
    bool enumerationNeedsTruth(const std::string& varName) {
        auto base = reg.resolveVarType(varName);
        return base && !reg.domainOf(*base).finite;
    }

    void seed(const Instance& inst) {
        if (universe[inst.type].insert(inst).second)
            for (const Value& a : inst.args)
                if (a.isInstance()) seed(a.instance());
    }

    static Branch mergeBranches(const Branch& a, const Branch& b) {
        Branch out = a;
        out.value = b.value;
        out.pos.insert(out.pos.end(), b.pos.begin(), b.pos.end());
        out.neg.insert(out.neg.end(), b.neg.begin(), b.neg.end());
        return out;
    }

    // Truthify a branch's value in place: an instance value becomes a
    // positive body atom, numbers/strings are presence (true).
    static bool branchTrue(Branch& b) {
        if (!b.value) return false;
        if (b.value->isInst()) {
            b.pos.push_back(std::get<Instance>(b.value->v));
            b.value = EvalValue{true};
            return true;
        }
        if (b.value->isBool()) return std::get<bool>(b.value->v);
        return true; // presence
    }

    std::vector<Branch> expand(const ExprPtr& expr, Environment& env) {
        const SourceLoc& loc = expr->loc;
        return std::visit(
            [&](const auto& node) -> std::vector<Branch> {
                using T = std::decay_t<decltype(node)>;
                if constexpr (std::is_same_v<T, BoolLit>) {
                    return {Branch{EvalValue{node.value}, {}, {}}};
                } else if constexpr (std::is_same_v<T, IntLitExpr>) {
                    return {Branch{EvalValue{node.value}, {}, {}}};
                } else if constexpr (std::is_same_v<T, StrLitExpr>) {
                    return {Branch{EvalValue{node.text}, {}, {}}};
                } else if constexpr (std::is_same_v<T, VarRef>) {
                    const Value* v = env.lookup(node.name);
                    if (!v) {
                        if (!reg.resolveVarType(node.name))
                            return {Branch{EvalValue{node.name}, {}, {}}}; // string atom
                        throw EvalError(loc.str() + ": unbound variable '" + node.name +
                                        "' in oracle grounding");
                    }
                    return {Branch{value_to_eval(*v), {}, {}}};
                } else if constexpr (std::is_same_v<T, CtorApp>) {
                    return expandCtor(node, loc, env);
                } else if constexpr (std::is_same_v<T, Proj>) {
                    std::vector<Branch> out;
                    for (Branch& b : expand(node.base, env)) {
                        if (!b.value) continue;
                        if (!b.value->isInst())
                            throw EvalError(loc.str() + ": projection on a non-instance");
                        const Instance& inst = std::get<Instance>(b.value->v);
                        int idx = reg.get(inst.type).fieldIndex(node.field);
                        if (idx < 0 || static_cast<size_t>(idx) >= inst.args.size())
                            throw TypeError(loc.str() + ": no field '" + node.field + "'");
                        b.value = value_to_eval(inst.args[static_cast<size_t>(idx)]);
                        out.push_back(std::move(b));
                    }
                    return out;
                } else if constexpr (std::is_same_v<T, NotExpr>) {
                    return expandNot(node.operand, loc, env);
                } else if constexpr (std::is_same_v<T, Binary>) {
                    return expandBinary(node, loc, env);
                } else if constexpr (std::is_same_v<T, BuiltinCall>) {
                    if (node.kind != BuiltinKind::Holds)
                        throw EvalError(loc.str() +
                                        ": only Holds is supported in oracle grounding");
                    std::vector<Branch> out;
                    for (Branch& b : expand(node.arg, env)) {
                        if (!b.value || !b.value->isInst())
                            throw EvalError(loc.str() + ": Holds requires an instance");
                        b.pos.push_back(std::get<Instance>(b.value->v));
                        b.value = EvalValue{true};
                        out.push_back(std::move(b));
                    }
                    return out;
                } else if constexpr (std::is_same_v<T, Quant>) {
                    return expandQuant(node, loc, env);
                } else if constexpr (std::is_same_v<T, Aggregate>) {
                    throw EvalError(loc.str() + ": aggregates are not supported by the oracle");
                } else if constexpr (std::is_same_v<T, Guarded>) {
                    std::vector<Branch> out;
                    for (Branch& g : expand(node.guard, env)) {
                        if (!branchTrue(g)) continue;
                        for (const Branch& v : expand(node.value, env))
                            out.push_back(mergeBranches(g, v));
                    }
                    capBranches(out, loc);
                    return out;
                }
            },
            expr->node);
    }

    std::vector<Branch> expandCtor(const CtorApp& app, const SourceLoc& loc, Environment& env) {
        const TypeRecord& rec = reg.get(app.type);
        // reuse the evaluator's completion plan via a tiny shim: fields are
        // filled positionally/by name, missing ones become variables
        std::vector<ExprPtr> argExprs;
        {
            std::vector<ExprPtr> positional;
            std::map<std::string, ExprPtr> named;
            for (const CtorArg& a : app.args) {
                if (a.field.empty()) positional.push_back(a.value);
                else named[a.field] = a.value;
            }
            if (rec.domain != TypeRecord::Domain::Product) {
                if (!positional.empty()) argExprs.push_back(positional[0]);
            } else {
                size_t posIdx = 0;
                for (const auto& f : rec.fields) {
                    if (auto it = named.find(f.label); it != named.end())
                        argExprs.push_back(it->second);
                    else if (posIdx < positional.size())
                        argExprs.push_back(positional[posIdx++]);
                    else
                        argExprs.push_back(makeExpr<VarRef>(loc, f.label));
                }
            }
        }
        if (rec.domain == TypeRecord::Domain::Unit)
            return {Branch{EvalValue{Instance(app.type, {})}, {}, {}}};

        std::vector<Branch> rows{Branch{EvalValue{true}, {}, {}}};
        std::vector<std::vector<Value>> rowArgs{{}};
        for (size_t i = 0; i < argExprs.size(); ++i) {
            std::vector<Branch> nextRows;
            std::vector<std::vector<Value>> nextArgs;
            for (size_t r = 0; r < rows.size(); ++r) {
                for (Branch& ab : expand(argExprs[i], env)) {
                    if (!ab.value) continue;
                    std::optional<Value> conv;
                    if (rec.domain == TypeRecord::Domain::Product)
                        conv = convert_to_field(reg, *ab.value, rec.fields[i].typeName);
                    else if (auto inst = convert_to_type(reg, *ab.value, app.type))
                        conv = Value(std::move(*inst));
                    if (!conv) continue; // outside the field's domain
                    nextRows.push_back(mergeBranches(rows[r], ab));
                    auto extended = rowArgs[r];
                    extended.push_back(std::move(*conv));
                    nextArgs.push_back(std::move(extended));
                }
            }
            rows = std::move(nextRows);
            rowArgs = std::move(nextArgs);
            capBranches(rows, loc);
        }
        std::vector<Branch> out;
        for (size_t r = 0; r < rows.size(); ++r) {
            Branch b = rows[r];
            if (rec.domain == TypeRecord::Domain::Product) {
                b.value = EvalValue{Instance(app.type, rowArgs[r])};
            } else {
                // primitive domain: conversion happened per-arg
                b.value = EvalValue{rowArgs[r].empty() ? Instance(app.type, {})
                                                       : rowArgs[r][0].instance()};
            }
            out.push_back(std::move(b));
        }
        return out;
    }

    std::vector<Branch> expandNot(const ExprPtr& operand, const SourceLoc& loc, Environment& env) {
        std::vector<Branch> inner = expandQuantAware(operand, env);
        Branch combined{EvalValue{true}, {}, {}};
        for (Branch& b : inner) {
            if (!b.value) continue; // filtered: contributes nothing
            bool decidableTrue;
            std::optional<Instance> atom;
            if (b.value->isInst()) {
                atom = std::get<Instance>(b.value->v);
                decidableTrue = true;
            } else if (b.value->isBool()) {
                decidableTrue = std::get<bool>(b.value->v);
            } else {
                decidableTrue = true; // presence
            }
            if (!decidableTrue) continue;
            if (!b.neg.empty())
                throw EvalError(loc.str() + ": nested negation is not supported by the oracle");
            std::vector<Instance> atoms = b.pos;
            if (atom) atoms.push_back(*atom);
            if (atoms.empty()) {
                // an unconditionally true branch: the negation is false
                return {};
            }
            if (atoms.size() > 1)
                throw EvalError(loc.str() +
                                ": negation over a conjunction of several atoms is not "
                                "supported by the oracle");
            combined.neg.push_back(atoms[0]);
        }
        return {combined};
    }

    // expands, treating a top-level Exists as its witness branches
    std::vector<Branch> expandQuantAware(const ExprPtr& expr, Environment& env) {
        return expand(expr, env);
    }

    std::vector<Branch> expandQuant(const Quant& q, const SourceLoc& loc, Environment& env) {
        if (q.kind == QuantKind::Foreach)
            throw EvalError(loc.str() + ": Foreach outside an enumeration context");

        // witnesses of infinite types must themselves hold
        std::vector<Instance> witnessAtoms;
        auto withWitnesses = [&](Branch b) {
            b.pos.insert(b.pos.end(), witnessAtoms.begin(), witnessAtoms.end());
            return b;
        };

        std::vector<Branch> acc;
        if (q.kind == QuantKind::Exists) {
            std::function<void(size_t)> loop = [&](size_t idx) {
                if (idx == q.vars.size()) {
                    for (Branch& b : expand(q.body, env)) {
                        if (!b.value) continue;
                        if (branchTrue(b)) acc.push_back(withWitnesses(std::move(b)));
                    }
                    return;
                }
                bool needsTruth = enumerationNeedsTruth(q.vars[idx]);
                for (const Instance& w : universeOf(q.vars[idx])) {
                    size_t m = env.mark();
                    env.bind(q.vars[idx], Value(w));
                    if (needsTruth) witnessAtoms.push_back(w);
                    loop(idx + 1);
                    if (needsTruth) witnessAtoms.pop_back();
                    env.popTo(m);
                }
            };
            loop(0);
            capBranches(acc, loc);
            return acc;
        }

        // Forall: conjunction across all witnesses (branch product)
        acc = {Branch{EvalValue{true}, {}, {}}};
        std::function<void(size_t)> loop = [&](size_t idx) {
            if (idx == q.vars.size()) {
                std::vector<Branch> witness;
                for (Branch& b : expand(q.body, env)) {
                    if (!b.value) continue; // filtered elements drop out
                    if (branchTrue(b)) witness.push_back(withWitnesses(std::move(b)));
                }
                std::vector<Branch> next;
                for (const Branch& a : acc)
                    for (const Branch& w : witness) next.push_back(mergeBranches(a, w));
                acc = std::move(next);
                capBranches(acc, loc);
                return;
            }
            bool needsTruth = enumerationNeedsTruth(q.vars[idx]);
            for (const Instance& w : universeOf(q.vars[idx])) {
                size_t m = env.mark();
                env.bind(q.vars[idx], Value(w));
                if (needsTruth) witnessAtoms.push_back(w);
                loop(idx + 1);
                if (needsTruth) witnessAtoms.pop_back();
                env.popTo(m);
            }
        };
        for (const auto& v : q.vars)
            if (enumerationNeedsTruth(v))
                throw EvalError(loc.str() +
                                ": Forall over an infinite type is not supported by the oracle");
        loop(0);
        for (Branch& b : acc) b.value = EvalValue{true};
        return acc;
    }

    std::vector<Branch> expandBinary(const Binary& b, const SourceLoc& loc, Environment& env) {
        std::vector<Branch> out;
        if (b.op == BinOp::And || b.op == BinOp::Or) {
            std::vector<Branch> ls = expand(b.lhs, env);
            std::vector<Branch> rs = expand(b.rhs, env);
            if (b.op == BinOp::And) {
                for (Branch& l : ls) {
                    if (!branchTrue(l)) continue;
                    for (Branch r : rs) {
                        if (!branchTrue(r)) continue;
                        out.push_back(mergeBranches(l, r));
                    }
                }
            } else {
                for (Branch& l : ls)
                    if (branchTrue(l)) out.push_back(l);
                for (Branch& r : rs)
                    if (branchTrue(r)) out.push_back(r);
            }
            for (Branch& x : out) x.value = EvalValue{true};
            capBranches(out, loc);
            return out;
        }

        // value operators: compute concretely per branch pair
        for (Branch& l : expand(b.lhs, env)) {
            if (!l.value) continue;
            for (Branch& r : expand(b.rhs, env)) {
                if (!r.value) continue;
                if (!l.pos.empty() || !r.pos.empty() || !l.neg.empty() || !r.neg.empty())
                    throw EvalError(loc.str() +
                                    ": truth-dependent operands of a value operator are not "
                                    "supported by the oracle");
                Branch combined = mergeBranches(l, r);
                combined.value = evalConcrete(b.op, *l.value, *r.value, loc);
                out.push_back(std::move(combined));
            }
        }
        capBranches(out, loc);
        return out;
    }

    EvalValue evalConcrete(BinOp op, const EvalValue& l, const EvalValue& r, const SourceLoc& loc);

    void capBranches(std::vector<Branch>& v, const SourceLoc& loc) {
        if (v.size() > kBranchCap)
            throw UniverseTooLargeError(loc.str() + ": oracle grounding exploded");
    }
};

} // namespace

GroundProgram ground(const Registry& reg, const KnowledgeBase& base, int atomCap) {
    Grounder g{reg, {}, atomCap};
    for (const auto& [inst, pol] : base.additional()) g.seed(inst);
    for (const auto& [inst, pol] : base.asserted()) g.seed(inst);
    for (const Instance& inst : base.derived()) g.seed(inst);

    GroundProgram program;
    std::set<Instance> atomSet;

    for (const auto& [inst, pol] : base.additional())
        (pol ? program.forcedTrue : program.forcedFalse).insert(inst);
    for (const auto& [inst, pol] : base.asserted()) {
        if (program.forcedTrue.count(inst) || program.forcedFalse.count(inst))
            continue; // additional input wins
        if (pol == Polarity::True) program.forcedTrue.insert(inst);
        else program.forcedFalse.insert(inst);
    }

    // grow the universe until grounding is stable
    for (int round = 0;; ++round) {
        if (round > 64) throw UniverseTooLargeError("oracle universe did not stabilise");
        std::vector<GroundRule> rules;
        std::set<Instance> heads;

        for (const std::string& typeName : reg.declarationOrder()) {
            const TypeRecord& rec = reg.get(typeName);
            for (const ExprPtr& rule : rec.derivationRules) {
                if (!rec.conditionedBy.empty())
                    throw EvalError("Conditioned-by types are not supported by the oracle");
                Environment env;
                Evaluator scratch(reg, base); // free-variable discovery only
                std::vector<std::string> frees = scratch.freeVars(rule, env);

                std::vector<Instance> boundAtoms; // held-enumeration requirements
                std::function<void(size_t, const ExprPtr&)> drive = [&](size_t idx,
                                                                        const ExprPtr& expr) {
                    if (idx < frees.size()) {
                        bool needsTruth = g.enumerationNeedsTruth(frees[idx]);
                        for (const Instance& w : g.universeOf(frees[idx])) {
                            size_t m = env.mark();
                            env.bind(frees[idx], Value(w));
                            if (needsTruth) boundAtoms.push_back(w);
                            drive(idx + 1, expr);
                            if (needsTruth) boundAtoms.pop_back();
                            env.popTo(m);
                        }
                        return;
                    }
                    // peel explicit Foreach layers
                    if (auto* q = std::get_if<Quant>(&expr->node);
                        q && q->kind == QuantKind::Foreach) {
                        std::function<void(size_t)> loop = [&](size_t vi) {
                            if (vi == q->vars.size()) {
                                drive(idx, q->body);
                                return;
                            }
                            bool needsTruth = g.enumerationNeedsTruth(q->vars[vi]);
                            for (const Instance& w : g.universeOf(q->vars[vi])) {
                                size_t m = env.mark();
                                env.bind(q->vars[vi], Value(w));
                                if (needsTruth) boundAtoms.push_back(w);
                                loop(vi + 1);
                                if (needsTruth) boundAtoms.pop_back();
                                env.popTo(m);
                            }
                        };
                        loop(0);
                        return;
                    }
                    for (Branch& b : g.expand(expr, env)) {
                        if (!b.value) continue;
                        auto head = convert_to_type(reg, *b.value, typeName);
                        if (!head) continue;
                        std::vector<Instance> pos = b.pos;
                        pos.insert(pos.end(), boundAtoms.begin(), boundAtoms.end());
                        rules.push_back(GroundRule{*head, std::move(pos), b.neg});
                        heads.insert(*head);
                    }
                };
                drive(0, rule);
            }
        }

        bool grew = false;
        for (const Instance& h : heads)
            if (!g.universe[h.type].count(h)) {
                g.seed(h);
                grew = true;
            }
        if (grew) continue;

        program.rules = std::move(rules);
        for (const GroundRule& r : program.rules) {
            atomSet.insert(r.head);
            for (const auto& a : r.positiveBody) atomSet.insert(a);
            for (const auto& a : r.negativeBody) atomSet.insert(a);
        }
        for (const Instance& inst : program.forcedTrue) atomSet.insert(inst);
        break;
    }

    program.atoms.assign(atomSet.begin(), atomSet.end());
    if (static_cast<int>(program.atoms.size()) > atomCap)
        throw UniverseTooLargeError("oracle atom count " + std::to_string(program.atoms.size()) +
                                    " exceeds the cap of " + std::to_string(atomCap));
    return program;
}

EvalValue Grounder::evalConcrete(BinOp op, const EvalValue& l, const EvalValue& r,
                                 const SourceLoc& loc) {
    auto litOf = [](const EvalValue& v) -> std::optional<Literal> {
        if (v.isNum()) return Literal(std::get<int64_t>(v.v));
        if (v.isStr()) return Literal(std::get<std::string>(v.v));
        const Instance* cur = v.isInst() ? &std::get<Instance>(v.v) : nullptr;
        while (cur && cur->args.size() == 1) {
            if (cur->args[0].isLiteral()) return cur->args[0].literal();
            cur = &cur->args[0].instance();
        }
        return std::nullopt;
    };

    EvalValue out;
    if (op == BinOp::Eq || op == BinOp::Ne) {
        bool eq;
        if (l.isInst() && r.isInst() &&
            std::get<Instance>(l.v).type == std::get<Instance>(r.v).type) {
            eq = std::get<Instance>(l.v) == std::get<Instance>(r.v);
        } else {
            // across types, identity is payload identity
            auto ll = litOf(l), rl = litOf(r);
            eq = ll && rl && *ll == *rl;
        }
        out.v = op == BinOp::Eq ? eq : !eq;
        return out;
    }

    auto ll = litOf(l), rl = litOf(r);
    if (!ll || !rl || !ll->isNum() || !rl->isNum())
        throw EvalError(loc.str() + ": oracle value operators need integer operands");
    int64_t a = ll->num(), b = rl->num(), res = 0;
    switch (op) {
        case BinOp::Lt: out.v = a < b; return out;
        case BinOp::Le: out.v = a <= b; return out;
        case BinOp::Gt: out.v = a > b; return out;
        case BinOp::Ge: out.v = a >= b; return out;
        case BinOp::Add: res = a + b; break;
        case BinOp::Sub: res = a - b; break;
        case BinOp::Mul: res = a * b; break;
        case BinOp::Div:
            if (b == 0) throw EvalError(loc.str() + ": division by zero");
            res = a / b;
            break;
        default: throw EvalError(loc.str() + ": unsupported oracle operator");
    }
    out.v = res;
    return out;
}

StableModelReport enumerate_stable_models(const GroundProgram& program) {
    StableModelReport report;
    size_t n = program.atoms.size();
    if (n > 24) throw UniverseTooLargeError("too many atoms for subset enumeration");

    std::map<Instance, size_t> index;
    for (size_t i = 0; i < n; ++i) index[program.atoms[i]] = i;

    struct BitRule {
        size_t head;
        uint32_t pos = 0, neg = 0;
    };
    std::vector<BitRule> rules;
    uint32_t forcedTrue = 0, forcedFalse = 0;
    for (const Instance& inst : program.forcedTrue)
        if (auto it = index.find(inst); it != index.end()) forcedTrue |= 1u << it->second;
    for (const Instance& inst : program.forcedFalse)
        if (auto it = index.find(inst); it != index.end()) forcedFalse |= 1u << it->second;

    for (const GroundRule& r : program.rules) {
        BitRule br;
        br.head = index.at(r.head);
        bool dead = false;
        for (const Instance& a : r.positiveBody) {
            auto it = index.find(a);
            if (it == index.end()) {
                dead = true; // atom can never hold
                break;
            }
            br.pos |= 1u << it->second;
        }
        if (dead) continue;
        for (const Instance& a : r.negativeBody)
            if (auto it = index.find(a); it != index.end()) br.neg |= 1u << it->second;
        // asserted falsities trump derivation of the head
        if (forcedFalse & (1u << br.head)) continue;
        if (br.pos & forcedFalse) continue;
        br.neg &= ~forcedFalse;
        rules.push_back(br);
    }
    // facts
    for (size_t i = 0; i < n; ++i)
        if (forcedTrue & (1u << i)) rules.push_back(BitRule{i, 0, 0});

    uint64_t total = uint64_t{1} << n;
    for (uint64_t mask = 0; mask < total; ++mask) {
        uint32_t m = static_cast<uint32_t>(mask);
        if (m & forcedFalse) continue;
        if ((m & forcedTrue) != forcedTrue) continue;
        // least model of the reduct
        uint32_t least = 0;
        for (bool changed = true; changed;) {
            changed = false;
            for (const BitRule& r : rules) {
                if (r.neg & m) continue; // dropped by the reduct
                if ((r.pos & least) != r.pos) continue;
                uint32_t bit = 1u << r.head;
                if (!(least & bit)) {
                    least |= bit;
                    changed = true;
                }
            }
        }
        if (least == m) {
            std::set<Instance> model;
            for (size_t i = 0; i < n; ++i)
                if (m & (1u << i)) model.insert(program.atoms[i]);
            report.models.push_back(std::move(model));
        }
    }

    report.verdict = report.models.empty()        ? StableModelReport::Verdict::Zero
                     : report.models.size() == 1 ? StableModelReport::Verdict::Unique
                                                 : StableModelReport::Verdict::Multiple;
    return report;
}

} // namespace normspec
