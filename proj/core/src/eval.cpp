#include "normspec/eval.hpp"

#include <algorithm>
#include <functional>
#include <set>

#include "normspec/diag.hpp"
#include "normspec/printer.hpp"

namespace normspec {

namespace {

constexpr int kConvertDepthCap = 16;

[[noreturn]] void typeErrorAt(const SourceLoc& loc, const std::string& msg) {
    throw TypeError(loc.str() + ": " + msg);
}

} // namespace

Evaluator::Evaluator(const Registry& reg, const KnowledgeBase& kb, const SemanticsOptions& opts)
    : reg_(reg), kb_(kb), opts_(opts) {}

const Registry::DomainInfo& Evaluator::domainInfo(const std::string& typeName) {
    auto it = domainCache_.find(typeName);
    if (it == domainCache_.end()) it = domainCache_.emplace(typeName, reg_.domainOf(typeName)).first;
    return it->second;
}

const std::vector<Instance>& Evaluator::enumerateType(const std::string& typeName) {
    auto it = enumCache_.find(typeName);
    if (it != enumCache_.end()) return it->second;

    const TypeRecord& rec = reg_.get(typeName);
    std::vector<Instance> result;

    if (typeName == kActorType && rec.domain == TypeRecord::Domain::String && !rec.open &&
        rec.fields.empty()) {
        std::set<Instance> acc;
        for (const std::string& s : kb_.activeStrings(reg_))
            acc.insert(Instance(typeName, {Value(Literal(s))}));
        for (Instance& held : kb_.heldOfType(reg_, typeName)) acc.insert(std::move(held));
        result.assign(acc.begin(), acc.end());
    } else {
        const Registry::DomainInfo& dom = domainInfo(typeName);
        if (dom.finite) {
            result = dom.instances;
        } else if (rec.open) {
            // request-scoped input defines the extension when present;
            // scenario assertions substitute for it during development
            if (kb_.hasAdditionalForType(typeName))
                result = kb_.additionalTrueOfType(typeName);
            else if (kb_.hasAssertedForType(typeName))
                result = kb_.assertedTrueOfType(typeName);
            else
                throw OpenEnumerationInterrupt(typeName);
        } else {
            result = kb_.heldOfType(reg_, typeName);
        }
    }
    return enumCache_.emplace(typeName, std::move(result)).first->second;
}

Truth Evaluator::holdsTruth(const Instance& inst) const { return kb_.truthOf(reg_, inst); }

bool Evaluator::truthify(const EvalValue& v) {
    if (v.isBool()) return std::get<bool>(v.v);
    if (v.isInst()) {
        Truth t = holdsTruth(std::get<Instance>(v.v));
        if (t == Truth::Unknown)
            throw UnknownInstanceInterrupt(to_string(std::get<Instance>(v.v)));
        return t == Truth::True;
    }
    // bare numbers/strings act as presence markers in Boolean positions
    return true;
}

int64_t Evaluator::toNum(const EvalValue& v, const SourceLoc& loc) const {
    if (v.isNum()) return std::get<int64_t>(v.v);
    if (v.isInst()) {
        const Instance* cur = &std::get<Instance>(v.v);
        for (int depth = 0; depth < kConvertDepthCap; ++depth) {
            if (cur->args.size() != 1) break;
            const Value& a = cur->args[0];
            if (a.isLiteral()) {
                if (a.literal().isNum()) return a.literal().num();
                break;
            }
            cur = &a.instance();
        }
    }
    if (v.isSentinel()) typeErrorAt(loc, "empty-aggregate sentinel used in arithmetic");
    typeErrorAt(loc, "expected an integer value");
}

namespace {

std::optional<std::string> toStr(const EvalValue& v) {
    if (v.isStr()) return std::get<std::string>(v.v);
    if (v.isInst()) {
        const Instance* cur = &std::get<Instance>(v.v);
        for (int depth = 0; depth < kConvertDepthCap; ++depth) {
            if (cur->args.size() != 1) return std::nullopt;
            const Value& a = cur->args[0];
            if (a.isLiteral())
                return a.literal().isStr() ? std::optional<std::string>(a.literal().str())
                                           : std::nullopt;
            cur = &a.instance();
        }
    }
    return std::nullopt;
}

std::optional<int64_t> tryNum(const EvalValue& v) {
    if (v.isNum()) return std::get<int64_t>(v.v);
    if (v.isInst()) {
        const Instance* cur = &std::get<Instance>(v.v);
        for (int depth = 0; depth < kConvertDepthCap; ++depth) {
            if (cur->args.size() != 1) return std::nullopt;
            const Value& a = cur->args[0];
            if (a.isLiteral())
                return a.literal().isNum() ? std::optional<int64_t>(a.literal().num())
                                           : std::nullopt;
            cur = &a.instance();
        }
    }
    return std::nullopt;
}

// -1 / 0 / +1 with +/-infinity sentinels
int cmpNumeric(const EvalValue& a, const EvalValue& b, const SourceLoc& loc) {
    auto rank = [&](const EvalValue& v) -> int {
        return v.isSentinel() ? std::get<Sentinel>(v.v).sign : 0;
    };
    int ra = rank(a), rb = rank(b);
    if (ra != 0 || rb != 0) {
        if (ra != rb) return ra < rb ? -1 : 1;
        return 0;
    }
    auto na = tryNum(a), nb = tryNum(b);
    if (na && nb) return *na < *nb ? -1 : (*na > *nb ? 1 : 0);
    auto sa = toStr(a), sb = toStr(b);
    if (sa && sb) return sa->compare(*sb) < 0 ? -1 : (*sa > *sb ? 1 : 0);
    typeErrorAt(loc, "operands of a comparison must both be integers or both strings");
}

bool valueEq(const EvalValue& a, const EvalValue& b) {
    if (a.isInst() && b.isInst()) {
        const Instance& ia = std::get<Instance>(a.v);
        const Instance& ib = std::get<Instance>(b.v);
        if (ia.type == ib.type) return ia == ib;
        // across types, identity is payload identity: auctioneer(Amy) equals
        // bidder(Amy)
        if (auto na = tryNum(a), nb = tryNum(b); na && nb) return *na == *nb;
        if (auto sa = toStr(a), sb = toStr(b); sa && sb) return *sa == *sb;
        return false;
    }
    if (a.isBool() || b.isBool())
        return a.isBool() && b.isBool() && std::get<bool>(a.v) == std::get<bool>(b.v);
    if (a.isSentinel() || b.isSentinel())
        return a.isSentinel() && b.isSentinel() &&
               std::get<Sentinel>(a.v) == std::get<Sentinel>(b.v);
    if (auto na = tryNum(a), nb = tryNum(b); na && nb) return *na == *nb;
    if (auto sa = toStr(a), sb = toStr(b); sa && sb) return *sa == *sb;
    return false;
}

} // namespace

Evaluator::CtorPlan Evaluator::planCtor(const CtorApp& app, const SourceLoc& loc) const {
    CtorPlan plan;
    plan.rec = &reg_.get(app.type);
    const auto& fields = plan.rec->fields;

    std::vector<ExprPtr> positional;
    std::map<std::string, ExprPtr> named;
    for (const CtorArg& a : app.args) {
        if (a.field.empty()) {
            positional.push_back(a.value);
        } else {
            if (plan.rec->fieldIndex(a.field) < 0)
                typeErrorAt(loc, "'" + app.type + "' has no field '" + a.field + "'");
            if (!named.emplace(a.field, a.value).second)
                typeErrorAt(loc, "field '" + a.field + "' given twice");
        }
    }
    if (fields.empty() && plan.rec->domain != TypeRecord::Domain::Product &&
        plan.rec->domain != TypeRecord::Domain::Unit) {
        // primitive-domain constructor: bidder("Alice"), number(3); a bare
        // `bid()` stands for the type-named variable, like any missing field
        if (positional.size() > 1 || !named.empty())
            typeErrorAt(loc, "'" + app.type + "' takes a single value");
        plan.args.push_back(positional.empty() ? makeExpr<VarRef>(loc, app.type) : positional[0]);
        return plan;
    }

    size_t posIdx = 0;
    for (const auto& f : fields) {
        if (auto it = named.find(f.label); it != named.end()) {
            plan.args.push_back(it->second);
        } else if (posIdx < positional.size()) {
            plan.args.push_back(positional[posIdx++]);
        } else {
            // missing arguments are implicitly the name of the missing field
            plan.args.push_back(makeExpr<VarRef>(loc, f.label));
        }
    }
    if (posIdx < positional.size())
        typeErrorAt(loc, "too many arguments for '" + app.type + "'");
    return plan;
}

EvalValue value_to_eval(const Value& v) {
    EvalValue out;
    if (v.isLiteral()) {
        if (v.literal().isNum()) out.v = v.literal().num();
        else out.v = v.literal().str();
    } else {
        out.v = v.instance();
    }
    return out;
}

std::optional<Value> convert_to_field(const Registry& reg, const EvalValue& val,
                                      const std::string& fieldType, int depth) {
    if (depth > kConvertDepthCap) return std::nullopt;
    auto base = reg.resolveVarType(fieldType);
    if (!base) throw TypeError("field type '" + fieldType + "' names no declared type");
    auto inst = convert_to_type(reg, val, *base, depth);
    if (!inst) return std::nullopt;
    return Value(std::move(*inst));
}

std::optional<Instance> convert_to_type(const Registry& reg, const EvalValue& val,
                                        const std::string& typeName, int depth) {
    if (depth > kConvertDepthCap) return std::nullopt;
    const TypeRecord& rec = reg.get(typeName);

    if (val.isInst()) {
        const Instance& inst = std::get<Instance>(val.v);
        if (inst.type == typeName) return inst;
        // rebuild field-wise when arities line up
        if (rec.domain == TypeRecord::Domain::Product && inst.args.size() == rec.fields.size()) {
            std::vector<Value> args;
            bool ok = true;
            for (size_t i = 0; i < inst.args.size(); ++i) {
                auto conv = convert_to_field(reg, value_to_eval(inst.args[i]),
                                             rec.fields[i].typeName, depth + 1);
                if (!conv) {
                    ok = false;
                    break;
                }
                args.push_back(std::move(*conv));
            }
            if (ok) return Instance(typeName, std::move(args));
        }
        // unwrap a single payload and retry: actor("Alice") -> bidder("Alice")
        if (inst.args.size() == 1)
            return convert_to_type(reg, value_to_eval(inst.args[0]), typeName, depth + 1);
        return std::nullopt;
    }

    if (val.isNum() || val.isStr()) {
        Literal lit = val.isNum() ? Literal(std::get<int64_t>(val.v))
                                  : Literal(std::get<std::string>(val.v));
        switch (rec.domain) {
            case TypeRecord::Domain::String:
                return lit.isStr() ? std::optional<Instance>(Instance(typeName, {Value(lit)}))
                                   : std::nullopt;
            case TypeRecord::Domain::Int:
                return lit.isNum() ? std::optional<Instance>(Instance(typeName, {Value(lit)}))
                                   : std::nullopt;
            case TypeRecord::Domain::Literals: {
                bool member = std::binary_search(rec.literals.begin(), rec.literals.end(), lit);
                if (!member) return std::nullopt;
                return Instance(typeName, {Value(lit)});
            }
            case TypeRecord::Domain::Unit:
                return std::nullopt;
            case TypeRecord::Domain::Product:
                if (rec.fields.size() == 1) {
                    auto conv = convert_to_field(reg, val, rec.fields[0].typeName, depth + 1);
                    if (!conv) return std::nullopt;
                    return Instance(typeName, {std::move(*conv)});
                }
                return std::nullopt;
        }
    }
    if (val.isSentinel())
        throw EvalError("an empty-aggregate sentinel cannot be stored in an instance of '" +
                        typeName + "'");
    return std::nullopt; // bool
}

std::optional<Value> Evaluator::convertToField(const EvalValue& val, const std::string& fieldType,
                                               int depth) {
    return convert_to_field(reg_, val, fieldType, depth);
}

std::optional<Instance> Evaluator::convertToType(const EvalValue& val, const std::string& typeName,
                                                 int depth) {
    return convert_to_type(reg_, val, typeName, depth);
}

std::optional<EvalValue> Evaluator::evalArg(const ExprPtr& arg, Environment& env) {
    // A bare identifier in argument position denotes a string atom unless it
    // is a bound variable or names a declared type.
    if (auto* ref = std::get_if<VarRef>(&arg->node)) {
        if (!env.bound(ref->name) && !reg_.resolveVarType(ref->name)) {
            EvalValue out;
            out.v = ref->name;
            return out;
        }
    }
    return evalValue(arg, env);
}

std::optional<Instance> Evaluator::evalCtor(const CtorApp& app, const SourceLoc& loc,
                                            Environment& env) {
    CtorPlan plan = planCtor(app, loc);
    if (plan.rec->domain != TypeRecord::Domain::Product) {
        // primitive or unit domain
        if (plan.args.empty()) {
            if (plan.rec->domain == TypeRecord::Domain::Unit) return Instance(app.type, {});
            typeErrorAt(loc, "'" + app.type + "' requires a value");
        }
        auto v = evalArg(plan.args[0], env);
        if (!v) return std::nullopt;
        return convertToType(*v, app.type);
    }
    std::vector<Value> args;
    for (size_t i = 0; i < plan.args.size(); ++i) {
        auto v = evalArg(plan.args[i], env);
        if (!v) return std::nullopt;
        auto conv = convertToField(*v, plan.rec->fields[i].typeName);
        if (!conv) return std::nullopt; // outside the field's domain
        args.push_back(std::move(*conv));
    }
    return Instance(app.type, std::move(args));
}

void Evaluator::bindFields(const Instance& inst, Environment& env) const {
    const TypeRecord& rec = reg_.get(inst.type);
    for (size_t i = 0; i < rec.fields.size() && i < inst.args.size(); ++i)
        env.bind(rec.fields[i].label, inst.args[i]);
}

bool Evaluator::quantLoop(const std::vector<std::string>& vars, size_t idx, Environment& env,
                          const std::function<bool()>& atLeaf) {
    if (idx == vars.size()) return atLeaf();
    auto base = reg_.resolveVarType(vars[idx]);
    if (!base) throw TypeError("'" + vars[idx] + "' names no declared type");
    // map entries are reference-stable, so nested enumerations cannot
    // invalidate this
    const std::vector<Instance>& domain = enumerateType(*base);
    for (const Instance& inst : domain) {
        size_t m = env.mark();
        env.bind(vars[idx], Value(inst));
        bool keepGoing = quantLoop(vars, idx + 1, env, atLeaf);
        env.popTo(m);
        if (!keepGoing) return false;
    }
    return true;
}

std::optional<EvalValue> Evaluator::evalQuant(const Quant& q, const SourceLoc& loc,
                                              Environment& env) {
    if (q.kind == QuantKind::Foreach)
        throw EvalError(loc.str() + ": Foreach outside an enumeration context");

    bool result = q.kind == QuantKind::Forall; // identity of conjunction/disjunction
    quantLoop(q.vars, 0, env, [&]() {
        auto v = evalValue(q.body, env);
        if (!v) return true; // guard filtered this element out
        bool b = truthify(*v);
        if (q.kind == QuantKind::Forall && !b) {
            result = false;
            return false;
        }
        if (q.kind == QuantKind::Exists && b) {
            result = true;
            return false;
        }
        return true;
    });
    EvalValue out;
    out.v = result;
    return out;
}

std::optional<EvalValue> Evaluator::evalAggregate(const Aggregate& agg, const SourceLoc& loc,
                                                  Environment& env) {
    const Quant* foreach = nullptr;
    if (auto* q = std::get_if<Quant>(&agg.body->node); q && q->kind == QuantKind::Foreach)
        foreach = q;
    if (!foreach)
        throw EvalError(loc.str() + ": aggregates take a Foreach enumeration");

    int64_t count = 0, sum = 0;
    bool any = false;
    int64_t best = 0;
    quantLoop(foreach->vars, 0, env, [&]() {
        auto v = evalValue(foreach->body, env);
        if (!v) return true;
        ++count;
        if (agg.kind != AggKind::Count) {
            int64_t n = toNum(*v, loc);
            if (agg.kind == AggKind::Sum) {
                if (__builtin_add_overflow(sum, n, &sum))
                    throw EvalError(loc.str() + ": integer overflow in Sum");
            } else if (!any || (agg.kind == AggKind::Max ? n > best : n < best)) {
                best = n;
            }
            any = true;
        }
        return true;
    });

    EvalValue out;
    switch (agg.kind) {
        case AggKind::Count: out.v = count; break;
        case AggKind::Sum: out.v = sum; break;
        case AggKind::Max:
        case AggKind::Min:
            if (!any) {
                if (opts_.emptyAggregateError)
                    throw EvalError(loc.str() + ": Max/Min over an empty enumeration");
                out.v = Sentinel{agg.kind == AggKind::Max ? -1 : +1};
            } else {
                out.v = best;
            }
            break;
    }
    return out;
}

std::optional<EvalValue> Evaluator::evalBinary(const Binary& b, const SourceLoc& loc,
                                               Environment& env) {
    auto lhs = evalValue(b.lhs, env);
    auto rhs = evalValue(b.rhs, env);
    EvalValue out;

    switch (b.op) {
        case BinOp::Or:
        case BinOp::And: {
            // strict over True/False: both sides always evaluated
            bool l = lhs ? truthify(*lhs) : false;
            bool r = rhs ? truthify(*rhs) : false;
            out.v = b.op == BinOp::Or ? (l || r) : (l && r);
            return out;
        }
        default:
            break;
    }
    if (!lhs || !rhs) return std::nullopt;

    switch (b.op) {
        case BinOp::Eq: out.v = valueEq(*lhs, *rhs); return out;
        case BinOp::Ne: out.v = !valueEq(*lhs, *rhs); return out;
        case BinOp::Lt: out.v = cmpNumeric(*lhs, *rhs, loc) < 0; return out;
        case BinOp::Le: out.v = cmpNumeric(*lhs, *rhs, loc) <= 0; return out;
        case BinOp::Gt: out.v = cmpNumeric(*lhs, *rhs, loc) > 0; return out;
        case BinOp::Ge: out.v = cmpNumeric(*lhs, *rhs, loc) >= 0; return out;
        default:
            break;
    }

    int64_t l = toNum(*lhs, loc), r = toNum(*rhs, loc), res = 0;
    switch (b.op) {
        case BinOp::Add:
            if (__builtin_add_overflow(l, r, &res)) throw EvalError(loc.str() + ": integer overflow");
            break;
        case BinOp::Sub:
            if (__builtin_sub_overflow(l, r, &res)) throw EvalError(loc.str() + ": integer overflow");
            break;
        case BinOp::Mul:
            if (__builtin_mul_overflow(l, r, &res)) throw EvalError(loc.str() + ": integer overflow");
            break;
        case BinOp::Div:
            if (r == 0) throw EvalError(loc.str() + ": division by zero");
            res = l / r; // truncates toward zero
            break;
        default:
            break;
    }
    out.v = res;
    return out;
}

std::optional<EvalValue> Evaluator::evalValue(const ExprPtr& expr, Environment& env) {
    const SourceLoc& loc = expr->loc;
    return std::visit(
        [&](const auto& node) -> std::optional<EvalValue> {
            using T = std::decay_t<decltype(node)>;
            EvalValue out;
            if constexpr (std::is_same_v<T, BoolLit>) {
                out.v = node.value;
                return out;
            } else if constexpr (std::is_same_v<T, IntLitExpr>) {
                out.v = node.value;
                return out;
            } else if constexpr (std::is_same_v<T, StrLitExpr>) {
                out.v = node.text;
                return out;
            } else if constexpr (std::is_same_v<T, VarRef>) {
                const Value* v = env.lookup(node.name);
                if (!v) throw EvalError(loc.str() + ": unbound variable '" + node.name + "'");
                if (v->isLiteral()) {
                    if (v->literal().isNum()) out.v = v->literal().num();
                    else out.v = v->literal().str();
                } else {
                    out.v = v->instance();
                }
                return out;
            } else if constexpr (std::is_same_v<T, CtorApp>) {
                auto inst = evalCtor(node, loc, env);
                if (!inst) return std::nullopt;
                out.v = std::move(*inst);
                return out;
            } else if constexpr (std::is_same_v<T, Proj>) {
                auto base = evalValue(node.base, env);
                if (!base) return std::nullopt;
                if (!base->isInst()) typeErrorAt(loc, "projection on a non-instance value");
                const Instance& inst = std::get<Instance>(base->v);
                const TypeRecord& rec = reg_.get(inst.type);
                int idx = rec.fieldIndex(node.field);
                if (idx < 0 || static_cast<size_t>(idx) >= inst.args.size())
                    typeErrorAt(loc, "'" + inst.type + "' has no field '" + node.field + "'");
                const Value& v = inst.args[static_cast<size_t>(idx)];
                if (v.isLiteral()) {
                    if (v.literal().isNum()) out.v = v.literal().num();
                    else out.v = v.literal().str();
                } else {
                    out.v = v.instance();
                }
                return out;
            } else if constexpr (std::is_same_v<T, NotExpr>) {
                auto v = evalValue(node.operand, env);
                out.v = !(v && truthify(*v));
                return out;
            } else if constexpr (std::is_same_v<T, Binary>) {
                return evalBinary(node, loc, env);
            } else if constexpr (std::is_same_v<T, BuiltinCall>) {
                auto v = evalValue(node.arg, env);
                if (!v) return std::nullopt;
                if (!v->isInst()) typeErrorAt(loc, "builtin check requires an instance");
                const Instance& inst = std::get<Instance>(v->v);
                if (node.kind == BuiltinKind::Holds) {
                    Truth t = holdsTruth(inst);
                    if (t == Truth::Unknown) throw UnknownInstanceInterrupt(to_string(inst));
                    out.v = t == Truth::True;
                } else if (node.kind == BuiltinKind::Enabled) {
                    out.v = enabled(inst);
                } else {
                    const TypeRecord& rec = reg_.get(inst.type);
                    if (rec.kind == TypeKind::Duty) {
                        out.v = violatedDutyIndex(inst) >= 0;
                    } else {
                        out.v = !enabled(inst);
                    }
                }
                return out;
            } else if constexpr (std::is_same_v<T, Quant>) {
                return evalQuant(node, loc, env);
            } else if constexpr (std::is_same_v<T, Aggregate>) {
                return evalAggregate(node, loc, env);
            } else if constexpr (std::is_same_v<T, Guarded>) {
                auto g = evalValue(node.guard, env);
                if (!g || !truthify(*g)) return std::nullopt;
                return evalValue(node.value, env);
            }
        },
        expr->node);
}

bool Evaluator::evalBool(const ExprPtr& expr, Environment& env) {
    auto v = evalValue(expr, env);
    return v && truthify(*v);
}

void Evaluator::collectFree(const ExprPtr& expr, const Environment& env,
                            std::vector<std::string>& bound, std::vector<std::string>& out) const {
    auto isBound = [&](const std::string& name) {
        if (env.bound(name)) return true;
        return std::find(bound.begin(), bound.end(), name) != bound.end();
    };
    auto add = [&](const std::string& name) {
        if (isBound(name)) return;
        if (std::find(out.begin(), out.end(), name) == out.end()) out.push_back(name);
    };

    std::visit(
        [&](const auto& node) {
            using T = std::decay_t<decltype(node)>;
            if constexpr (std::is_same_v<T, VarRef>) {
                // all-fields-bound type references construct, they do not
                // enumerate
                if (!isBound(node.name)) {
                    if (auto base = reg_.resolveVarType(node.name); base && *base == node.name) {
                        const TypeRecord& rec = reg_.get(*base);
                        if (rec.domain == TypeRecord::Domain::Product && !rec.fields.empty()) {
                            bool allBound = true;
                            for (const auto& f : rec.fields) allBound &= isBound(f.label);
                            if (allBound) return;
                        }
                    }
                }
                add(node.name);
            } else if constexpr (std::is_same_v<T, CtorApp>) {
                CtorPlan plan = planCtor(node, expr->loc);
                for (const auto& arg : plan.args) {
                    // direct bare identifiers may be string atoms, not variables
                    if (auto* ref = std::get_if<VarRef>(&arg->node)) {
                        if (!isBound(ref->name) && !reg_.resolveVarType(ref->name)) continue;
                        add(ref->name);
                        continue;
                    }
                    collectFree(arg, env, bound, out);
                }
            } else if constexpr (std::is_same_v<T, Proj>) {
                collectFree(node.base, env, bound, out);
            } else if constexpr (std::is_same_v<T, NotExpr>) {
                collectFree(node.operand, env, bound, out);
            } else if constexpr (std::is_same_v<T, Binary>) {
                collectFree(node.lhs, env, bound, out);
                collectFree(node.rhs, env, bound, out);
            } else if constexpr (std::is_same_v<T, BuiltinCall>) {
                collectFree(node.arg, env, bound, out);
            } else if constexpr (std::is_same_v<T, Quant>) {
                size_t n = bound.size();
                for (const auto& v : node.vars) bound.push_back(v);
                collectFree(node.body, env, bound, out);
                bound.resize(n);
            } else if constexpr (std::is_same_v<T, Aggregate>) {
                collectFree(node.body, env, bound, out);
            } else if constexpr (std::is_same_v<T, Guarded>) {
                collectFree(node.value, env, bound, out);
                collectFree(node.guard, env, bound, out);
            }
        },
        expr->node);
}

std::vector<std::string> Evaluator::freeVars(const ExprPtr& expr, const Environment& env) {
    std::vector<std::string> bound, out;
    collectFree(expr, env, bound, out);
    return out;
}

// A bare type reference whose fields are all bound stands for the implicit
// constructor application (`Creates [valid marriage]` builds the instance for
// the bound spouses); with unbound fields it enumerates the held set instead.
const TypeRecord* Evaluator::ctorish(const std::string& varName, const Environment& env) const {
    if (env.bound(varName)) return nullptr;
    auto base = reg_.resolveVarType(varName);
    if (!base || *base != varName) return nullptr;
    const TypeRecord& rec = reg_.get(*base);
    if (rec.domain != TypeRecord::Domain::Product || rec.fields.empty()) return nullptr;
    for (const auto& f : rec.fields)
        if (!env.bound(f.label)) return nullptr;
    return &rec;
}

void Evaluator::expandBound(const ExprPtr& expr, Environment& env, const std::string* targetType,
                            std::set<Instance>& sink) {
    if (auto* ref = std::get_if<VarRef>(&expr->node)) {
        if (ctorish(ref->name, env)) {
            CtorApp app{ref->name, {}};
            auto inst = evalCtor(app, expr->loc, env);
            if (!inst) return;
            if (!targetType) {
                sink.insert(std::move(*inst));
                return;
            }
            EvalValue v;
            v.v = std::move(*inst);
            if (auto conv = convertToType(v, *targetType)) sink.insert(std::move(*conv));
            return;
        }
    }
    if (auto* q = std::get_if<Quant>(&expr->node); q && q->kind == QuantKind::Foreach) {
        quantLoop(q->vars, 0, env, [&]() {
            expandBound(q->body, env, targetType, sink);
            return true;
        });
        return;
    }
    if (auto* g = std::get_if<Guarded>(&expr->node)) {
        auto guard = evalValue(g->guard, env);
        if (!guard || !truthify(*guard)) return;
        expandBound(g->value, env, targetType, sink);
        return;
    }
    auto v = evalValue(expr, env);
    if (!v) return;
    if (!targetType) {
        if (!v->isInst())
            throw TypeError(expr->loc.str() + ": expression does not denote instances");
        sink.insert(std::get<Instance>(v->v));
        return;
    }
    auto inst = convertToType(*v, *targetType);
    if (inst) sink.insert(std::move(*inst));
}

std::vector<Instance> Evaluator::expandInstances(const ExprPtr& expr, Environment& env,
                                                 const std::string* targetType) {
    std::set<Instance> sink;
    std::vector<std::string> frees = freeVars(expr, env);
    std::function<void(size_t)> loop = [&](size_t idx) {
        if (idx == frees.size()) {
            expandBound(expr, env, targetType, sink);
            return;
        }
        auto base = reg_.resolveVarType(frees[idx]);
        if (!base) throw TypeError("'" + frees[idx] + "' names no declared type");
        const std::vector<Instance>& domain = enumerateType(*base);
        for (const Instance& inst : domain) {
            size_t m = env.mark();
            env.bind(frees[idx], Value(inst));
            loop(idx + 1);
            env.popTo(m);
        }
    };
    loop(0);
    return {sink.begin(), sink.end()};
}

bool Evaluator::evalBoolAnyBinding(const ExprPtr& expr, Environment& env) {
    std::vector<std::string> frees = freeVars(expr, env);
    if (frees.empty()) return evalBool(expr, env);
    bool found = false;
    std::function<bool(size_t)> loop = [&](size_t idx) -> bool { // returns keep-going
        if (idx == frees.size()) {
            auto v = evalValue(expr, env);
            if (v && truthify(*v)) {
                found = true;
                return false;
            }
            return true;
        }
        auto base = reg_.resolveVarType(frees[idx]);
        if (!base) throw TypeError("'" + frees[idx] + "' names no declared type");
        const std::vector<Instance>& domain = enumerateType(*base);
        for (const Instance& inst : domain) {
            size_t m = env.mark();
            env.bind(frees[idx], Value(inst));
            bool keep = loop(idx + 1);
            env.popTo(m);
            if (!keep) return false;
        }
        return true;
    };
    loop(0);
    return found;
}

bool Evaluator::enabled(const Instance& inst) {
    const TypeRecord& rec = reg_.get(inst.type);
    if (!rec.isPhysical) {
        Truth t = holdsTruth(inst);
        if (t == Truth::Unknown) throw UnknownInstanceInterrupt(to_string(inst));
        if (t != Truth::True) return false;
    }
    Environment env;
    bindFields(inst, env);
    for (const ExprPtr& cond : rec.conditionedBy)
        if (!evalBoolAnyBinding(cond, env)) return false;
    return true;
}

int Evaluator::violatedDutyIndex(const Instance& inst) {
    const TypeRecord& rec = reg_.get(inst.type);
    if (holdsTruth(inst) != Truth::True) return -1;
    Environment env;
    bindFields(inst, env);
    for (size_t i = 0; i < rec.violatedWhen.size(); ++i)
        if (evalBoolAnyBinding(rec.violatedWhen[i], env)) return static_cast<int>(i);
    return -1;
}

} // namespace normspec
