#include "normspec/asp.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>
#include <sstream>

#include "normspec/diag.hpp"
#include "normspec/parser.hpp"

namespace normspec {

namespace {

struct UnsupportedExpression : Error {
    using Error::Error;
};

std::string quoted(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    out += '"';
    return out;
}

} // namespace

std::string asp_mangle(const std::string& name) {
    std::string out;
    for (char c : name) {
        if (std::isalnum(static_cast<unsigned char>(c)) || c == '_') out += c;
        else if (c == '-' || c == ' ' || c == '\'') out += '_';
        // brackets of bracketed identifiers vanish
    }
    if (out.empty() || std::isdigit(static_cast<unsigned char>(out[0]))) out = "t_" + out;
    return out;
}

namespace {

// Per-rule translation state. Variables allocate capital letters in first-use
// order so the worked derivation example renders with stable letters.
struct Scope {
    explicit Scope(const Registry& r) : reg(r) {}
    const Registry& reg;
    int next = 0;
    std::map<std::string, std::pair<std::string, std::string>> vars; // name -> (term, type)
    std::vector<std::string> order;                                  // allocation order
    std::set<std::string> locals; // quantifier/aggregate-local variables

    std::string freshVar() {
        std::string v;
        if (next < 26) v = std::string(1, static_cast<char>('A' + next));
        else v = "V" + std::to_string(next);
        ++next;
        return v;
    }

    std::string patternFor(const std::string& typeName) {
        const TypeRecord& rec = reg.get(typeName);
        std::string m = asp_mangle(typeName);
        switch (rec.domain) {
            case TypeRecord::Domain::Unit:
                return m;
            case TypeRecord::Domain::String:
            case TypeRecord::Domain::Int:
            case TypeRecord::Domain::Literals:
                return m + "(" + freshVar() + ")";
            case TypeRecord::Domain::Product: {
                std::string text = m + "(";
                for (size_t i = 0; i < rec.fields.size(); ++i) {
                    if (i) text += ",";
                    auto base = reg.resolveVarType(rec.fields[i].typeName);
                    if (!base) throw TypeError("field type '" + rec.fields[i].typeName + "'");
                    text += patternFor(*base);
                }
                return text + ")";
            }
        }
        return m;
    }

    const std::pair<std::string, std::string>& varTerm(const std::string& name) {
        auto it = vars.find(name);
        if (it != vars.end()) return it->second;
        auto base = reg.resolveVarType(name);
        if (!base) throw TypeError("'" + name + "' names no declared type");
        auto [ins, added] = vars.emplace(name, std::make_pair(patternFor(*base), *base));
        order.push_back(name);
        return ins->second;
    }

    void bindField(const std::string& label, std::string term, std::string type) {
        vars[label] = {std::move(term), std::move(type)};
        // bound fields are not enumerated separately
        locals.insert(label);
    }

    std::string enumAtom(const std::string& name) {
        return "in((enum," + varTerm(name).first + "),S)";
    }
};

// top-level payload of a rendered term: `price(C)` -> `C`
std::string unwrapped(const std::string& term) {
    size_t open = term.find('(');
    if (open == std::string::npos || term.back() != ')') return term;
    std::string inner = term.substr(open + 1, term.size() - open - 2);
    if (inner.find('(') != std::string::npos) return term;
    if (inner.find(',') != std::string::npos) return term;
    return inner;
}

std::string subArg(const std::string& term, size_t idx) {
    size_t open = term.find('(');
    if (open == std::string::npos) throw UnsupportedExpression("projection on a constant");
    int depth = 0;
    size_t start = open + 1;
    size_t argIdx = 0;
    for (size_t i = open; i < term.size(); ++i) {
        char c = term[i];
        if (c == '(') ++depth;
        else if (c == ')') {
            --depth;
            if (depth == 0 && argIdx == idx) return term.substr(start, i - start);
        } else if (c == ',' && depth == 1) {
            if (argIdx == idx) return term.substr(start, i - start);
            ++argIdx;
            start = i + 1;
        }
    }
    throw UnsupportedExpression("projection index out of range");
}

class Translator {
public:
    Translator(const Registry& reg, Scope& scope) : reg_(reg), sc_(scope) {}

    struct Term {
        std::string text;
        std::string type; // instance type when known, empty for raw values
    };

    std::vector<std::string> conds; // hoisted aggregate bindings etc.

    Term term(const ExprPtr& e) {
        return std::visit(
            [&](const auto& node) -> Term {
                using T = std::decay_t<decltype(node)>;
                if constexpr (std::is_same_v<T, IntLitExpr>) {
                    return {std::to_string(node.value), ""};
                } else if constexpr (std::is_same_v<T, StrLitExpr>) {
                    return {quoted(node.text), ""};
                } else if constexpr (std::is_same_v<T, VarRef>) {
                    if (!sc_.vars.count(node.name) && !reg_.resolveVarType(node.name))
                        return {quoted(node.name), ""}; // bare atom
                    const auto& [text, type] = sc_.varTerm(node.name);
                    return {text, type};
                } else if constexpr (std::is_same_v<T, CtorApp>) {
                    return ctorTerm(node, e->loc);
                } else if constexpr (std::is_same_v<T, Proj>) {
                    Term base = term(node.base);
                    if (base.type.empty())
                        throw UnsupportedExpression("projection on an untyped term");
                    const TypeRecord& rec = reg_.get(base.type);
                    int idx = rec.fieldIndex(node.field);
                    if (idx < 0)
                        throw UnsupportedExpression("no field '" + node.field + "' on " +
                                                    base.type);
                    auto fieldBase = reg_.resolveVarType(rec.fields[static_cast<size_t>(idx)].typeName);
                    return {subArg(base.text, static_cast<size_t>(idx)),
                            fieldBase.value_or("")};
                } else if constexpr (std::is_same_v<T, Binary>) {
                    return arithTerm(node);
                } else if constexpr (std::is_same_v<T, Aggregate>) {
                    return aggregateTerm(node);
                } else {
                    throw UnsupportedExpression("expression cannot be rendered as a term");
                }
            },
            e->node);
    }

    // integer view for arithmetic and ordering comparisons
    std::string intTerm(const ExprPtr& e) {
        Term t = term(e);
        return t.type.empty() ? t.text : unwrapped(t.text);
    }

    Term ctorTerm(const CtorApp& app, const SourceLoc& loc) {
        const TypeRecord& rec = reg_.get(app.type);
        std::string m = asp_mangle(app.type);
        if (rec.domain == TypeRecord::Domain::Unit) return {m, app.type};

        if (rec.domain != TypeRecord::Domain::Product) {
            if (app.args.size() != 1)
                throw UnsupportedExpression("constructor arity for '" + app.type + "'");
            Term arg = term(app.args[0].value);
            std::string payload = arg.type.empty() ? arg.text : unwrapped(arg.text);
            return {m + "(" + payload + ")", app.type};
        }

        std::vector<ExprPtr> argExprs;
        {
            std::vector<ExprPtr> positional;
            std::map<std::string, ExprPtr> named;
            for (const CtorArg& a : app.args) {
                if (a.field.empty()) positional.push_back(a.value);
                else named[a.field] = a.value;
            }
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
        std::string text = m + "(";
        for (size_t i = 0; i < argExprs.size(); ++i) {
            if (i) text += ",";
            Term arg = term(argExprs[i]);
            auto base = reg_.resolveVarType(rec.fields[i].typeName);
            if (!base) throw TypeError("field type '" + rec.fields[i].typeName + "'");
            if (arg.type == *base) {
                text += arg.text;
            } else if (!arg.type.empty()) {
                // foreign instance: re-wrap its payload
                text += asp_mangle(*base) + "(" + unwrapped(arg.text) + ")";
            } else {
                text += asp_mangle(*base) + "(" + arg.text + ")";
            }
        }
        return {text + ")", app.type};
    }

    Term arithTerm(const Binary& b) {
        const char* op = nullptr;
        switch (b.op) {
            case BinOp::Add: op = "+"; break;
            case BinOp::Sub: op = "-"; break;
            case BinOp::Mul: op = "*"; break;
            case BinOp::Div: op = "/"; break;
            default: throw UnsupportedExpression("comparison used as a term");
        }
        std::string l = intTerm(b.lhs);
        std::string r = intTerm(b.rhs);
        return {"(" + l + " " + op + " " + r + ")", ""};
    }

    // aggregates hoist to a fresh variable bound in the body
    Term aggregateTerm(const Aggregate& agg) {
        auto* q = std::get_if<Quant>(&agg.body->node);
        if (!q || q->kind != QuantKind::Foreach)
            throw UnsupportedExpression("aggregates take a Foreach enumeration");
        const char* fn = agg.kind == AggKind::Count ? "#count"
                         : agg.kind == AggKind::Sum ? "#sum"
                         : agg.kind == AggKind::Max ? "#max"
                                                    : "#min";
        for (const auto& v : q->vars) {
            sc_.varTerm(v);
            sc_.locals.insert(v);
        }
        ExprPtr body = q->body;
        std::vector<std::string> inner;
        while (auto* g = std::get_if<Guarded>(&body->node)) {
            appendConds(g->guard, inner);
            body = g->value;
        }
        std::string element;
        if (agg.kind == AggKind::Count) element = term(body).text;
        else element = intTerm(body);
        for (const auto& v : q->vars) inner.push_back(sc_.enumAtom(v));

        std::string text = std::string(fn) + "{ " + element + " : #true";
        for (const auto& c : inner) text += " ," + c;
        text += " }";
        std::string v = sc_.freshVar();
        conds.push_back(v + " = " + text);
        return {v, ""};
    }

    // --- conditions ---------------------------------------------------------

    // appends the conjunctive translation of a condition; disjunctions are
    // rejected here (rule-level disjunction splits into several rules earlier)
    void appendConds(const ExprPtr& e, std::vector<std::string>& out) {
        auto branches = branchesOf(e);
        if (branches.size() != 1)
            throw UnsupportedExpression("disjunction in a nested condition");
        for (auto& c : branches[0]) out.push_back(std::move(c));
    }

    std::vector<std::vector<std::string>> branchesOf(const ExprPtr& e) {
        using Branches = std::vector<std::vector<std::string>>;
        return std::visit(
            [&](const auto& node) -> Branches {
                using T = std::decay_t<decltype(node)>;
                if constexpr (std::is_same_v<T, BoolLit>) {
                    if (node.value) return {{}};
                    return {};
                } else if constexpr (std::is_same_v<T, Binary>) {
                    if (node.op == BinOp::And) {
                        Branches ls = branchesOf(node.lhs);
                        Branches rs = branchesOf(node.rhs);
                        Branches out;
                        for (const auto& l : ls)
                            for (const auto& r : rs) {
                                auto merged = l;
                                merged.insert(merged.end(), r.begin(), r.end());
                                out.push_back(std::move(merged));
                            }
                        return out;
                    }
                    if (node.op == BinOp::Or) {
                        Branches out = branchesOf(node.lhs);
                        for (auto& b : branchesOf(node.rhs)) out.push_back(std::move(b));
                        return out;
                    }
                    std::vector<std::string> pre;
                    std::string c = comparison(node, false, pre);
                    pre.push_back(std::move(c));
                    return {pre};
                } else if constexpr (std::is_same_v<T, NotExpr>) {
                    std::vector<std::string> pre;
                    std::string c = negated(node.operand, pre);
                    pre.push_back(std::move(c));
                    return {pre};
                } else if constexpr (std::is_same_v<T, Quant>) {
                    if (node.kind == QuantKind::Exists) return {{"0 < " + countOf(node)}};
                    if (node.kind == QuantKind::Forall)
                        return {{"not 0 < " + countOfViolations(node)}};
                    throw UnsupportedExpression("Foreach used as a condition");
                } else if constexpr (std::is_same_v<T, CtorApp> || std::is_same_v<T, VarRef> ||
                                     std::is_same_v<T, Proj>) {
                    size_t before = conds.size();
                    Term t = term(e);
                    std::vector<std::string> row(conds.begin() + before, conds.end());
                    conds.resize(before);
                    row.push_back("in((holds," + t.text + "),S)");
                    return {row};
                } else if constexpr (std::is_same_v<T, BuiltinCall>) {
                    if (node.kind == BuiltinKind::Violated)
                        throw UnsupportedExpression("Violated in rule bodies");
                    size_t before = conds.size();
                    Term t = term(node.arg);
                    std::vector<std::string> row(conds.begin() + before, conds.end());
                    conds.resize(before);
                    row.push_back(std::string("in((") +
                                  (node.kind == BuiltinKind::Holds ? "holds" : "enabled") + "," +
                                  t.text + "),S)");
                    return {row};
                } else if constexpr (std::is_same_v<T, Guarded>) {
                    Branches vs = branchesOf(node.value);
                    Branches gs = branchesOf(node.guard);
                    Branches out;
                    for (const auto& v : vs)
                        for (const auto& g : gs) {
                            auto merged = v;
                            merged.insert(merged.end(), g.begin(), g.end());
                            out.push_back(std::move(merged));
                        }
                    return out;
                } else {
                    throw UnsupportedExpression("unsupported condition");
                }
            },
            e->node);
    }

    std::string comparison(const Binary& b, bool negate, std::vector<std::string>& pre) {
        if (b.op == BinOp::Eq || b.op == BinOp::Ne) {
            size_t before = conds.size();
            Term l = term(b.lhs);
            Term r = term(b.rhs);
            pre.insert(pre.end(), conds.begin() + before, conds.end());
            conds.resize(before);
            bool neg = (b.op == BinOp::Ne) != negate;
            return (neg ? "not " : "") + l.text + " = " + r.text;
        }
        const char* op = nullptr;
        const char* flipped = nullptr;
        switch (b.op) {
            case BinOp::Lt: op = "<"; flipped = ">="; break;
            case BinOp::Le: op = "<="; flipped = ">"; break;
            case BinOp::Gt: op = ">"; flipped = "<="; break;
            case BinOp::Ge: op = ">="; flipped = "<"; break;
            default: throw UnsupportedExpression("operator in condition position");
        }
        size_t before = conds.size();
        std::string l = intTerm(b.lhs);
        std::string r = intTerm(b.rhs);
        pre.insert(pre.end(), conds.begin() + before, conds.end());
        conds.resize(before);
        return l + " " + (negate ? flipped : op) + " " + r;
    }

    std::string negated(const ExprPtr& e, std::vector<std::string>& pre) {
        if (auto* q = std::get_if<Quant>(&e->node)) {
            if (q->kind == QuantKind::Exists) return "not 0 < " + countOf(*q);
            if (q->kind == QuantKind::Forall) return "0 < " + countOfViolations(*q);
        }
        if (auto* b = std::get_if<Binary>(&e->node)) {
            if (b->op != BinOp::And && b->op != BinOp::Or) return comparison(*b, true, pre);
        }
        auto branches = branchesOf(e);
        if (branches.size() == 1 && branches[0].size() == 1) {
            const std::string& c = branches[0][0];
            if (c.rfind("not ", 0) == 0) return c.substr(4);
            return "not " + c;
        }
        throw UnsupportedExpression("negation over a compound condition");
    }

    // `#count{ vars : #true ,conds ,enums }` over an Exists body
    std::string countOf(const Quant& q) {
        std::string tuple;
        for (size_t i = 0; i < q.vars.size(); ++i) {
            if (i) tuple += ",";
            tuple += sc_.varTerm(q.vars[i]).first;
            sc_.locals.insert(q.vars[i]);
        }
        auto branches = branchesOf(q.body);
        if (branches.size() != 1) throw UnsupportedExpression("disjunction under a quantifier");
        std::string text = "#count{ " + tuple + " : #true";
        for (const auto& c : branches[0]) text += " ," + c;
        for (const auto& v : q.vars) text += " ," + sc_.enumAtom(v);
        text += " }";
        return text;
    }

    // Forall holds iff no witness violates the body; guards stay positive
    // and the residual body is negated inside the count.
    std::string countOfViolations(const Quant& q) {
        std::string tuple;
        for (size_t i = 0; i < q.vars.size(); ++i) {
            if (i) tuple += ",";
            tuple += sc_.varTerm(q.vars[i]).first;
            sc_.locals.insert(q.vars[i]);
        }
        ExprPtr body = q.body;
        std::vector<std::string> inner;
        while (auto* g = std::get_if<Guarded>(&body->node)) {
            appendConds(g->guard, inner);
            body = g->value;
        }
        std::vector<std::string> pre;
        std::string neg = negated(body, pre);
        for (auto& c : pre) inner.push_back(std::move(c));
        inner.push_back(std::move(neg));
        std::string text = "#count{ " + tuple + " : #true";
        for (const auto& c : inner) text += " ," + c;
        for (const auto& v : q.vars) text += " ," + sc_.enumAtom(v);
        text += " }";
        return text;
    }

private:
    const Registry& reg_;
    Scope& sc_;
};

class Emitter {
public:
    explicit Emitter(const Registry& reg) : reg_(reg) {}

    std::string specification() {
        nameMap();
        frameRules();
        for (const std::string& name : reg_.declarationOrder()) emitType(name);
        return out_.str();
    }

private:
    const Registry& reg_;
    std::ostringstream out_;

    void nameMap() {
        out_ << "% generated logic program; one rule per line\n";
        for (const std::string& name : reg_.declarationOrder()) {
            std::string m = asp_mangle(name);
            if (m != name) out_ << "% name-map: " << m << " = " << name << "\n";
        }
        out_ << "\n";
    }

    void frameRules() {
        out_ << "% frame rules\n";
        out_ << "in((holds,I),S) :- in((derived,I),S) ; not in((suppressed,I),S) ; not "
                "in((terminated,I),S).\n";
        out_ << "% extrapolated: asserted truth persists until terminated; creation trumps "
                "termination\n";
        out_ << "in((holds,I),S) :- in((create,I),S).\n";
        out_ << "in((create,I),S + 1) :- state(S + 1) ; in((create,I),S) ; not "
                "in((terminated,I),S + 1).\n";
        out_ << "in((terminated,I),S + 1) :- state(S + 1) ; in((terminated,I),S) ; not "
                "in((create,I),S + 1).\n";
        out_ << "\n";
    }

    void emitType(const std::string& name) {
        const TypeRecord& rec = reg_.get(name);
        out_ << "% type " << name << "\n";
        emitEnum(name, rec);
        for (const ExprPtr& rule : rec.derivationRules) emitDerived(name, rule);
        for (const ExprPtr& cond : rec.conditionedBy) emitSuppressed(name, rec, cond);
        if (rec.kind == TypeKind::Act || rec.kind == TypeKind::Event) emitActRules(name, rec);
        out_ << "\n";
    }

    void emitEnum(const std::string& name, const TypeRecord& rec) {
        std::string m = asp_mangle(name);
        switch (rec.domain) {
            case TypeRecord::Domain::Unit:
                out_ << "in((enum," << m << "),S) :- state(S).\n";
                return;
            case TypeRecord::Domain::Literals:
                for (const Literal& lit : rec.literals) {
                    std::string payload =
                        lit.isNum() ? std::to_string(lit.num()) : quoted(lit.str());
                    out_ << "in((enum," << m << "(" << payload << ")),S) :- state(S).\n";
                }
                return;
            case TypeRecord::Domain::String:
            case TypeRecord::Domain::Int: {
                Scope sc(reg_);
                std::string pat = sc.patternFor(name);
                if (name == kActorType && rec.fields.empty() && !rec.open)
                    out_ << "% extrapolated: the active string domain of " << m
                         << " is approximated by held instances\n";
                out_ << "in((enum," << pat << "),S) :- state(S) ; in((holds," << pat << "),S).\n";
                return;
            }
            case TypeRecord::Domain::Product: {
                Registry::DomainInfo dom = reg_.domainOf(name);
                if (dom.finite) {
                    Scope sc(reg_);
                    std::string text = m + "(";
                    std::vector<std::string> parts;
                    for (size_t i = 0; i < rec.fields.size(); ++i) {
                        if (i) text += ",";
                        auto base = reg_.resolveVarType(rec.fields[i].typeName);
                        std::string sub = sc.patternFor(*base);
                        text += sub;
                        parts.push_back("in((enum," + sub + "),S)");
                    }
                    text += ")";
                    out_ << "in((enum," << text << "),S) :- state(S)";
                    for (const auto& p : parts) out_ << " ; " << p;
                    out_ << ".\n";
                } else {
                    Scope sc(reg_);
                    std::string pat = sc.patternFor(name);
                    out_ << "in((enum," << pat << "),S) :- state(S) ; in((holds," << pat
                         << "),S).\n";
                }
                return;
            }
        }
    }

    void emitDerived(const std::string& typeName, const ExprPtr& rule) {
        try {
            Scope sc(reg_);
            Translator tx(reg_, sc);

            ExprPtr cur = rule;
            std::vector<std::string> quantVars;
            while (auto* q = std::get_if<Quant>(&cur->node)) {
                if (q->kind != QuantKind::Foreach) break;
                for (const auto& v : q->vars) quantVars.push_back(v);
                cur = q->body;
            }
            std::vector<ExprPtr> guards;
            while (auto* g = std::get_if<Guarded>(&cur->node)) {
                guards.push_back(g->guard);
                cur = g->value;
            }
            std::reverse(guards.begin(), guards.end()); // innermost first

            Translator::Term head = tx.term(cur);
            std::vector<std::string> headConds = std::move(tx.conds);
            tx.conds.clear();
            std::string headTerm;
            if (head.type == typeName) {
                headTerm = head.text;
            } else {
                const TypeRecord& target = reg_.get(typeName);
                if (target.domain == TypeRecord::Domain::Product) {
                    // re-type a structurally compatible instance
                    if (head.type.empty())
                        throw UnsupportedExpression("cannot convert a raw value into '" +
                                                    typeName + "'");
                    size_t open = head.text.find('(');
                    if (open == std::string::npos)
                        throw UnsupportedExpression("cannot re-type '" + head.text + "'");
                    headTerm = asp_mangle(typeName) + head.text.substr(open);
                } else if (target.domain == TypeRecord::Domain::Unit) {
                    headTerm = asp_mangle(typeName);
                } else {
                    std::string payload =
                        head.type.empty() ? head.text : unwrapped(head.text);
                    headTerm = asp_mangle(typeName) + "(" + payload + ")";
                }
            }

            std::vector<std::vector<std::string>> branches{{}};
            for (const ExprPtr& g : guards) {
                auto gb = tx.branchesOf(g);
                std::vector<std::vector<std::string>> next;
                for (const auto& b : branches)
                    for (const auto& extra : gb) {
                        auto merged = b;
                        merged.insert(merged.end(), extra.begin(), extra.end());
                        next.push_back(std::move(merged));
                    }
                branches = std::move(next);
            }

            std::vector<std::string> enums;
            for (const auto& name : sc.order)
                if (!sc.locals.count(name)) enums.push_back(sc.enumAtom(name));

            for (const auto& b : branches) {
                out_ << "in((derived," << headTerm << "),S) :- state(S)";
                for (const auto& c : headConds) out_ << " ; " << c;
                for (const auto& c : b) out_ << " ; " << c;
                for (const auto& c : enums) out_ << " ; " << c;
                out_ << ".\n";
            }
        } catch (const UnsupportedExpression& e) {
            out_ << "% rule for " << typeName << " not translatable: " << e.what() << "\n";
        }
    }

    void bindFieldsToPattern(Scope& sc, const TypeRecord& rec, const std::string& pat) {
        for (size_t i = 0; i < rec.fields.size(); ++i) {
            auto base = reg_.resolveVarType(rec.fields[i].typeName);
            sc.bindField(rec.fields[i].label, subArg(pat, i), base.value_or(""));
        }
    }

    void emitSuppressed(const std::string& typeName, const TypeRecord& rec, const ExprPtr& cond) {
        try {
            Scope sc(reg_);
            Translator tx(reg_, sc);
            std::string pat = sc.patternFor(typeName);
            bindFieldsToPattern(sc, rec, pat);

            std::vector<std::string> pre;
            std::string neg = tx.negated(cond, pre);
            out_ << "% extrapolated: failing pre-conditions suppress derived instances\n";
            out_ << "in((suppressed," << pat << "),S) :- state(S) ; in((enum," << pat << "),S)";
            for (const auto& c : pre) out_ << " ; " << c;
            out_ << " ; " << neg;
            for (const auto& name : sc.order)
                if (!sc.locals.count(name)) out_ << " ; " << sc.enumAtom(name);
            out_ << ".\n";
        } catch (const UnsupportedExpression& e) {
            out_ << "% condition of " << typeName << " not translatable: " << e.what() << "\n";
        }
    }

    void emitActRules(const std::string& typeName, const TypeRecord& rec) {
        {
            Scope sc(reg_);
            std::string pat = sc.patternFor(typeName);
            out_ << "% extrapolated: transition behaviour of " << asp_mangle(typeName) << "\n";
            if (rec.isPhysical)
                out_ << "in((enabled," << pat << "),S) :- state(S) ; in((enum," << pat
                     << "),S).\n";
            else
                out_ << "in((enabled," << pat << "),S) :- state(S) ; in((holds," << pat
                     << "),S).\n";
        }

        auto emitEffect = [&](const char* tag, const std::vector<ExprPtr>& exprs, bool nextState) {
            for (const ExprPtr& e : exprs) {
                try {
                    Scope sc(reg_);
                    Translator tx(reg_, sc);
                    std::string pat = sc.patternFor(typeName);
                    bindFieldsToPattern(sc, rec, pat);

                    ExprPtr cur = e;
                    std::vector<std::string> conds;
                    while (auto* g = std::get_if<Guarded>(&cur->node)) {
                        tx.appendConds(g->guard, conds);
                        cur = g->value;
                    }
                    Translator::Term t = tx.term(cur);
                    for (auto& c : tx.conds) conds.push_back(std::move(c));

                    out_ << "in((" << tag << "," << t.text << "),"
                         << (nextState ? "S + 1" : "S") << ") :- ";
                    if (nextState) out_ << "state(S + 1) ; ";
                    out_ << "in((trigger," << pat << "),S)";
                    for (const auto& c : conds) out_ << " ; " << c;
                    for (const auto& name : sc.order)
                        if (!sc.locals.count(name)) out_ << " ; " << sc.enumAtom(name);
                    out_ << ".\n";
                } catch (const UnsupportedExpression& ex) {
                    out_ << "% effect of " << typeName << " not translatable: " << ex.what()
                         << "\n";
                }
            }
        };
        emitEffect("create", rec.creates, true);
        emitEffect("terminated", rec.terminates, true);
        if (!rec.obfuscates.empty())
            out_ << "% obfuscation is approximated as termination (three-valued state is not "
                    "encoded)\n";
        emitEffect("terminated", rec.obfuscates, true);
        emitEffect("trigger", rec.syncsWith, false);
    }
};

std::string renderGroundCtor(const Registry& reg, const ExprPtr& e);

std::string renderGroundValue(const Registry& reg, const ExprPtr& e) {
    if (auto* i = std::get_if<IntLitExpr>(&e->node)) return std::to_string(i->value);
    if (auto* s = std::get_if<StrLitExpr>(&e->node)) return quoted(s->text);
    if (auto* v = std::get_if<VarRef>(&e->node)) return quoted(v->name);
    return renderGroundCtor(reg, e);
}

std::string renderGroundCtor(const Registry& reg, const ExprPtr& e) {
    auto* app = std::get_if<CtorApp>(&e->node);
    if (!app) throw Error("root entries must be ground constructor applications");
    const TypeRecord* rec = reg.find(app->type);
    std::string out = asp_mangle(app->type);
    if (app->args.empty()) return out;
    out += "(";
    for (size_t i = 0; i < app->args.size(); ++i) {
        if (i) out += ",";
        const CtorArg& a = app->args[i];
        std::string fieldType;
        if (rec && rec->domain == TypeRecord::Domain::Product) {
            size_t idx = i;
            if (!a.field.empty()) {
                int f = rec->fieldIndex(a.field);
                if (f >= 0) idx = static_cast<size_t>(f);
            }
            if (idx < rec->fields.size())
                if (auto base = reg.resolveVarType(rec->fields[idx].typeName)) fieldType = *base;
        }
        bool isLeaf = std::holds_alternative<IntLitExpr>(a.value->node) ||
                      std::holds_alternative<StrLitExpr>(a.value->node) ||
                      std::holds_alternative<VarRef>(a.value->node);
        if (!fieldType.empty() && isLeaf)
            out += asp_mangle(fieldType) + "(" + renderGroundValue(reg, a.value) + ")";
        else
            out += renderGroundValue(reg, a.value);
    }
    out += ")";
    return out;
}

} // namespace

std::string emit_specification(const Registry& reg) {
    Emitter emitter(reg);
    return emitter.specification();
}

std::string emit_search(const Registry& reg, const SearchSpec& spec) {
    if (spec.depth < 1) throw Error("search depth must be at least 1");
    if (spec.criterionBodies.empty()) throw Error("search needs at least one criterion rule");

    std::ostringstream out;
    out << "% breadth: choose exactly one enabled action per state\n";
    const TypeRecord& rec = reg.get(spec.breadthAction);
    std::string pattern = asp_mangle(spec.breadthAction);
    if (!rec.fields.empty()) {
        pattern += "(";
        for (size_t i = 0; i < rec.fields.size(); ++i) {
            if (i) pattern += ",";
            std::string label = asp_mangle(rec.fields[i].label);
            label[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(label[0])));
            pattern += label;
        }
        pattern += ")";
    }
    out << "1 = { choose(I,S) : in((enabled,I), S), I = " << pattern
        << " } :- state(S); state(S + 1).\n";
    out << "in((trigger,I), S) :- choose(I,S).\n\n";

    out << "% depth: bounded continuous scenarios\n";
    out << "{ state(S) } :- S = 1.." << spec.depth << ".\n";
    out << "state(S) :- 1 <= S ; state(S + 1).\n\n";

    out << "% root: the initial state\n";
    out << "state(1).\n";
    for (const std::string& fact : spec.rootFacts)
        out << "in((create," << renderGroundCtor(reg, parse_expression(fact)) << "),1).\n";
    for (const std::string& trig : spec.rootTriggers)
        out << "in((trigger," << renderGroundCtor(reg, parse_expression(trig)) << "),1).\n";
    out << "\n";

    out << "% criterion: answers are counterexamples\n";
    out << ":- counterexample.\n";
    for (const std::string& body : spec.criterionBodies)
        out << "counterexample :- " << body << ".\n";
    return out.str();
}

} // namespace normspec
