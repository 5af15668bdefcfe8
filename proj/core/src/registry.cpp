#include "normspec/registry.hpp"

#include <algorithm>
#include <set>

#include "normspec/diag.hpp"

namespace normspec {

namespace {

// Desugars `Holds when E` into the fully explicit derivation rule
// `(Foreach f1, .., fn: self(f1, .., fn) When E)`.
ExprPtr desugarHoldsWhen(const TypeRecord& rec, const ExprPtr& cond) {
    SourceLoc loc = cond->loc;
    std::vector<CtorArg> args;
    std::vector<std::string> vars;
    for (const auto& f : rec.fields) {
        args.push_back(CtorArg{"", makeExpr<VarRef>(loc, f.label)});
        vars.push_back(f.label);
    }
    ExprPtr self = makeExpr<CtorApp>(loc, rec.name, std::move(args));
    ExprPtr guarded = makeExpr<Guarded>(loc, self, cond);
    return makeExpr<Quant>(loc, QuantKind::Foreach, std::move(vars), guarded);
}

void rebuildDerivationRules(TypeRecord& rec) {
    rec.derivationRules.clear();
    for (const auto& e : rec.holdsWhen) rec.derivationRules.push_back(desugarHoldsWhen(rec, e));
    for (const auto& e : rec.derivedFrom) rec.derivationRules.push_back(e);
}

void appendClauses(TypeRecord& rec, const std::vector<Clause>& clauses) {
    for (const Clause& c : clauses) {
        auto& dst = c.kind == ClauseKind::HoldsWhen       ? rec.holdsWhen
                    : c.kind == ClauseKind::DerivedFrom   ? rec.derivedFrom
                    : c.kind == ClauseKind::ConditionedBy ? rec.conditionedBy
                    : c.kind == ClauseKind::Creates       ? rec.creates
                    : c.kind == ClauseKind::Terminates    ? rec.terminates
                    : c.kind == ClauseKind::Obfuscates    ? rec.obfuscates
                    : c.kind == ClauseKind::ViolatedWhen  ? rec.violatedWhen
                                                          : rec.syncsWith;
        for (const auto& e : c.exprs) dst.push_back(e);
    }
}

} // namespace

Registry::Registry() {
    auto prim = [&](const char* name, TypeRecord::Domain dom) {
        TypeRecord r;
        r.name = name;
        r.kind = TypeKind::Fact;
        r.domain = dom;
        types_[name] = std::move(r);
        order_.push_back(name);
    };
    prim("int", TypeRecord::Domain::Int);
    prim("string", TypeRecord::Domain::String);
    prim(kActorType, TypeRecord::Domain::String);
}

const TypeRecord* Registry::find(const std::string& name) const {
    auto it = types_.find(name);
    return it == types_.end() ? nullptr : &it->second;
}

const TypeRecord& Registry::get(const std::string& name) const {
    if (const TypeRecord* r = find(name)) return *r;
    throw TypeError("unknown type '" + name + "'");
}

std::optional<std::string> Registry::resolveVarType(const std::string& varName) const {
    if (types_.count(varName)) return varName;
    std::string base = varName;
    while (!base.empty() && base.back() == '\'') base.pop_back();
    if (!base.empty() && types_.count(base)) return base;
    while (!base.empty() && std::isdigit(static_cast<unsigned char>(base.back()))) base.pop_back();
    if (!base.empty() && types_.count(base)) return base;
    return std::nullopt;
}

void Registry::install(const TypeDeclAst& d) {
    TypeRecord rec;
    rec.name = d.name;
    rec.kind = d.kind;
    rec.open = d.open.value_or(false);
    rec.isVar = d.isVar;
    rec.isFunction = d.isFunction;
    rec.isBool = d.isBool;
    rec.isPhysical = d.isPhysical;

    auto addField = [&](const FieldDecl& f) {
        for (const auto& existing : rec.fields)
            if (existing.label == f.label)
                throw TypeError("duplicate field '" + f.label + "' in type '" + d.name + "'");
        rec.fields.push_back(TypeRecord::Field{f.label, f.label});
    };

    if (d.kind == TypeKind::Act) {
        addField(d.actorField ? *d.actorField : FieldDecl{kActorType});
        if (d.recipientField) addField(*d.recipientField);
    } else if (d.kind == TypeKind::Duty) {
        if (!d.holderField || !d.claimantField)
            throw TypeError("duty '" + d.name + "' needs both Holder and Claimant");
        addField(*d.holderField);
        addField(*d.claimantField);
    }
    for (const auto& f : d.relatedTo) addField(f);

    switch (d.identifiedBy.kind) {
        case DomainSpec::Kind::None:
            break;
        case DomainSpec::Kind::PrimString:
            rec.domain = TypeRecord::Domain::String;
            break;
        case DomainSpec::Kind::PrimInt:
            rec.domain = TypeRecord::Domain::Int;
            break;
        case DomainSpec::Kind::IntRange:
            rec.domain = TypeRecord::Domain::Literals;
            for (int64_t v = d.identifiedBy.lo; v <= d.identifiedBy.hi; ++v)
                rec.literals.push_back(Literal(v));
            break;
        case DomainSpec::Kind::Fields:
            for (const auto& f : d.identifiedBy.fields) addField(f);
            break;
    }

    if (!rec.fields.empty()) {
        rec.domain = TypeRecord::Domain::Product;
    } else if (d.isBool) {
        rec.domain = TypeRecord::Domain::Unit;
    } else if (d.identifiedBy.kind == DomainSpec::Kind::None) {
        // a bare `Fact person.` ranges over strings
        rec.domain = TypeRecord::Domain::String;
    }

    if (d.hasDomainClause) {
        if (rec.domain != TypeRecord::Domain::String && rec.domain != TypeRecord::Domain::Int &&
            rec.domain != TypeRecord::Domain::Literals)
            throw TypeError("Domain clause on '" + d.name + "' requires a primitive Identified by");
        rec.domain = TypeRecord::Domain::Literals;
        rec.literals = d.domainLiterals;
    }
    if (rec.domain == TypeRecord::Domain::Literals) {
        std::sort(rec.literals.begin(), rec.literals.end());
        rec.literals.erase(std::unique(rec.literals.begin(), rec.literals.end()), rec.literals.end());
    }

    appendClauses(rec, d.clauses);
    rebuildDerivationRules(rec);

    if (!types_.count(d.name)) order_.push_back(d.name);
    types_[d.name] = std::move(rec);
}

void Registry::extend(const TypeDeclAst& d) {
    auto it = types_.find(d.name);
    if (it == types_.end()) throw TypeError("Extend of undeclared type '" + d.name + "'");
    appendClauses(it->second, d.clauses);
    rebuildDerivationRules(it->second);
}

Registry Registry::applyDeclarations(const std::vector<TypeDeclAst>& decls) const {
    Registry next = *this;
    // fresh declarations land first so Extends in the same sequence see them
    for (const TypeDeclAst& d : decls)
        if (!d.isExtend) next.install(d);
    for (const TypeDeclAst& d : decls)
        if (d.isExtend) next.extend(d);
    return next;
}

bool Registry::domainOfRec(const std::string& name, std::vector<Instance>& out,
                           std::vector<std::string>& inProgress) const {
    const TypeRecord& rec = get(name);
    for (const auto& open : inProgress)
        if (open == name) return false; // recursive product: infinite
    switch (rec.domain) {
        case TypeRecord::Domain::String:
        case TypeRecord::Domain::Int:
            return false;
        case TypeRecord::Domain::Unit:
            out.push_back(Instance(name, {}));
            return true;
        case TypeRecord::Domain::Literals:
            for (const Literal& lit : rec.literals) out.push_back(Instance(name, {Value(lit)}));
            return true;
        case TypeRecord::Domain::Product: {
            inProgress.push_back(name);
            std::vector<std::vector<Instance>> fieldDomains;
            for (const auto& f : rec.fields) {
                auto base = resolveVarType(f.typeName);
                if (!base) {
                    inProgress.pop_back();
                    throw TypeError("field '" + f.label + "' of '" + name +
                                    "' names no declared type");
                }
                std::vector<Instance> sub;
                if (!domainOfRec(*base, sub, inProgress)) {
                    inProgress.pop_back();
                    return false;
                }
                fieldDomains.push_back(std::move(sub));
            }
            inProgress.pop_back();
            std::vector<std::vector<Value>> rows = {{}};
            for (const auto& dom : fieldDomains) {
                std::vector<std::vector<Value>> next;
                for (const auto& row : rows)
                    for (const Instance& inst : dom) {
                        auto extended = row;
                        extended.push_back(Value(inst));
                        next.push_back(std::move(extended));
                    }
                rows = std::move(next);
            }
            for (auto& row : rows) out.push_back(Instance(name, std::move(row)));
            return true;
        }
    }
    return false;
}

Registry::DomainInfo Registry::domainOf(const std::string& name) const {
    DomainInfo info;
    std::vector<std::string> inProgress;
    info.finite = domainOfRec(name, info.instances, inProgress);
    if (!info.finite) info.instances.clear();
    return info;
}

} // namespace normspec
