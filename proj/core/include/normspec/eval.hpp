#pragma once

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "normspec/ast.hpp"
#include "normspec/kb.hpp"
#include "normspec/registry.hpp"

namespace normspec {

struct SemanticsOptions {
    // Max/Min over an empty enumeration yield +/-infinity sentinels unless
    // this asks for a hard error instead.
    bool emptyAggregateError = false;
    // Asserting a Function instance displaces other instances sharing the
    // all-but-last-field key (mirrors Var displacement).
    bool functionDisplacement = true;
    int maxFixpointIters = 100000;
    bool oracleFallback = false;
    int atomCap = 20;
};

// -inf (sign < 0) / +inf (sign > 0); comparable with integers, not storable.
struct Sentinel {
    int sign;
    bool operator==(const Sentinel& o) const { return sign == o.sign; }
};

struct EvalValue {
    std::variant<bool, int64_t, std::string, Instance, Sentinel> v;

    bool isBool() const { return std::holds_alternative<bool>(v); }
    bool isNum() const { return std::holds_alternative<int64_t>(v); }
    bool isStr() const { return std::holds_alternative<std::string>(v); }
    bool isInst() const { return std::holds_alternative<Instance>(v); }
    bool isSentinel() const { return std::holds_alternative<Sentinel>(v); }
};

class Environment {
public:
    void bind(const std::string& name, Value val) { binds_.emplace_back(name, std::move(val)); }
    const Value* lookup(const std::string& name) const {
        for (auto it = binds_.rbegin(); it != binds_.rend(); ++it)
            if (it->first == name) return &it->second;
        return nullptr;
    }
    bool bound(const std::string& name) const { return lookup(name) != nullptr; }
    size_t mark() const { return binds_.size(); }
    void popTo(size_t mark) { binds_.resize(mark); }

private:
    std::vector<std::pair<std::string, Value>> binds_;
};

// Expression evaluation over one knowledge-base snapshot. Pure: repeated
// evaluation yields identical results. Enumerations are cached per instance,
// so build a fresh Evaluator after the knowledge base changes.
// Registry-only value conversion: instances of structurally compatible types
// rebuild field-wise, single payloads unwrap (actor("A") -> bidder("A")),
// literals wrap into primitive or literal domains (with membership checks).
std::optional<Instance> convert_to_type(const Registry& reg, const EvalValue& val,
                                        const std::string& typeName, int depth = 0);
std::optional<Value> convert_to_field(const Registry& reg, const EvalValue& val,
                                      const std::string& fieldType, int depth = 0);
EvalValue value_to_eval(const Value& v);

class Evaluator {
public:
    Evaluator(const Registry& reg, const KnowledgeBase& kb, const SemanticsOptions& opts = {});

    // nullopt means the value was filtered out by a failing `When` guard.
    std::optional<EvalValue> evalValue(const ExprPtr& expr, Environment& env);

    // Strict Boolean: Unknown raises UnknownInstanceInterrupt; a filtered
    // value reads as False.
    bool evalBool(const ExprPtr& expr, Environment& env);

    // Free variables are implicitly bound by Foreach; any one satisfying
    // binding makes the result True.
    bool evalBoolAnyBinding(const ExprPtr& expr, Environment& env);

    // Expands an expression to the set of ground instances it denotes, with
    // free variables implicitly Foreach-bound over the snapshot. When
    // targetType is given, produced values are converted into instances of
    // that type (literals wrapped, structurally compatible instances rebuilt);
    // values outside the target domain are dropped.
    std::vector<Instance> expandInstances(const ExprPtr& expr, Environment& env,
                                          const std::string* targetType);

    // Free variables of expr not bound in env, in first-use order, after
    // implicit constructor-argument completion.
    std::vector<std::string> freeVars(const ExprPtr& expr, const Environment& env);

    // Domain enumeration: full domain for finite types, held instances for
    // infinite closed types, additional input for open infinite types (or an
    // OpenEnumerationInterrupt without it). The built-in actor type ranges
    // over the active string domain.
    const std::vector<Instance>& enumerateType(const std::string& typeName);

    Truth holdsTruth(const Instance& inst) const;
    bool truthify(const EvalValue& v);

    // Enabled: the instance holds true (granted for Physical acts) and every
    // Conditioned-by expression of its type evaluates True under the
    // instance's field bindings.
    bool enabled(const Instance& inst);

    // Index of the first satisfied Violated-when condition of a held duty
    // instance, or -1.
    int violatedDutyIndex(const Instance& inst);

    // Builds the fully ground instance for a constructor whose arguments are
    // all resolvable in env.
    std::optional<Instance> evalCtor(const CtorApp& app, const SourceLoc& loc, Environment& env);

    // Argument-position evaluation: a bare identifier that is neither bound
    // nor a declared type denotes a string atom (`+bidder(Alice)`).
    std::optional<EvalValue> evalArg(const ExprPtr& arg, Environment& env);

    void bindFields(const Instance& inst, Environment& env) const;

    const Registry& registry() const { return reg_; }
    const KnowledgeBase& kb() const { return kb_; }

private:
    const Registry& reg_;
    const KnowledgeBase& kb_;
    SemanticsOptions opts_;
    std::map<std::string, std::vector<Instance>> enumCache_;
    std::map<std::string, Registry::DomainInfo> domainCache_;

    const Registry::DomainInfo& domainInfo(const std::string& typeName);

    struct CtorPlan {
        const TypeRecord* rec;
        std::vector<ExprPtr> args; // one per field, implicit VarRefs filled in
    };
    CtorPlan planCtor(const CtorApp& app, const SourceLoc& loc) const;

    std::optional<Value> convertToField(const EvalValue& val, const std::string& fieldType,
                                        int depth = 0);
    std::optional<Instance> convertToType(const EvalValue& val, const std::string& typeName,
                                          int depth = 0);

    int64_t toNum(const EvalValue& v, const SourceLoc& loc) const;
    std::optional<EvalValue> evalAggregate(const Aggregate& agg, const SourceLoc& loc,
                                           Environment& env);
    std::optional<EvalValue> evalQuant(const Quant& q, const SourceLoc& loc, Environment& env);
    std::optional<EvalValue> evalBinary(const Binary& b, const SourceLoc& loc, Environment& env);

    bool quantLoop(const std::vector<std::string>& vars, size_t idx, Environment& env,
                   const std::function<bool()>& atLeaf);

    void expandBound(const ExprPtr& expr, Environment& env, const std::string* targetType,
                     std::set<Instance>& sink);
    void collectFree(const ExprPtr& expr, const Environment& env,
                     std::vector<std::string>& bound, std::vector<std::string>& out) const;
    const TypeRecord* ctorish(const std::string& varName, const Environment& env) const;
};

} // namespace normspec
