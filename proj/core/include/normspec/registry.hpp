#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "normspec/ast.hpp"
#include "normspec/value.hpp"

namespace normspec {

// The name of the built-in type standing for acting parties. It enumerates
// over every string occurring in a held instance (the active domain), so that
// `Holds when auctioneer(actor)` recognises parties introduced by any fact.
inline constexpr const char* kActorType = "actor";

struct TypeRecord {
    std::string name;
    TypeKind kind = TypeKind::Fact;
    bool open = false;
    bool isVar = false, isFunction = false, isBool = false, isPhysical = false;

    struct Field {
        std::string label;    // how expressions refer to it
        std::string typeName; // label minus trailing primes/digits when aliased
    };
    std::vector<Field> fields;

    enum class Domain { String, Int, Literals, Product, Unit };
    Domain domain = Domain::String;
    std::vector<Literal> literals; // sorted, deduplicated

    // accumulating clauses, in accumulation order
    std::vector<ExprPtr> holdsWhen;
    std::vector<ExprPtr> derivedFrom;
    std::vector<ExprPtr> conditionedBy;
    std::vector<ExprPtr> creates;
    std::vector<ExprPtr> terminates;
    std::vector<ExprPtr> obfuscates;
    std::vector<ExprPtr> violatedWhen;
    std::vector<ExprPtr> syncsWith;

    // holdsWhen desugared to Derived-from form plus the raw derivedFrom items
    std::vector<ExprPtr> derivationRules;

    bool hasDerivation() const { return !derivationRules.empty(); }
    int fieldIndex(const std::string& label) const {
        for (size_t i = 0; i < fields.size(); ++i)
            if (fields[i].label == label) return static_cast<int>(i);
        return -1;
    }
};

// Immutable snapshot of all type declarations. Updates return new snapshots
// so exploration history can hang on to old ones.
class Registry {
public:
    Registry(); // installs the built-in types: int, string, actor

    const TypeRecord* find(const std::string& name) const;
    const TypeRecord& get(const std::string& name) const; // throws TypeError
    const std::vector<std::string>& declarationOrder() const { return order_; }

    // Strips trailing primes, then trailing digits, until a declared type
    // matches. `bid'` -> bid, `x1` -> x, `int2` -> int.
    std::optional<std::string> resolveVarType(const std::string& varName) const;

    // Non-Extend redeclaration replaces the record wholesale (dropping prior
    // Extends); Extend appends accumulating clauses. All declarations of one
    // sequence are installed together so they may refer to each other.
    Registry applyDeclarations(const std::vector<TypeDeclAst>& decls) const;

    struct DomainInfo {
        bool finite = false;
        std::vector<Instance> instances; // canonical order, finite only
    };
    // Full extension for finite domains; field-type resolution happens here
    // (lazily), so forward references only fail when actually enumerated.
    DomainInfo domainOf(const std::string& name) const;

private:
    std::map<std::string, TypeRecord> types_;
    std::vector<std::string> order_;

    void install(const TypeDeclAst& d);
    void extend(const TypeDeclAst& d);
    bool domainOfRec(const std::string& name, std::vector<Instance>& out,
                     std::vector<std::string>& inProgress) const;
};

using RegistryPtr = std::shared_ptr<const Registry>;

} // namespace normspec
