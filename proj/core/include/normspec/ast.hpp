#pragma once

#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "normspec/diag.hpp"
#include "normspec/value.hpp"

namespace normspec {

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct BoolLit {
    bool value;
};
struct IntLitExpr {
    int64_t value;
};
struct StrLitExpr {
    std::string text;
    bool quoted = false;
};
// A type-named variable, possibly primed (`bid'`) or aliased (`x1`).
struct VarRef {
    std::string name;
};
struct CtorArg {
    std::string field; // empty for positional
    ExprPtr value;
};
// Constructor application; missing arguments are completed by the evaluator.
struct CtorApp {
    std::string type;
    std::vector<CtorArg> args;
};
struct Proj {
    ExprPtr base;
    std::string field;
};
struct NotExpr {
    ExprPtr operand;
};
enum class BinOp { Or, And, Eq, Ne, Lt, Le, Gt, Ge, Add, Sub, Mul, Div };
struct Binary {
    BinOp op;
    ExprPtr lhs;
    ExprPtr rhs;
};
enum class BuiltinKind { Holds, Enabled, Violated };
struct BuiltinCall {
    BuiltinKind kind;
    ExprPtr arg;
};
enum class QuantKind { Foreach, Forall, Exists };
struct Quant {
    QuantKind kind;
    std::vector<std::string> vars;
    ExprPtr body;
};
enum class AggKind { Count, Sum, Max, Min };
struct Aggregate {
    AggKind kind;
    ExprPtr body; // a Foreach, or a plain enumerable expression
};
// `e When g` / `e Where g`: e's result survives only if g holds.
struct Guarded {
    ExprPtr value;
    ExprPtr guard;
};

struct Expr {
    std::variant<BoolLit, IntLitExpr, StrLitExpr, VarRef, CtorApp, Proj, NotExpr, Binary,
                 BuiltinCall, Quant, Aggregate, Guarded>
        node;
    SourceLoc loc;
};

template <typename T, typename... Args>
ExprPtr makeExpr(SourceLoc loc, Args&&... args) {
    return std::make_shared<Expr>(Expr{T{std::forward<Args>(args)...}, std::move(loc)});
}

// --- declarations ---------------------------------------------------------

enum class TypeKind { Fact, Act, Event, Duty };

enum class ClauseKind {
    HoldsWhen,
    DerivedFrom,
    ConditionedBy,
    Creates,
    Terminates,
    Obfuscates,
    ViolatedWhen,
    SyncsWith,
};

struct Clause {
    ClauseKind kind;
    std::vector<ExprPtr> exprs;
};

struct FieldDecl {
    std::string label; // the type it denotes is the label minus trailing primes/digits
};

struct DomainSpec {
    enum class Kind { None, PrimString, PrimInt, IntRange, Fields };
    Kind kind = Kind::None;
    int64_t lo = 0, hi = 0;        // IntRange
    std::vector<FieldDecl> fields; // Fields
};

struct TypeDeclAst {
    bool isExtend = false;
    std::optional<bool> open; // Open / Closed modifier if present
    TypeKind kind = TypeKind::Fact;
    bool isVar = false, isFunction = false, isBool = false, isPhysical = false;
    std::string name;
    DomainSpec identifiedBy;
    bool hasDomainClause = false;
    std::vector<Literal> domainLiterals;
    std::optional<FieldDecl> actorField, recipientField, holderField, claimantField;
    std::vector<FieldDecl> relatedTo;
    std::vector<Clause> clauses;
    SourceLoc loc;
};

// --- phrases ---------------------------------------------------------------

struct Phrase;
using PhrasePtr = std::shared_ptr<const Phrase>;

struct DeclarationSeq {
    std::vector<TypeDeclAst> decls;
};
enum class StatementKind { AssertTrue, AssertFalse, Trigger };
struct Statement {
    StatementKind kind;
    ExprPtr expr;
};
struct BoolQuery {
    ExprPtr expr;
};
struct InstanceQuery {
    ExprPtr expr;
};
struct ParallelSet {
    std::vector<PhrasePtr> phrases;
};

struct Phrase {
    std::variant<DeclarationSeq, Statement, BoolQuery, InstanceQuery, ParallelSet> node;
    SourceLoc loc;
};

template <typename T>
PhrasePtr makePhrase(SourceLoc loc, T&& node) {
    return std::make_shared<Phrase>(Phrase{std::forward<T>(node), std::move(loc)});
}

} // namespace normspec
