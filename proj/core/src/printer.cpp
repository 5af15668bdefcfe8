#include "normspec/printer.hpp"

#include <functional>
#include <type_traits>

namespace normspec {

namespace {

// Binding strength, loosest first. Mirrors the parser's precedence ladder.
enum Level : int {
    LvlGuard = 0,
    LvlOr = 1,
    LvlAnd = 2,
    LvlCmp = 3,
    LvlAdd = 4,
    LvlMul = 5,
    LvlPostfix = 6,
};

const char* opText(BinOp op) {
    switch (op) {
        case BinOp::Or: return "||";
        case BinOp::And: return "&&";
        case BinOp::Eq: return "==";
        case BinOp::Ne: return "!=";
        case BinOp::Lt: return "<";
        case BinOp::Le: return "<=";
        case BinOp::Gt: return ">";
        case BinOp::Ge: return ">=";
        case BinOp::Add: return "+";
        case BinOp::Sub: return "-";
        case BinOp::Mul: return "*";
        case BinOp::Div: return "/";
    }
    return "?";
}

int opLevel(BinOp op) {
    switch (op) {
        case BinOp::Or: return LvlOr;
        case BinOp::And: return LvlAnd;
        case BinOp::Eq:
        case BinOp::Ne:
        case BinOp::Lt:
        case BinOp::Le:
        case BinOp::Gt:
        case BinOp::Ge: return LvlCmp;
        case BinOp::Add:
        case BinOp::Sub: return LvlAdd;
        case BinOp::Mul:
        case BinOp::Div: return LvlMul;
    }
    return LvlPostfix;
}

void quoteInto(std::string& out, const std::string& s) {
    out += '"';
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    out += '"';
}

void render(const ExprPtr& e, std::string& out, int minLevel);

void renderAt(const ExprPtr& e, std::string& out, int level, int minLevel,
              const std::function<void()>& body) {
    if (level < minLevel) {
        out += '(';
        body();
        out += ')';
    } else {
        body();
    }
}

void render(const ExprPtr& e, std::string& out, int minLevel) {
    std::visit(
        [&](const auto& node) {
            using T = std::decay_t<decltype(node)>;
            if constexpr (std::is_same_v<T, BoolLit>) {
                out += node.value ? "True" : "False";
            } else if constexpr (std::is_same_v<T, IntLitExpr>) {
                out += std::to_string(node.value);
            } else if constexpr (std::is_same_v<T, StrLitExpr>) {
                quoteInto(out, node.text);
            } else if constexpr (std::is_same_v<T, VarRef>) {
                out += node.name;
            } else if constexpr (std::is_same_v<T, CtorApp>) {
                out += node.type;
                out += '(';
                for (size_t i = 0; i < node.args.size(); ++i) {
                    if (i) out += ", ";
                    if (!node.args[i].field.empty()) {
                        out += node.args[i].field;
                        out += " = ";
                    }
                    render(node.args[i].value, out, LvlGuard);
                }
                out += ')';
            } else if constexpr (std::is_same_v<T, Proj>) {
                render(node.base, out, LvlPostfix);
                out += '.';
                out += node.field;
            } else if constexpr (std::is_same_v<T, NotExpr>) {
                out += "Not(";
                render(node.operand, out, LvlGuard);
                out += ')';
            } else if constexpr (std::is_same_v<T, Binary>) {
                int lvl = opLevel(node.op);
                renderAt(e, out, lvl, minLevel, [&] {
                    // left-associative: right operand binds one step tighter;
                    // comparisons are non-associative on both sides
                    render(node.lhs, out, lvl == LvlCmp ? lvl + 1 : lvl);
                    out += ' ';
                    out += opText(node.op);
                    out += ' ';
                    render(node.rhs, out, lvl + 1);
                });
            } else if constexpr (std::is_same_v<T, BuiltinCall>) {
                out += node.kind == BuiltinKind::Holds     ? "Holds("
                       : node.kind == BuiltinKind::Enabled ? "Enabled("
                                                           : "Violated(";
                render(node.arg, out, LvlGuard);
                out += ')';
            } else if constexpr (std::is_same_v<T, Quant>) {
                // quantifier bodies swallow everything to their right, so
                // always parenthesize
                out += '(';
                out += node.kind == QuantKind::Foreach  ? "Foreach "
                       : node.kind == QuantKind::Forall ? "Forall "
                                                        : "Exists ";
                for (size_t i = 0; i < node.vars.size(); ++i) {
                    if (i) out += ", ";
                    out += node.vars[i];
                }
                out += ": ";
                render(node.body, out, LvlGuard);
                out += ')';
            } else if constexpr (std::is_same_v<T, Aggregate>) {
                out += node.kind == AggKind::Count ? "Count("
                       : node.kind == AggKind::Sum ? "Sum("
                       : node.kind == AggKind::Max ? "Max("
                                                   : "Min(";
                render(node.body, out, LvlGuard);
                out += ')';
            } else if constexpr (std::is_same_v<T, Guarded>) {
                renderAt(e, out, LvlGuard, minLevel, [&] {
                    render(node.value, out, LvlGuard);
                    out += " When ";
                    render(node.guard, out, LvlOr);
                });
            }
        },
        e->node);
}

void renderFieldList(std::string& out, const char* sep, const std::vector<FieldDecl>& fields) {
    for (size_t i = 0; i < fields.size(); ++i) {
        if (i) out += sep;
        out += fields[i].label;
    }
}

void renderDecl(const TypeDeclAst& d, std::string& out) {
    if (d.isExtend) out += "Extend ";
    if (d.open.has_value()) out += *d.open ? "Open " : "Closed ";
    if (d.isVar) out += "Var ";
    else if (d.isFunction) out += "Function ";
    else if (d.isBool) out += "Bool ";
    else if (d.isPhysical) out += "Physical ";
    else
        switch (d.kind) {
            case TypeKind::Fact: out += "Fact "; break;
            case TypeKind::Act: out += "Act "; break;
            case TypeKind::Event: out += "Event "; break;
            case TypeKind::Duty: out += "Duty "; break;
        }
    out += d.name;

    switch (d.identifiedBy.kind) {
        case DomainSpec::Kind::None: break;
        case DomainSpec::Kind::PrimString: out += " Identified by String"; break;
        case DomainSpec::Kind::PrimInt: out += " Identified by Int"; break;
        case DomainSpec::Kind::IntRange:
            out += " Identified by " + std::to_string(d.identifiedBy.lo) + ".." +
                   std::to_string(d.identifiedBy.hi);
            break;
        case DomainSpec::Kind::Fields:
            out += " Identified by ";
            renderFieldList(out, " * ", d.identifiedBy.fields);
            break;
    }
    if (d.hasDomainClause) {
        out += " Domain ";
        for (size_t i = 0; i < d.domainLiterals.size(); ++i) {
            if (i) out += ", ";
            const Literal& lit = d.domainLiterals[i];
            if (lit.isNum()) out += std::to_string(lit.num());
            else quoteInto(out, lit.str());
        }
    }
    if (d.actorField) out += " Actor " + d.actorField->label;
    if (d.recipientField) out += " Recipient " + d.recipientField->label;
    if (d.holderField) out += " Holder " + d.holderField->label;
    if (d.claimantField) out += " Claimant " + d.claimantField->label;
    if (!d.relatedTo.empty()) {
        out += " Related to ";
        renderFieldList(out, ", ", d.relatedTo);
    }
    for (const Clause& c : d.clauses) {
        switch (c.kind) {
            case ClauseKind::HoldsWhen: out += " Holds when "; break;
            case ClauseKind::DerivedFrom: out += " Derived from "; break;
            case ClauseKind::ConditionedBy: out += " Conditioned by "; break;
            case ClauseKind::Creates: out += " Creates "; break;
            case ClauseKind::Terminates: out += " Terminates "; break;
            case ClauseKind::Obfuscates: out += " Obfuscates "; break;
            case ClauseKind::ViolatedWhen: out += " Violated when "; break;
            case ClauseKind::SyncsWith: out += " Syncs with "; break;
        }
        for (size_t i = 0; i < c.exprs.size(); ++i) {
            if (i) out += ", ";
            render(c.exprs[i], out, LvlGuard);
        }
    }
}

void renderPhrase(const PhrasePtr& p, std::string& out);

void renderPhraseBody(const PhrasePtr& p, std::string& out) {
    std::visit(
        [&](const auto& node) {
            using T = std::decay_t<decltype(node)>;
            if constexpr (std::is_same_v<T, DeclarationSeq>) {
                for (size_t i = 0; i < node.decls.size(); ++i) {
                    if (i) out += ' ';
                    renderDecl(node.decls[i], out);
                }
            } else if constexpr (std::is_same_v<T, Statement>) {
                if (node.kind == StatementKind::AssertTrue) out += '+';
                if (node.kind == StatementKind::AssertFalse) out += '-';
                render(node.expr, out, LvlGuard);
            } else if constexpr (std::is_same_v<T, BoolQuery>) {
                out += '?';
                render(node.expr, out, LvlGuard);
            } else if constexpr (std::is_same_v<T, InstanceQuery>) {
                out += "?-";
                render(node.expr, out, LvlGuard);
            } else if constexpr (std::is_same_v<T, ParallelSet>) {
                out += "{ ";
                for (size_t i = 0; i < node.phrases.size(); ++i) {
                    if (i) out += " ";
                    renderPhraseBody(node.phrases[i], out);
                    if (i + 1 < node.phrases.size()) out += ".";
                }
                out += " }";
            }
        },
        p->node);
}

void renderPhrase(const PhrasePtr& p, std::string& out) {
    renderPhraseBody(p, out);
    out += '.';
}

} // namespace

std::string print_expr(const ExprPtr& expr) {
    std::string out;
    render(expr, out, LvlGuard);
    return out;
}

std::string print_phrase(const PhrasePtr& phrase) {
    std::string out;
    renderPhrase(phrase, out);
    return out;
}

std::string print_program(const std::vector<PhrasePtr>& phrases) {
    std::string out;
    for (const auto& p : phrases) {
        renderPhrase(p, out);
        out += '\n';
    }
    return out;
}

} // namespace normspec
