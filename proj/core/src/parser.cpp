#include "normspec/parser.hpp"

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "normspec/lexer.hpp"

namespace normspec {

namespace {

bool isDeclStart(const Token& t) {
    if (t.kind != TokenKind::Keyword) return false;
    static const char* starts[] = {"Fact", "Act", "Event", "Duty", "Var", "Function",
                                   "Bool", "Physical", "Open", "Closed", "Extend"};
    for (const char* s : starts)
        if (t.text == s) return true;
    return false;
}

struct ParseCtx {
    const IncludeResolver* resolver = nullptr;
    std::set<std::string> required;
    std::vector<std::string> includeStack;
};

class Parser {
public:
    Parser(std::vector<Token> tokens, std::string filename, ParseCtx& ctx)
        : toks_(std::move(tokens)), file_(std::move(filename)), ctx_(ctx) {}

    std::vector<PhrasePtr> parseProgram() {
        std::vector<PhrasePtr> out;
        while (!peek().is(TokenKind::End)) {
            if (peek().is(TokenKind::Directive)) {
                parseDirective(out);
                continue;
            }
            out.push_back(parsePhrase());
            expectStop();
        }
        return out;
    }

    ExprPtr parseSingleExpression() {
        ExprPtr e = parseExpr();
        if (!peek().is(TokenKind::End) && !peek().isPunct("."))
            fail("trailing input after expression", "end of input");
        return e;
    }

private:
    std::vector<Token> toks_;
    std::string file_;
    ParseCtx& ctx_;
    size_t pos_ = 0;

    const Token& peek(size_t off = 0) const {
        size_t i = pos_ + off;
        return i < toks_.size() ? toks_[i] : toks_.back();
    }
    const Token& take() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }

    [[noreturn]] void fail(const std::string& msg, const std::string& expected = {}) const {
        throw ParseError(peek().loc, msg + " (got '" + (peek().is(TokenKind::End) ? "<eof>" : peek().text) + "')",
                         expected);
    }

    void expectStop() {
        if (!peek().isPunct(".")) fail("expected '.' after fragment", ".");
        take();
    }

    std::string expectName() {
        if (peek().is(TokenKind::Ident) || peek().is(TokenKind::BracketedIdent)) return take().text;
        fail("expected a name", "identifier");
    }

    // --- directives --------------------------------------------------------

    void parseDirective(std::vector<PhrasePtr>& out) {
        Token dir = take();
        if (!peek().is(TokenKind::StrLit)) fail("expected a quoted path after " + dir.text, "string literal");
        std::string path = take().text;
        expectStop();
        if (!ctx_.resolver || !ctx_.resolver->load)
            throw MissingFileError("no include resolver available for " + dir.text + " \"" + path + "\"");

        std::string canon = ctx_.resolver->canonical ? ctx_.resolver->canonical(path, file_) : path;
        if (dir.text == "#require" && !ctx_.required.insert(canon).second) return;
        for (const auto& open : ctx_.includeStack)
            if (open == canon) throw IncludeCycleError("include cycle through \"" + path + "\"");

        auto content = ctx_.resolver->load(path, file_);
        if (!content) throw MissingFileError("cannot open \"" + path + "\" (from " + file_ + ")");

        ctx_.includeStack.push_back(canon);
        Parser sub(tokenize(*content, canon), canon, ctx_);
        auto fragments = sub.parseProgram();
        ctx_.includeStack.pop_back();
        for (auto& f : fragments) out.push_back(std::move(f));
    }

    // --- phrases ------------------------------------------------------------

    PhrasePtr parsePhrase() {
        SourceLoc loc = peek().loc;
        if (peek().isPunct("{")) return parseParallelSet();
        if (isDeclStart(peek())) return makePhrase(loc, parseDeclarationSeq());
        if (peek().isOp("?")) {
            take();
            return makePhrase(loc, BoolQuery{parseExpr()});
        }
        if (peek().isOp("?-")) {
            take();
            return makePhrase(loc, InstanceQuery{parseExpr()});
        }
        if (peek().isOp("+")) {
            take();
            return makePhrase(loc, Statement{StatementKind::AssertTrue, parseExpr()});
        }
        if (peek().isOp("-")) {
            take();
            return makePhrase(loc, Statement{StatementKind::AssertFalse, parseExpr()});
        }
        return makePhrase(loc, Statement{StatementKind::Trigger, parseExpr()});
    }

    PhrasePtr parseParallelSet() {
        SourceLoc loc = peek().loc;
        take(); // {
        ParallelSet set;
        while (!peek().isPunct("}")) {
            if (peek().is(TokenKind::End)) fail("unterminated parallel set", "}");
            set.phrases.push_back(parsePhrase());
            if (peek().isPunct("."))
                take();
            else if (!peek().isPunct("}"))
                fail("expected '.' or '}' in parallel set", ". or }");
        }
        take(); // }
        return makePhrase(loc, std::move(set));
    }

    // --- declarations -------------------------------------------------------

    DeclarationSeq parseDeclarationSeq() {
        DeclarationSeq seq;
        while (isDeclStart(peek())) seq.decls.push_back(parseTypeDecl());
        if (seq.decls.empty()) fail("expected a type declaration");
        return seq;
    }

    TypeDeclAst parseTypeDecl() {
        TypeDeclAst d;
        d.loc = peek().loc;
        if (peek().isKeyword("Extend")) {
            take();
            d.isExtend = true;
        }
        if (peek().isKeyword("Open")) {
            take();
            d.open = true;
        } else if (peek().isKeyword("Closed")) {
            take();
            d.open = false;
        }

        const Token& kindTok = peek();
        if (kindTok.isKeyword("Fact")) d.kind = TypeKind::Fact;
        else if (kindTok.isKeyword("Act")) d.kind = TypeKind::Act;
        else if (kindTok.isKeyword("Event")) d.kind = TypeKind::Event;
        else if (kindTok.isKeyword("Duty")) d.kind = TypeKind::Duty;
        else if (kindTok.isKeyword("Var")) { d.kind = TypeKind::Fact; d.isVar = true; }
        else if (kindTok.isKeyword("Function")) { d.kind = TypeKind::Fact; d.isFunction = true; }
        else if (kindTok.isKeyword("Bool")) { d.kind = TypeKind::Fact; d.isBool = true; }
        else if (kindTok.isKeyword("Physical")) { d.kind = TypeKind::Act; d.isPhysical = true; }
        else fail("expected a type kind", "Fact/Act/Event/Duty/Var/Function/Bool/Physical");
        take();

        // `Extend Fact ...`-style second keyword after Var/Function/Bool/Physical
        if ((d.isVar || d.isFunction || d.isBool) && peek().isKeyword("Fact")) take();
        if (d.isPhysical && peek().isKeyword("Act")) take();

        d.name = expectName();
        parseDeclClauses(d);
        if (d.isExtend &&
            (d.identifiedBy.kind != DomainSpec::Kind::None || d.hasDomainClause ||
             d.actorField || d.recipientField || d.holderField || d.claimantField || !d.relatedTo.empty()))
            throw ParseError(d.loc, "Extend may only add accumulating clauses to '" + d.name + "'");
        return d;
    }

    void parseDeclClauses(TypeDeclAst& d) {
        for (;;) {
            const Token& t = peek();
            if (t.isKeyword("Identified")) {
                take();
                expectKeyword("by");
                parseIdentifiedBy(d);
            } else if (t.isKeyword("Domain")) {
                take();
                d.hasDomainClause = true;
                parseLiteralList(d.domainLiterals);
            } else if (t.isKeyword("Related")) {
                take();
                expectKeyword("to");
                parseFieldList(d.relatedTo);
                rejectDomainWhen();
            } else if (t.isKeyword("Actor")) {
                take();
                d.actorField = FieldDecl{expectName()};
            } else if (t.isKeyword("Recipient")) {
                take();
                d.recipientField = FieldDecl{expectName()};
            } else if (t.isKeyword("Holder")) {
                take();
                d.holderField = FieldDecl{expectName()};
            } else if (t.isKeyword("Claimant")) {
                take();
                d.claimantField = FieldDecl{expectName()};
            } else if (t.isKeyword("Holds") && peek(1).isKeyword("when")) {
                take();
                take();
                d.clauses.push_back(Clause{ClauseKind::HoldsWhen, {parseExpr()}});
            } else if (t.isKeyword("Derived")) {
                take();
                expectKeyword("from");
                d.clauses.push_back(Clause{ClauseKind::DerivedFrom, parseExprList()});
            } else if (t.isKeyword("Conditioned")) {
                take();
                expectKeyword("by");
                d.clauses.push_back(Clause{ClauseKind::ConditionedBy, parseExprList()});
            } else if (t.isKeyword("Creates")) {
                take();
                d.clauses.push_back(Clause{ClauseKind::Creates, parseExprList()});
            } else if (t.isKeyword("Terminates")) {
                take();
                d.clauses.push_back(Clause{ClauseKind::Terminates, parseExprList()});
            } else if (t.isKeyword("Obfuscates")) {
                take();
                d.clauses.push_back(Clause{ClauseKind::Obfuscates, parseExprList()});
            } else if (t.isKeyword("Violated") && peek(1).isKeyword("when")) {
                take();
                take();
                d.clauses.push_back(Clause{ClauseKind::ViolatedWhen, parseExprList()});
            } else if (t.isKeyword("Syncs")) {
                take();
                expectKeyword("with");
                d.clauses.push_back(Clause{ClauseKind::SyncsWith, parseExprList()});
            } else {
                return;
            }
        }
    }

    void expectKeyword(const char* kw) {
        if (!peek().isKeyword(kw)) fail(std::string("expected '") + kw + "'", kw);
        take();
    }

    void rejectDomainWhen() {
        if (peek().isKeyword("When"))
            throw ParseError(peek().loc,
                             "'When' after a domain clause is not supported; "
                             "use Conditioned by to suppress instances instead");
    }

    void parseIdentifiedBy(TypeDeclAst& d) {
        if (peek().isKeyword("String")) {
            take();
            d.identifiedBy.kind = DomainSpec::Kind::PrimString;
            rejectDomainWhen();
            return;
        }
        if (peek().isKeyword("Int")) {
            take();
            d.identifiedBy.kind = DomainSpec::Kind::PrimInt;
            rejectDomainWhen();
            return;
        }
        if (peek().is(TokenKind::IntLit)) {
            int64_t lo = take().num;
            if (!peek().isOp("..")) fail("expected '..' in integer range", "..");
            take();
            if (!peek().is(TokenKind::IntLit)) fail("expected range upper bound", "integer");
            int64_t hi = take().num;
            d.identifiedBy.kind = DomainSpec::Kind::IntRange;
            d.identifiedBy.lo = lo;
            d.identifiedBy.hi = hi;
            rejectDomainWhen();
            return;
        }
        d.identifiedBy.kind = DomainSpec::Kind::Fields;
        d.identifiedBy.fields.push_back(FieldDecl{expectName()});
        while (peek().isOp("*")) {
            take();
            d.identifiedBy.fields.push_back(FieldDecl{expectName()});
        }
        rejectDomainWhen();
    }

    void parseFieldList(std::vector<FieldDecl>& out) {
        out.push_back(FieldDecl{expectName()});
        while (peek().isPunct(",")) {
            take();
            out.push_back(FieldDecl{expectName()});
        }
    }

    void parseLiteralList(std::vector<Literal>& out) {
        for (;;) {
            if (peek().is(TokenKind::IntLit)) {
                int64_t lo = take().num;
                if (peek().isOp("..")) {
                    take();
                    if (!peek().is(TokenKind::IntLit)) fail("expected range upper bound", "integer");
                    int64_t hi = take().num;
                    for (int64_t v = lo; v <= hi; ++v) out.push_back(Literal(v));
                } else {
                    out.push_back(Literal(lo));
                }
            } else if (peek().is(TokenKind::StrLit) || peek().is(TokenKind::Ident)) {
                out.push_back(Literal(take().text));
            } else {
                fail("expected a literal in Domain clause", "integer, string or atom");
            }
            if (!peek().isPunct(",")) return;
            take();
        }
    }

    std::vector<ExprPtr> parseExprList() {
        std::vector<ExprPtr> out;
        out.push_back(parseExpr());
        while (peek().isPunct(",")) {
            take();
            out.push_back(parseExpr());
        }
        return out;
    }

    // --- expressions ---------------------------------------------------------
    // Precedence, loosest first: When/Where guards, ||, &&, comparisons,
    // additive, multiplicative, unary minus, projection/application.

    ExprPtr parseExpr() { return parseGuarded(); }

    ExprPtr parseGuarded() {
        ExprPtr e = parseOr();
        while (peek().isKeyword("When") || peek().isKeyword("Where")) {
            SourceLoc loc = peek().loc;
            take();
            ExprPtr g = parseOr();
            e = makeExpr<Guarded>(loc, e, g);
        }
        return e;
    }

    ExprPtr parseOr() {
        ExprPtr e = parseAnd();
        while (peek().isOp("||")) {
            SourceLoc loc = take().loc;
            e = makeExpr<Binary>(loc, BinOp::Or, e, parseAnd());
        }
        return e;
    }

    ExprPtr parseAnd() {
        ExprPtr e = parseCmp();
        while (peek().isOp("&&")) {
            SourceLoc loc = take().loc;
            e = makeExpr<Binary>(loc, BinOp::And, e, parseCmp());
        }
        return e;
    }

    ExprPtr parseCmp() {
        ExprPtr e = parseAdd();
        static const std::pair<const char*, BinOp> ops[] = {
            {"==", BinOp::Eq}, {"!=", BinOp::Ne}, {"<=", BinOp::Le},
            {">=", BinOp::Ge}, {"<", BinOp::Lt},  {">", BinOp::Gt},
        };
        for (auto [text, op] : ops) {
            if (peek().isOp(text)) {
                SourceLoc loc = take().loc;
                return makeExpr<Binary>(loc, op, e, parseAdd());
            }
        }
        return e;
    }

    ExprPtr parseAdd() {
        ExprPtr e = parseMul();
        for (;;) {
            if (peek().isOp("+")) {
                SourceLoc loc = take().loc;
                e = makeExpr<Binary>(loc, BinOp::Add, e, parseMul());
            } else if (peek().isOp("-")) {
                SourceLoc loc = take().loc;
                e = makeExpr<Binary>(loc, BinOp::Sub, e, parseMul());
            } else {
                return e;
            }
        }
    }

    ExprPtr parseMul() {
        ExprPtr e = parseUnary();
        for (;;) {
            if (peek().isOp("*")) {
                SourceLoc loc = take().loc;
                e = makeExpr<Binary>(loc, BinOp::Mul, e, parseUnary());
            } else if (peek().isOp("/")) {
                SourceLoc loc = take().loc;
                e = makeExpr<Binary>(loc, BinOp::Div, e, parseUnary());
            } else {
                return e;
            }
        }
    }

    ExprPtr parseUnary() {
        if (peek().isOp("-")) {
            SourceLoc loc = take().loc;
            ExprPtr zero = makeExpr<IntLitExpr>(loc, int64_t{0});
            return makeExpr<Binary>(loc, BinOp::Sub, zero, parseUnary());
        }
        return parsePostfix();
    }

    ExprPtr parsePostfix() {
        ExprPtr e = parsePrimary();
        while (peek().isOp(".")) {
            SourceLoc loc = take().loc;
            e = makeExpr<Proj>(loc, e, expectName());
        }
        return e;
    }

    ExprPtr parsePrimary() {
        const Token& t = peek();
        SourceLoc loc = t.loc;

        if (t.is(TokenKind::IntLit)) return makeExpr<IntLitExpr>(loc, take().num);
        if (t.is(TokenKind::StrLit)) return makeExpr<StrLitExpr>(loc, take().text, true);
        if (t.isKeyword("True")) { take(); return makeExpr<BoolLit>(loc, true); }
        if (t.isKeyword("False")) { take(); return makeExpr<BoolLit>(loc, false); }

        if (t.isKeyword("Not")) { take(); return makeExpr<NotExpr>(loc, parseParenExpr()); }
        if (t.isKeyword("Holds")) { take(); return makeExpr<BuiltinCall>(loc, BuiltinKind::Holds, parseParenExpr()); }
        if (t.isKeyword("Enabled")) { take(); return makeExpr<BuiltinCall>(loc, BuiltinKind::Enabled, parseParenExpr()); }
        if (t.isKeyword("Violated")) { take(); return makeExpr<BuiltinCall>(loc, BuiltinKind::Violated, parseParenExpr()); }

        if (t.isKeyword("Foreach") || t.isKeyword("Forall") || t.isKeyword("Exists")) {
            QuantKind kind = t.text == "Foreach"  ? QuantKind::Foreach
                             : t.text == "Forall" ? QuantKind::Forall
                                                  : QuantKind::Exists;
            take();
            std::vector<std::string> vars;
            vars.push_back(expectName());
            while (peek().isPunct(",")) {
                take();
                vars.push_back(expectName());
            }
            if (!peek().isPunct(":")) fail("expected ':' after quantified variables", ":");
            take();
            return makeExpr<Quant>(loc, kind, std::move(vars), parseExpr());
        }

        if (t.isKeyword("Count") || t.isKeyword("Sum") || t.isKeyword("Max") || t.isKeyword("Min")) {
            AggKind kind = t.text == "Count" ? AggKind::Count
                           : t.text == "Sum" ? AggKind::Sum
                           : t.text == "Max" ? AggKind::Max
                                             : AggKind::Min;
            take();
            return makeExpr<Aggregate>(loc, kind, parseParenExpr());
        }

        if (t.is(TokenKind::Ident) || t.is(TokenKind::BracketedIdent)) {
            std::string name = take().text;
            if (!peek().isPunct("(")) return makeExpr<VarRef>(loc, std::move(name));
            take();
            std::vector<CtorArg> args;
            if (!peek().isPunct(")")) {
                for (;;) {
                    CtorArg arg;
                    if ((peek().is(TokenKind::Ident) || peek().is(TokenKind::BracketedIdent)) &&
                        peek(1).isOp("=")) {
                        arg.field = take().text;
                        take();
                    }
                    arg.value = parseExpr();
                    args.push_back(std::move(arg));
                    if (peek().isPunct(",")) {
                        take();
                        continue;
                    }
                    break;
                }
            }
            if (!peek().isPunct(")")) fail("expected ')' after constructor arguments", ")");
            take();
            return makeExpr<CtorApp>(loc, std::move(name), std::move(args));
        }

        if (t.isPunct("(")) {
            take();
            ExprPtr e = parseExpr();
            if (!peek().isPunct(")")) fail("expected ')'", ")");
            take();
            return e;
        }

        fail("expected an expression");
    }

    ExprPtr parseParenExpr() {
        if (!peek().isPunct("(")) fail("expected '('", "(");
        take();
        ExprPtr e = parseExpr();
        if (!peek().isPunct(")")) fail("expected ')'", ")");
        take();
        return e;
    }
};

} // namespace

IncludeResolver fileIncludeResolver() {
    IncludeResolver r;
    r.canonical = [](const std::string& path, const std::string& fromFile) {
        namespace fs = std::filesystem;
        fs::path p(path);
        if (p.is_relative() && !fromFile.empty() && fromFile[0] != '<')
            p = fs::path(fromFile).parent_path() / p;
        std::error_code ec;
        fs::path canon = fs::weakly_canonical(p, ec);
        return ec ? p.lexically_normal().string() : canon.string();
    };
    r.load = [canonical = r.canonical](const std::string& path,
                                       const std::string& fromFile) -> std::optional<std::string> {
        std::ifstream in(canonical(path, fromFile), std::ios::binary);
        if (!in) return std::nullopt;
        std::ostringstream ss;
        ss << in.rdbuf();
        return ss.str();
    };
    return r;
}

std::vector<PhrasePtr> parse_program(const std::string& source, const std::string& filename,
                                     const IncludeResolver* resolver) {
    ParseCtx ctx;
    ctx.resolver = resolver;
    if (resolver && resolver->canonical) ctx.includeStack.push_back(resolver->canonical(filename, ""));
    Parser p(tokenize(source, filename), filename, ctx);
    return p.parseProgram();
}

ExprPtr parse_expression(const std::string& source, const std::string& filename) {
    ParseCtx ctx;
    Parser p(tokenize(source, filename), filename, ctx);
    return p.parseSingleExpression();
}

} // namespace normspec
