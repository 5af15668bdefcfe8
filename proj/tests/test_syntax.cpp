#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "normspec/lexer.hpp"
#include "normspec/parser.hpp"
#include "normspec/printer.hpp"

using namespace normspec;

TEST_CASE("lexer: hyphenated identifiers, primes, brackets") {
    auto toks = tokenize("min-price-of' bid' [valid marriage] x - 1 1..5", "t");
    REQUIRE(toks.size() == 10); // incl. End
    CHECK(toks[0].text == "min-price-of'");
    CHECK(toks[0].kind == TokenKind::Ident);
    CHECK(toks[1].text == "bid'");
    CHECK(toks[2].kind == TokenKind::BracketedIdent);
    CHECK(toks[2].text == "[valid marriage]");
    CHECK(toks[3].text == "x");
    CHECK(toks[4].isOp("-"));
    CHECK(toks[5].num == 1);
    CHECK(toks[6].num == 1);
    CHECK(toks[7].isOp(".."));
    CHECK(toks[8].num == 5);
}

TEST_CASE("lexer: projection dot vs fragment stop") {
    auto toks = tokenize("bid.object. raise-hand(Alice).", "t");
    CHECK(toks[1].isOp("."));    // projection
    CHECK(toks[3].isPunct(".")); // terminator
    auto last = tokenize("?-bid.", "t");
    CHECK(last[0].isOp("?-"));
    CHECK(last[2].isPunct("."));
}

TEST_CASE("lexer: comments and strings") {
    auto toks = tokenize("+bidder(Alice). // action trigger\n+user(\"Ad\\\"min\").", "t");
    bool sawComment = false;
    for (const auto& t : toks) sawComment |= t.text.find("trigger") != std::string::npos;
    CHECK(!sawComment);
    bool sawString = false;
    for (const auto& t : toks)
        if (t.kind == TokenKind::StrLit) {
            CHECK(t.text == "Ad\"min");
            sawString = true;
        }
    CHECK(sawString);
}

TEST_CASE("parse: assertion statement") {
    auto phrases = parse_program("+bidder(Alice).");
    REQUIRE(phrases.size() == 1);
    auto* stmt = std::get_if<Statement>(&phrases[0]->node);
    REQUIRE(stmt);
    CHECK(stmt->kind == StatementKind::AssertTrue);
    auto* ctor = std::get_if<CtorApp>(&stmt->expr->node);
    REQUIRE(ctor);
    CHECK(ctor->type == "bidder");
    REQUIRE(ctor->args.size() == 1);
}

TEST_CASE("parse: empty program") { CHECK(parse_program("").empty()); }

TEST_CASE("parse: parallel set") {
    auto phrases = parse_program("{ +a(). +b() }.");
    REQUIRE(phrases.size() == 1);
    auto* set = std::get_if<ParallelSet>(&phrases[0]->node);
    REQUIRE(set);
    CHECK(set->phrases.size() == 2);
}

TEST_CASE("parse: declarations without separating stops form one sequence") {
    auto phrases = parse_program(R"(
Fact     bidder       Identified by String
Fact     object       Identified by String
Fact     price        Identified by Int
Var      display      Identified by object
Function min-price-of Identified by object * price
Fact bid Identified by bidder * object * price * int.
)");
    REQUIRE(phrases.size() == 1);
    auto* seq = std::get_if<DeclarationSeq>(&phrases[0]->node);
    REQUIRE(seq);
    REQUIRE(seq->decls.size() == 6);
    CHECK(seq->decls[3].isVar);
    CHECK(seq->decls[4].isFunction);
    CHECK(seq->decls[5].identifiedBy.fields.size() == 4);
}

TEST_CASE("parse: act with clauses and guard precedence") {
    auto phrases = parse_program(R"(
Act place-bid Actor bidder Related to object, price
 Holds when bidder
 Conditioned by display(object), price >
  Max(Foreach bid: bid.price When bid.object == object)
 Creates bid(int =
  Count(Foreach bid: bid When bid.object == object)).
)");
    REQUIRE(phrases.size() == 1);
    auto* seq = std::get_if<DeclarationSeq>(&phrases[0]->node);
    REQUIRE(seq);
    const TypeDeclAst& d = seq->decls.at(0);
    CHECK(d.kind == TypeKind::Act);
    REQUIRE(d.actorField);
    CHECK(d.actorField->label == "bidder");
    REQUIRE(d.clauses.size() == 3);
    CHECK(d.clauses[0].kind == ClauseKind::HoldsWhen);
    CHECK(d.clauses[1].kind == ClauseKind::ConditionedBy);
    CHECK(d.clauses[1].exprs.size() == 2);
    CHECK(d.clauses[2].kind == ClauseKind::Creates);

    // the When guard applies to the whole comparison inside the aggregate
    const ExprPtr& cond = d.clauses[1].exprs[1];
    auto* cmp = std::get_if<Binary>(&cond->node);
    REQUIRE(cmp);
    CHECK(cmp->op == BinOp::Gt);
    auto* agg = std::get_if<Aggregate>(&cmp->rhs->node);
    REQUIRE(agg);
    auto* foreach = std::get_if<Quant>(&agg->body->node);
    REQUIRE(foreach);
    auto* guarded = std::get_if<Guarded>(&foreach->body->node);
    REQUIRE(guarded);
}

TEST_CASE("parse: duty declaration") {
    auto phrases = parse_program(R"(
Bool undue-payment-delay
Duty payment-duty Holder bidder Claimant auctioneer
  Related to price
  Violated when undue-payment-delay().
)");
    auto* seq = std::get_if<DeclarationSeq>(&phrases.at(0)->node);
    REQUIRE(seq);
    REQUIRE(seq->decls.size() == 2);
    CHECK(seq->decls[0].isBool);
    const TypeDeclAst& duty = seq->decls[1];
    CHECK(duty.kind == TypeKind::Duty);
    REQUIRE(duty.holderField);
    REQUIRE(duty.claimantField);
    CHECK(duty.relatedTo.size() == 1);
}

TEST_CASE("parse: guard binds looser than && and comparisons") {
    ExprPtr e = parse_expression("bidder(actor) && display(object) When min-price-of.object == object");
    auto* g = std::get_if<Guarded>(&e->node);
    REQUIRE(g);
    auto* conj = std::get_if<Binary>(&g->value->node);
    REQUIRE(conj);
    CHECK(conj->op == BinOp::And);
    auto* cmp = std::get_if<Binary>(&g->guard->node);
    REQUIRE(cmp);
    CHECK(cmp->op == BinOp::Eq);
}

TEST_CASE("parse: every running-example listing parses") {
    const char* listings[] = {
        "Fact bidder Identified by String\n"
        "Fact object Identified by String\n"
        "Fact price Identified by Int\n"
        "Var display Identified by object\n"
        "Function min-price-of Identified by object * price\n"
        "Fact bid Identified by bidder * object * price * int.",
        "+min-price-of(Watch, 100). +min-price-of(Clock, 200). +min-price-of(Painting, 400).",
        "Extend Fact object Derived from min-price-of.object\n"
        "Extend Fact price  Derived from min-price-of.price, bid.price.",
        "Var highest-bid Identified by bidder * price Holds when\n"
        " (Exists bid: bid.bidder == bidder && bid.price == price\n"
        "           && bid.object == display.object\n"
        "           && (Forall bid': bid'.price <= price\n"
        "                When bid'.object == display.object)).",
        "Var auctioneer // responsible for displaying objects\n"
        "Act start-bidding Related to object\n"
        "  Holds when auctioneer(actor)\n"
        "  Creates display(object).",
        "Act place-bid Actor bidder Related to object, price\n"
        " Holds when bidder\n"
        " Conditioned by display(object), price >\n"
        "  Max(Foreach bid: bid.price When bid.object == object)\n"
        " Creates bid(int =\n"
        "  Count(Foreach bid: bid When bid.object == object)).",
        "Physical raise-hand Syncs with place-bid(\n"
        " bidder = actor, object = object, price =\n"
        "  min-price-of.price + 10*\n"
        "   Count(Foreach bid: bid When bid.object == object))\n"
        " When bidder(actor) && display(object) && (min-price-of.object == object).",
        "Bool undue-payment-delay\n"
        "Duty payment-duty Holder bidder Claimant auctioneer\n"
        "  Related to price\n"
        "  Violated when undue-payment-delay().",
        "Act end-bidding Holds when auctioneer(actor)\n"
        " Creates payment-duty(bidder=highest-bid.bidder\n"
        "                     ,price=highest-bid.price)\n"
        "  Terminates display.object\n"
        "            ,bid When bid.object == display.object.",
        "+bidder(Alice). +bidder(Bob). +bidder(Chloe).\n"
        "+auctioneer(David).\n"
        "start-bidding(David, Watch). // action trigger\n"
        "raise-hand(Alice). raise-hand(Bob). raise-hand(Alice).\n"
        "raise-hand(Chloe). raise-hand(Bob).\n"
        "end-bidding(David).\n"
        "?payment-duty(Bob, David, 140). // evaluates to True",
    };
    for (const char* listing : listings) {
        CAPTURE(listing);
        CHECK_NOTHROW(parse_program(listing));
    }
}

TEST_CASE("parse: bracketed names survive a round trip") {
    auto phrases = parse_program("Fact [valid marriage] Identified by [spouses].");
    std::string printed = print_phrase(phrases.at(0));
    CHECK(printed.find("[valid marriage]") != std::string::npos);
    CHECK(printed.find("[spouses]") != std::string::npos);
    CHECK(print_program(parse_program(printed)) == print_program(phrases));
}

TEST_CASE("include: splices fragments; require is once-only; cycles error") {
    IncludeResolver resolver;
    resolver.canonical = [](const std::string& p, const std::string&) { return p; };
    resolver.load = [](const std::string& p, const std::string&) -> std::optional<std::string> {
        if (p == "lib") return std::string("Fact a Identified by String.");
        if (p == "loop") return std::string("#include \"loop\".");
        return std::nullopt;
    };

    auto once = parse_program("#include \"lib\". +a(X).", "main", &resolver);
    CHECK(once.size() == 2);

    auto twiceReq = parse_program("#require \"lib\". #require \"lib\".", "main", &resolver);
    auto onceReq = parse_program("#require \"lib\".", "main", &resolver);
    CHECK(print_program(twiceReq) == print_program(onceReq));

    CHECK_THROWS_AS(parse_program("#include \"loop\".", "main", &resolver), IncludeCycleError);
    CHECK_THROWS_AS(parse_program("#include \"missing\".", "main", &resolver), MissingFileError);
}

// --- round-trip property ----------------------------------------------------

namespace {

ExprPtr genExpr(std::mt19937& rng, int depth);

std::string genName(std::mt19937& rng) {
    static const char* names[] = {"bid", "bidder", "price", "min-price-of", "bid'", "x1",
                                  "display", "[valid marriage]"};
    return names[rng() % 8];
}

ExprPtr genLeaf(std::mt19937& rng) {
    SourceLoc loc;
    switch (rng() % 4) {
        case 0: return makeExpr<IntLitExpr>(loc, static_cast<int64_t>(rng() % 100));
        case 1: return makeExpr<StrLitExpr>(loc, "atom", true);
        case 2: return makeExpr<VarRef>(loc, genName(rng));
        default: return makeExpr<BoolLit>(loc, rng() % 2 == 0);
    }
}

ExprPtr genExpr(std::mt19937& rng, int depth) {
    SourceLoc loc;
    if (depth <= 0) return genLeaf(rng);
    switch (rng() % 9) {
        case 0: {
            BinOp ops[] = {BinOp::Or, BinOp::And, BinOp::Eq,  BinOp::Ne,  BinOp::Lt, BinOp::Le,
                           BinOp::Gt, BinOp::Ge,  BinOp::Add, BinOp::Sub, BinOp::Mul, BinOp::Div};
            return makeExpr<Binary>(loc, ops[rng() % 12], genExpr(rng, depth - 1),
                                    genExpr(rng, depth - 1));
        }
        case 1: return makeExpr<NotExpr>(loc, genExpr(rng, depth - 1));
        case 2: return makeExpr<BuiltinCall>(loc, BuiltinKind::Holds, genExpr(rng, depth - 1));
        case 3: {
            std::vector<std::string> vars{genName(rng)};
            QuantKind kinds[] = {QuantKind::Foreach, QuantKind::Forall, QuantKind::Exists};
            return makeExpr<Quant>(loc, kinds[rng() % 3], std::move(vars),
                                   genExpr(rng, depth - 1));
        }
        case 4: {
            AggKind kinds[] = {AggKind::Count, AggKind::Sum, AggKind::Max, AggKind::Min};
            std::vector<std::string> vars{genName(rng)};
            ExprPtr body = makeExpr<Quant>(loc, QuantKind::Foreach, std::move(vars),
                                           genExpr(rng, depth - 1));
            return makeExpr<Aggregate>(loc, kinds[rng() % 4], body);
        }
        case 5: return makeExpr<Guarded>(loc, genExpr(rng, depth - 1), genExpr(rng, depth - 1));
        case 6: {
            std::vector<CtorArg> args;
            size_t n = rng() % 3;
            for (size_t i = 0; i < n; ++i) {
                CtorArg a;
                if (rng() % 2) a.field = std::string("f") + char('a' + i);
                a.value = genExpr(rng, depth - 1);
                args.push_back(std::move(a));
            }
            return makeExpr<CtorApp>(loc, genName(rng), std::move(args));
        }
        case 7: return makeExpr<Proj>(loc, genExpr(rng, depth - 1), "price");
        default: return genLeaf(rng);
    }
}

} // namespace

TEST_CASE("property: print then parse is the identity on generated expressions") {
    std::mt19937 rng(20240811);
    for (int i = 0; i < 500; ++i) {
        ExprPtr e = genExpr(rng, 4);
        std::string once = print_expr(e);
        ExprPtr reparsed = parse_expression(once);
        std::string twice = print_expr(reparsed);
        CAPTURE(once);
        CHECK(once == twice);
    }
}

TEST_CASE("property: statements and queries round-trip") {
    std::mt19937 rng(7);
    for (int i = 0; i < 200; ++i) {
        SourceLoc loc;
        ExprPtr e = genExpr(rng, 3);
        PhrasePtr p;
        switch (rng() % 4) {
            case 0: p = makePhrase(loc, Statement{StatementKind::AssertTrue, e}); break;
            case 1: p = makePhrase(loc, Statement{StatementKind::AssertFalse, e}); break;
            case 2: p = makePhrase(loc, BoolQuery{e}); break;
            default: p = makePhrase(loc, InstanceQuery{e}); break;
        }
        std::string once = print_phrase(p);
        CAPTURE(once);
        auto phrases = parse_program(once);
        REQUIRE(phrases.size() == 1);
        CHECK(print_phrase(phrases[0]) == once);
    }
}
