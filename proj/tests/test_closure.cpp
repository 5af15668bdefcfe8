#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "normspec/closure.hpp"
#include "normspec/parser.hpp"
#include "normspec/session.hpp"
#include "normspec/stratify.hpp"

using namespace normspec;

namespace {

std::vector<int64_t> heldInts(const Session& session, const std::string& type) {
    const State& s = session.head();
    std::vector<int64_t> out;
    for (const Instance& inst : s.kb.heldOfType(*s.registry, type)) {
        const Value& payload = inst.args.at(0);
        out.push_back(payload.isLiteral() ? payload.literal().num()
                                          : payload.instance().args.at(0).literal().num());
    }
    return out;
}

} // namespace

TEST_CASE("dependency graph basics") {
    auto phrases = parse_program(R"(
Fact bidder Identified by String
Fact ready Identified by bidder Holds when Not(ready(bidder))
Fact object Identified by String
Fact price Identified by Int
Function min-price-of Identified by object * price
Extend Fact object Derived from min-price-of.object.
)");
    Registry reg;
    for (const auto& p : phrases)
        reg = reg.applyDeclarations(std::get<DeclarationSeq>(p->node).decls);
    DependencyGraph g = build_dependency_graph(reg);
    bool negSelf = false, posEdge = false;
    for (const DepEdge& e : g.edges) {
        if (e.from == "ready" && e.to == "ready" && e.negative) negSelf = true;
        if (e.from == "object" && e.to == "min-price-of" && !e.negative) posEdge = true;
    }
    CHECK(negSelf);
    CHECK(posEdge);
}

TEST_CASE("empty registry gives an empty-but-consistent graph") {
    Registry reg;
    DependencyGraph g = build_dependency_graph(reg);
    Stratification strat = check_stratification(g);
    CHECK(strat.ok);
}

TEST_CASE("stratification verdicts") {
    SUBCASE("self negation is rejected with the one-line cycle") {
        Session s;
        CHECK_THROWS_WITH_AS(
            s.executeText("Fact bidder Identified by String "
                          "Fact ready Identified by bidder Holds when Not(ready(bidder))."),
            "specification is not stratified: ready -[neg]-> ready", StratificationError);
    }
    SUBCASE("the default-auctioneer symmetry is rejected") {
        Session s;
        s.executeText("Fact bidder Identified by String Fact auctioneer Identified by String.");
        CHECK_THROWS_AS(
            s.executeText("Extend Fact auctioneer Derived from bidder "
                          "When Not(Exists auctioneer': auctioneer' != bidder)."),
            StratificationError);
    }
    SUBCASE("the non-strict minimum-price rule is rejected") {
        Session s;
        CHECK_THROWS_AS(s.executeText(R"(
Fact object Identified by String Fact price Identified by Int
Fact bid Identified by object * price
Function min-price-of Identified by object * price
  Derived from bid Where
    Not(Exists min-price-of':
        min-price-of'.object == bid.object
     && min-price-of'.price <= bid.price).
)"),
                        StratificationError);
    }
    SUBCASE("the complete auction example is stratified") {
        Session s;
        CHECK_NOTHROW(s.executeText(R"(
Fact bidder Identified by String
Fact object Identified by String
Fact price Identified by Int
Var display Identified by object
Function min-price-of Identified by object * price
Fact bid Identified by bidder * object * price * int.
Extend Fact object Derived from min-price-of.object
Extend Fact price Derived from min-price-of.price, bid.price.
Var highest-bid Identified by bidder * price Holds when
 (Exists bid: bid.bidder == bidder && bid.price == price
           && bid.object == display.object
           && (Forall bid': bid'.price <= price When bid'.object == display.object)).
Var auctioneer
Act start-bidding Related to object Holds when auctioneer(actor) Creates display(object)
Act place-bid Actor bidder Related to object, price Holds when bidder
 Conditioned by display(object), price >
  Max(Foreach bid: bid.price When bid.object == object)
 Creates bid(int = Count(Foreach bid: bid When bid.object == object))
Physical raise-hand Syncs with place-bid(bidder = actor, object = object,
  price = min-price-of.price + 10*Count(Foreach bid: bid When bid.object == object))
 When bidder(actor) && display(object) && (min-price-of.object == object)
Bool undue-payment-delay
Duty payment-duty Holder bidder Claimant auctioneer Related to price
  Violated when undue-payment-delay()
Act end-bidding Holds when auctioneer(actor)
 Creates payment-duty(bidder=highest-bid.bidder, price=highest-bid.price)
 Terminates display.object, bid When bid.object == display.object.
)"));
    }
}

TEST_CASE("chain closure derives the whole descent") {
    Session s;
    s.executeText("Fact x Identified by int Derived from "
                  "(Foreach x: x(x.int - 1) Where 0 < x.int).");
    s.executeText("+x(8).");
    auto held = heldInts(s, "x");
    REQUIRE(held.size() == 9);
    CHECK(held.front() == 0);
    CHECK(held.back() == 8);
}

TEST_CASE("closure without rules is the identity on the held set") {
    Session s;
    s.executeText("Fact a Identified by String. +a(X).");
    const State& st = s.head();
    KnowledgeBase again = close(st.kb, *st.registry);
    CHECK(again == st.kb);
}

TEST_CASE("closure is idempotent") {
    Session s;
    s.executeText("Fact x Identified by int Derived from "
                  "(Foreach x: x(x.int - 1) Where 0 < x.int). +x(5).");
    const State& st = s.head();
    KnowledgeBase once = close(st.kb, *st.registry);
    KnowledgeBase twice = close(once, *st.registry);
    CHECK(once == twice);
}

TEST_CASE("the prime sieve spec derives exactly the primes") {
    Session s;
    s.executeText(R"(
Fact prime Identified by Int
  Derived from (Foreach int: prime(int)
    Where Not(Exists int1, int2: 1 Where int1 * int2 == int)).
Event addleq Related to int Creates int
  Syncs with addleq(int - 1) Where 2 < int.
)");
    s.executeText("addleq(30).");
    CHECK(heldInts(s, "prime") ==
          std::vector<int64_t>{2, 3, 5, 7, 11, 13, 17, 19, 23, 29});
}

TEST_CASE("conditions suppress derived instances until they pass") {
    Session s;
    s.executeText(R"(
Fact a Identified by String
Fact gate Identified by String
Fact b Identified by a Derived from (Foreach a: b(a)) Conditioned by gate(a).
+a(X).
)");
    const State& st = s.head();
    CHECK(st.kb.heldOfType(*st.registry, "b").empty());
    s.executeText("+gate(X).");
    const State& st2 = s.head();
    CHECK(st2.kb.heldOfType(*st2.registry, "b").size() == 1);
}

TEST_CASE("asserted falsity is not re-derived by closure") {
    Session s;
    s.executeText("Fact a Identified by String Fact b Identified by String Derived from a. "
                  "+a(X). -b(X).");
    const State& st = s.head();
    CHECK(st.kb.heldOfType(*st.registry, "b").empty());
}

TEST_CASE("fixpoint budget aborts runaway closures") {
    SemanticsOptions opts;
    opts.maxFixpointIters = 3;
    Session s(opts);
    s.executeText("Fact x Identified by Int Derived from (Foreach x: x(x + 1)).");
    CHECK_THROWS_AS(s.executeText("+x(0)."), FixpointBudgetError);
}

TEST_CASE("monotonicity: the derived layer only grows within a stratum") {
    Session s;
    s.executeText("Fact x Identified by int Derived from "
                  "(Foreach x: x(x.int - 1) Where 0 < x.int).");
    s.executeText("+x(3).");
    size_t after3 = s.head().kb.derived().size();
    s.executeText("+x(6).");
    CHECK(s.head().kb.derived().size() >= after3);
}
