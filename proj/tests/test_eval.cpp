#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "normspec/closure.hpp"
#include "normspec/eval.hpp"
#include "normspec/parser.hpp"
#include "normspec/session.hpp"
#include "normspec/transition.hpp"

using namespace normspec;

namespace {

bool queryText(Session& session, const std::string& expr) {
    PhraseOutcome outcome = session.executeText("?" + expr + ".");
    REQUIRE(outcome.queries.size() == 1);
    return outcome.queries[0].boolResult;
}

std::vector<Instance> instQuery(Session& session, const std::string& expr) {
    PhraseOutcome outcome = session.executeText("?-" + expr + ".");
    REQUIRE(outcome.queries.size() == 1);
    return outcome.queries[0].instances;
}

} // namespace

TEST_CASE("counting over finite vs infinite domains") {
    SUBCASE("finite 1..5 counts the whole domain") {
        Session s;
        s.executeText("Fact number Identified by 1..5. +number(1). +number(3). +number(5).");
        s.executeText("Var count-all Identified by Int Derived from Count(Foreach number: number). "
                      "Var count Identified by Int Derived from "
                      "Count(Foreach number: number When Holds(number)).");
        CHECK(queryText(s, "count-all(5)"));
        CHECK(queryText(s, "count(3)"));
    }
    SUBCASE("infinite Int counts only held instances") {
        Session s;
        s.executeText("Fact number Identified by Int. +number(1). +number(3). +number(5).");
        s.executeText("Var count-all Identified by Int Derived from Count(Foreach number: number). "
                      "Var count Identified by Int Derived from "
                      "Count(Foreach number: number When Holds(number)).");
        CHECK(queryText(s, "count-all(3)"));
        CHECK(queryText(s, "count(3)"));
    }
}

TEST_CASE("quantifiers over the empty enumeration") {
    Session s;
    s.executeText("Fact bid Identified by String. Fact price Identified by Int.");
    CHECK(queryText(s, "Forall bid: False"));
    CHECK(!queryText(s, "Exists bid: True"));
    CHECK(queryText(s, "Count(Foreach bid: bid) == 0"));
    CHECK(queryText(s, "Sum(Foreach bid: bid) == 0"));
}

TEST_CASE("Max over the empty enumeration compares as minus infinity") {
    Session s;
    s.executeText("Fact bid Identified by Int. Fact price Identified by Int.");
    CHECK(queryText(s, "100 > Max(Foreach bid: bid)"));
    CHECK(queryText(s, "0 - 100 > Max(Foreach bid: bid)"));
    CHECK(!queryText(s, "Max(Foreach bid: bid) > 100"));
    CHECK(queryText(s, "Min(Foreach bid: bid) > 100")); // +infinity
    s.executeText("+bid(7).");
    CHECK(queryText(s, "Max(Foreach bid: bid) == 7"));
}

TEST_CASE("the empty-aggregate flag turns sentinels into hard errors") {
    SemanticsOptions opts;
    opts.emptyAggregateError = true;
    Session s(opts);
    s.executeText("Fact bid Identified by Int.");
    CHECK_THROWS_AS(s.executeText("?100 > Max(Foreach bid: bid)."), EvalError);
}

TEST_CASE("sentinels cannot be stored in instances") {
    Session s;
    s.executeText("Fact bid Identified by Int. Fact top Identified by Int.");
    CHECK_THROWS_AS(s.executeText("+top(Max(Foreach bid: bid))."), EvalError);
}

TEST_CASE("implicit constructor arguments copy bound fields") {
    Session s;
    s.executeText(R"(
Fact bidder Identified by String
Fact object Identified by String
Fact price Identified by Int
Fact bid Identified by bidder * object * price * int
Act place-bid Actor bidder Related to object, price
 Holds when bidder
 Creates bid(int = Count(Foreach bid: bid When bid.object == object)).
+bidder(Alice). +object(Watch). +price(100).
place-bid(Alice, Watch, 100).
)");
    auto bids = instQuery(s, "bid");
    REQUIRE(bids.size() == 1);
    CHECK(to_string(bids[0]) == "bid(bidder(Alice), object(Watch), price(100), int(0))");
}

TEST_CASE("a bare constructor enumerates all held instances") {
    Session s;
    s.executeText("Fact bid Identified by Int. +bid(2). +bid(4).");
    auto viaCtor = instQuery(s, "bid()");
    auto viaVar = instQuery(s, "bid");
    CHECK(viaCtor == viaVar);
    CHECK(viaCtor.size() == 2);
}

TEST_CASE("division truncates toward zero; zero divisor and overflow are errors") {
    Session s;
    s.executeText("Fact x Identified by Int.");
    CHECK(queryText(s, "7 / 2 == 3"));
    CHECK(queryText(s, "(0 - 7) / 2 == 0 - 3"));
    CHECK_THROWS_AS(s.executeText("?1 / 0."), EvalError);
    CHECK_THROWS_AS(s.executeText("?9223372036854775807 + 1 == 0."), EvalError);
}

TEST_CASE("Where and When are interchangeable guards") {
    Session s;
    s.executeText("Fact x Identified by Int. +x(1). +x(2). +x(3).");
    CHECK(queryText(s, "Count(Foreach x: x When 1 < x) == 2"));
    CHECK(queryText(s, "Count(Foreach x: x Where 1 < x) == 2"));
}

TEST_CASE("open types interrupt where True or False is needed") {
    Session s;
    s.executeText("Open Fact user Identified by String.");
    CHECK_THROWS_AS(s.executeText("?Holds(user(Eve))."), UnknownInstanceInterrupt);
    CHECK_THROWS_AS(s.executeText("?-user."), OpenEnumerationInterrupt);
    // a finite open type enumerates its whole domain instead
    s.executeText("Open Fact flag Identified by 0..1.");
    CHECK(queryText(s, "Count(Foreach flag: 1) == 2"));
}

TEST_CASE("query on a non-instance of the running example fails") {
    Session s;
    s.executeText(R"(
Fact object Identified by String
Var auctioneer
Act start-bidding Related to object Holds when auctioneer(actor).
+object(Watch). +auctioneer(David).
)");
    CHECK(queryText(s, "Holds(start-bidding(David, Watch))"));
    CHECK(!queryText(s, "Holds(start-bidding(David, Vase))"));
}

TEST_CASE("enabled: conditions and physical acts") {
    Session s;
    s.executeText(R"(
Fact object Identified by String
Var display Identified by object
Fact bidder Identified by String
Fact price Identified by Int
Fact bid Identified by bidder * object * price * int
Act place-bid Actor bidder Related to object, price
 Holds when bidder
 Conditioned by display(object), price >
  Max(Foreach bid: bid.price When bid.object == object)
Physical raise-hand.
+bidder(Alice). +object(Watch). +object(Vase). +price(100).
+display(Watch).
)");
    CHECK(queryText(s, "Enabled(place-bid(Alice, Watch, 100))"));
    CHECK(!queryText(s, "Enabled(place-bid(Alice, Vase, 100))")); // not displayed
    CHECK(queryText(s, "Enabled(raise-hand(Anyone))"));           // always enabled
}

TEST_CASE("property: De Morgan over closed finite types") {
    std::mt19937 rng(99);
    for (int round = 0; round < 40; ++round) {
        Session s;
        s.executeText("Fact n Identified by 1..4. Fact m Identified by 1..3.");
        for (int v = 1; v <= 4; ++v)
            if (rng() % 2) s.executeText("+n(" + std::to_string(v) + ").");
        for (int v = 1; v <= 3; ++v)
            if (rng() % 2) s.executeText("+m(" + std::to_string(v) + ").");

        const std::string bodies[] = {"Holds(n)", "n == m", "Holds(n) && Holds(m)"};
        for (const std::string& body : bodies) {
            bool lhs = queryText(s, "Not(Exists n, m: " + body + ")");
            bool rhs = queryText(s, "Forall n, m: Not(" + body + ")");
            CAPTURE(body);
            CHECK(lhs == rhs);
        }
    }
}

TEST_CASE("property: the three derivation-rule spellings agree on random knowledge bases") {
    const char* base = R"(
Fact object Identified by String
Var auctioneer
)";
    const char* variants[] = {
        "Act start-bidding Related to object Holds when auctioneer(actor).",
        "Act start-bidding Related to object Derived from start-bidding(actor,object) "
        "When auctioneer(actor).",
        "Act start-bidding Related to object Derived from (Foreach actor, object: "
        "start-bidding(actor,object) When auctioneer(actor)).",
    };
    const char* people[] = {"Alice", "Bob", "Chloe", "David"};
    const char* objects[] = {"Watch", "Clock", "Vase"};

    std::mt19937 rng(20240811);
    for (int round = 0; round < 50; ++round) {
        std::string scenario;
        for (const char* p : people)
            if (rng() % 2) scenario += "+object(" + std::string(p) + ").";
        for (const char* o : objects)
            if (rng() % 2) scenario += "+object(" + std::string(o) + ").";
        if (rng() % 4 != 0)
            scenario += "+auctioneer(" + std::string(people[rng() % 4]) + ").";

        std::vector<std::vector<Instance>> held;
        for (const char* variant : variants) {
            Session s;
            s.executeText(std::string(base) + variant);
            if (!scenario.empty()) s.executeText(scenario);
            const State& st = s.head();
            held.push_back(st.kb.heldOfType(*st.registry, "start-bidding"));
        }
        CAPTURE(scenario);
        CHECK(held[0] == held[1]);
        CHECK(held[1] == held[2]);
    }
}

TEST_CASE("determinism: evaluation is pure") {
    Session s;
    s.executeText("Fact x Identified by Int. +x(1). +x(2).");
    const State& st = s.head();
    Evaluator ev(*st.registry, st.kb);
    ExprPtr e = parse_expression("Sum(Foreach x: x)");
    Environment env;
    auto a = ev.evalValue(e, env);
    auto b = ev.evalValue(e, env);
    REQUIRE(a);
    REQUIRE(b);
    CHECK(std::get<int64_t>(a->v) == 3);
    CHECK(std::get<int64_t>(b->v) == 3);
}
