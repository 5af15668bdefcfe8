#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fstream>
#include <sstream>

#include "normspec/printer.hpp"
#include "normspec/session.hpp"

using namespace normspec;

namespace {

std::string corpusFile(const std::string& name) {
    std::ifstream in(std::string(NORMSPEC_CORPUS_DIR) + "/" + name, std::ios::binary);
    REQUIRE(in);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

bool query(Session& s, const std::string& expr) {
    PhraseOutcome out = s.executeText("?" + expr + ".");
    REQUIRE(out.queries.size() == 1);
    return out.queries[0].boolResult;
}

std::set<Instance> allHeld(const Session& s) {
    const State& st = s.head();
    std::set<Instance> out;
    for (const std::string& type : st.registry->declarationOrder())
        for (const Instance& inst : st.kb.heldOfType(*st.registry, type)) out.insert(inst);
    return out;
}

} // namespace

TEST_CASE("the auction scenario ends with Bob owing 140") {
    Session s;
    s.executeText(corpusFile("auction_spec.eflint"));
    s.executeText(R"(
+bidder(Alice). +bidder(Bob). +bidder(Chloe).
+auctioneer(David).
start-bidding(David, Watch).
raise-hand(Alice). raise-hand(Bob). raise-hand(Alice).
raise-hand(Chloe). raise-hand(Bob).
end-bidding(David).
)");
    CHECK(query(s, "payment-duty(Bob, David, 140)"));
    CHECK(!query(s, "payment-duty(Alice, David, 140)"));
}

TEST_CASE("auction step by step") {
    Session s;
    s.executeText(corpusFile("auction_spec.eflint"));
    s.executeText("+bidder(Alice). +bidder(Bob). +bidder(Chloe). +auctioneer(David).");

    SUBCASE("start-bidding is recognised for declared objects only") {
        CHECK(query(s, "Holds(start-bidding(David, Watch))"));
        CHECK(!query(s, "Holds(start-bidding(David, Vase))"));
        CHECK(!query(s, "Holds(start-bidding(Alice, Watch))"));
    }

    s.executeText("start-bidding(David, Watch).");

    SUBCASE("first bid is allowed at the minimum price") {
        CHECK(query(s, "Enabled(place-bid(Alice, Watch, 100))"));
        CHECK(!query(s, "Enabled(place-bid(Alice, Clock, 100))")); // not displayed
    }

    SUBCASE("raising a hand synchronises into a bid at min + 10 per prior bid") {
        PhraseOutcome one = s.executeText("raise-hand(Alice).");
        REQUIRE(one.triggered.size() == 2);
        CHECK(to_string(one.triggered[0]) == "raise-hand(actor(Alice))");
        CHECK(to_string(one.triggered[1]) == "place-bid(bidder(Alice), object(Watch), price(100))");
        REQUIRE(one.created.size() == 1);
        CHECK(to_string(one.created[0]) == "bid(bidder(Alice), object(Watch), price(100), int(0))");
        CHECK(one.violations.empty());

        PhraseOutcome two = s.executeText("raise-hand(Bob).");
        REQUIRE(two.created.size() == 1);
        CHECK(to_string(two.created[0]) == "bid(bidder(Bob), object(Watch), price(110), int(1))");
    }

    SUBCASE("the fifth raise-hand bids 140 and end-bidding creates the duty") {
        s.executeText("raise-hand(Alice). raise-hand(Bob). raise-hand(Alice). "
                      "raise-hand(Chloe). raise-hand(Bob).");
        CHECK(query(s, "highest-bid(Bob, 140)"));
        PhraseOutcome end = s.executeText("end-bidding(David).");
        bool created = false;
        for (const Instance& inst : end.created)
            created |= to_string(inst) ==
                       "payment-duty(bidder(Bob), auctioneer(David), price(140))";
        CHECK(created);
        // the bids on the displayed object were terminated pre-state
        CHECK(query(s, "Count(Foreach bid: bid When Holds(bid)) == 0"));
        CHECK(query(s, "payment-duty(Bob, David, 140)"));
    }
}

TEST_CASE("assertions expand over the current held set only") {
    Session s;
    s.executeText("Fact person. Fact rich Identified by person.");
    s.executeText("+person(Alice). +person(Bob).");
    s.executeText("+rich(person).");
    s.executeText("+person(Chloe).");
    CHECK(query(s, "rich(Alice)"));
    CHECK(query(s, "rich(Bob)"));
    CHECK(!query(s, "rich(Chloe)"));
}

TEST_CASE("plain retraction carries no violations") {
    Session s;
    s.executeText("Fact object Identified by String Var display Identified by object. "
                  "+object(Watch). +display(Watch).");
    PhraseOutcome out = s.executeText("-display(Watch).");
    CHECK(out.violations.empty());
    CHECK(!query(s, "display(Watch)"));
}

TEST_CASE("triggering a fact instance is an error") {
    Session s;
    s.executeText("Fact object Identified by String. +object(Watch).");
    CHECK_THROWS_AS(s.executeText("object(Watch)."), TypeError);
}

TEST_CASE("effects despite violation") {
    const char* spec = R"(
Fact object Identified by String
Var auctioneer
Act stamp Related to object Holds when auctioneer(actor) Creates object(Done).
+object(Watch).
)";
    Session allowed;
    allowed.executeText(spec);
    allowed.executeText("+auctioneer(David).");
    PhraseOutcome ok = allowed.executeText("stamp(David, Watch).");
    CHECK(ok.violations.empty());

    Session denied;
    denied.executeText(spec);
    denied.executeText("+auctioneer(Someone).");
    PhraseOutcome bad = denied.executeText("stamp(David, Watch).");
    REQUIRE(bad.violations.size() == 1);
    CHECK(bad.violations[0].kind == Violation::Kind::DisabledAction);
    CHECK(to_string(bad.violations[0]) ==
          "VIOLATION disabled-action stamp(actor(David), object(Watch))");

    // the post-states agree except for the differing auctioneer fact
    auto a = allowed.executeText("-auctioneer(David).");
    auto b = denied.executeText("-auctioneer(Someone).");
    CHECK(allHeld(allowed) == allHeld(denied));
}

TEST_CASE("duty violations are reported on every post-state") {
    Session s;
    s.executeText(R"(
Fact person
Bool late
Duty pay Holder person Claimant person' Violated when late().
+person(Ann). +person(Ben).
)");
    PhraseOutcome quiet = s.executeText("+pay(Ann, Ben).");
    CHECK(quiet.violations.empty());
    PhraseOutcome loud = s.executeText("+late().");
    REQUIRE(loud.violations.size() == 1);
    CHECK(loud.violations[0].kind == Violation::Kind::Duty);
    CHECK(to_string(loud.violations[0]) == "VIOLATION duty pay(person(Ann), person(Ben))");
    // a duty that no longer holds cannot be violated
    PhraseOutcome gone = s.executeText("-pay(Ann, Ben).");
    CHECK(gone.violations.empty());
}

TEST_CASE("parallel sets evaluate against the pre-statement snapshot") {
    Session parallel;
    parallel.executeText("Fact a Identified by Int.");
    PhraseOutcome p = parallel.executeText("{ +a(1). ?Holds(a(1)) }.");
    REQUIRE(p.queries.size() == 1);
    CHECK(!p.queries[0].boolResult); // snapshot semantics
    CHECK(query(parallel, "Holds(a(1))")); // but the effect landed

    Session sequential;
    sequential.executeText("Fact a Identified by Int.");
    sequential.executeText("+a(1).");
    CHECK(query(sequential, "Holds(a(1))"));
}

TEST_CASE("parallel sets accept mutually recursive declarations") {
    Session s;
    CHECK_NOTHROW(s.executeText(R"(
{ Fact node Identified by edge * int. Fact edge Identified by String }.
)"));
    CHECK(s.head().registry->find("node"));
}

TEST_CASE("parallel effects merge with creation precedence") {
    Session s;
    s.executeText("Fact a Identified by Int. +a(1).");
    s.executeText("{ +a(1). -a(1) }.");
    CHECK(query(s, "Holds(a(1))")); // creation trumps termination
}

TEST_CASE("obfuscation withdraws knowledge") {
    Session s;
    s.executeText(R"(
Open Fact suspect Identified by String
Act pardon Related to suspect Holds when True Obfuscates suspect.
+suspect(Kim).
)");
    CHECK(query(s, "Holds(suspect(Kim))"));
    s.executeText("pardon(Judge, Kim).");
    CHECK_THROWS_AS(s.executeText("?Holds(suspect(Kim))."), UnknownInstanceInterrupt);
}

TEST_CASE("Violated reports duties whose condition holds") {
    Session s;
    s.executeText(R"(
Fact person
Bool late
Duty pay Holder person Claimant person' Violated when late().
+person(Ann). +person(Ben). +pay(Ann, Ben).
)");
    CHECK(!query(s, "Violated(pay(Ann, Ben))"));
    s.executeText("+late().");
    CHECK(query(s, "Violated(pay(Ann, Ben))"));
    CHECK(!query(s, "Violated(pay(Ben, Ann))")); // does not hold, cannot violate
}

TEST_CASE("sync closure cuts cycles") {
    Session s;
    s.executeText(R"(
Physical ping Syncs with pong(actor)
Physical pong Syncs with ping(actor).
)");
    PhraseOutcome out = s.executeText("ping(Ann).");
    CHECK(out.triggered.size() == 2);
}

TEST_CASE("reordering effect clauses does not change the outcome") {
    const char* variantA = R"(
Fact object Identified by String Var display Identified by object
Physical swap Related to object Creates display(object) Terminates object(Old).
+object(Old). +object(New). +display(Old).
swap(Ann, New).
)";
    const char* variantB = R"(
Fact object Identified by String Var display Identified by object
Physical swap Related to object Terminates object(Old) Creates display(object).
+object(Old). +object(New). +display(Old).
swap(Ann, New).
)";
    Session a, b;
    a.executeText(variantA);
    b.executeText(variantB);
    CHECK(allHeld(a) == allHeld(b));
    CHECK(query(a, "display(New)"));
    CHECK(!query(a, "object(Old)"));
}

TEST_CASE("triggers inside a parallel set use the snapshot and merge effects") {
    Session s;
    s.executeText(R"(
Fact n Identified by Int
Physical bump Related to n Creates n(Count(Foreach n': 1 When Holds(n'))).
+n(10).
)");
    // both triggers see one held instance, so both create n(1)
    PhraseOutcome out = s.executeText("{ bump(A, 10). bump(B, 10) }.");
    REQUIRE(out.created.size() == 1);
    CHECK(to_string(out.created[0]) == "n(1)");
}

TEST_CASE("instance queries bind free variables by enumeration") {
    Session s;
    s.executeText(corpusFile("auction_spec.eflint"));
    s.executeText("+bidder(Alice). +bidder(Bob). +auctioneer(David).");
    s.executeText("start-bidding(David, Watch). raise-hand(Alice). raise-hand(Bob).");
    PhraseOutcome out = s.executeText("?-bid When display(bid.object).");
    REQUIRE(out.queries.size() == 1);
    CHECK(out.queries[0].instances.size() == 2);

    PhraseOutcome bidders = s.executeText("?-bidder.");
    CHECK(bidders.queries[0].instances.size() == 2);

    Session empty;
    empty.executeText("Fact bid Identified by Int.");
    CHECK(empty.executeText("?-bid.").queries[0].instances.empty());
}

TEST_CASE("history: revert and replay reproduces the child state") {
    Session s;
    s.executeText("Fact a Identified by Int.");
    int base = s.head().id;
    s.executeText("+a(1).");
    const State& child = s.head();
    KnowledgeBase childKb = child.kb;
    std::string recorded = child.phraseText;

    s.revert(base);
    s.executeText(recorded);
    CHECK(s.head().kb == childKb);
    CHECK(s.head().parent == base);

    CHECK_THROWS_AS(s.revert(999), Error);
}

TEST_CASE("enabled actions are listed over enumerable domains") {
    Session s;
    s.executeText(R"(
Fact object Identified by String Domain "Watch", "Vase"
Var auctioneer
Act start-bidding Related to object Holds when auctioneer(actor).
+auctioneer(David).
)");
    auto options = s.enabledActions();
    REQUIRE(options.size() == 2);
    CHECK(to_string(options[0]) == "start-bidding(actor(David), object(Vase))");
    CHECK(to_string(options[1]) == "start-bidding(actor(David), object(Watch))");
}
