#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <json.hpp>

#include "normspec/service.hpp"

using namespace normspec;
using nlohmann::json;

namespace {

json request(Session& session, const json& req) {
    return json::parse(serve_line(session, req.dump()));
}

} // namespace

TEST_CASE("request-scoped input resolves a query for its duration only") {
    Session session;
    session.executeText("Open Fact user Identified by String.");

    json plain = {{"v", 1}, {"kind", "query"}, {"text", "Holds(user(Eve))"}};
    json first = request(session, plain);
    CHECK(!first.at("ok").get<bool>());
    CHECK(first.at("missing").at("instance") == "user(Eve)");

    json withInput = plain;
    withInput["input"] = json::array({{{"instance", "user(Eve)"}, {"value", true}}});
    json second = request(session, withInput);
    CHECK(second.at("ok").get<bool>());
    CHECK(second.at("result").get<bool>());

    json third = request(session, plain);
    CHECK(!third.at("ok").get<bool>());
    CHECK(third.at("missing").at("instance") == "user(Eve)");
}

TEST_CASE("input also enables enumeration of open infinite types") {
    Session session;
    // declarations install even though the derivation awaits external input
    session.executeText(R"(
Open Fact user Identified by String
Var auctioneer Identified by String
Closed Fact bidder Identified by String
         Derived from user When Not(auctioneer(user)).
)");
    // without input the derivation needs the user extension
    json plain = {{"v", 1}, {"kind", "query"}, {"text", "bidder(Amy)"}};
    json r1 = request(session, plain);
    CHECK(!r1.at("ok").get<bool>());
    CHECK(r1.at("missing").at("type") == "user");

    json withInput = plain;
    withInput["input"] = json::array({{{"instance", "user(Amy)"}, {"value", true}},
                                      {{"instance", "user(Dan)"}, {"value", true}}});
    json r2 = request(session, withInput);
    CHECK(r2.at("ok").get<bool>());
    CHECK(r2.at("result").get<bool>());

    // development mode: scenario assertions stand in for the input layer
    Session dev;
    dev.executeText(R"(
Open Fact user Identified by String
Var auctioneer Identified by String
Closed Fact bidder Identified by String
         Derived from user When Not(auctioneer(user)).
)");
    dev.executeText("+user(Amy). +user(Dan). +auctioneer(Dan).");
    json r3 = request(dev, plain);
    CHECK(r3.at("ok").get<bool>());
    CHECK(r3.at("result").get<bool>());
    json r4 = request(dev, {{"v", 1}, {"kind", "query"}, {"text", "bidder(Dan)"}});
    CHECK(!r4.at("result").get<bool>()); // the auctioneer is no bidder
}

TEST_CASE("a phrase with input leaves the knowledge base unchanged modulo its effects") {
    Session session;
    session.executeText("Open Fact user Identified by String. Fact seen Identified by String.");
    json req = {{"v", 1},
                {"kind", "phrase"},
                {"text", "+seen(Eve) When Holds(user(Eve))."},
                {"input", json::array({{{"instance", "user(Eve)"}, {"value", true}}})}};
    json res = request(session, req);
    CHECK(res.at("ok").get<bool>());

    // the effect persisted, the input did not
    const State& head = session.head();
    CHECK(head.kb.truthOf(*head.registry, session.parseInstance("seen(Eve)")) == Truth::True);
    CHECK(head.kb.additional().empty());
    CHECK(head.kb.truthOf(*head.registry, session.parseInstance("user(Eve)")) == Truth::Unknown);
}

TEST_CASE("inspect-open-types lists the open auction parameters") {
    Session session;
    session.executeText(R"(
Fact object Identified by String
Fact price Identified by Int
Open Function min-price-of Identified by object * price
Open Fact     bidder       Identified by String
Open Var      auctioneer   Identified by String.
)");
    json res = request(session, {{"v", 1}, {"kind", "inspect-open-types"}});
    REQUIRE(res.at("ok").get<bool>());
    std::vector<std::string> names;
    for (const auto& t : res.at("open-types")) names.push_back(t.at("name").get<std::string>());
    CHECK(names == std::vector<std::string>{"min-price-of", "bidder", "auctioneer"});
    for (const auto& t : res.at("open-types"))
        if (t.at("name") == "min-price-of") CHECK(t.at("domain") == "object * price");
}

TEST_CASE("revert moves the head; unknown ids leave the session intact") {
    Session session;
    session.executeText("Fact a Identified by Int.");
    int declared = session.head().id;
    request(session, {{"v", 1}, {"kind", "phrase"}, {"text", "+a(1)."}});
    CHECK(session.head().id != declared);

    json bad = request(session, {{"v", 1}, {"kind", "revert"}, {"state", 999}});
    CHECK(!bad.at("ok").get<bool>());
    CHECK(session.head().id != declared); // untouched

    json good = request(session, {{"v", 1}, {"kind", "revert"}, {"state", declared}});
    CHECK(good.at("ok").get<bool>());
    CHECK(session.head().id == declared);
}

TEST_CASE("malformed requests answer with an error and keep the session") {
    Session session;
    std::string res = serve_line(session, "{not json");
    json parsed = json::parse(res);
    CHECK(!parsed.at("ok").get<bool>());
    CHECK(parsed.at("error").get<std::string>().find("malformed") != std::string::npos);

    json unknown = request(session, {{"v", 1}, {"kind", "dance"}});
    CHECK(!unknown.at("ok").get<bool>());
    CHECK(session.head().id == 0);
}

TEST_CASE("violations and effects are reported") {
    Session session;
    session.executeText(R"(
Fact object Identified by String
Var auctioneer
Act stamp Related to object Holds when auctioneer(actor) Creates object(Done).
+object(Watch).
)");
    json res = request(session, {{"v", 1}, {"kind", "phrase"}, {"text", "stamp(Ann, Watch)."}});
    REQUIRE(res.at("ok").get<bool>());
    REQUIRE(res.contains("violations"));
    CHECK(res.at("violations").at(0).get<std::string>() ==
          "VIOLATION disabled-action stamp(actor(Ann), object(Watch))");
    CHECK(res.at("created").at(0).get<std::string>() == "object(Done)");
}
