#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <sstream>

#include "normspec/runner.hpp"

using namespace normspec;

namespace {

struct Result {
    RunReport report;
    std::string output;
};

Result run(const std::string& source, RunConfig config = {}) {
    Session session(config.semantics);
    std::ostringstream out;
    RunReport report = run_source(session, source, "<test>", config, out);
    return {report, out.str()};
}

RunConfig testMode() {
    RunConfig c;
    c.mode = RunConfig::Mode::Test;
    return c;
}

} // namespace

TEST_CASE("run mode prints query results and exits 0") {
    Result r = run("Fact a Identified by Int. +a(1). ?Holds(a(1)). ?Holds(a(2)). ?-a.");
    CHECK(r.report.exitCode == kExitOk);
    CHECK(r.output.find("?Holds(a(1)) => True") != std::string::npos);
    CHECK(r.output.find("?Holds(a(2)) => False") != std::string::npos);
    CHECK(r.output.find("?-a => a(1)") != std::string::npos);
}

TEST_CASE("test mode prints only failing queries and exits 1 on failure") {
    Result r = run("Fact a Identified by Int. +a(1). ?Holds(a(1)). ?False.", testMode());
    CHECK(r.report.exitCode == kExitFailures);
    CHECK(r.report.failedQueries == 1);
    CHECK(r.output.find("Holds(a(1))") == std::string::npos);
    CHECK(r.output.find("FAIL ?False") != std::string::npos);

    Result ok = run("Fact a Identified by Int. +a(1). ?Holds(a(1)).", testMode());
    CHECK(ok.report.exitCode == kExitOk);
    CHECK(ok.output.empty());
}

TEST_CASE("parse errors exit 2 with a located message") {
    Result r = run("Fact a Identified by ) .");
    CHECK(r.report.exitCode == kExitParseError);
    CHECK(r.output.find("PARSE ERROR") != std::string::npos);
}

TEST_CASE("stratification rejection exits 3 with the cycle") {
    Result r = run("Fact bidder Identified by String "
                   "Fact ready Identified by bidder Holds when Not(ready(bidder)).");
    CHECK(r.report.exitCode == kExitNotStratified);
    CHECK(r.output.find("ready -[neg]-> ready") != std::string::npos);
}

TEST_CASE("unresolved interrupts exit 4 and name the missing piece") {
    Result r = run("Open Fact user Identified by String. ?Holds(user(Eve)).");
    CHECK(r.report.exitCode == kExitMissingInput);
    CHECK(r.output.find("MISSING INPUT: user(Eve)") != std::string::npos);

    Result e = run("Open Fact user Identified by String. ?-user.");
    CHECK(e.report.exitCode == kExitMissingInput);
    CHECK(e.output.find("MISSING INPUT: open type user") != std::string::npos);
}

TEST_CASE("violations print in run mode and are informational by default") {
    const char* source = R"(
Fact object Identified by String
Var auctioneer
Act stamp Related to object Holds when auctioneer(actor) Creates object(Done).
+object(Watch).
stamp(Ann, Watch).
)";
    Result r = run(source);
    CHECK(r.report.exitCode == kExitOk);
    CHECK(r.output.find("VIOLATION disabled-action stamp(actor(Ann), object(Watch))") !=
          std::string::npos);

    Result t = run(source, testMode());
    CHECK(t.report.exitCode == kExitOk); // informational unless strict

    RunConfig strict = testMode();
    strict.strictViolations = true;
    Result s = run(source, strict);
    CHECK(s.report.exitCode == kExitFailures);
}

TEST_CASE("multiple files share one session") {
    Session session;
    RunConfig config;
    std::ostringstream out;
    namespace fs = std::filesystem;
    RunReport r = run_files(session,
                            {std::string(NORMSPEC_CORPUS_DIR) + "/auction_spec.eflint",
                             std::string(NORMSPEC_CORPUS_DIR) + "/auction.eflint"},
                            config, out);
    CHECK(r.exitCode == kExitOk);
    CHECK(out.str().find("?payment-duty(Bob, David, 140) => True") != std::string::npos);
}

TEST_CASE("missing files exit 2") {
    Session session;
    RunConfig config;
    std::ostringstream out;
    RunReport r = run_files(session, {"/nonexistent/nowhere.eflint"}, config, out);
    CHECK(r.exitCode == kExitParseError);
}
