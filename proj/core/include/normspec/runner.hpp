#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "normspec/session.hpp"

namespace normspec {

struct RunConfig {
    enum class Mode { Run, Test };
    Mode mode = Mode::Run;
    SemanticsOptions semantics;
    bool json = false;              // machine-readable report lines
    bool strictViolations = false;  // test mode also fails on violations
};

// Exit codes shared by the CLI.
enum ExitCode : int {
    kExitOk = 0,
    kExitFailures = 1,       // failing queries (or violations under --strict-violations)
    kExitParseError = 2,
    kExitNotStratified = 3,
    kExitMissingInput = 4,   // unresolved open-type interrupt
};

struct RunReport {
    int exitCode = kExitOk;
    int failedQueries = 0;
    int violations = 0;
    std::string error; // parse/stratification/interrupt message
};

// Runs the files in order against one session. Run mode prints every query
// result and violation; test mode prints only failing Boolean queries and
// exits nonzero if any fail.
RunReport run_files(Session& session, const std::vector<std::string>& paths,
                    const RunConfig& config, std::ostream& out);

RunReport run_source(Session& session, const std::string& source, const std::string& name,
                     const RunConfig& config, std::ostream& out);

} // namespace normspec
