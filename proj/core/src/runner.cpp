#include "normspec/runner.hpp"

#include <fstream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "normspec/diag.hpp"
#include "normspec/printer.hpp"

namespace normspec {

namespace {

void reportQuery(const QueryRecord& q, const RunConfig& config, std::ostream& out) {
    if (config.json) {
        nlohmann::json line;
        line["query"] = (q.isInstanceQuery ? "?-" : "?") + q.text;
        if (q.isInstanceQuery) {
            nlohmann::json arr = nlohmann::json::array();
            for (const Instance& inst : q.instances) arr.push_back(to_string(inst));
            line["instances"] = std::move(arr);
        } else {
            line["result"] = q.boolResult;
        }
        out << line.dump() << "\n";
        return;
    }
    if (config.mode == RunConfig::Mode::Test) {
        if (!q.isInstanceQuery && !q.boolResult) out << "FAIL ?" << q.text << "\n";
        return;
    }
    if (q.isInstanceQuery) {
        out << "?-" << q.text << " =>";
        for (const Instance& inst : q.instances) out << " " << to_string(inst);
        out << "\n";
    } else {
        out << "?" << q.text << " => " << (q.boolResult ? "True" : "False") << "\n";
    }
}

RunReport runPhrases(Session& session, const std::vector<PhrasePtr>& phrases,
                     const RunConfig& config, std::ostream& out) {
    RunReport report;
    for (const PhrasePtr& phrase : phrases) {
        try {
            PhraseOutcome outcome = session.execute(phrase);
            for (const QueryRecord& q : outcome.queries) {
                if (!q.isInstanceQuery && !q.boolResult) ++report.failedQueries;
                reportQuery(q, config, out);
            }
            for (const Violation& v : outcome.violations) {
                ++report.violations;
                if (config.json) {
                    nlohmann::json line;
                    line["violation"] = to_string(v);
                    out << line.dump() << "\n";
                } else if (config.mode == RunConfig::Mode::Run || config.strictViolations) {
                    out << to_string(v) << "\n";
                }
            }
        } catch (const StratificationError& e) {
            out << "ERROR " << e.what() << "\n";
            report.exitCode = kExitNotStratified;
            report.error = e.what();
            return report;
        } catch (const UnknownInstanceInterrupt& e) {
            out << "MISSING INPUT: " << e.instanceText << "\n";
            report.exitCode = kExitMissingInput;
            report.error = e.what();
            return report;
        } catch (const OpenEnumerationInterrupt& e) {
            out << "MISSING INPUT: open type " << e.typeName << "\n";
            report.exitCode = kExitMissingInput;
            report.error = e.what();
            return report;
        }
    }
    bool failed = report.failedQueries > 0;
    if (config.mode == RunConfig::Mode::Test && config.strictViolations && report.violations > 0)
        failed = true;
    report.exitCode = (config.mode == RunConfig::Mode::Test && failed) ? kExitFailures : kExitOk;
    return report;
}

} // namespace

RunReport run_source(Session& session, const std::string& source, const std::string& name,
                     const RunConfig& config, std::ostream& out) {
    std::vector<PhrasePtr> phrases;
    try {
        IncludeResolver resolver = fileIncludeResolver();
        phrases = parse_program(source, name, &resolver);
    } catch (const ParseError& e) {
        out << "PARSE ERROR " << e.what() << "\n";
        return RunReport{kExitParseError, 0, 0, e.what()};
    } catch (const Error& e) {
        out << "PARSE ERROR " << e.what() << "\n";
        return RunReport{kExitParseError, 0, 0, e.what()};
    }
    return runPhrases(session, phrases, config, out);
}

RunReport run_files(Session& session, const std::vector<std::string>& paths,
                    const RunConfig& config, std::ostream& out) {
    RunReport total;
    for (const std::string& path : paths) {
        std::ifstream in(path, std::ios::binary);
        if (!in) {
            out << "ERROR cannot open " << path << "\n";
            return RunReport{kExitParseError, 0, 0, "cannot open " + path};
        }
        std::ostringstream ss;
        ss << in.rdbuf();
        RunReport r = run_source(session, ss.str(), path, config, out);
        total.failedQueries += r.failedQueries;
        total.violations += r.violations;
        if (r.exitCode != kExitOk && r.exitCode != kExitFailures) {
            total.exitCode = r.exitCode;
            total.error = r.error;
            return total;
        }
        if (r.exitCode == kExitFailures) total.exitCode = kExitFailures;
    }
    return total;
}

} // namespace normspec
