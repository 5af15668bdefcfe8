#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "normspec/asp.hpp"
#include "normspec/bench.hpp"
#include "normspec/diag.hpp"
#include "normspec/printer.hpp"
#include "normspec/runner.hpp"
#include "normspec/service.hpp"
#include "normspec/session.hpp"

namespace {

using namespace normspec;

std::string readFile(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void writeOutput(const std::string& text, const std::string& outPath) {
    if (outPath.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(outPath, std::ios::binary);
    if (!out) throw Error("cannot write " + outPath);
    out << text;
}

// Collects every type declaration of the files without executing scenarios;
// emission does not require the specification to be stratified.
RegistryPtr registryFromFiles(const std::vector<std::string>& paths) {
    auto reg = std::make_shared<Registry>();
    IncludeResolver resolver = fileIncludeResolver();
    std::function<void(const PhrasePtr&, std::vector<TypeDeclAst>&)> collect =
        [&](const PhrasePtr& phrase, std::vector<TypeDeclAst>& decls) {
            if (auto* seq = std::get_if<DeclarationSeq>(&phrase->node))
                decls.insert(decls.end(), seq->decls.begin(), seq->decls.end());
            else if (auto* set = std::get_if<ParallelSet>(&phrase->node))
                for (const PhrasePtr& p : set->phrases) collect(p, decls);
        };
    for (const std::string& path : paths) {
        for (const PhrasePtr& phrase : parse_program(readFile(path), path, &resolver)) {
            std::vector<TypeDeclAst> decls;
            collect(phrase, decls);
            if (!decls.empty()) *reg = reg->applyDeclarations(decls);
        }
    }
    return reg;
}

int replLoop(Session& session) {
    std::cout << "exploration shell; :state :options :history :violations :revert N, phrases end "
                 "with '.'\n";
    std::string pending;
    std::vector<Violation> lastViolations;
    std::string line;
    while (std::cout << (pending.empty() ? "> " : ". ") << std::flush,
           std::getline(std::cin, line)) {
        if (pending.empty() && !line.empty() && line[0] == ':') {
            std::istringstream cmd(line);
            std::string name;
            cmd >> name;
            try {
                if (name == ":state") {
                    const State& s = session.head();
                    for (const std::string& type : s.registry->declarationOrder())
                        for (const Instance& inst : s.kb.heldOfType(*s.registry, type))
                            std::cout << to_string(inst) << "\n";
                } else if (name == ":options") {
                    for (const Instance& inst : session.enabledActions())
                        std::cout << to_string(inst) << "\n";
                } else if (name == ":history") {
                    for (const State& s : session.history())
                        std::cout << s.id << (s.id == session.head().id ? "*" : " ") << " <- "
                                  << s.parent << "  " << s.phraseText << "\n";
                } else if (name == ":violations") {
                    for (const Violation& v : lastViolations) std::cout << to_string(v) << "\n";
                    if (lastViolations.empty()) std::cout << "(none)\n";
                } else if (name == ":revert") {
                    int id = -1;
                    cmd >> id;
                    session.revert(id);
                    std::cout << "head -> " << id << "\n";
                } else if (name == ":quit" || name == ":q") {
                    return 0;
                } else {
                    std::cout << "unknown command " << name << "\n";
                }
            } catch (const Error& e) {
                std::cout << "error: " << e.what() << "\n";
            }
            continue;
        }

        pending += line + "\n";
        std::string trimmed = pending;
        while (!trimmed.empty() && std::isspace(static_cast<unsigned char>(trimmed.back())))
            trimmed.pop_back();
        if (trimmed.empty() || trimmed.back() != '.') continue;

        try {
            PhraseOutcome outcome = session.executeText(pending);
            for (const QueryRecord& q : outcome.queries) {
                if (q.isInstanceQuery) {
                    for (const Instance& inst : q.instances)
                        std::cout << to_string(inst) << "\n";
                    std::cout << "(" << q.instances.size() << " instances)\n";
                } else {
                    std::cout << (q.boolResult ? "True" : "False") << "\n";
                }
            }
            for (const Violation& v : outcome.violations) std::cout << to_string(v) << "\n";
            lastViolations = outcome.violations;
            if (outcome.newState) std::cout << "state " << outcome.stateId << "\n";
        } catch (const UnknownInstanceInterrupt& e) {
            std::cout << "MISSING INPUT: " << e.instanceText << "\n";
        } catch (const OpenEnumerationInterrupt& e) {
            std::cout << "MISSING INPUT: open type " << e.typeName << "\n";
        } catch (const Error& e) {
            std::cout << "error: " << e.what() << "\n";
        }
        pending.clear();
    }
    return 0;
}

SearchSpec loadSearchSpec(const std::string& path) {
    nlohmann::json doc = nlohmann::json::parse(readFile(path));
    SearchSpec spec;
    spec.breadthAction = doc.at("action").get<std::string>();
    spec.depth = doc.value("depth", 1);
    for (const auto& f : doc.value("root-facts", nlohmann::json::array()))
        spec.rootFacts.push_back(f.get<std::string>());
    for (const auto& t : doc.value("root-triggers", nlohmann::json::array()))
        spec.rootTriggers.push_back(t.get<std::string>());
    for (const auto& c : doc.value("criterion", nlohmann::json::array()))
        spec.criterionBodies.push_back(c.get<std::string>());
    return spec;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"normspec: interpreter, test runner, service and logic-program exporter for "
                 "normative specifications"};
    app.require_subcommand(1);

    SemanticsOptions semantics;
    bool emptyAggregateError = false;
    app.add_option("--max-fixpoint-iters", semantics.maxFixpointIters,
                   "cap on derivation fixpoint passes");
    app.add_option("--atom-cap", semantics.atomCap, "ground-atom cap for the stable-model oracle");
    app.add_flag("--oracle-fallback", semantics.oracleFallback,
                 "use the stable-model oracle when stratification fails");
    app.add_flag("--empty-aggregate", emptyAggregateError,
                 "treat Max/Min over an empty enumeration as an error instead of a sentinel");
    app.add_flag("!--function-displacement", semantics.functionDisplacement,
                 "disable Function key displacement on assertion");

    std::vector<std::string> files;
    bool json = false;
    bool strictViolations = false;
    std::string outPath;

    CLI::App* run = app.add_subcommand("run", "execute files, printing query results and violations");
    run->add_option("files", files, "input files")->required();
    run->add_flag("--json", json, "machine-readable output");

    CLI::App* test = app.add_subcommand("test", "run files, reporting only failing queries");
    test->add_option("files", files, "input files")->required();
    test->add_flag("--strict-violations", strictViolations, "violations also fail the run");

    CLI::App* repl = app.add_subcommand("repl", "interactive exploration shell");
    repl->add_option("files", files, "files to load first");

    CLI::App* serveCmd = app.add_subcommand("serve", "JSON-lines service on stdin/stdout");
    serveCmd->add_option("files", files, "files to load first");

    CLI::App* emit = app.add_subcommand("emit-asp", "emit the logic-program translation");
    std::string searchPath;
    emit->add_option("files", files, "input files")->required();
    emit->add_option("-o", outPath, "output file (default stdout)");
    emit->add_option("--search", searchPath, "scenario-search spec (JSON)");

    CLI::App* bench = app.add_subcommand("bench", "timing harness (median of N runs, CSV)");
    std::string suite;
    std::vector<int> sizes;
    int runs = 10;
    bench->add_option("suite", suite, "chain | arith | combo | long | primes")->required();
    bench->add_option("--sizes", sizes, "problem sizes")->delimiter(',');
    bench->add_option("--runs", runs, "runs per size (median reported)");
    bench->add_option("-o", outPath, "CSV output file (default stdout)");

    CLI11_PARSE(app, argc, argv);

    if (const char* cap = std::getenv("NORMSPEC_ATOM_CAP")) semantics.atomCap = std::atoi(cap);
    semantics.emptyAggregateError = emptyAggregateError;

    try {
        if (run->parsed() || test->parsed()) {
            RunConfig config;
            config.mode = run->parsed() ? RunConfig::Mode::Run : RunConfig::Mode::Test;
            config.semantics = semantics;
            config.json = json;
            config.strictViolations = strictViolations;
            Session session(semantics);
            RunReport report = run_files(session, files, config, std::cout);
            return report.exitCode;
        }
        if (repl->parsed() || serveCmd->parsed()) {
            Session session(semantics);
            if (!files.empty()) {
                RunConfig config;
                config.semantics = semantics;
                RunReport report = run_files(session, files, config, std::cerr);
                if (report.exitCode != kExitOk && report.exitCode != kExitFailures)
                    return report.exitCode;
            }
            if (repl->parsed()) return replLoop(session);
            serve(session, std::cin, std::cout);
            return 0;
        }
        if (emit->parsed()) {
            RegistryPtr reg = registryFromFiles(files);
            std::string text = emit_specification(*reg);
            if (!searchPath.empty()) text += "\n" + emit_search(*reg, loadSearchSpec(searchPath));
            writeOutput(text, outPath);
            return 0;
        }
        if (bench->parsed()) {
            if (sizes.empty()) {
                if (suite == "chain") sizes = {8, 64, 512};
                else if (suite == "arith") sizes = {0, 4, 16, 64};
                else if (suite == "combo") sizes = {0, 2, 4, 6, 8};
                else if (suite == "long") sizes = {1, 4, 16};
                else sizes = {25, 50, 100};
            }
            std::vector<BenchRow> rows = bench_run(suite, sizes, runs, semantics);
            std::ostringstream csv;
            bench_write_csv(rows, csv);
            writeOutput(csv.str(), outPath);
            return 0;
        }
    } catch (const ParseError& e) {
        std::cerr << "PARSE ERROR " << e.what() << "\n";
        return kExitParseError;
    } catch (const StratificationError& e) {
        std::cerr << "ERROR " << e.what() << "\n";
        return kExitNotStratified;
    } catch (const EvalInterrupt& e) {
        std::cerr << "MISSING INPUT: " << e.what() << "\n";
        return kExitMissingInput;
    } catch (const Error& e) {
        std::cerr << "ERROR " << e.what() << "\n";
        return 1;
    }
    return 0;
}
