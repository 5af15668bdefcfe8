#include "normspec/service.hpp"

#include <istream>
#include <ostream>

#include <json.hpp>

#include "normspec/diag.hpp"
#include "normspec/printer.hpp"
#include "normspec/transition.hpp"

namespace normspec {

namespace {

using nlohmann::json;

json instanceListJson(const std::vector<Instance>& instances) {
    json arr = json::array();
    for (const Instance& inst : instances) arr.push_back(to_string(inst));
    return arr;
}

json outcomeJson(Session& session, const PhraseOutcome& outcome) {
    json res;
    res["v"] = 1;
    res["ok"] = true;
    res["state"] = outcome.stateId;
    if (!outcome.queries.empty()) {
        json queries = json::array();
        for (const QueryRecord& q : outcome.queries) {
            json one;
            one["text"] = q.text;
            if (q.isInstanceQuery) one["instances"] = instanceListJson(q.instances);
            else one["result"] = q.boolResult;
            queries.push_back(std::move(one));
        }
        res["queries"] = std::move(queries);
        // convenience: single boolean query surfaces as "result"
        if (outcome.queries.size() == 1 && !outcome.queries[0].isInstanceQuery)
            res["result"] = outcome.queries[0].boolResult;
    }
    if (!outcome.violations.empty()) {
        json vs = json::array();
        for (const Violation& v : outcome.violations) vs.push_back(to_string(v));
        res["violations"] = std::move(vs);
    }
    if (!outcome.created.empty()) res["created"] = instanceListJson(outcome.created);
    if (!outcome.terminated.empty()) res["terminated"] = instanceListJson(outcome.terminated);
    if (!outcome.triggered.empty()) res["triggered"] = instanceListJson(outcome.triggered);
    (void)session;
    return res;
}

std::string domainText(const TypeRecord& rec) {
    switch (rec.domain) {
        case TypeRecord::Domain::String: return "String";
        case TypeRecord::Domain::Int: return "Int";
        case TypeRecord::Domain::Literals: return "literals";
        case TypeRecord::Domain::Unit: return "unit";
        case TypeRecord::Domain::Product: {
            std::string out;
            for (size_t i = 0; i < rec.fields.size(); ++i) {
                if (i) out += " * ";
                out += rec.fields[i].typeName;
            }
            return out;
        }
    }
    return "?";
}

json inspectOpenTypes(Session& session) {
    const State& s = session.head();
    json types = json::array();
    for (const std::string& name : s.registry->declarationOrder()) {
        const TypeRecord& rec = s.registry->get(name);
        if (!rec.open) continue;
        json one;
        one["name"] = name;
        one["domain"] = domainText(rec);
        json assigned = json::array();
        for (const auto& [inst, pol] : s.kb.asserted()) {
            if (inst.type != name) continue;
            json entry;
            entry["instance"] = to_string(inst);
            entry["value"] = pol == Polarity::True ? "true"
                             : pol == Polarity::False ? "false"
                                                      : "unknown";
            assigned.push_back(std::move(entry));
        }
        one["assigned"] = std::move(assigned);
        types.push_back(std::move(one));
    }
    json res;
    res["v"] = 1;
    res["ok"] = true;
    res["open-types"] = std::move(types);
    return res;
}

json handle(Session& session, const json& req) {
    std::string kind = req.value("kind", "");

    AdditionalInput input;
    bool hasInput = false;
    if (req.contains("input")) {
        hasInput = true;
        for (const auto& entry : req.at("input")) {
            Instance inst = session.parseInstance(entry.at("instance").get<std::string>());
            input.emplace_back(std::move(inst), entry.value("value", true));
        }
    }
    const AdditionalInput* inputPtr = hasInput ? &input : nullptr;

    if (kind == "phrase" || kind == "additional-input+phrase") {
        PhraseOutcome outcome = session.executeText(req.at("text").get<std::string>(), inputPtr);
        return outcomeJson(session, outcome);
    }
    if (kind == "query") {
        std::string text = req.at("text").get<std::string>();
        PhraseOutcome outcome = session.executeText(
            text.rfind('?', 0) == 0 ? text : "?" + text + ".", inputPtr);
        return outcomeJson(session, outcome);
    }
    if (kind == "inspect-open-types") return inspectOpenTypes(session);
    if (kind == "revert") {
        session.revert(req.at("state").get<int>());
        json res;
        res["v"] = 1;
        res["ok"] = true;
        res["state"] = session.head().id;
        return res;
    }
    json res;
    res["v"] = 1;
    res["ok"] = false;
    res["error"] = "unknown request kind '" + kind + "'";
    return res;
}

} // namespace

std::string serve_line(Session& session, const std::string& requestLine) {
    json res;
    try {
        json req = json::parse(requestLine);
        res = handle(session, req);
    } catch (const UnknownInstanceInterrupt& e) {
        res["v"] = 1;
        res["ok"] = false;
        res["missing"] = {{"instance", e.instanceText}};
    } catch (const OpenEnumerationInterrupt& e) {
        res["v"] = 1;
        res["ok"] = false;
        res["missing"] = {{"type", e.typeName}};
    } catch (const json::exception& e) {
        res["v"] = 1;
        res["ok"] = false;
        res["error"] = std::string("malformed request: ") + e.what();
    } catch (const Error& e) {
        res["v"] = 1;
        res["ok"] = false;
        res["error"] = e.what();
    }
    return res.dump();
}

void serve(Session& session, std::istream& in, std::ostream& out) {
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        out << serve_line(session, line) << "\n" << std::flush;
    }
}

} // namespace normspec
