#include "normspec/closure.hpp"

#include "normspec/diag.hpp"
#include "normspec/stable.hpp"
#include "normspec/stratify.hpp"

namespace normspec {

namespace {

// A derived candidate only holds while every Conditioned-by clause of its
// type evaluates True under its field bindings.
bool conditionsHold(Evaluator& ev, const TypeRecord& rec, const Instance& inst) {
    if (rec.conditionedBy.empty()) return true;
    Environment env;
    ev.bindFields(inst, env);
    for (const ExprPtr& cond : rec.conditionedBy)
        if (!ev.evalBoolAnyBinding(cond, env)) return false;
    return true;
}

KnowledgeBase closeByOracle(const KnowledgeBase& kb, const Registry& reg,
                            const SemanticsOptions& opts, const std::string& cycleText) {
    GroundProgram program = ground(reg, kb, opts.atomCap);
    StableModelReport report = enumerate_stable_models(program);
    if (report.verdict != StableModelReport::Verdict::Unique)
        throw StratificationError(
            cycleText + " (stable-model fallback found " +
            (report.verdict == StableModelReport::Verdict::Zero
                 ? "no model"
                 : std::to_string(report.count()) + " models") +
            ")");
    KnowledgeBase out = kb;
    std::set<Instance> derived;
    for (const Instance& inst : report.models.front())
        derived.insert(inst);
    out.setDerived(std::move(derived));
    return out;
}

} // namespace

KnowledgeBase close(const KnowledgeBase& kb, const Registry& reg, const SemanticsOptions& opts,
                    ClosureReport* report, bool lenient) {
    DependencyGraph graph = build_dependency_graph(reg);
    Stratification strat = check_stratification(graph);
    if (!strat.ok) {
        if (!opts.oracleFallback) throw StratificationError(strat.cycleText);
        KnowledgeBase out = closeByOracle(kb, reg, opts, strat.cycleText);
        if (report) {
            report->usedOracle = true;
            report->iterations = 0;
        }
        return out;
    }
    if (report) report->strata = strat.strata;

    KnowledgeBase work = kb;
    work.clearDerived();
    int totalPasses = 0;

    for (const auto& stratum : strat.strata) {
        bool anyRules = false;
        for (const auto& name : stratum)
            anyRules |= reg.get(name).hasDerivation();
        if (!anyRules) continue;

        for (;;) {
            if (++totalPasses > opts.maxFixpointIters)
                throw FixpointBudgetError("fixpoint budget exceeded after " +
                                          std::to_string(totalPasses) + " passes");
            Evaluator ev(reg, work, opts);
            std::set<Instance> fresh;
            for (const auto& name : stratum) {
                const TypeRecord& rec = reg.get(name);
                for (const ExprPtr& rule : rec.derivationRules) {
                    Environment env;
                    std::vector<Instance> produced;
                    try {
                        produced = ev.expandInstances(rule, env, &name);
                    } catch (const EvalInterrupt&) {
                        if (!lenient) throw;
                        continue; // awaiting external input: derives nothing
                    }
                    for (Instance& inst : produced) {
                        if (work.derived().count(inst)) continue;
                        if (work.asserted().count(inst) || work.additional().count(inst)) {
                            // the asserted layer outranks derivation either way
                            if (work.truthOf(reg, inst) != Truth::True) continue;
                        }
                        bool condOk;
                        try {
                            condOk = conditionsHold(ev, rec, inst);
                        } catch (const EvalInterrupt&) {
                            if (!lenient) throw;
                            condOk = false;
                        }
                        if (!condOk) continue;
                        fresh.insert(std::move(inst));
                    }
                }
            }
            if (fresh.empty()) break;
            std::set<Instance> derived = work.derived();
            derived.insert(fresh.begin(), fresh.end());
            work.setDerived(std::move(derived));
        }
    }

    if (report) report->iterations = totalPasses;
    return work;
}

} // namespace normspec
