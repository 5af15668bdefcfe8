#include "normspec/transition.hpp"

#include <deque>

#include "normspec/diag.hpp"
#include "normspec/printer.hpp"

namespace normspec {

std::string to_string(const Violation& v) {
    return std::string("VIOLATION ") +
           (v.kind == Violation::Kind::DisabledAction ? "disabled-action " : "duty ") +
           to_string(v.instance);
}

void EffectSet::merge(const EffectSet& other) {
    created.insert(other.created.begin(), other.created.end());
    terminated.insert(other.terminated.begin(), other.terminated.end());
    obfuscated.insert(other.obfuscated.begin(), other.obfuscated.end());
    triggered.insert(triggered.end(), other.triggered.begin(), other.triggered.end());
    actionViolations.insert(actionViolations.end(), other.actionViolations.begin(),
                            other.actionViolations.end());
}

EffectSet compute_trigger_effects(const Registry& reg, const KnowledgeBase& preState,
                                  const Instance& actionInstance, const SemanticsOptions& opts) {
    const TypeRecord& rec = reg.get(actionInstance.type);
    if (rec.kind != TypeKind::Act && rec.kind != TypeKind::Event)
        throw TypeError("'" + actionInstance.type + "' is not an action or event type");

    Evaluator ev(reg, preState, opts);
    EffectSet out;

    // transitive sync closure over the pre-state, cycles cut by the visited set
    std::set<Instance> visited;
    std::deque<Instance> queue{actionInstance};
    while (!queue.empty()) {
        Instance current = queue.front();
        queue.pop_front();
        if (!visited.insert(current).second) continue;
        out.triggered.push_back(current);

        const TypeRecord& curRec = reg.get(current.type);
        Environment env;
        ev.bindFields(current, env);
        for (const ExprPtr& partner : curRec.syncsWith) {
            for (Instance& next : ev.expandInstances(partner, env, nullptr)) {
                const TypeRecord& nextRec = reg.get(next.type);
                if (nextRec.kind != TypeKind::Act && nextRec.kind != TypeKind::Event)
                    throw TypeError("Syncs with reaches non-action type '" + next.type + "'");
                if (!visited.count(next)) queue.push_back(next);
            }
        }
    }

    // every closure member fires its effects; disabled members raise
    // violations but the effects stand
    for (const Instance& member : out.triggered) {
        const TypeRecord& memberRec = reg.get(member.type);
        if (!ev.enabled(member))
            out.actionViolations.push_back(
                Violation{Violation::Kind::DisabledAction, member, -1});

        Environment env;
        ev.bindFields(member, env);
        for (const ExprPtr& e : memberRec.creates)
            for (Instance& inst : ev.expandInstances(e, env, nullptr)) out.created.insert(inst);
        for (const ExprPtr& e : memberRec.terminates)
            for (Instance& inst : ev.expandInstances(e, env, nullptr)) out.terminated.insert(inst);
        for (const ExprPtr& e : memberRec.obfuscates)
            for (Instance& inst : ev.expandInstances(e, env, nullptr)) out.obfuscated.insert(inst);
    }
    return out;
}

KnowledgeBase apply_effects(const Registry& reg, const KnowledgeBase& kb, const EffectSet& effects,
                            const SemanticsOptions& opts) {
    KnowledgeBase next = kb;
    for (const Instance& inst : effects.obfuscated)
        next.assertInstance(reg, inst, Polarity::Obfuscated, opts.functionDisplacement);
    for (const Instance& inst : effects.terminated)
        next.assertInstance(reg, inst, Polarity::False, opts.functionDisplacement);
    for (const Instance& inst : effects.created)
        next.assertInstance(reg, inst, Polarity::True, opts.functionDisplacement);
    return next;
}

std::vector<Violation> duty_violations(const Registry& reg, const KnowledgeBase& closedKb,
                                       const SemanticsOptions& opts) {
    std::vector<Violation> out;
    Evaluator ev(reg, closedKb, opts);
    for (const std::string& name : reg.declarationOrder()) {
        const TypeRecord& rec = reg.get(name);
        if (rec.kind != TypeKind::Duty || rec.violatedWhen.empty()) continue;
        for (const Instance& inst : closedKb.heldOfType(reg, name)) {
            int idx = ev.violatedDutyIndex(inst);
            if (idx >= 0) out.push_back(Violation{Violation::Kind::Duty, inst, idx});
        }
    }
    return out;
}

namespace {

StepOutcome finishStep(const Registry& reg, KnowledgeBase kb, EffectSet effects,
                       const SemanticsOptions& opts) {
    StepOutcome out;
    out.kb = close(kb, reg, opts);
    out.triggered = std::move(effects.triggered);
    out.created.assign(effects.created.begin(), effects.created.end());
    out.terminated.assign(effects.terminated.begin(), effects.terminated.end());
    out.obfuscated.assign(effects.obfuscated.begin(), effects.obfuscated.end());
    out.violations = std::move(effects.actionViolations);
    for (Violation& v : duty_violations(reg, out.kb, opts)) out.violations.push_back(std::move(v));
    return out;
}

} // namespace

StepOutcome trigger_transition(const Registry& reg, const KnowledgeBase& closedPre,
                               const Instance& actionInstance, const SemanticsOptions& opts) {
    EffectSet effects = compute_trigger_effects(reg, closedPre, actionInstance, opts);
    KnowledgeBase next = apply_effects(reg, closedPre, effects, opts);
    return finishStep(reg, std::move(next), std::move(effects), opts);
}

StepOutcome exec_statement(const Registry& reg, const KnowledgeBase& closedPre,
                           const Statement& stmt, const SemanticsOptions& opts) {
    Evaluator ev(reg, closedPre, opts);
    Environment env;
    std::vector<Instance> targets = ev.expandInstances(stmt.expr, env, nullptr);

    if (stmt.kind == StatementKind::Trigger) {
        // each expansion member transitions in turn, seeing the prior post-state
        KnowledgeBase kb = closedPre;
        EffectSet all;
        for (const Instance& inst : targets) {
            EffectSet effects = compute_trigger_effects(reg, kb, inst, opts);
            kb = close(apply_effects(reg, kb, effects, opts), reg, opts);
            all.merge(effects);
        }
        return finishStep(reg, std::move(kb), std::move(all), opts);
    }

    EffectSet effects;
    for (Instance& inst : targets) {
        if (stmt.kind == StatementKind::AssertTrue) effects.created.insert(std::move(inst));
        else effects.terminated.insert(std::move(inst));
    }
    KnowledgeBase next = apply_effects(reg, closedPre, effects, opts);
    return finishStep(reg, std::move(next), std::move(effects), opts);
}

bool query_bool(const Registry& reg, const KnowledgeBase& closedKb, const ExprPtr& expr,
                const SemanticsOptions& opts) {
    Evaluator ev(reg, closedKb, opts);
    Environment env;
    return ev.evalBoolAnyBinding(expr, env);
}

std::vector<Instance> query_instances(const Registry& reg, const KnowledgeBase& closedKb,
                                      const ExprPtr& expr, const SemanticsOptions& opts) {
    Evaluator ev(reg, closedKb, opts);
    Environment env;
    return ev.expandInstances(expr, env, nullptr);
}

} // namespace normspec
