#include "normspec/session.hpp"

#include <algorithm>

#include "normspec/diag.hpp"
#include "normspec/printer.hpp"

namespace normspec {

Session::Session(SemanticsOptions opts) : opts_(std::move(opts)) {
    auto reg = std::make_shared<Registry>();
    KnowledgeBase kb; // empty is trivially closed
    states_.push_back(State{std::move(reg), std::move(kb), 0, -1, ""});
}

const State* Session::state(int id) const {
    for (const State& s : states_)
        if (s.id == id) return &s;
    return nullptr;
}

int Session::pushState(RegistryPtr reg, KnowledgeBase kb, const std::string& text) {
    int id = static_cast<int>(states_.size());
    states_.push_back(State{std::move(reg), std::move(kb), id, head_, text});
    head_ = id;
    return id;
}

void Session::revert(int stateId) {
    if (!state(stateId)) throw Error("unknown state id " + std::to_string(stateId));
    head_ = stateId;
}

namespace {

// Splits the phrases of a parallel set into declarations and the rest,
// descending into nested sets: the whole set executes as one step.
void distil(const PhrasePtr& phrase, std::vector<TypeDeclAst>& decls,
            std::vector<PhrasePtr>& rest) {
    if (auto* seq = std::get_if<DeclarationSeq>(&phrase->node)) {
        decls.insert(decls.end(), seq->decls.begin(), seq->decls.end());
        return;
    }
    if (auto* set = std::get_if<ParallelSet>(&phrase->node)) {
        for (const PhrasePtr& p : set->phrases) distil(p, decls, rest);
        return;
    }
    rest.push_back(phrase);
}

} // namespace

PhraseOutcome Session::executeOn(const State& base, const PhrasePtr& phrase,
                                 const AdditionalInput* input) {
    RegistryPtr reg = base.registry;
    KnowledgeBase kb = base.kb;
    if (input) {
        std::map<Instance, bool> layer;
        for (const auto& [inst, truth] : *input) layer[inst] = truth;
        kb.setAdditional(std::move(layer));
    }

    PhraseOutcome out;
    out.stateId = base.id;
    bool transitioned = false;

    // Queries close strictly so missing input surfaces as their answer. For
    // statements the pre-close is lenient (it merely re-establishes the stored
    // state's closure); the statement's own expansion and post-effect close
    // still interrupt when the phrase itself needs the input.
    bool isDeclaration = std::holds_alternative<DeclarationSeq>(phrase->node);
    bool isQuery = std::holds_alternative<BoolQuery>(phrase->node) ||
                   std::holds_alternative<InstanceQuery>(phrase->node);
    if (input || !isDeclaration) kb = close(kb, *reg, opts_, nullptr, /*lenient=*/!isQuery);

    auto recordStep = [&](const StepOutcome& step) {
        kb = step.kb;
        out.violations.insert(out.violations.end(), step.violations.begin(),
                              step.violations.end());
        out.triggered.insert(out.triggered.end(), step.triggered.begin(), step.triggered.end());
        out.created.insert(out.created.end(), step.created.begin(), step.created.end());
        out.terminated.insert(out.terminated.end(), step.terminated.begin(),
                              step.terminated.end());
        out.obfuscated.insert(out.obfuscated.end(), step.obfuscated.begin(),
                              step.obfuscated.end());
        transitioned = true;
    };

    std::visit(
        [&](const auto& node) {
            using T = std::decay_t<decltype(node)>;
            if constexpr (std::is_same_v<T, DeclarationSeq>) {
                auto next = std::make_shared<Registry>(reg->applyDeclarations(node.decls));
                reg = next;
                kb = close(kb, *reg, opts_, nullptr, /*lenient=*/true);
                transitioned = true;
            } else if constexpr (std::is_same_v<T, Statement>) {
                recordStep(exec_statement(*reg, kb, node, opts_));
            } else if constexpr (std::is_same_v<T, BoolQuery>) {
                QueryRecord q;
                q.text = print_expr(node.expr);
                q.boolResult = query_bool(*reg, kb, node.expr, opts_);
                out.queries.push_back(std::move(q));
            } else if constexpr (std::is_same_v<T, InstanceQuery>) {
                QueryRecord q;
                q.text = print_expr(node.expr);
                q.isInstanceQuery = true;
                q.instances = query_instances(*reg, kb, node.expr, opts_);
                out.queries.push_back(std::move(q));
            } else if constexpr (std::is_same_v<T, ParallelSet>) {
                std::vector<TypeDeclAst> decls;
                std::vector<PhrasePtr> rest;
                for (const PhrasePtr& p : node.phrases) distil(p, decls, rest);

                if (!decls.empty()) {
                    reg = std::make_shared<Registry>(reg->applyDeclarations(decls));
                    kb = close(kb, *reg, opts_, nullptr, rest.empty());
                }
                // all statements and queries run against the post-declaration,
                // pre-statement snapshot; effects merge atomically
                const KnowledgeBase snapshot = kb;
                EffectSet merged;
                for (const PhrasePtr& p : rest) {
                    if (auto* stmt = std::get_if<Statement>(&p->node)) {
                        Evaluator ev(*reg, snapshot, opts_);
                        Environment env;
                        std::vector<Instance> targets = ev.expandInstances(stmt->expr, env, nullptr);
                        if (stmt->kind == StatementKind::Trigger) {
                            for (const Instance& inst : targets)
                                merged.merge(compute_trigger_effects(*reg, snapshot, inst, opts_));
                        } else if (stmt->kind == StatementKind::AssertTrue) {
                            for (Instance& inst : targets) merged.created.insert(std::move(inst));
                        } else {
                            for (Instance& inst : targets)
                                merged.terminated.insert(std::move(inst));
                        }
                    } else if (auto* bq = std::get_if<BoolQuery>(&p->node)) {
                        QueryRecord q;
                        q.text = print_expr(bq->expr);
                        q.boolResult = query_bool(*reg, snapshot, bq->expr, opts_);
                        out.queries.push_back(std::move(q));
                    } else if (auto* iq = std::get_if<InstanceQuery>(&p->node)) {
                        QueryRecord q;
                        q.text = print_expr(iq->expr);
                        q.isInstanceQuery = true;
                        q.instances = query_instances(*reg, snapshot, iq->expr, opts_);
                        out.queries.push_back(std::move(q));
                    }
                }
                KnowledgeBase applied = apply_effects(*reg, snapshot, merged, opts_);
                StepOutcome step;
                step.kb = close(applied, *reg, opts_);
                step.triggered = merged.triggered;
                step.created.assign(merged.created.begin(), merged.created.end());
                step.terminated.assign(merged.terminated.begin(), merged.terminated.end());
                step.obfuscated.assign(merged.obfuscated.begin(), merged.obfuscated.end());
                step.violations = merged.actionViolations;
                for (Violation& v : duty_violations(*reg, step.kb, opts_))
                    step.violations.push_back(std::move(v));
                recordStep(step);
            }
        },
        phrase->node);

    if (transitioned) {
        if (input) {
            // the input layer lives only for this request
            kb.clearAdditional();
            kb = close(kb, *reg, opts_, nullptr, /*lenient=*/true);
        }
        out.stateId = pushState(reg, std::move(kb), print_phrase(phrase));
        out.newState = true;
    }
    return out;
}

PhraseOutcome Session::execute(const PhrasePtr& phrase, const AdditionalInput* input) {
    return executeOn(head(), phrase, input);
}

PhraseOutcome Session::executeText(const std::string& text, const AdditionalInput* input) {
    std::vector<PhrasePtr> phrases = parse_program(text, "<request>");
    PhraseOutcome combined;
    combined.stateId = head().id;
    for (const PhrasePtr& p : phrases) {
        PhraseOutcome one = execute(p, input);
        combined.stateId = one.stateId;
        combined.newState |= one.newState;
        combined.queries.insert(combined.queries.end(), one.queries.begin(), one.queries.end());
        combined.violations.insert(combined.violations.end(), one.violations.begin(),
                                   one.violations.end());
        combined.triggered.insert(combined.triggered.end(), one.triggered.begin(),
                                  one.triggered.end());
        combined.created.insert(combined.created.end(), one.created.begin(), one.created.end());
        combined.terminated.insert(combined.terminated.end(), one.terminated.begin(),
                                   one.terminated.end());
        combined.obfuscated.insert(combined.obfuscated.end(), one.obfuscated.begin(),
                                   one.obfuscated.end());
    }
    return combined;
}

std::vector<Instance> Session::enabledActions() const {
    const State& s = head();
    Evaluator ev(*s.registry, s.kb, opts_);
    std::vector<Instance> out;
    for (const std::string& name : s.registry->declarationOrder()) {
        const TypeRecord& rec = s.registry->get(name);
        if (rec.kind != TypeKind::Act && rec.kind != TypeKind::Event) continue;
        // candidates come from the joint enumeration of the fields, so
        // physical acts show up before anything holds
        std::vector<std::vector<Value>> rows{{}};
        bool enumerable = true;
        for (const auto& f : rec.fields) {
            auto base = s.registry->resolveVarType(f.typeName);
            if (!base) {
                enumerable = false;
                break;
            }
            std::vector<std::vector<Value>> next;
            try {
                for (const Instance& inst : ev.enumerateType(*base))
                    for (const auto& row : rows) {
                        auto extended = row;
                        extended.push_back(Value(inst));
                        next.push_back(std::move(extended));
                    }
            } catch (const OpenEnumerationInterrupt&) {
                enumerable = false; // open infinite field: skip the type
                break;
            }
            rows = std::move(next);
        }
        if (!enumerable) continue;
        for (auto& row : rows) {
            Instance candidate(name, std::move(row));
            try {
                if (ev.enabled(candidate)) out.push_back(std::move(candidate));
            } catch (const EvalInterrupt&) {
                // unknowable candidates are not listed
            }
        }
    }
    return out;
}

Instance Session::parseInstance(const std::string& text) const {
    ExprPtr expr = parse_expression(text);
    const State& s = head();
    Evaluator ev(*s.registry, s.kb, opts_);
    Environment env;
    auto v = ev.evalValue(expr, env);
    if (!v || !v->isInst()) throw EvalError("'" + text + "' does not denote an instance");
    return std::get<Instance>(v->v);
}

} // namespace normspec
