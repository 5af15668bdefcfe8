#include "normspec/stratify.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <set>

#include "normspec/diag.hpp"

namespace normspec {

namespace {

bool isActiveStringActor(const Registry& reg, const std::string& name) {
    const TypeRecord* rec = reg.find(name);
    return rec && name == kActorType && rec->domain == TypeRecord::Domain::String &&
           !rec->open && rec->fields.empty();
}

struct EdgeCollector {
    const Registry& reg;
    std::set<std::pair<std::string, bool>> targets; // (type, negative)

    void mention(const std::string& typeName, bool negative) {
        targets.insert({typeName, negative});
    }

    void mentionVar(const std::string& varName, bool negative) {
        if (auto base = reg.resolveVarType(varName)) mention(*base, negative);
        // unresolvable names surface as TypeErrors at evaluation time
    }

    void walk(const ExprPtr& e, bool negative, std::vector<std::string>& bound) {
        std::visit(
            [&](const auto& node) {
                using T = std::decay_t<decltype(node)>;
                if constexpr (std::is_same_v<T, VarRef>) {
                    mentionVar(node.name, negative);
                } else if constexpr (std::is_same_v<T, CtorApp>) {
                    mention(node.type, negative);
                    const TypeRecord* rec = reg.find(node.type);
                    std::set<std::string> givenFields;
                    size_t positional = 0;
                    for (const auto& a : node.args) {
                        if (!a.field.empty()) givenFields.insert(a.field);
                        else ++positional;
                        walk(a.value, negative, bound);
                    }
                    if (rec) {
                        // implicitly completed arguments enumerate their field types
                        for (size_t i = 0; i < rec->fields.size(); ++i) {
                            const auto& f = rec->fields[i];
                            if (givenFields.count(f.label)) continue;
                            if (positional > 0) {
                                --positional;
                                continue;
                            }
                            bool isBound =
                                std::find(bound.begin(), bound.end(), f.label) != bound.end();
                            if (!isBound) mentionVar(f.label, negative);
                        }
                    }
                } else if constexpr (std::is_same_v<T, Proj>) {
                    walk(node.base, negative, bound);
                } else if constexpr (std::is_same_v<T, NotExpr>) {
                    walk(node.operand, !negative, bound);
                } else if constexpr (std::is_same_v<T, Binary>) {
                    walk(node.lhs, negative, bound);
                    walk(node.rhs, negative, bound);
                } else if constexpr (std::is_same_v<T, BuiltinCall>) {
                    walk(node.arg, negative, bound);
                } else if constexpr (std::is_same_v<T, Quant>) {
                    bool bodyNeg = node.kind == QuantKind::Forall ? true : negative;
                    for (const auto& v : node.vars) mentionVar(v, bodyNeg);
                    size_t n = bound.size();
                    for (const auto& v : node.vars) bound.push_back(v);
                    walk(node.body, bodyNeg, bound);
                    bound.resize(n);
                } else if constexpr (std::is_same_v<T, Aggregate>) {
                    // aggregate values need the enumerated extension completed
                    walk(node.body, true, bound);
                } else if constexpr (std::is_same_v<T, Guarded>) {
                    walk(node.value, negative, bound);
                    walk(node.guard, negative, bound);
                }
            },
            e->node);
    }
};

} // namespace

DependencyGraph build_dependency_graph(const Registry& reg) {
    DependencyGraph g;
    std::set<std::pair<std::string, std::pair<std::string, bool>>> seen;

    for (const std::string& name : reg.declarationOrder()) {
        g.nodes.push_back(name);
        const TypeRecord& rec = reg.get(name);

        EdgeCollector collector{reg, {}};
        std::vector<std::string> bound;
        for (const ExprPtr& rule : rec.derivationRules) collector.walk(rule, false, bound);
        for (const ExprPtr& cond : rec.conditionedBy) {
            // fields are bound when conditions are checked
            size_t n = bound.size();
            for (const auto& f : rec.fields) bound.push_back(f.label);
            collector.walk(cond, false, bound);
            bound.resize(n);
        }
        for (const auto& [to, negative] : collector.targets) {
            if (seen.insert({name, {to, negative}}).second)
                g.edges.push_back(DepEdge{name, to, negative});
        }
    }

    // The active-string actor domain grows with every held instance, so it
    // depends positively on everything.
    if (isActiveStringActor(reg, kActorType)) {
        for (const std::string& name : reg.declarationOrder())
            if (seen.insert({kActorType, {name, false}}).second)
                g.edges.push_back(DepEdge{kActorType, name, false});
    }
    return g;
}

namespace {

struct Tarjan {
    const std::map<std::string, std::vector<std::string>>& adj;
    std::map<std::string, int> index, low, comp;
    std::vector<std::string> stack;
    std::set<std::string> onStack;
    int counter = 0, comps = 0;

    void run(const std::string& v) {
        index[v] = low[v] = counter++;
        stack.push_back(v);
        onStack.insert(v);
        if (auto it = adj.find(v); it != adj.end()) {
            for (const auto& w : it->second) {
                if (!index.count(w)) {
                    run(w);
                    low[v] = std::min(low[v], low[w]);
                } else if (onStack.count(w)) {
                    low[v] = std::min(low[v], index[w]);
                }
            }
        }
        if (low[v] == index[v]) {
            for (;;) {
                std::string w = stack.back();
                stack.pop_back();
                onStack.erase(w);
                comp[w] = comps;
                if (w == v) break;
            }
            ++comps;
        }
    }
};

} // namespace

Stratification check_stratification(const DependencyGraph& graph) {
    std::map<std::string, std::vector<std::string>> adj;
    for (const auto& n : graph.nodes) adj[n];
    for (const auto& e : graph.edges) adj[e.from].push_back(e.to);

    Tarjan tarjan{adj, {}, {}, {}, {}, {}, 0, 0};
    for (const auto& n : graph.nodes)
        if (!tarjan.index.count(n)) tarjan.run(n);

    Stratification result;
    for (const auto& e : graph.edges) {
        if (!e.negative || tarjan.comp[e.from] != tarjan.comp[e.to]) continue;
        // negative edge inside a strongly connected component: find a path
        // back from e.to to e.from to show one concrete cycle
        std::map<std::string, std::string> prev;
        std::deque<std::string> queue{e.to};
        std::set<std::string> visited{e.to};
        while (!queue.empty()) {
            std::string cur = queue.front();
            queue.pop_front();
            if (cur == e.from) break;
            for (const auto& next : adj[cur]) {
                if (tarjan.comp[next] != tarjan.comp[e.from] || visited.count(next)) continue;
                visited.insert(next);
                prev[next] = cur;
                queue.push_back(next);
            }
        }
        // path e.to -> ... -> e.from, recovered by backtracking the BFS tree
        std::vector<std::string> path;
        for (std::string cur = e.from;;) {
            path.push_back(cur);
            if (cur == e.to) break;
            auto it = prev.find(cur);
            if (it == prev.end()) break;
            cur = it->second;
        }
        std::reverse(path.begin(), path.end());

        result.cycle.push_back(e.from);
        for (const auto& n : path)
            if (n != e.from || path.size() == 1) result.cycle.push_back(n);

        std::string text = e.from + " -[neg]-> ";
        for (size_t i = 0; i < path.size(); ++i) {
            if (i) text += " -> ";
            text += path[i];
        }
        result.cycleText = text;
        result.ok = false;
        return result;
    }

    // dependency-first order: a component comes after everything it points to
    result.ok = true;
    std::map<int, std::vector<std::string>> byComp;
    for (const auto& n : graph.nodes) byComp[tarjan.comp[n]].push_back(n);
    // Tarjan assigns component ids in reverse topological order of the
    // condensation (targets get smaller ids), so ascending id order is
    // already dependency-first.
    for (auto& [id, members] : byComp) {
        std::sort(members.begin(), members.end());
        result.strata.push_back(std::move(members));
    }
    return result;
}

} // namespace normspec
