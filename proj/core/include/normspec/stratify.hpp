#pragma once

#include <string>
#include <vector>

#include "normspec/registry.hpp"

namespace normspec {

// Type-level dependency analysis over derivation rules and Conditioned-by
// clauses. An edge T -> U says closing T consults U's extension or truth.
// Negative edges come from enumerations and truth checks under Not, inside
// Forall bodies, or inside aggregate bodies (those need U completed first).
struct DepEdge {
    std::string from;
    std::string to;
    bool negative;
};

struct DependencyGraph {
    std::vector<std::string> nodes;
    std::vector<DepEdge> edges;
};

DependencyGraph build_dependency_graph(const Registry& reg);

struct Stratification {
    bool ok = false;
    // dependency order: earlier strata feed later ones
    std::vector<std::vector<std::string>> strata;
    std::vector<std::string> cycle; // one offending cycle when !ok
    std::string cycleText;          // `a -[neg]-> b -> ... -> a`
};

Stratification check_stratification(const DependencyGraph& graph);

} // namespace normspec
