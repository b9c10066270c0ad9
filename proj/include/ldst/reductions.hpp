#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ldst/model.hpp"

namespace ldst {

// -- number-partition family --------------------------------------------------

struct ThreePartitionOutput {
    Instance instance;
    int n = 0;             // number of groups (|b| = 3n)
    long long target = 0;  // per-group sum B
    double yes_value = 0.0; // 1 - 1/n, attained iff an equal-sum partition exists
};

/// Initial action spreads mass b_i/(nB) over 3n middle states; each middle
/// state routes deterministically to one of n unit-reward terminals, budget 1.
/// The worst-case optimum is 1 - 1/n exactly when the items admit an
/// equal-sum partition into n groups.
ThreePartitionOutput gen_3partition(const std::vector<long long>& b, long long B);

// -- disjoint-paths family ----------------------------------------------------

struct Digraph {
    std::vector<std::string> vertices;
    std::vector<std::pair<std::string, std::string>> arcs;
};

struct LayeredDigraph {
    std::vector<std::vector<std::string>> layers; // layer 1 = sources, last = sinks
    std::vector<std::pair<std::string, std::string>> arcs;
    std::vector<std::pair<std::string, std::string>> pairs; // (source_i, sink_i)
};

/// Layers a DAG by longest distance from the sources and subdivides arcs so
/// none skips a layer; vertices on no source-to-sink path are dropped.
LayeredDigraph layerize(const Digraph& dag,
                        const std::vector<std::pair<std::string, std::string>>& pairs);

struct DisjointPathsOutput {
    Instance instance;
    int ell = 0;
    double eps = 0.0;
    // Worst-case optimum is 1 if vertex-disjoint source-sink paths exist for
    // every pair, and at most eps otherwise.
};

/// Geometric source weights eps^i / delta and matching terminal rewards
/// delta / eps^i with budget ell-1.
DisjointPathsOutput gen_disjoint_paths(const LayeredDigraph& graph, double eps);

// -- max-min vertex cover family ----------------------------------------------

struct PartitionedGraph {
    /// Cell (i, j) -> vertex ids; keys must cover {1..|I|} x {1..|J|}.
    std::map<std::pair<int, int>, std::vector<std::string>> cells;
    std::vector<std::pair<std::string, std::string>> edges; // multigraph
    int ell = 1; // cover-size threshold
};

struct MaxMinVcOutput {
    Instance instance;
    PartitionedGraph padded;   // after edge deletion, dummies and padding
    double theta = 0.0;        // worst-case optimum exceeds theta iff some
                               // selection has min vertex cover >= ell
    double epsilon = 0.0;
    long long m_bar = 0;       // uniform per-cell edge count
    long long cross_per_pair = 0;
    long long selected_edges = 0; // edges of any selected subgraph
    int budget = 0;
};

/// Transition-uncertainty construction over a padded partitioned multigraph:
/// edge and vertex gadget states with uncertain-deterministic actions, budget
/// selected_edges + ell - 1.
MaxMinVcOutput gen_maxmin_vc(const PartitionedGraph& graph);

// -- satisfiability family ------------------------------------------------------

struct CnfFormula {
    int num_vars = 0;
    std::vector<std::vector<int>> clauses; // DIMACS literals, exactly 3 per clause
};

struct ThreeSatOutput {
    Instance instance;
    int num_vars = 0;
    int num_clauses = 0;
    // Worst-case optimum is positive (at least 1/2) iff the formula is
    // satisfiable; budget is 2.
};

ThreeSatOutput gen_3sat(const CnfFormula& formula);

// -- seeded random corpus -------------------------------------------------------

struct RandomSpec {
    int s1_count = 4;
    int s2_count = 4;
    int actions_per_state = 2;
    double reward_lo = 0.25;
    double reward_hi = 1.0;
    /// Alternative rewards are r * u with u = 0 at probability
    /// `alt_zero_prob`, otherwise uniform in [alt_lo_frac, alt_hi_frac].
    double alt_zero_prob = 0.0;
    double alt_lo_frac = 0.0;
    double alt_hi_frac = 1.0;
    std::uint64_t seed = 0;
};

/// Reproducible 2-stage reward-uncertainty instance with budget 1; identical
/// spec yields identical output on every platform.
Instance gen_random(const RandomSpec& spec);

} // namespace ldst
