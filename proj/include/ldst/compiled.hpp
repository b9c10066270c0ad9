#pragma once

#include <string>
#include <unordered_map>
#include <vector>

#include "ldst/model.hpp"

namespace ldst {

/// Index-based view of a valid Instance used by the evaluators and solvers.
/// States are ordered by (stage, id) so index order is evaluation order and
/// the non-terminals form a prefix; actions are ordered by name so a strict
/// argmax breaks ties toward the lexicographically smallest identifier.
struct Compiled {
    struct Arc {
        int to;
        double p;
    };
    struct Act {
        std::string name;
        std::vector<Arc> nominal;
        std::vector<std::vector<Arc>> alts;
    };

    int horizon = 0;
    UncertaintyKind kind = UncertaintyKind::reward;
    int budget = 0;
    int initial = 0;
    int num_nonterminal = 0; // states [0, num_nonterminal) are non-terminal

    std::vector<std::string> id;
    std::unordered_map<std::string, int> index;
    std::vector<int> stage;
    std::vector<std::vector<Act>> actions; // empty for terminals
    std::vector<double> reward;            // terminals only
    std::vector<double> alt_reward;        // terminals only

    int num_states() const { return static_cast<int>(id.size()); }
    int num_terminals() const { return num_states() - num_nonterminal; }
    bool is_terminal(int s) const { return s >= num_nonterminal; }
    /// Terminal where the adversary can actually lower the reward.
    bool capable_terminal(int s) const { return alt_reward[s] < reward[s]; }
};

/// Validates and indexes an instance. Throws Error(invalid_instance) with the
/// first few diagnostics if validation fails.
Compiled compile(const Instance& instance);

/// Policy as an action index per state (-1 at terminals).
using PolicyVec = std::vector<int>;

PolicyVec to_policy_vec(const Compiled& c, const Policy& policy);
Policy from_policy_vec(const Compiled& c, const PolicyVec& pol);

/// Per-state replacement of the chosen action's outcome distribution,
/// used to evaluate transition scenarios. Entries are (state, arcs).
using KernelOverlay = std::vector<std::pair<int, const std::vector<Compiled::Arc>*>>;

/// Forward pass: fills `reach` (size num_states) with arrival probabilities
/// under `pol`, substituting overlay distributions where present.
void reach_into(const Compiled& c, const PolicyVec& pol, std::vector<double>& reach,
                const KernelOverlay* overlay = nullptr);

/// Expected terminal reward of `pol` under the nominal kernel.
double nominal_value(const Compiled& c, const PolicyVec& pol);

} // namespace ldst
