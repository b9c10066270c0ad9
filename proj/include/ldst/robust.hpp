#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ldst/compiled.hpp"
#include "ldst/model.hpp"

namespace ldst {

/// One realization the adversary may pick: up to `budget` terminal rewards
/// flipped to their alternative value, or up to `budget` (state, action)
/// pairs remapped to an alternative distribution (index into that pair's
/// alternative list).
struct Scenario {
    UncertaintyKind kind = UncertaintyKind::reward;
    std::vector<std::string> flipped; // reward case: terminal ids, ascending
    struct Remap {
        std::string state;
        std::string action;
        int alternative = 0;
    };
    std::vector<Remap> remapped; // transition case
};

struct RobustReport {
    double nominal = 0.0;    // R(pi)
    double worst_case = 0.0; // min over the budgeted uncertainty set
    double loss = 0.0;       // nominal - worst_case
    Scenario witness;
};

inline constexpr std::uint64_t kDefaultScenarioCap = 1'000'000;

/// Exact worst case under reward uncertainty: flips the budget-many largest
/// per-terminal losses (losses are additive and independent across
/// terminals, so the greedy top-k choice is the exact adversary). Ties break
/// toward the smaller terminal identifier.
RobustReport worst_case_reward_uncertainty(const Instance& instance, const Policy& policy);

/// Exhaustive worst case under finite transition uncertainty: enumerates
/// every subset of at most `budget` deviation-capable (state, action) pairs
/// along with every combination of alternative indices, in a fixed order
/// (sites sorted by state then action, subsets colexicographic, alternatives
/// in list order), and returns the first minimizer. Errs with
/// Error(cap_exceeded) when the scenario count exceeds `scenario_cap`.
RobustReport worst_case_transition_uncertainty(const Instance& instance, const Policy& policy,
                                               std::uint64_t scenario_cap = kDefaultScenarioCap);

/// Dispatch on the instance's uncertainty kind.
RobustReport robust_report(const Instance& instance, const Policy& policy,
                           std::uint64_t scenario_cap = kDefaultScenarioCap);

/// L(pi) = R(pi) - worst case, via the matching evaluator.
double loss(const Instance& instance, const Policy& policy,
            std::uint64_t scenario_cap = kDefaultScenarioCap);

/// Expected reward of the policy under one fixed scenario.
double evaluate_scenario(const Instance& instance, const Policy& policy, const Scenario& scenario);

namespace detail {

/// Compiled-level evaluators used by the oracle and the approximation loops.
struct RobustOut {
    double nominal = 0.0;
    double worst = 0.0;
};

struct RobustWorkspace {
    std::vector<double> reach;
    std::vector<std::pair<double, int>> losses; // (-loss, terminal index)
    std::vector<std::uint64_t> masks;
};

RobustOut worst_reward(const Compiled& c, const PolicyVec& pol, RobustWorkspace& ws,
                       Scenario* witness = nullptr);
RobustOut worst_transition(const Compiled& c, const PolicyVec& pol, std::uint64_t scenario_cap,
                           RobustWorkspace& ws, Scenario* witness = nullptr);
RobustOut worst_dispatch(const Compiled& c, const PolicyVec& pol, std::uint64_t scenario_cap,
                         RobustWorkspace& ws, Scenario* witness = nullptr);

} // namespace detail

} // namespace ldst
