#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ldst/errors.hpp"

namespace ldst {

/// Absolute tolerance for probability-mass and value-preservation checks.
inline constexpr double kProbTol = 1e-9;

enum class UncertaintyKind { reward, transition };

/// One action at a non-terminal state. `nominal` maps next-stage state ids to
/// probabilities. `alternatives` is only meaningful under transition
/// uncertainty: each entry is a full replacement distribution the adversary
/// may substitute for the nominal one. `reward` is an optional per-action
/// reward annotation consumed by lift_action_rewards.
struct Action {
    std::string name;
    std::map<std::string, double> nominal;
    std::vector<std::map<std::string, double>> alternatives;
    double reward = 0.0;
};

struct State {
    std::string id;
    int stage = 0;
    std::vector<Action> actions;             // empty iff terminal
    double reward = 0.0;                     // terminal states only
    std::optional<double> alt_reward;        // reward uncertainty: r'(t) <= r(t)
};

/// A staged finite-horizon MDP with budgeted uncertainty. States are
/// partitioned into stages 0..horizon; stage-`horizon` states are the
/// terminals. Under reward uncertainty the adversary may flip up to `budget`
/// terminal rewards to their alternative values; under transition uncertainty
/// it may substitute alternative distributions at up to `budget`
/// (state, action) pairs.
struct Instance {
    int horizon = 0;
    std::string initial;
    std::vector<State> states;
    UncertaintyKind kind = UncertaintyKind::reward;
    int budget = 0;
};

/// One chosen action per non-terminal state.
struct Policy {
    std::map<std::string, std::string> assignment;
};

struct Diagnostic {
    std::string location; // state or "state/action" the violation is tied to
    std::string message;
};

/// Checks every model invariant and returns the violations (empty iff valid),
/// ordered deterministically by location. Never throws.
std::vector<Diagnostic> validate(const Instance& instance);

/// Nominal evaluation of a policy: total reward plus the per-terminal arrival
/// probabilities and expected rewards behind it.
struct EvalReport {
    double nominal = 0.0;                       // R(pi)
    std::map<std::string, double> reach;        // p^pi(t) per terminal
    std::map<std::string, double> expected;     // p^pi(t) * r(t)
};

/// Forward pass along the policy over stages 0..T.
/// Throws Error(invalid_instance) / Error(invalid_policy).
EvalReport reach_probabilities(const Instance& instance, const Policy& policy);

/// Backward induction for the nominal-reward optimum. Argmax ties are broken
/// toward the lexicographically smallest action name.
std::pair<Policy, double> nominal_optimal_policy(const Instance& instance);

// -- transformations --------------------------------------------------------

/// Rewrites a 2-stage reward-uncertainty instance so every terminal has
/// alternative reward 0 or is incapable of deviation (r' = r). A terminal
/// with 0 < r' < r is split into h+1 copies, h = ceil(r'/(r-r')), with the
/// incoming probability divided evenly; nominal reward of every policy is
/// preserved, and so is the worst-case reward when the budget is 1.
/// `max_terminals` guards against size explosion (Error(cap_exceeded)).
Instance normalize_alternative_rewards(const Instance& instance,
                                       std::size_t max_terminals = 10000);

/// Restricts the initial state to the single action `a0`.
Instance fix_initial_action(const Instance& instance, const std::string& a0);

/// Folds per-action reward annotations into terminal rewards: each action
/// diverts probability `eps` to a fresh terminal worth reward/eps, remaining
/// mass is scaled by (1-eps) and previously existing terminal rewards by
/// 1/(1-eps); initial-stage actions route through an intermediate state so
/// the instance stays 2-stage. Nominal and worst-case value of every policy
/// are preserved. Requires eps in (0,1).
Instance lift_action_rewards(const Instance& instance, double eps);

} // namespace ldst
