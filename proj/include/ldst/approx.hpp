#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ldst/linprog.hpp"
#include "ldst/model.hpp"

namespace ldst {

/// Expected-reward coefficients of a 2-stage instance with a single initial
/// action and normalized alternative rewards: v[s][a][t] is the expected
/// nominal reward collected at terminal t when the policy picks action a at
/// middle state s. Derived tables: v_max (best action per terminal), the
/// per-action heaviest terminal, the per-action reward away from it, and the
/// per-state best such remainder (the value of the artificial sink in the
/// assignment relaxation).
struct RewardCoefficients {
    std::string initial_id;
    std::string initial_action;
    std::vector<std::string> middle_ids;                  // sorted by id
    std::vector<std::vector<std::string>> action_names;   // per middle, sorted
    std::vector<std::string> terminal_ids;                // sorted by id
    std::vector<double> terminal_rewards;                 // nominal r(t)
    std::vector<char> capable;                            // adversary can hit t
    std::vector<std::vector<std::vector<double>>> v;      // [s][a][t]
    std::vector<std::vector<double>> row_sum;             // [s][a] = sum_t v
    std::vector<std::vector<double>> v_max;               // [s][t]
    std::vector<std::vector<int>> heaviest;               // [s][a] argmax_t v
    std::vector<std::vector<double>> rest;                // [s][a] row_sum - heaviest
    std::vector<double> v_star;                           // [s] max_a rest
    std::vector<int> a_star;                              // [s] argmax_a rest

    int num_middle() const { return static_cast<int>(middle_ids.size()); }
    int num_terminal() const { return static_cast<int>(terminal_ids.size()); }
};

/// Requires horizon 2, budget 1, a single initial action, and every terminal
/// either fully certain (r' = r) or with alternative reward 0; throws
/// Error(unsupported_shape) naming the failed assumption otherwise.
RewardCoefficients reward_coefficients(const Instance& instance);

/// Geometric guess grid for the loss parameter: values (1+eps)^i * rmin/|S2|
/// for i = 0..ell with ell = ceil(log_{1+eps}(|S2| rmax / rmin)), rmin/rmax
/// over terminals with positive reward. `include_zero` prepends 0 so covering
/// constraints can be switched off for zero-loss policies.
struct GuessGrid {
    double eps = 0.0;
    double rmin = 0.0;
    double rmax = 0.0;
    int ell = -1;
    std::vector<double> values;
};

GuessGrid make_guess_grid(const std::vector<double>& terminal_rewards, double eps,
                          bool include_zero);

/// A solution of one of the two relaxations.
struct AssignmentSolution {
    enum class Kind { ub1_integral, ub2_fractional, ub2_integral };
    Kind kind = Kind::ub1_integral;
    double objective = 0.0;
    double L = 0.0;  // parameter the solution was solved against
    int t_hat = -1;  // ub1 only: covered terminal index

    std::vector<int> chosen_action;      // ub1: action per middle state
    std::vector<std::vector<double>> y;  // ub2: [s][t], last column is the sink
    std::vector<int> target;             // ub2 integral: terminal per state (num_terminal = sink)
    bool vertex = false;                 // ub2 fractional came from a simplex vertex
};

/// Multiple-choice knapsack-cover: pick one action per middle state
/// maximizing reward away from terminal `t_hat` subject to covering at least
/// L of expected reward on `t_hat`. Fully polynomial approximation scheme:
/// the returned objective is at least 1/(1+eps) of the exact integer optimum.
/// Returns nullopt iff no assignment can cover L (within 1e-9).
std::optional<AssignmentSolution> solve_ub1(const RewardCoefficients& rc, double L, int t_hat,
                                            double eps);

/// pi_x: the action selected per middle state, plus the fixed initial action.
Policy policy_from_ub1(const AssignmentSolution& x, const RewardCoefficients& rc);

/// Assignment relaxation: fractional y over terminals plus an uncapacitated
/// sink, per-terminal expected reward capped by L, columns with v_max > L
/// removed. Capacity rows exist only for terminals the adversary can hit.
LinearProgram build_ub2(const RewardCoefficients& rc, double L);

/// Solves build_ub2 at a vertex via the simplex module.
AssignmentSolution solve_ub2_fractional(const RewardCoefficients& rc, double L);

/// Rounds an extreme-point fractional solution to an integral assignment
/// feasible against capacity 2L with no objective loss: per-terminal slots
/// (ceil of the fractional load), greedy packing in decreasing value order,
/// then a maximum-weight perfect matching of states onto slots.
AssignmentSolution round_ub2(const AssignmentSolution& frac, const RewardCoefficients& rc,
                             double L);

/// pi_y: argmax of reward-away-from-heaviest for sink-assigned states,
/// argmax of v[.][t] for terminal-assigned states.
Policy policy_from_ub2(const AssignmentSolution& integral, const RewardCoefficients& rc);

/// Result of one subroutine sweep (best candidate across the guess grid and
/// all initial actions, measured by true worst-case reward).
struct SubroutineResult {
    Policy policy;
    double value = 0.0;
    double chosen_L = 0.0;
    std::string chosen_t_hat; // algorithm 1 only
    int grid_size = 0;        // grid length of the last sub-instance swept
    int cells = 0;            // candidate solutions evaluated
};

/// Knapsack-cover sweep: guarantees worst_case(pi1) >=
/// min{worst_case(pi), loss(pi)} / (1+eps1) for every policy pi.
SubroutineResult algorithm1(const Instance& instance, double eps1);

/// Assignment-rounding sweep: guarantees worst_case(pi2) >=
/// R(pi)/2 - 2(1+eps2) loss(pi) for every policy pi.
SubroutineResult algorithm2(const Instance& instance, double eps2);

struct ApproxReport {
    double epsilon = 0.0;
    double epsilon1 = 0.0;
    double epsilon2 = 0.0;
    int grid_size = 0;
    double alg1_value = 0.0;
    double alg1_L = 0.0;
    std::string alg1_t_hat;
    double alg2_value = 0.0;
    double alg2_L = 0.0;
    std::string chosen; // "alg1" | "alg2"
};

struct ApproxResult {
    Policy policy;
    double value = 0.0;
    ApproxReport report;
};

/// Best of the two subroutines with eps1 = eps/5 and eps2 = eps/(10+2eps);
/// the returned worst-case reward is within a factor 1/(5+eps) of optimal.
/// Requires a 2-stage reward-uncertainty instance with budget 1.
ApproxResult approximate(const Instance& instance, double eps);

} // namespace ldst
