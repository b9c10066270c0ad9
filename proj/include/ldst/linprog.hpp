#pragma once

#include <vector>

#include "ldst/errors.hpp"

namespace ldst {

/// Dense LP: maximize c.x subject to A_ub x <= b_ub, A_eq x = b_eq, x >= 0,
/// with `fixed_zero` variables forced to 0 (their columns are deleted before
/// solving, so the fixing is exact).
struct LinearProgram {
    std::vector<double> objective;
    std::vector<std::vector<double>> a_ub;
    std::vector<double> b_ub;
    std::vector<std::vector<double>> a_eq;
    std::vector<double> b_eq;
    std::vector<int> fixed_zero;

    std::size_t num_vars() const { return objective.size(); }
};

enum class LpStatus { optimal, infeasible, unbounded };

struct LpSolution {
    LpStatus status = LpStatus::optimal;
    double value = 0.0;
    std::vector<double> x;
    /// Variable index basic in each constraint row (-1 for slack/artificial);
    /// the returned point is a basic feasible solution, i.e. a vertex.
    std::vector<int> basis;
    bool vertex = false;
};

/// Two-phase primal simplex under Bland's rule, which trades pivoting speed
/// for guaranteed termination on the small degenerate programs this project
/// produces. Throws Error(numerical) naming the offending pivot if the
/// iteration guard trips.
LpSolution solve_extreme_point(const LinearProgram& lp);

} // namespace ldst
