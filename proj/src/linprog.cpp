#include "ldst/linprog.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace ldst {

namespace {

constexpr double kPivotTol = 1e-9;
constexpr double kFeasTol = 1e-7;

struct Tableau {
    int rows = 0;
    int cols = 0; // structural + slack + artificial (rhs kept separately)
    std::vector<std::vector<double>> a;
    std::vector<double> rhs;
    std::vector<double> obj; // reduced costs, maximize convention
    double obj_rhs = 0.0;
    std::vector<int> basis;        // column basic in each row
    std::vector<char> enterable;   // artificials are barred in phase 2

    void pivot(int pr, int pc) {
        const double piv = a[pr][pc];
        for (int j = 0; j < cols; ++j) a[pr][j] /= piv;
        rhs[pr] /= piv;
        for (int i = 0; i < rows; ++i) {
            if (i == pr) continue;
            const double f = a[i][pc];
            if (f == 0.0) continue;
            for (int j = 0; j < cols; ++j) a[i][j] -= f * a[pr][j];
            rhs[i] -= f * rhs[pr];
        }
        const double f = obj[pc];
        if (f != 0.0) {
            for (int j = 0; j < cols; ++j) obj[j] -= f * a[pr][j];
            obj_rhs -= f * rhs[pr];
        }
        basis[pr] = pc;
    }

    enum class Step { at_optimum, pivoted, unbounded };

    /// Bland: smallest improving column, leaving row by min ratio with ties
    /// resolved toward the smallest basic column.
    Step iterate() {
        int pc = -1;
        for (int j = 0; j < cols; ++j)
            if (enterable[j] && obj[j] > kPivotTol) {
                pc = j;
                break;
            }
        if (pc < 0) return Step::at_optimum;
        int pr = -1;
        double best = 0.0;
        for (int i = 0; i < rows; ++i) {
            if (a[i][pc] <= kPivotTol) continue;
            const double ratio = rhs[i] / a[i][pc];
            if (pr < 0 || ratio < best || (ratio == best && basis[i] < basis[pr])) {
                pr = i;
                best = ratio;
            }
        }
        if (pr < 0) return Step::unbounded;
        pivot(pr, pc);
        return Step::pivoted;
    }
};

} // namespace

LpSolution solve_extreme_point(const LinearProgram& lp) {
    const int n = static_cast<int>(lp.num_vars());
    for (const auto& row : lp.a_ub)
        if (static_cast<int>(row.size()) != n)
            throw Error(Errc::bad_input, "inequality row width does not match the objective");
    for (const auto& row : lp.a_eq)
        if (static_cast<int>(row.size()) != n)
            throw Error(Errc::bad_input, "equality row width does not match the objective");
    if (lp.a_ub.size() != lp.b_ub.size() || lp.a_eq.size() != lp.b_eq.size())
        throw Error(Errc::bad_input, "constraint matrix and right-hand side sizes differ");

    std::vector<char> fixed(static_cast<std::size_t>(n), 0);
    for (int v : lp.fixed_zero) {
        if (v < 0 || v >= n) throw Error(Errc::bad_input, "fixed variable index out of range");
        fixed[static_cast<std::size_t>(v)] = 1;
    }
    std::vector<int> keep; // reduced column -> original variable
    for (int v = 0; v < n; ++v)
        if (!fixed[static_cast<std::size_t>(v)]) keep.push_back(v);
    const int ns = static_cast<int>(keep.size());

    const int m1 = static_cast<int>(lp.a_ub.size());
    const int m2 = static_cast<int>(lp.a_eq.size());
    const int m = m1 + m2;

    // Row layout after sign normalization (rhs >= 0):
    //   <= rows get a slack; flipped <= rows get a surplus and an artificial;
    //   = rows get an artificial.
    struct Row {
        std::vector<double> a;
        double b;
        bool eq;
    };
    std::vector<Row> rowset;
    rowset.reserve(static_cast<std::size_t>(m));
    std::vector<int> slack_col(static_cast<std::size_t>(m), -1), art_col(static_cast<std::size_t>(m), -1);
    std::vector<char> flipped(static_cast<std::size_t>(m), 0);
    for (int i = 0; i < m; ++i) {
        const bool eq = i >= m1;
        const auto& src = eq ? lp.a_eq[static_cast<std::size_t>(i - m1)] : lp.a_ub[static_cast<std::size_t>(i)];
        double b = eq ? lp.b_eq[static_cast<std::size_t>(i - m1)] : lp.b_ub[static_cast<std::size_t>(i)];
        Row row;
        row.eq = eq;
        row.a.resize(static_cast<std::size_t>(ns));
        double sign = 1.0;
        if (b < 0.0) {
            sign = -1.0;
            b = -b;
            flipped[static_cast<std::size_t>(i)] = 1;
        }
        for (int j = 0; j < ns; ++j) {
            const double v = src[static_cast<std::size_t>(keep[static_cast<std::size_t>(j)])];
            if (!std::isfinite(v)) throw Error(Errc::bad_input, "non-finite coefficient");
            row.a[static_cast<std::size_t>(j)] = sign * v;
        }
        row.b = b;
        rowset.push_back(std::move(row));
    }

    int cols = ns;
    for (int i = 0; i < m; ++i)
        if (!rowset[static_cast<std::size_t>(i)].eq) slack_col[static_cast<std::size_t>(i)] = cols++;
    int num_art = 0;
    for (int i = 0; i < m; ++i) {
        const bool needs_art = rowset[static_cast<std::size_t>(i)].eq || flipped[static_cast<std::size_t>(i)];
        if (needs_art) {
            art_col[static_cast<std::size_t>(i)] = cols++;
            ++num_art;
        }
    }

    Tableau t;
    t.rows = m;
    t.cols = cols;
    t.a.assign(static_cast<std::size_t>(m), std::vector<double>(static_cast<std::size_t>(cols), 0.0));
    t.rhs.resize(static_cast<std::size_t>(m));
    t.basis.resize(static_cast<std::size_t>(m));
    t.enterable.assign(static_cast<std::size_t>(cols), 1);
    for (int i = 0; i < m; ++i) {
        auto& row = t.a[static_cast<std::size_t>(i)];
        for (int j = 0; j < ns; ++j) row[static_cast<std::size_t>(j)] = rowset[static_cast<std::size_t>(i)].a[static_cast<std::size_t>(j)];
        if (slack_col[static_cast<std::size_t>(i)] >= 0)
            row[static_cast<std::size_t>(slack_col[static_cast<std::size_t>(i)])] =
                flipped[static_cast<std::size_t>(i)] ? -1.0 : 1.0;
        if (art_col[static_cast<std::size_t>(i)] >= 0) row[static_cast<std::size_t>(art_col[static_cast<std::size_t>(i)])] = 1.0;
        t.rhs[static_cast<std::size_t>(i)] = rowset[static_cast<std::size_t>(i)].b;
        t.basis[static_cast<std::size_t>(i)] = art_col[static_cast<std::size_t>(i)] >= 0
                                                   ? art_col[static_cast<std::size_t>(i)]
                                                   : slack_col[static_cast<std::size_t>(i)];
    }

    const long max_iter = 2000L + 200L * static_cast<long>(m + cols);
    long iter = 0;
    auto run = [&](Tableau& tab) {
        while (true) {
            const auto step = tab.iterate();
            if (step == Tableau::Step::at_optimum) return false;
            if (step == Tableau::Step::unbounded) return true;
            if (++iter > max_iter)
                throw Error(Errc::numerical, "simplex stalled after " + std::to_string(iter) +
                                                 " pivots (basis size " + std::to_string(m) + ")");
        }
    };

    if (num_art > 0) {
        // Phase 1: maximize -sum(artificials).
        t.obj.assign(static_cast<std::size_t>(cols), 0.0);
        t.obj_rhs = 0.0;
        for (int i = 0; i < m; ++i)
            if (art_col[static_cast<std::size_t>(i)] >= 0)
                t.obj[static_cast<std::size_t>(art_col[static_cast<std::size_t>(i)])] = -1.0;
        for (int i = 0; i < m; ++i) {
            const int b = t.basis[static_cast<std::size_t>(i)];
            const double cb = t.obj[static_cast<std::size_t>(b)];
            if (cb == 0.0) continue;
            for (int j = 0; j < cols; ++j) t.obj[static_cast<std::size_t>(j)] -= cb * t.a[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
            t.obj_rhs -= cb * t.rhs[static_cast<std::size_t>(i)];
        }
        if (run(t))
            throw Error(Errc::numerical, "phase-1 objective reported unbounded");
        if (t.obj_rhs < -kFeasTol) return {LpStatus::infeasible, 0.0, {}, {}, false};
        // Pivot leftover artificials out of the (degenerate) basis.
        for (int i = 0; i < m; ++i) {
            const int b = t.basis[static_cast<std::size_t>(i)];
            bool is_art = false;
            for (int r = 0; r < m; ++r)
                if (art_col[static_cast<std::size_t>(r)] == b) is_art = true;
            if (!is_art) continue;
            int pc = -1;
            for (int j = 0; j < ns && pc < 0; ++j)
                if (std::abs(t.a[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]) > kPivotTol) pc = j;
            if (pc >= 0) t.pivot(i, pc);
            // Otherwise the row is redundant; the artificial stays basic at 0
            // and is barred from re-entering below.
        }
        for (int i = 0; i < m; ++i)
            if (art_col[static_cast<std::size_t>(i)] >= 0)
                t.enterable[static_cast<std::size_t>(art_col[static_cast<std::size_t>(i)])] = 0;
    }

    // Phase 2: the real objective, reduced against the current basis.
    t.obj.assign(static_cast<std::size_t>(cols), 0.0);
    t.obj_rhs = 0.0;
    for (int j = 0; j < ns; ++j) t.obj[static_cast<std::size_t>(j)] = lp.objective[static_cast<std::size_t>(keep[static_cast<std::size_t>(j)])];
    for (int i = 0; i < m; ++i) {
        const int b = t.basis[static_cast<std::size_t>(i)];
        const double cb = b < ns ? t.obj[static_cast<std::size_t>(b)] : 0.0;
        if (cb == 0.0) continue;
        for (int j = 0; j < cols; ++j) t.obj[static_cast<std::size_t>(j)] -= cb * t.a[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
        t.obj_rhs -= cb * t.rhs[static_cast<std::size_t>(i)];
    }
    if (run(t)) return {LpStatus::unbounded, 0.0, {}, {}, false};

    LpSolution sol;
    sol.status = LpStatus::optimal;
    sol.vertex = true;
    sol.x.assign(static_cast<std::size_t>(n), 0.0);
    sol.basis.assign(static_cast<std::size_t>(m), -1);
    for (int i = 0; i < m; ++i) {
        const int b = t.basis[static_cast<std::size_t>(i)];
        if (b < ns) {
            sol.x[static_cast<std::size_t>(keep[static_cast<std::size_t>(b)])] = t.rhs[static_cast<std::size_t>(i)];
            sol.basis[static_cast<std::size_t>(i)] = keep[static_cast<std::size_t>(b)];
        }
    }
    double value = 0.0;
    for (int v = 0; v < n; ++v) value += lp.objective[static_cast<std::size_t>(v)] * sol.x[static_cast<std::size_t>(v)];
    sol.value = value;
    return sol;
}

} // namespace ldst
