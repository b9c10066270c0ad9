#include "ldst/approx.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "ldst/compiled.hpp"
#include "ldst/robust.hpp"

namespace ldst {

namespace {

constexpr double kCoverTol = 1e-9;

void require_two_stage_reward_k1(const Instance& inst, const std::string& op) {
    if (inst.horizon != 2)
        throw Error(Errc::unsupported_shape,
                    op + " requires a 2-stage instance, got horizon " + std::to_string(inst.horizon));
    if (inst.kind != UncertaintyKind::reward)
        throw Error(Errc::unsupported_shape, op + " requires reward uncertainty");
    if (inst.budget != 1)
        throw Error(Errc::unsupported_shape,
                    op + " requires uncertainty budget 1, got " + std::to_string(inst.budget));
}

} // namespace

RewardCoefficients reward_coefficients(const Instance& inst) {
    require_two_stage_reward_k1(inst, "coefficient extraction");
    const Compiled c = compile(inst);
    if (c.actions[c.initial].size() != 1)
        throw Error(Errc::unsupported_shape,
                    "coefficient extraction requires a single initial action; fix one first");
    for (int t = c.num_nonterminal; t < c.num_states(); ++t)
        if (c.alt_reward[t] > 0.0 && c.alt_reward[t] < c.reward[t])
            throw Error(Errc::unsupported_shape,
                        "terminal '" + c.id[t] +
                            "' has alternative reward strictly between 0 and nominal; "
                            "normalize alternative rewards first");

    RewardCoefficients rc;
    rc.initial_id = c.id[c.initial];
    rc.initial_action = c.actions[c.initial][0].name;

    std::vector<int> middles, terminals;
    for (int s = 0; s < c.num_nonterminal; ++s)
        if (s != c.initial) middles.push_back(s);
    for (int t = c.num_nonterminal; t < c.num_states(); ++t) terminals.push_back(t);
    const int n = static_cast<int>(middles.size());
    const int nt = static_cast<int>(terminals.size());

    std::vector<double> p0(static_cast<std::size_t>(c.num_states()), 0.0);
    for (const auto& arc : c.actions[c.initial][0].nominal) p0[static_cast<std::size_t>(arc.to)] = arc.p;

    std::map<int, int> tindex;
    for (int j = 0; j < nt; ++j) {
        const int t = terminals[static_cast<std::size_t>(j)];
        tindex[t] = j;
        rc.terminal_ids.push_back(c.id[t]);
        rc.terminal_rewards.push_back(c.reward[t]);
        rc.capable.push_back(c.capable_terminal(t) ? 1 : 0);
    }

    rc.middle_ids.resize(static_cast<std::size_t>(n));
    rc.action_names.resize(static_cast<std::size_t>(n));
    rc.v.resize(static_cast<std::size_t>(n));
    rc.row_sum.resize(static_cast<std::size_t>(n));
    rc.v_max.assign(static_cast<std::size_t>(n), std::vector<double>(static_cast<std::size_t>(nt), 0.0));
    rc.heaviest.resize(static_cast<std::size_t>(n));
    rc.rest.resize(static_cast<std::size_t>(n));
    rc.v_star.assign(static_cast<std::size_t>(n), 0.0);
    rc.a_star.assign(static_cast<std::size_t>(n), 0);
    for (int i = 0; i < n; ++i) {
        const int s = middles[static_cast<std::size_t>(i)];
        rc.middle_ids[static_cast<std::size_t>(i)] = c.id[s];
        const int na = static_cast<int>(c.actions[s].size());
        auto& vs = rc.v[static_cast<std::size_t>(i)];
        vs.assign(static_cast<std::size_t>(na), std::vector<double>(static_cast<std::size_t>(nt), 0.0));
        rc.row_sum[static_cast<std::size_t>(i)].assign(static_cast<std::size_t>(na), 0.0);
        rc.heaviest[static_cast<std::size_t>(i)].assign(static_cast<std::size_t>(na), 0);
        rc.rest[static_cast<std::size_t>(i)].assign(static_cast<std::size_t>(na), 0.0);
        for (int a = 0; a < na; ++a) {
            rc.action_names[static_cast<std::size_t>(i)].push_back(c.actions[s][a].name);
            for (const auto& arc : c.actions[s][a].nominal) {
                const int j = tindex.at(arc.to);
                vs[static_cast<std::size_t>(a)][static_cast<std::size_t>(j)] =
                    p0[static_cast<std::size_t>(s)] * arc.p * c.reward[arc.to];
            }
            double sum = 0.0, vmax = -1.0;
            int heavy = 0;
            for (int j = 0; j < nt; ++j) {
                const double val = vs[static_cast<std::size_t>(a)][static_cast<std::size_t>(j)];
                sum += val;
                if (val > vmax) {
                    vmax = val;
                    heavy = j;
                }
                auto& cur = rc.v_max[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
                if (val > cur) cur = val;
            }
            rc.row_sum[static_cast<std::size_t>(i)][static_cast<std::size_t>(a)] = sum;
            rc.heaviest[static_cast<std::size_t>(i)][static_cast<std::size_t>(a)] = heavy;
            const double rest = sum - vs[static_cast<std::size_t>(a)][static_cast<std::size_t>(heavy)];
            rc.rest[static_cast<std::size_t>(i)][static_cast<std::size_t>(a)] = rest;
            if (a == 0 || rest > rc.v_star[static_cast<std::size_t>(i)]) {
                rc.v_star[static_cast<std::size_t>(i)] = rest;
                rc.a_star[static_cast<std::size_t>(i)] = a;
            }
        }
    }
    return rc;
}

GuessGrid make_guess_grid(const std::vector<double>& rewards, double eps, bool include_zero) {
    if (eps <= 0.0) throw Error(Errc::bad_input, "grid parameter eps must be positive");
    GuessGrid g;
    g.eps = eps;
    double rmin = std::numeric_limits<double>::infinity(), rmax = 0.0;
    for (double r : rewards)
        if (r > 0.0) {
            rmin = std::min(rmin, r);
            rmax = std::max(rmax, r);
        }
    if (rmax <= 0.0) {
        if (include_zero) g.values.push_back(0.0);
        return g;
    }
    g.rmin = rmin;
    g.rmax = rmax;
    const double count = static_cast<double>(rewards.size());
    int ell = static_cast<int>(std::ceil(std::log(count * rmax / rmin) / std::log1p(eps) - 1e-12));
    if (ell < 0) ell = 0;
    while (std::pow(1.0 + eps, ell) * rmin / count < rmax) ++ell;
    g.ell = ell;
    if (include_zero) g.values.push_back(0.0);
    for (int i = 0; i <= ell; ++i) g.values.push_back(std::pow(1.0 + eps, i) * rmin / count);
    return g;
}

std::optional<AssignmentSolution> solve_ub1(const RewardCoefficients& rc, double L, int t_hat,
                                            double eps) {
    if (t_hat < 0 || t_hat >= rc.num_terminal())
        throw Error(Errc::bad_input, "covered terminal index out of range");
    if (eps <= 0.0) throw Error(Errc::bad_input, "eps must be positive");
    const int n = rc.num_middle();

    std::vector<std::vector<double>> w(static_cast<std::size_t>(n)), profit(static_cast<std::size_t>(n));
    for (int s = 0; s < n; ++s) {
        const int na = static_cast<int>(rc.action_names[static_cast<std::size_t>(s)].size());
        w[static_cast<std::size_t>(s)].resize(static_cast<std::size_t>(na));
        profit[static_cast<std::size_t>(s)].resize(static_cast<std::size_t>(na));
        for (int a = 0; a < na; ++a) {
            const double wa = rc.v[static_cast<std::size_t>(s)][static_cast<std::size_t>(a)][static_cast<std::size_t>(t_hat)];
            w[static_cast<std::size_t>(s)][static_cast<std::size_t>(a)] = wa;
            profit[static_cast<std::size_t>(s)][static_cast<std::size_t>(a)] =
                rc.row_sum[static_cast<std::size_t>(s)][static_cast<std::size_t>(a)] - wa;
        }
    }

    auto profit_of = [&](const std::vector<int>& pick) {
        double p = 0.0;
        for (int s = 0; s < n; ++s) p += profit[static_cast<std::size_t>(s)][static_cast<std::size_t>(pick[static_cast<std::size_t>(s)])];
        return p;
    };

    // Max-weight assignment decides feasibility and doubles as a fallback
    // candidate (it is the exact optimum when every profit is zero).
    std::vector<int> greedy(static_cast<std::size_t>(n), 0);
    double w_best_sum = 0.0;
    for (int s = 0; s < n; ++s) {
        int arg = 0;
        for (int a = 1; a < static_cast<int>(w[static_cast<std::size_t>(s)].size()); ++a)
            if (w[static_cast<std::size_t>(s)][static_cast<std::size_t>(a)] > w[static_cast<std::size_t>(s)][static_cast<std::size_t>(arg)]) arg = a;
        greedy[static_cast<std::size_t>(s)] = arg;
        w_best_sum += w[static_cast<std::size_t>(s)][static_cast<std::size_t>(arg)];
    }
    if (w_best_sum < L - kCoverTol) return std::nullopt;

    AssignmentSolution best;
    best.kind = AssignmentSolution::Kind::ub1_integral;
    best.L = L;
    best.t_hat = t_hat;
    best.chosen_action = greedy;
    best.objective = profit_of(greedy);

    if (L <= kCoverTol) {
        // Vacuous cover: the group-wise profit maximum is exactly optimal.
        std::vector<int> pick(static_cast<std::size_t>(n), 0);
        for (int s = 0; s < n; ++s) {
            int arg = 0;
            for (int a = 1; a < static_cast<int>(profit[static_cast<std::size_t>(s)].size()); ++a)
                if (profit[static_cast<std::size_t>(s)][static_cast<std::size_t>(a)] > profit[static_cast<std::size_t>(s)][static_cast<std::size_t>(arg)]) arg = a;
            pick[static_cast<std::size_t>(s)] = arg;
        }
        const double p = profit_of(pick);
        if (p > best.objective) {
            best.chosen_action = pick;
            best.objective = p;
        }
        return best;
    }

    // Guess the largest item profit used by the exact optimum; with items
    // above the guess removed, profit rounding at scale eps' * guess / n
    // loses at most eps' * OPT, and eps' = eps/(1+eps) turns that into the
    // 1/(1+eps) factor.
    std::vector<double> guesses;
    for (int s = 0; s < n; ++s)
        for (double p : profit[static_cast<std::size_t>(s)])
            if (p > 0.0) guesses.push_back(p);
    std::sort(guesses.begin(), guesses.end(), std::greater<>());
    guesses.erase(std::unique(guesses.begin(), guesses.end()), guesses.end());

    const double shrink = eps / (1.0 + eps);
    std::vector<std::vector<int>> scaled(static_cast<std::size_t>(n));
    std::vector<std::vector<int>> choice;
    std::vector<double> f_prev, f_cur;
    for (const double pstar : guesses) {
        const double scale = shrink * pstar / static_cast<double>(n);
        bool valid = true;
        int qmax = 0;
        for (int s = 0; s < n && valid; ++s) {
            auto& qs = scaled[static_cast<std::size_t>(s)];
            qs.assign(profit[static_cast<std::size_t>(s)].size(), -1);
            int gmax = -1;
            for (std::size_t a = 0; a < qs.size(); ++a) {
                const double p = profit[static_cast<std::size_t>(s)][a];
                if (p > pstar) continue; // item too profitable for this guess
                qs[a] = static_cast<int>(std::floor(p / scale));
                gmax = std::max(gmax, qs[a]);
            }
            if (gmax < 0) valid = false;
            else qmax += gmax;
        }
        if (!valid) continue;

        f_prev.assign(static_cast<std::size_t>(qmax) + 1, -1.0);
        f_prev[0] = 0.0;
        choice.assign(static_cast<std::size_t>(n),
                      std::vector<int>(static_cast<std::size_t>(qmax) + 1, -1));
        for (int s = 0; s < n; ++s) {
            f_cur.assign(static_cast<std::size_t>(qmax) + 1, -1.0);
            auto& ch = choice[static_cast<std::size_t>(s)];
            const auto& qs = scaled[static_cast<std::size_t>(s)];
            const auto& ws = w[static_cast<std::size_t>(s)];
            for (int q = 0; q <= qmax; ++q) {
                const double base = f_prev[static_cast<std::size_t>(q)];
                if (base < 0.0) continue;
                for (std::size_t a = 0; a < qs.size(); ++a) {
                    if (qs[a] < 0) continue;
                    const int q2 = q + qs[a];
                    if (q2 > qmax) continue;
                    const double val = std::min(base + ws[a], L); // cover weight capped at L
                    if (val > f_cur[static_cast<std::size_t>(q2)]) {
                        f_cur[static_cast<std::size_t>(q2)] = val;
                        ch[static_cast<std::size_t>(q2)] = static_cast<int>(a);
                    }
                }
            }
            f_prev.swap(f_cur);
        }
        for (int q = 0; q <= qmax; ++q) {
            if (f_prev[static_cast<std::size_t>(q)] < L - kCoverTol) continue;
            std::vector<int> pick(static_cast<std::size_t>(n), 0);
            int at = q;
            for (int s = n - 1; s >= 0; --s) {
                const int a = choice[static_cast<std::size_t>(s)][static_cast<std::size_t>(at)];
                pick[static_cast<std::size_t>(s)] = a;
                at -= scaled[static_cast<std::size_t>(s)][static_cast<std::size_t>(a)];
            }
            const double p = profit_of(pick);
            if (p > best.objective) {
                best.chosen_action = std::move(pick);
                best.objective = p;
            }
        }
    }
    return best;
}

Policy policy_from_ub1(const AssignmentSolution& x, const RewardCoefficients& rc) {
    if (x.kind != AssignmentSolution::Kind::ub1_integral)
        throw Error(Errc::bad_input, "expected an integral knapsack-cover assignment");
    if (static_cast<int>(x.chosen_action.size()) != rc.num_middle())
        throw Error(Errc::bad_input, "assignment size does not match the coefficient table");
    Policy pi;
    pi.assignment[rc.initial_id] = rc.initial_action;
    for (int s = 0; s < rc.num_middle(); ++s)
        pi.assignment[rc.middle_ids[static_cast<std::size_t>(s)]] =
            rc.action_names[static_cast<std::size_t>(s)][static_cast<std::size_t>(x.chosen_action[static_cast<std::size_t>(s)])];
    return pi;
}

LinearProgram build_ub2(const RewardCoefficients& rc, double L) {
    if (L <= 0.0) throw Error(Errc::bad_input, "assignment relaxation requires L > 0");
    const int n = rc.num_middle();
    const int nt = rc.num_terminal();
    const int width = nt + 1; // terminals plus the sink column
    auto var = [&](int s, int t) { return s * width + t; };

    LinearProgram lp;
    lp.objective.assign(static_cast<std::size_t>(n * width), 0.0);
    for (int s = 0; s < n; ++s) {
        for (int t = 0; t < nt; ++t)
            lp.objective[static_cast<std::size_t>(var(s, t))] = rc.v_max[static_cast<std::size_t>(s)][static_cast<std::size_t>(t)];
        lp.objective[static_cast<std::size_t>(var(s, nt))] = rc.v_star[static_cast<std::size_t>(s)];
    }
    for (int t = 0; t < nt; ++t) {
        if (!rc.capable[static_cast<std::size_t>(t)]) continue; // no loss possible there
        std::vector<double> row(static_cast<std::size_t>(n * width), 0.0);
        for (int s = 0; s < n; ++s)
            row[static_cast<std::size_t>(var(s, t))] = rc.v_max[static_cast<std::size_t>(s)][static_cast<std::size_t>(t)];
        lp.a_ub.push_back(std::move(row));
        lp.b_ub.push_back(L);
        for (int s = 0; s < n; ++s)
            if (rc.v_max[static_cast<std::size_t>(s)][static_cast<std::size_t>(t)] > L)
                lp.fixed_zero.push_back(var(s, t));
    }
    for (int s = 0; s < n; ++s) {
        std::vector<double> row(static_cast<std::size_t>(n * width), 0.0);
        for (int t = 0; t <= nt; ++t) row[static_cast<std::size_t>(var(s, t))] = 1.0;
        lp.a_eq.push_back(std::move(row));
        lp.b_eq.push_back(1.0);
    }
    return lp;
}

AssignmentSolution solve_ub2_fractional(const RewardCoefficients& rc, double L) {
    const LinearProgram lp = build_ub2(rc, L);
    const LpSolution sol = solve_extreme_point(lp);
    if (sol.status != LpStatus::optimal)
        throw Error(Errc::numerical, "assignment relaxation failed to solve (it is always feasible)");
    const int n = rc.num_middle();
    const int width = rc.num_terminal() + 1;
    AssignmentSolution out;
    out.kind = AssignmentSolution::Kind::ub2_fractional;
    out.L = L;
    out.objective = sol.value;
    out.vertex = sol.vertex;
    out.y.assign(static_cast<std::size_t>(n), std::vector<double>(static_cast<std::size_t>(width), 0.0));
    for (int s = 0; s < n; ++s)
        for (int t = 0; t < width; ++t)
            out.y[static_cast<std::size_t>(s)][static_cast<std::size_t>(t)] =
                sol.x[static_cast<std::size_t>(s * width + t)];
    return out;
}

namespace {

/// Max-weight matching of every state onto a distinct slot, solved as a
/// min-cost max-flow with negated weights; successive shortest augmenting
/// paths via Bellman-Ford keep the partial flow extreme, so the final
/// matching has maximum weight among all perfect ones.
class SlotMatcher {
  public:
    SlotMatcher(int jobs, int slots) : jobs_(jobs), slots_(slots) {
        const int nodes = jobs + slots + 2;
        adj_.resize(static_cast<std::size_t>(nodes));
        for (int j = 0; j < jobs_; ++j) add_arc(source(), 1 + j, 1, 0.0);
        for (int s = 0; s < slots_; ++s) add_arc(1 + jobs_ + s, sink(), 1, 0.0);
    }

    void add_edge(int job, int slot, double weight) { add_arc(1 + job, 1 + jobs_ + slot, 1, -weight); }

    /// Returns the matched slot per job, or empty if no perfect matching.
    std::vector<int> solve() {
        const double inf = std::numeric_limits<double>::infinity();
        const int nodes = static_cast<int>(adj_.size());
        for (int round = 0; round < jobs_; ++round) {
            std::vector<double> dist(static_cast<std::size_t>(nodes), inf);
            std::vector<int> via(static_cast<std::size_t>(nodes), -1);
            dist[static_cast<std::size_t>(source())] = 0.0;
            for (int sweep = 0; sweep < nodes; ++sweep) {
                bool changed = false;
                for (int u = 0; u < nodes; ++u) {
                    if (dist[static_cast<std::size_t>(u)] == inf) continue;
                    for (const int e : adj_[static_cast<std::size_t>(u)]) {
                        const Arc& arc = arcs_[static_cast<std::size_t>(e)];
                        if (arc.cap <= 0) continue;
                        const double nd = dist[static_cast<std::size_t>(u)] + arc.cost;
                        if (nd < dist[static_cast<std::size_t>(arc.to)] - 1e-12) {
                            dist[static_cast<std::size_t>(arc.to)] = nd;
                            via[static_cast<std::size_t>(arc.to)] = e;
                            changed = true;
                        }
                    }
                }
                if (!changed) break;
            }
            if (dist[static_cast<std::size_t>(sink())] == inf) return {};
            for (int v = sink(); v != source();) {
                const int e = via[static_cast<std::size_t>(v)];
                arcs_[static_cast<std::size_t>(e)].cap -= 1;
                arcs_[static_cast<std::size_t>(e ^ 1)].cap += 1;
                v = arcs_[static_cast<std::size_t>(e ^ 1)].to;
            }
        }
        std::vector<int> match(static_cast<std::size_t>(jobs_), -1);
        for (int j = 0; j < jobs_; ++j)
            for (const int e : adj_[static_cast<std::size_t>(1 + j)]) {
                const Arc& arc = arcs_[static_cast<std::size_t>(e)];
                if (arc.to != source() && arc.cap == 0 && (e & 1) == 0)
                    match[static_cast<std::size_t>(j)] = arc.to - 1 - jobs_;
            }
        return match;
    }

  private:
    struct Arc {
        int to;
        int cap;
        double cost;
    };

    int source() const { return 0; }
    int sink() const { return 1 + jobs_ + slots_; }

    void add_arc(int from, int to, int cap, double cost) {
        adj_[static_cast<std::size_t>(from)].push_back(static_cast<int>(arcs_.size()));
        arcs_.push_back({to, cap, cost});
        adj_[static_cast<std::size_t>(to)].push_back(static_cast<int>(arcs_.size()));
        arcs_.push_back({from, 0, -cost});
    }

    int jobs_;
    int slots_;
    std::vector<Arc> arcs_;
    std::vector<std::vector<int>> adj_;
};

} // namespace

AssignmentSolution round_ub2(const AssignmentSolution& frac, const RewardCoefficients& rc,
                             double L) {
    if (frac.kind != AssignmentSolution::Kind::ub2_fractional)
        throw Error(Errc::bad_input, "rounding expects a fractional assignment solution");
    if (!frac.vertex)
        throw Error(Errc::bad_input, "rounding requires an extreme-point solution (vertex metadata)");
    const int n = rc.num_middle();
    const int nt = rc.num_terminal();

    auto value_of = [&](int s, int t) {
        return t < nt ? rc.v_max[static_cast<std::size_t>(s)][static_cast<std::size_t>(t)]
                      : rc.v_star[static_cast<std::size_t>(s)];
    };
    auto finish = [&](std::vector<int> target) {
        AssignmentSolution out;
        out.kind = AssignmentSolution::Kind::ub2_integral;
        out.L = L;
        out.vertex = false;
        out.target = std::move(target);
        out.y.assign(static_cast<std::size_t>(n),
                     std::vector<double>(static_cast<std::size_t>(nt) + 1, 0.0));
        out.objective = 0.0;
        for (int s = 0; s < n; ++s) {
            out.y[static_cast<std::size_t>(s)][static_cast<std::size_t>(out.target[static_cast<std::size_t>(s)])] = 1.0;
            out.objective += value_of(s, out.target[static_cast<std::size_t>(s)]);
        }
        return out;
    };

    bool integral = true;
    std::vector<int> direct(static_cast<std::size_t>(n), nt);
    for (int s = 0; s < n && integral; ++s) {
        int ones = 0;
        for (int t = 0; t <= nt; ++t) {
            const double y = frac.y[static_cast<std::size_t>(s)][static_cast<std::size_t>(t)];
            if (y > 1.0 - 1e-9) {
                direct[static_cast<std::size_t>(s)] = t;
                ++ones;
            } else if (y > 1e-9) {
                integral = false;
                break;
            }
        }
        if (ones != 1) integral = false;
    }
    if (integral) return finish(direct);

    // Slot construction: each terminal opens ceil(load) unit slots, filled in
    // decreasing value order; the fractional solution is a fractional
    // matching on this graph, so an integral perfect matching of no smaller
    // weight exists. A state straddling a slot boundary is connected to both
    // slots, which is what caps every slot-(i+1) value by a slot-i value and
    // yields the 2L capacity bound.
    struct SlotInfo {
        int t;
    };
    std::vector<SlotInfo> slots;
    std::vector<std::vector<std::pair<int, double>>> edges; // per job: (slot, weight)
    edges.assign(static_cast<std::size_t>(n), {});
    for (int t = 0; t < nt; ++t) {
        double load = 0.0;
        std::vector<std::pair<int, double>> entries;
        for (int s = 0; s < n; ++s) {
            const double y = frac.y[static_cast<std::size_t>(s)][static_cast<std::size_t>(t)];
            if (y > 1e-12) {
                entries.emplace_back(s, y);
                load += y;
            }
        }
        if (entries.empty()) continue;
        const int num_slots = std::max(1, static_cast<int>(std::ceil(load - 1e-9)));
        std::sort(entries.begin(), entries.end(), [&](const auto& a, const auto& b) {
            const double va = value_of(a.first, t), vb = value_of(b.first, t);
            return va != vb ? va > vb : a.first < b.first;
        });
        const int base = static_cast<int>(slots.size());
        for (int i = 0; i < num_slots; ++i) slots.push_back({t});
        double cum = 0.0;
        for (const auto& [s, y] : entries) {
            int first = static_cast<int>(std::floor(cum + 1e-9));
            int last = static_cast<int>(std::ceil(cum + y - 1e-9)) - 1;
            first = std::clamp(first, 0, num_slots - 1);
            last = std::clamp(last, first, num_slots - 1);
            for (int i = first; i <= last; ++i)
                edges[static_cast<std::size_t>(s)].emplace_back(base + i, value_of(s, t));
            cum += y;
        }
    }
    for (int s = 0; s < n; ++s) {
        if (frac.y[static_cast<std::size_t>(s)][static_cast<std::size_t>(nt)] > 1e-12) {
            const int slot = static_cast<int>(slots.size());
            slots.push_back({nt});
            edges[static_cast<std::size_t>(s)].emplace_back(slot, value_of(s, nt));
        }
    }

    SlotMatcher matcher(n, static_cast<int>(slots.size()));
    for (int s = 0; s < n; ++s)
        for (const auto& [slot, wgt] : edges[static_cast<std::size_t>(s)]) matcher.add_edge(s, slot, wgt);
    const std::vector<int> match = matcher.solve();
    if (static_cast<int>(match.size()) != n)
        throw Error(Errc::numerical, "slot matching failed to cover every state");
    std::vector<int> target(static_cast<std::size_t>(n), nt);
    for (int s = 0; s < n; ++s) {
        if (match[static_cast<std::size_t>(s)] < 0)
            throw Error(Errc::numerical, "slot matching left a state unassigned");
        target[static_cast<std::size_t>(s)] = slots[static_cast<std::size_t>(match[static_cast<std::size_t>(s)])].t;
    }
    return finish(std::move(target));
}

Policy policy_from_ub2(const AssignmentSolution& integral, const RewardCoefficients& rc) {
    if (integral.kind != AssignmentSolution::Kind::ub2_integral)
        throw Error(Errc::bad_input, "expected an integral assignment solution");
    if (static_cast<int>(integral.target.size()) != rc.num_middle())
        throw Error(Errc::bad_input, "assignment size does not match the coefficient table");
    const int nt = rc.num_terminal();
    Policy pi;
    pi.assignment[rc.initial_id] = rc.initial_action;
    for (int s = 0; s < rc.num_middle(); ++s) {
        const int t = integral.target[static_cast<std::size_t>(s)];
        int arg;
        if (t == nt) {
            arg = rc.a_star[static_cast<std::size_t>(s)];
        } else {
            arg = 0;
            const auto& vs = rc.v[static_cast<std::size_t>(s)];
            for (int a = 1; a < static_cast<int>(vs.size()); ++a)
                if (vs[static_cast<std::size_t>(a)][static_cast<std::size_t>(t)] >
                    vs[static_cast<std::size_t>(arg)][static_cast<std::size_t>(t)])
                    arg = a;
        }
        pi.assignment[rc.middle_ids[static_cast<std::size_t>(s)]] =
            rc.action_names[static_cast<std::size_t>(s)][static_cast<std::size_t>(arg)];
    }
    return pi;
}

namespace {

/// Capable terminals with duplicate coefficient columns removed: identical
/// columns give identical cover programs, so one representative suffices.
std::vector<int> cover_candidates(const RewardCoefficients& rc) {
    std::map<std::vector<double>, int> seen;
    std::vector<int> out;
    for (int t = 0; t < rc.num_terminal(); ++t) {
        if (!rc.capable[static_cast<std::size_t>(t)]) continue;
        std::vector<double> sig;
        for (int s = 0; s < rc.num_middle(); ++s)
            for (const auto& row : rc.v[static_cast<std::size_t>(s)])
                sig.push_back(row[static_cast<std::size_t>(t)]);
        if (seen.emplace(std::move(sig), t).second) out.push_back(t);
    }
    return out;
}

std::vector<std::string> initial_action_names(const Compiled& c) {
    std::vector<std::string> names;
    for (const auto& a : c.actions[c.initial]) names.push_back(a.name);
    return names;
}

Policy first_policy(const Compiled& c) {
    PolicyVec pol(static_cast<std::size_t>(c.num_states()), -1);
    for (int s = 0; s < c.num_nonterminal; ++s) pol[s] = 0;
    return from_policy_vec(c, pol);
}

/// When every terminal reward is zero, every policy is worth zero under any
/// scenario; such instances need no deviation sites, so they are answered
/// before any budget validation with the lexicographically first policy.
std::optional<SubroutineResult> zero_reward_shortcut(const Instance& inst) {
    for (const auto& s : inst.states)
        if (s.stage == inst.horizon && s.reward > 0.0) return std::nullopt;
    SubroutineResult res;
    std::vector<const State*> order;
    for (const auto& s : inst.states)
        if (s.stage < inst.horizon) order.push_back(&s);
    std::sort(order.begin(), order.end(), [](const State* a, const State* b) {
        return a->stage != b->stage ? a->stage < b->stage : a->id < b->id;
    });
    for (const State* s : order) {
        if (s->actions.empty())
            throw Error(Errc::invalid_instance, "non-terminal state '" + s->id + "' has no actions");
        std::string best = s->actions.front().name;
        for (const auto& a : s->actions) best = std::min(best, a.name);
        res.policy.assignment[s->id] = best;
    }
    res.value = 0.0;
    return res;
}

} // namespace

SubroutineResult algorithm1(const Instance& inst, double eps1) {
    require_two_stage_reward_k1(inst, "the cover subroutine");
    if (eps1 <= 0.0) throw Error(Errc::bad_input, "eps must be positive");
    if (auto zero = zero_reward_shortcut(inst)) return *zero;
    const Compiled orig = compile(inst);
    detail::RobustWorkspace ws;

    SubroutineResult best;
    bool have = false;
    for (const auto& a0 : initial_action_names(orig)) {
        const Instance norm = normalize_alternative_rewards(fix_initial_action(inst, a0));
        const RewardCoefficients rc = reward_coefficients(norm);
        const GuessGrid grid = make_guess_grid(rc.terminal_rewards, eps1, /*include_zero=*/true);
        const std::vector<int> cands = cover_candidates(rc);
        best.grid_size = static_cast<int>(grid.values.size());
        for (const double L : grid.values) {
            for (const int t_hat : cands) {
                const auto sol = solve_ub1(rc, L, t_hat, eps1);
                if (!sol) continue;
                const Policy pi = policy_from_ub1(*sol, rc);
                const double val = detail::worst_reward(orig, to_policy_vec(orig, pi), ws).worst;
                ++best.cells;
                if (!have || val > best.value) {
                    have = true;
                    best.value = val;
                    best.policy = pi;
                    best.chosen_L = L;
                    best.chosen_t_hat = rc.terminal_ids[static_cast<std::size_t>(t_hat)];
                }
            }
        }
    }
    if (!have) {
        // No capable terminal would fail validation, so this is unreachable;
        // kept as a safe fallback.
        best.policy = first_policy(orig);
        best.value = detail::worst_reward(orig, to_policy_vec(orig, best.policy), ws).worst;
    }
    return best;
}

SubroutineResult algorithm2(const Instance& inst, double eps2) {
    require_two_stage_reward_k1(inst, "the assignment subroutine");
    if (eps2 <= 0.0) throw Error(Errc::bad_input, "eps must be positive");
    if (auto zero = zero_reward_shortcut(inst)) return *zero;
    const Compiled orig = compile(inst);
    detail::RobustWorkspace ws;

    SubroutineResult best;
    bool have = false;
    for (const auto& a0 : initial_action_names(orig)) {
        const Instance norm = normalize_alternative_rewards(fix_initial_action(inst, a0));
        const RewardCoefficients rc = reward_coefficients(norm);
        const GuessGrid grid = make_guess_grid(rc.terminal_rewards, eps2, /*include_zero=*/false);
        best.grid_size = static_cast<int>(grid.values.size());
        for (const double L : grid.values) {
            const AssignmentSolution frac = solve_ub2_fractional(rc, L);
            const AssignmentSolution rounded = round_ub2(frac, rc, L);
            const Policy pi = policy_from_ub2(rounded, rc);
            const double val = detail::worst_reward(orig, to_policy_vec(orig, pi), ws).worst;
            ++best.cells;
            if (!have || val > best.value) {
                have = true;
                best.value = val;
                best.policy = pi;
                best.chosen_L = L;
            }
        }
    }
    if (!have) {
        // Every terminal reward is zero; any policy is worst-case optimal.
        best.policy = first_policy(orig);
        best.value = detail::worst_reward(orig, to_policy_vec(orig, best.policy), ws).worst;
    }
    return best;
}

ApproxResult approximate(const Instance& inst, double eps) {
    require_two_stage_reward_k1(inst, "the approximation");
    if (eps <= 0.0) throw Error(Errc::bad_input, "eps must be positive");
    const double eps1 = eps / 5.0;
    const double eps2 = eps / (10.0 + 2.0 * eps);
    const SubroutineResult r1 = algorithm1(inst, eps1);
    const SubroutineResult r2 = algorithm2(inst, eps2);

    ApproxResult out;
    out.report.epsilon = eps;
    out.report.epsilon1 = eps1;
    out.report.epsilon2 = eps2;
    out.report.grid_size = r1.grid_size;
    out.report.alg1_value = r1.value;
    out.report.alg1_L = r1.chosen_L;
    out.report.alg1_t_hat = r1.chosen_t_hat;
    out.report.alg2_value = r2.value;
    out.report.alg2_L = r2.chosen_L;
    if (r1.value >= r2.value) {
        out.policy = r1.policy;
        out.value = r1.value;
        out.report.chosen = "alg1";
    } else {
        out.policy = r2.policy;
        out.value = r2.value;
        out.report.chosen = "alg2";
    }
    return out;
}

} // namespace ldst
