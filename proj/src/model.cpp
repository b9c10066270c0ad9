#include "ldst/model.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "ldst/compiled.hpp"

namespace ldst {

namespace {

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(12);
    os << v;
    return os.str();
}

void check_distribution(const Instance& inst, const std::map<std::string, int>& stage_of,
                        const std::string& loc, int from_stage,
                        const std::map<std::string, double>& dist, const char* what,
                        std::vector<Diagnostic>& out) {
    if (dist.empty()) {
        out.push_back({loc, std::string(what) + " distribution is empty"});
        return;
    }
    double mass = 0.0;
    bool targets_ok = true;
    for (const auto& [to, p] : dist) {
        auto it = stage_of.find(to);
        if (it == stage_of.end()) {
            out.push_back({loc, std::string(what) + " distribution targets unknown state '" + to + "'"});
            targets_ok = false;
            continue;
        }
        if (it->second != from_stage + 1) {
            out.push_back({loc, std::string(what) + " distribution targets '" + to + "' outside the next stage"});
            targets_ok = false;
        }
        if (p < 0.0) {
            out.push_back({loc, std::string(what) + " distribution has negative probability on '" + to + "'"});
            targets_ok = false;
        }
        mass += p;
    }
    if (targets_ok && std::abs(mass - 1.0) > kProbTol)
        out.push_back({loc, std::string(what) + " distribution probability mass is " + fmt(mass) + ", expected 1"});
    (void)inst;
}

} // namespace

std::vector<Diagnostic> validate(const Instance& inst) {
    std::vector<Diagnostic> out;

    if (inst.horizon < 0) out.push_back({"", "horizon is negative"});
    if (inst.states.empty()) {
        out.push_back({"", "instance has no states"});
        return out;
    }

    std::map<std::string, int> stage_of;
    for (const auto& s : inst.states) {
        if (stage_of.count(s.id)) {
            out.push_back({s.id, "duplicate state identifier"});
            continue;
        }
        stage_of[s.id] = s.stage;
        if (s.stage < 0 || s.stage > inst.horizon)
            out.push_back({s.id, "stage outside [0, horizon]"});
    }

    int num_initial = 0;
    for (const auto& s : inst.states)
        if (s.stage == 0) ++num_initial;
    if (num_initial != 1)
        out.push_back({"", "expected exactly one stage-0 state, found " + std::to_string(num_initial)});
    auto init_it = stage_of.find(inst.initial);
    if (init_it == stage_of.end())
        out.push_back({"", "initial state '" + inst.initial + "' does not exist"});
    else if (init_it->second != 0)
        out.push_back({inst.initial, "initial state is not at stage 0"});

    for (const auto& s : inst.states) {
        const bool terminal_stage = s.stage == inst.horizon;
        if (terminal_stage && !s.actions.empty())
            out.push_back({s.id, "terminal-stage state declares actions"});
        if (!terminal_stage && s.actions.empty())
            out.push_back({s.id, "non-terminal state has no actions"});
        if (!terminal_stage && (s.reward != 0.0 || s.alt_reward.has_value()))
            out.push_back({s.id, "non-terminal state carries a terminal reward"});

        std::set<std::string> names;
        for (const auto& a : s.actions) {
            const std::string loc = s.id + "/" + a.name;
            if (!names.insert(a.name).second)
                out.push_back({loc, "duplicate action name"});
            check_distribution(inst, stage_of, loc, s.stage, a.nominal, "nominal", out);
            if (inst.kind == UncertaintyKind::reward && !a.alternatives.empty())
                out.push_back({loc, "alternative distributions declared under reward uncertainty"});
            for (const auto& alt : a.alternatives)
                check_distribution(inst, stage_of, loc, s.stage, alt, "alternative", out);
            if (a.reward < 0.0)
                out.push_back({loc, "negative action reward"});
        }

        if (terminal_stage) {
            if (s.reward < 0.0)
                out.push_back({s.id, "negative terminal reward"});
            if (inst.kind == UncertaintyKind::reward) {
                const double alt = s.alt_reward.value_or(s.reward);
                if (alt < 0.0) out.push_back({s.id, "negative alternative reward"});
                if (alt > s.reward)
                    out.push_back({s.id, "alternative reward exceeds nominal reward"});
            } else if (s.alt_reward.has_value()) {
                out.push_back({s.id, "alternative reward declared under transition uncertainty"});
            }
        }
    }

    // Budget against the number of deviation-capable sites.
    long long sites = 0;
    if (inst.kind == UncertaintyKind::reward) {
        for (const auto& s : inst.states)
            if (s.stage == inst.horizon && s.alt_reward.value_or(s.reward) < s.reward) ++sites;
    } else {
        for (const auto& s : inst.states)
            for (const auto& a : s.actions)
                if (!a.alternatives.empty()) ++sites;
    }
    if (inst.budget < 0)
        out.push_back({"", "uncertainty budget is negative"});
    else if (inst.budget > sites)
        out.push_back({"", "uncertainty budget " + std::to_string(inst.budget) +
                               " exceeds deviation-capable sites (" + std::to_string(sites) + ")"});

    std::stable_sort(out.begin(), out.end(), [](const Diagnostic& a, const Diagnostic& b) {
        return a.location != b.location ? a.location < b.location : a.message < b.message;
    });
    return out;
}

Compiled compile(const Instance& inst) {
    auto diags = validate(inst);
    if (!diags.empty()) {
        std::string msg = "invalid instance:";
        for (std::size_t i = 0; i < diags.size() && i < 5; ++i)
            msg += "\n  [" + diags[i].location + "] " + diags[i].message;
        if (diags.size() > 5) msg += "\n  ...";
        throw Error(Errc::invalid_instance, msg);
    }

    Compiled c;
    c.horizon = inst.horizon;
    c.kind = inst.kind;
    c.budget = inst.budget;

    std::vector<const State*> order;
    order.reserve(inst.states.size());
    for (const auto& s : inst.states) order.push_back(&s);
    std::sort(order.begin(), order.end(), [](const State* a, const State* b) {
        return a->stage != b->stage ? a->stage < b->stage : a->id < b->id;
    });

    const int n = static_cast<int>(order.size());
    c.id.resize(n);
    c.stage.resize(n);
    c.reward.assign(n, 0.0);
    c.alt_reward.assign(n, 0.0);
    c.actions.resize(n);
    for (int i = 0; i < n; ++i) {
        c.id[i] = order[i]->id;
        c.index[order[i]->id] = i;
        c.stage[i] = order[i]->stage;
    }
    c.num_nonterminal = 0;
    for (int i = 0; i < n; ++i)
        if (c.stage[i] < c.horizon) ++c.num_nonterminal;
    c.initial = c.index.at(inst.initial);

    auto to_arcs = [&](const std::map<std::string, double>& dist) {
        std::vector<Compiled::Arc> arcs;
        arcs.reserve(dist.size());
        for (const auto& [to, p] : dist) arcs.push_back({c.index.at(to), p});
        return arcs;
    };
    for (int i = 0; i < n; ++i) {
        const State& s = *order[i];
        if (s.stage == c.horizon) {
            c.reward[i] = s.reward;
            c.alt_reward[i] = s.alt_reward.value_or(s.reward);
            continue;
        }
        std::vector<const Action*> acts;
        for (const auto& a : s.actions) acts.push_back(&a);
        std::sort(acts.begin(), acts.end(),
                  [](const Action* a, const Action* b) { return a->name < b->name; });
        for (const Action* a : acts) {
            Compiled::Act ca;
            ca.name = a->name;
            ca.nominal = to_arcs(a->nominal);
            for (const auto& alt : a->alternatives) ca.alts.push_back(to_arcs(alt));
            c.actions[i].push_back(std::move(ca));
        }
    }
    return c;
}

PolicyVec to_policy_vec(const Compiled& c, const Policy& policy) {
    PolicyVec pol(c.num_states(), -1);
    for (const auto& [sid, aname] : policy.assignment) {
        auto it = c.index.find(sid);
        if (it == c.index.end())
            throw Error(Errc::invalid_policy, "policy references missing state '" + sid + "'");
        const int s = it->second;
        if (c.is_terminal(s))
            throw Error(Errc::invalid_policy, "policy assigns an action at terminal state '" + sid + "'");
        const auto& acts = c.actions[s];
        int found = -1;
        for (int a = 0; a < static_cast<int>(acts.size()); ++a)
            if (acts[a].name == aname) {
                found = a;
                break;
            }
        if (found < 0)
            throw Error(Errc::invalid_policy,
                        "policy assigns foreign action '" + aname + "' at state '" + sid + "'");
        pol[s] = found;
    }
    for (int s = 0; s < c.num_nonterminal; ++s)
        if (pol[s] < 0)
            throw Error(Errc::invalid_policy, "policy misses an assignment for state '" + c.id[s] + "'");
    return pol;
}

Policy from_policy_vec(const Compiled& c, const PolicyVec& pol) {
    Policy p;
    for (int s = 0; s < c.num_nonterminal; ++s)
        p.assignment[c.id[s]] = c.actions[s][pol[s]].name;
    return p;
}

void reach_into(const Compiled& c, const PolicyVec& pol, std::vector<double>& reach,
                const KernelOverlay* overlay) {
    reach.assign(c.num_states(), 0.0);
    reach[c.initial] = 1.0;
    for (int s = 0; s < c.num_nonterminal; ++s) {
        const double mass = reach[s];
        if (mass == 0.0) continue;
        const auto* arcs = &c.actions[s][pol[s]].nominal;
        if (overlay)
            for (const auto& [st, repl] : *overlay)
                if (st == s) {
                    arcs = repl;
                    break;
                }
        for (const auto& arc : *arcs) reach[arc.to] += mass * arc.p;
    }
}

double nominal_value(const Compiled& c, const PolicyVec& pol) {
    std::vector<double> reach;
    reach_into(c, pol, reach);
    double total = 0.0;
    for (int t = c.num_nonterminal; t < c.num_states(); ++t) total += reach[t] * c.reward[t];
    return total;
}

EvalReport reach_probabilities(const Instance& inst, const Policy& policy) {
    const Compiled c = compile(inst);
    const PolicyVec pol = to_policy_vec(c, policy);
    std::vector<double> reach;
    reach_into(c, pol, reach);
    EvalReport rep;
    for (int t = c.num_nonterminal; t < c.num_states(); ++t) {
        rep.reach[c.id[t]] = reach[t];
        rep.expected[c.id[t]] = reach[t] * c.reward[t];
        rep.nominal += reach[t] * c.reward[t];
    }
    return rep;
}

std::pair<Policy, double> nominal_optimal_policy(const Instance& inst) {
    const Compiled c = compile(inst);
    const int n = c.num_states();
    std::vector<double> value(n, 0.0);
    PolicyVec pol(n, -1);
    for (int t = c.num_nonterminal; t < n; ++t) value[t] = c.reward[t];
    // Index order is stage order, so a reverse sweep is backward induction.
    for (int s = c.num_nonterminal - 1; s >= 0; --s) {
        double best = -1.0;
        int best_a = -1;
        for (int a = 0; a < static_cast<int>(c.actions[s].size()); ++a) {
            double v = 0.0;
            for (const auto& arc : c.actions[s][a].nominal) v += arc.p * value[arc.to];
            if (best_a < 0 || v > best) {
                best = v;
                best_a = a;
            }
        }
        value[s] = best;
        pol[s] = best_a;
    }
    return {from_policy_vec(c, pol), value[c.initial]};
}

} // namespace ldst
