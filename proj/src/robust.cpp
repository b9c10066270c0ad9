#include "ldst/robust.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

namespace ldst {

namespace detail {

RobustOut worst_reward(const Compiled& c, const PolicyVec& pol, RobustWorkspace& ws,
                       Scenario* witness) {
    reach_into(c, pol, ws.reach);
    double total = 0.0;
    ws.losses.clear();
    for (int t = c.num_nonterminal; t < c.num_states(); ++t) {
        total += ws.reach[t] * c.reward[t];
        if (c.capable_terminal(t))
            ws.losses.emplace_back(-(ws.reach[t] * (c.reward[t] - c.alt_reward[t])), t);
    }
    // Sorting (-loss, index) puts larger losses first and breaks ties toward
    // the smaller identifier (index order is id order within the last stage).
    std::sort(ws.losses.begin(), ws.losses.end());
    const std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(c.budget), ws.losses.size());
    double lost = 0.0;
    for (std::size_t i = 0; i < k; ++i) lost += -ws.losses[i].first;
    if (witness) {
        witness->kind = UncertaintyKind::reward;
        witness->flipped.clear();
        witness->remapped.clear();
        for (std::size_t i = 0; i < k; ++i) witness->flipped.push_back(c.id[ws.losses[i].second]);
        std::sort(witness->flipped.begin(), witness->flipped.end());
    }
    return {total, total - lost};
}

namespace {

struct Site {
    int state;
    int action;
};

/// Deviation-capable sites in (state id, action id) order. Compiled state and
/// action ordering already delivers that.
std::vector<Site> transition_sites(const Compiled& c) {
    std::vector<Site> sites;
    for (int s = 0; s < c.num_nonterminal; ++s)
        for (int a = 0; a < static_cast<int>(c.actions[s].size()); ++a)
            if (!c.actions[s][a].alts.empty()) sites.push_back({s, a});
    return sites;
}

} // namespace

RobustOut worst_transition(const Compiled& c, const PolicyVec& pol, std::uint64_t scenario_cap,
                           RobustWorkspace& ws, Scenario* witness) {
    const auto all_sites = transition_sites(c);
    // Only sites on the policy's chosen actions can change the induced chain;
    // skipping the rest leaves both the minimum and the first minimizer
    // unchanged (a minimizer of minimal colex rank never pays for a no-op).
    std::vector<Site> sites;
    for (const auto& site : all_sites)
        if (pol[site.state] == site.action) sites.push_back(site);
    const int m = static_cast<int>(sites.size());
    const int k = std::min(c.budget, m);

    // Scenario count: subsets of size <= k weighted by alternative combos.
    {
        double count = 0.0;
        std::vector<double> per_size(static_cast<std::size_t>(k) + 1, 0.0);
        per_size[0] = 1.0;
        for (const auto& site : sites) {
            const double alts = static_cast<double>(c.actions[site.state][site.action].alts.size());
            for (int j = k; j >= 1; --j) per_size[j] += per_size[j - 1] * alts;
        }
        for (double v : per_size) count += v;
        if (count > static_cast<double>(scenario_cap))
            throw Error(Errc::cap_exceeded,
                        "transition adversary needs " + std::to_string(static_cast<long long>(count)) +
                            " scenarios, exceeding the cap of " + std::to_string(scenario_cap));
    }

    if (m > 62) throw Error(Errc::cap_exceeded, "too many deviation sites to enumerate");

    // Subsets of size <= k in colexicographic order = ascending mask value.
    ws.masks.clear();
    for (int size = 0; size <= k; ++size) {
        if (size == 0) {
            ws.masks.push_back(0);
            continue;
        }
        std::uint64_t mask = (std::uint64_t{1} << size) - 1;
        const std::uint64_t limit = std::uint64_t{1} << m;
        while (mask < limit) {
            ws.masks.push_back(mask);
            const std::uint64_t c0 = mask & -mask;
            const std::uint64_t r = mask + c0;
            mask = (((r ^ mask) >> 2) / c0) | r;
        }
    }
    std::sort(ws.masks.begin(), ws.masks.end());

    RobustOut out;
    out.nominal = nominal_value(c, pol);
    out.worst = out.nominal;
    bool first = true;
    KernelOverlay overlay;
    std::vector<int> chosen_alt;
    std::vector<int> members;
    if (witness) {
        witness->kind = UncertaintyKind::transition;
        witness->flipped.clear();
        witness->remapped.clear();
    }
    for (const std::uint64_t mask : ws.masks) {
        members.clear();
        for (int i = 0; i < m; ++i)
            if (mask >> i & 1) members.push_back(i);
        chosen_alt.assign(members.size(), 0);
        while (true) {
            overlay.clear();
            for (std::size_t j = 0; j < members.size(); ++j) {
                const Site& site = sites[static_cast<std::size_t>(members[j])];
                overlay.emplace_back(site.state,
                                     &c.actions[site.state][site.action].alts[static_cast<std::size_t>(chosen_alt[j])]);
            }
            reach_into(c, pol, ws.reach, &overlay);
            double value = 0.0;
            for (int t = c.num_nonterminal; t < c.num_states(); ++t)
                value += ws.reach[t] * c.reward[t];
            if (first || value < out.worst) {
                first = false;
                out.worst = value;
                if (witness) {
                    witness->remapped.clear();
                    for (std::size_t j = 0; j < members.size(); ++j) {
                        const Site& site = sites[static_cast<std::size_t>(members[j])];
                        witness->remapped.push_back(
                            {c.id[site.state], c.actions[site.state][site.action].name, chosen_alt[j]});
                    }
                }
            }
            // Odometer over alternative indices, later sites fastest.
            int pos = static_cast<int>(members.size()) - 1;
            while (pos >= 0) {
                const Site& site = sites[static_cast<std::size_t>(members[pos])];
                const int alts = static_cast<int>(c.actions[site.state][site.action].alts.size());
                if (++chosen_alt[static_cast<std::size_t>(pos)] < alts) break;
                chosen_alt[static_cast<std::size_t>(pos)] = 0;
                --pos;
            }
            if (pos < 0) break;
        }
    }
    return out;
}

RobustOut worst_dispatch(const Compiled& c, const PolicyVec& pol, std::uint64_t scenario_cap,
                         RobustWorkspace& ws, Scenario* witness) {
    return c.kind == UncertaintyKind::reward ? worst_reward(c, pol, ws, witness)
                                             : worst_transition(c, pol, scenario_cap, ws, witness);
}

} // namespace detail

RobustReport worst_case_reward_uncertainty(const Instance& inst, const Policy& policy) {
    if (inst.kind != UncertaintyKind::reward)
        throw Error(Errc::wrong_kind, "reward-uncertainty evaluator called on a transition instance");
    const Compiled c = compile(inst);
    const PolicyVec pol = to_policy_vec(c, policy);
    detail::RobustWorkspace ws;
    RobustReport rep;
    const auto out = detail::worst_reward(c, pol, ws, &rep.witness);
    rep.nominal = out.nominal;
    rep.worst_case = out.worst;
    rep.loss = out.nominal - out.worst;
    return rep;
}

RobustReport worst_case_transition_uncertainty(const Instance& inst, const Policy& policy,
                                               std::uint64_t scenario_cap) {
    if (inst.kind != UncertaintyKind::transition)
        throw Error(Errc::wrong_kind, "transition-uncertainty evaluator called on a reward instance");
    const Compiled c = compile(inst);
    const PolicyVec pol = to_policy_vec(c, policy);
    detail::RobustWorkspace ws;
    RobustReport rep;
    const auto out = detail::worst_transition(c, pol, scenario_cap, ws, &rep.witness);
    rep.nominal = out.nominal;
    rep.worst_case = out.worst;
    rep.loss = out.nominal - out.worst;
    return rep;
}

RobustReport robust_report(const Instance& inst, const Policy& policy, std::uint64_t scenario_cap) {
    return inst.kind == UncertaintyKind::reward
               ? worst_case_reward_uncertainty(inst, policy)
               : worst_case_transition_uncertainty(inst, policy, scenario_cap);
}

double loss(const Instance& inst, const Policy& policy, std::uint64_t scenario_cap) {
    return robust_report(inst, policy, scenario_cap).loss;
}

double evaluate_scenario(const Instance& inst, const Policy& policy, const Scenario& scenario) {
    const Compiled c = compile(inst);
    const PolicyVec pol = to_policy_vec(c, policy);
    if (scenario.kind != inst.kind)
        throw Error(Errc::wrong_kind, "scenario kind does not match the instance");
    std::vector<double> reach;
    if (inst.kind == UncertaintyKind::reward) {
        reach_into(c, pol, reach);
        std::vector<char> flip(static_cast<std::size_t>(c.num_states()), 0);
        for (const auto& tid : scenario.flipped) {
            auto it = c.index.find(tid);
            if (it == c.index.end() || !c.is_terminal(it->second))
                throw Error(Errc::bad_input, "scenario flips unknown terminal '" + tid + "'");
            flip[static_cast<std::size_t>(it->second)] = 1;
        }
        double value = 0.0;
        for (int t = c.num_nonterminal; t < c.num_states(); ++t)
            value += reach[t] * (flip[static_cast<std::size_t>(t)] ? c.alt_reward[t] : c.reward[t]);
        return value;
    }
    KernelOverlay overlay;
    for (const auto& rm : scenario.remapped) {
        auto it = c.index.find(rm.state);
        if (it == c.index.end())
            throw Error(Errc::bad_input, "scenario remaps unknown state '" + rm.state + "'");
        const int s = it->second;
        int a = -1;
        for (int i = 0; i < static_cast<int>(c.actions[s].size()); ++i)
            if (c.actions[s][i].name == rm.action) a = i;
        if (a < 0 || rm.alternative < 0 ||
            rm.alternative >= static_cast<int>(c.actions[s][a].alts.size()))
            throw Error(Errc::bad_input, "scenario remaps unknown site '" + rm.state + "/" + rm.action + "'");
        // Remapping an action the policy does not take leaves the chain alone.
        if (pol[s] == a)
            overlay.emplace_back(s, &c.actions[s][a].alts[static_cast<std::size_t>(rm.alternative)]);
    }
    reach_into(c, pol, reach, &overlay);
    double value = 0.0;
    for (int t = c.num_nonterminal; t < c.num_states(); ++t) value += reach[t] * c.reward[t];
    return value;
}

} // namespace ldst
