#include <algorithm>
#include <cmath>
#include <set>

#include "ldst/model.hpp"

namespace ldst {

namespace {

void require_valid(const Instance& inst) {
    auto diags = validate(inst);
    if (!diags.empty())
        throw Error(Errc::invalid_instance,
                    "invalid instance: [" + diags.front().location + "] " + diags.front().message);
}

std::string fresh_id(const std::set<std::string>& used, std::string candidate) {
    while (used.count(candidate)) candidate = "_" + candidate;
    return candidate;
}

} // namespace

Instance normalize_alternative_rewards(const Instance& inst, std::size_t max_terminals) {
    require_valid(inst);
    if (inst.kind != UncertaintyKind::reward)
        throw Error(Errc::unsupported_shape, "normalization requires reward uncertainty");
    if (inst.horizon != 2)
        throw Error(Errc::unsupported_shape, "normalization requires a 2-stage instance");

    std::set<std::string> used;
    for (const auto& s : inst.states) used.insert(s.id);

    // Plan the splits and check the size guard before rewriting anything.
    struct Split {
        long long parts; // h + 1
        std::vector<std::string> ids;
    };
    std::map<std::string, Split> splits;
    std::size_t resulting_terminals = 0;
    for (const auto& s : inst.states) {
        if (s.stage != inst.horizon) continue;
        const double r = s.reward;
        const double alt = s.alt_reward.value_or(r);
        if (alt <= 0.0 || alt >= r) {
            ++resulting_terminals;
            continue;
        }
        const long long h = static_cast<long long>(std::ceil(alt / (r - alt)));
        Split sp;
        sp.parts = h + 1;
        resulting_terminals += static_cast<std::size_t>(sp.parts);
        splits[s.id] = std::move(sp);
    }
    if (resulting_terminals > max_terminals)
        throw Error(Errc::cap_exceeded,
                    "normalization would create " + std::to_string(resulting_terminals) +
                        " terminals, exceeding the cap of " + std::to_string(max_terminals));

    for (auto& [tid, sp] : splits)
        for (long long i = 0; i < sp.parts; ++i)
            sp.ids.push_back(fresh_id(used, tid + "#" + std::to_string(i)));

    Instance out;
    out.horizon = inst.horizon;
    out.initial = inst.initial;
    out.kind = inst.kind;
    out.budget = inst.budget;
    for (const auto& s : inst.states) {
        if (s.stage == inst.horizon) {
            auto it = splits.find(s.id);
            if (it == splits.end()) {
                out.states.push_back(s);
                continue;
            }
            const double r = s.reward;
            const double alt = *s.alt_reward;
            const auto h = static_cast<double>(it->second.parts - 1);
            for (long long i = 0; i < it->second.parts; ++i) {
                State part;
                part.id = it->second.ids[static_cast<std::size_t>(i)];
                part.stage = s.stage;
                part.reward = i == 0 ? (r - alt) * (h + 1) : (h + 1) / h * alt;
                part.alt_reward = 0.0;
                out.states.push_back(std::move(part));
            }
            continue;
        }
        State copy = s;
        for (auto& a : copy.actions) {
            std::map<std::string, double> dist;
            for (const auto& [to, p] : a.nominal) {
                auto it = splits.find(to);
                if (it == splits.end()) {
                    dist[to] += p;
                } else {
                    const double part = p / static_cast<double>(it->second.parts);
                    for (const auto& pid : it->second.ids) dist[pid] += part;
                }
            }
            a.nominal = std::move(dist);
        }
        out.states.push_back(std::move(copy));
    }
    return out;
}

Instance fix_initial_action(const Instance& inst, const std::string& a0) {
    require_valid(inst);
    Instance out = inst;
    for (auto& s : out.states) {
        if (s.id != inst.initial) continue;
        auto keep = std::find_if(s.actions.begin(), s.actions.end(),
                                 [&](const Action& a) { return a.name == a0; });
        if (keep == s.actions.end())
            throw Error(Errc::bad_input, "unknown initial action '" + a0 + "'");
        Action fixed = *keep;
        s.actions = {std::move(fixed)};
        return out;
    }
    throw Error(Errc::bad_input, "initial state not found");
}

Instance lift_action_rewards(const Instance& inst, double eps) {
    require_valid(inst);
    if (!(eps > 0.0 && eps < 1.0))
        throw Error(Errc::bad_input, "lift split parameter must lie in (0,1)");
    if (inst.horizon != 2)
        throw Error(Errc::unsupported_shape, "action-reward lifting requires a 2-stage instance");

    bool any_middle = false, any_initial = false;
    for (const auto& s : inst.states)
        for (const auto& a : s.actions) {
            if (a.reward == 0.0) continue;
            (s.id == inst.initial ? any_initial : any_middle) = true;
        }
    if (!any_middle && !any_initial) {
        Instance out = inst;
        for (auto& s : out.states)
            for (auto& a : s.actions) a.reward = 0.0;
        return out;
    }

    std::set<std::string> used;
    for (const auto& s : inst.states) used.insert(s.id);

    Instance out = inst;
    auto scale_terminals = [&](double factor) {
        for (auto& s : out.states) {
            if (s.stage != out.horizon) continue;
            s.reward *= factor;
            if (s.alt_reward) *s.alt_reward *= factor;
        }
    };
    auto divert = [&](Action& a, const std::string& target) {
        for (auto& [to, p] : a.nominal) p *= 1.0 - eps;
        a.nominal[target] = eps;
        for (auto& alt : a.alternatives) {
            for (auto& [to, p] : alt) p *= 1.0 - eps;
            alt[target] = eps;
        }
    };

    // Middle-stage actions first: the reward diversion must touch every
    // action once the terminal scale-up is global.
    if (any_middle) {
        std::vector<State> lifted;
        for (auto& s : out.states) {
            if (s.stage != 1) continue;
            for (auto& a : s.actions) {
                State terminal;
                terminal.id = fresh_id(used, "lift_" + s.id + "_" + a.name);
                used.insert(terminal.id);
                terminal.stage = 2;
                terminal.reward = a.reward / eps;
                if (inst.kind == UncertaintyKind::reward) terminal.alt_reward = terminal.reward;
                divert(a, terminal.id);
                a.reward = 0.0;
                lifted.push_back(std::move(terminal));
            }
        }
        scale_terminals(1.0 / (1.0 - eps));
        for (auto& t : lifted) out.states.push_back(std::move(t));
    }

    if (any_initial) {
        std::vector<State> added;
        for (auto& s : out.states) {
            if (s.id != out.initial) continue;
            for (auto& a : s.actions) {
                State terminal;
                terminal.id = fresh_id(used, "lift_" + s.id + "_" + a.name);
                used.insert(terminal.id);
                terminal.stage = 2;
                terminal.reward = a.reward / eps;
                if (inst.kind == UncertaintyKind::reward) terminal.alt_reward = terminal.reward;

                State mid;
                mid.id = fresh_id(used, "lift_mid_" + s.id + "_" + a.name);
                used.insert(mid.id);
                mid.stage = 1;
                Action go;
                go.name = "go";
                go.nominal[terminal.id] = 1.0;
                mid.actions.push_back(std::move(go));

                divert(a, mid.id);
                a.reward = 0.0;
                added.push_back(std::move(terminal));
                added.push_back(std::move(mid));
            }
        }
        // Scale-up happens before the new terminals join: their reward/eps
        // value is already final.
        scale_terminals(1.0 / (1.0 - eps));
        for (auto& st : added) out.states.push_back(std::move(st));
    }

    for (auto& s : out.states)
        for (auto& a : s.actions) a.reward = 0.0;
    return out;
}

} // namespace ldst
