#include "ldst/oracle.hpp"

#include "ldst/compiled.hpp"

namespace ldst {

namespace {

std::uint64_t count_policies_compiled(const Compiled& c, std::uint64_t cap) {
    std::uint64_t total = 1;
    for (int s = 0; s < c.num_nonterminal; ++s) {
        const auto n = static_cast<std::uint64_t>(c.actions[s].size());
        if (total > cap / n + 1) total = cap + 1; // saturate, avoid overflow
        else total *= n;
        if (total > cap)
            throw Error(Errc::cap_exceeded, "policy count exceeds the cap of " + std::to_string(cap));
    }
    return total;
}

/// Mixed-radix odometer over per-state action counts; the last state in
/// (stage, id) order varies fastest, giving lexicographic policy order.
template <typename Fn>
void for_each_policy(const Compiled& c, Fn&& fn) {
    PolicyVec pol(static_cast<std::size_t>(c.num_states()), -1);
    for (int s = 0; s < c.num_nonterminal; ++s) pol[s] = 0;
    while (true) {
        fn(const_cast<const PolicyVec&>(pol));
        int s = c.num_nonterminal - 1;
        while (s >= 0) {
            if (++pol[s] < static_cast<int>(c.actions[s].size())) break;
            pol[s] = 0;
            --s;
        }
        if (s < 0) break;
    }
}

} // namespace

std::uint64_t count_policies(const Instance& inst, std::uint64_t cap) {
    return count_policies_compiled(compile(inst), cap);
}

void enumerate_policies(const Instance& inst, const std::function<void(const Policy&)>& visit,
                        std::uint64_t cap) {
    const Compiled c = compile(inst);
    count_policies_compiled(c, cap);
    for_each_policy(c, [&](const PolicyVec& pol) { visit(from_policy_vec(c, pol)); });
}

OptimumResult exact_optimum(const Instance& inst, std::uint64_t policy_cap,
                            std::uint64_t scenario_cap) {
    const Compiled c = compile(inst);
    count_policies_compiled(c, policy_cap);

    detail::RobustWorkspace ws;
    OptimumResult res;
    bool first = true;
    PolicyVec best;
    for_each_policy(c, [&](const PolicyVec& pol) {
        const auto out = detail::worst_dispatch(c, pol, scenario_cap, ws);
        ++res.policies;
        if (first || out.worst > res.value) {
            first = false;
            res.value = out.worst;
            best = pol;
        }
    });
    res.policy = from_policy_vec(c, best);
    return res;
}

} // namespace ldst
