#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>

#include "common.hpp"
#include "ldst/oracle.hpp"
#include "ldst/reductions.hpp"
#include "ldst/robust.hpp"

using namespace ldst;
using ldst::testing::close;
using ldst::testing::make_policy;
using ldst::testing::two_arms;

namespace {

/// Reference adversary: explicit minimum over every subset of at most k
/// deviation-capable terminals.
double brute_force_worst_reward(const Instance& inst, const Policy& pi) {
    std::vector<std::string> sites;
    for (const auto& s : inst.states)
        if (s.stage == inst.horizon && s.alt_reward.value_or(s.reward) < s.reward)
            sites.push_back(s.id);
    double best = reach_probabilities(inst, pi).nominal;
    const int m = static_cast<int>(sites.size());
    for (std::uint64_t mask = 0; mask < (1ull << m); ++mask) {
        if (static_cast<int>(__builtin_popcountll(mask)) > inst.budget) continue;
        Scenario sc;
        sc.kind = UncertaintyKind::reward;
        for (int i = 0; i < m; ++i)
            if (mask >> i & 1) sc.flipped.push_back(sites[static_cast<std::size_t>(i)]);
        best = std::min(best, evaluate_scenario(inst, pi, sc));
    }
    return best;
}

} // namespace

TEST_CASE("two-arm example loses everything under a single flip") {
    const auto pi = make_policy({{"s0", "a"}, {"ma", "go"}, {"mb", "go"}});
    const auto rep = worst_case_reward_uncertainty(two_arms(), pi);
    CHECK(close(rep.nominal, 1.0));
    CHECK(close(rep.worst_case, 0.0));
    CHECK(close(rep.loss, 1.0));
    REQUIRE(rep.witness.flipped.size() == 1);
    CHECK(rep.witness.flipped[0] == "t1");
}

TEST_CASE("budget zero keeps the nominal value") {
    Instance inst = two_arms();
    inst.budget = 0;
    const auto pi = make_policy({{"s0", "a"}, {"ma", "go"}, {"mb", "go"}});
    const auto rep = worst_case_reward_uncertainty(inst, pi);
    CHECK(close(rep.worst_case, rep.nominal));
    CHECK(rep.witness.flipped.empty());
    CHECK(close(loss(inst, pi), 0.0));
}

TEST_CASE("greedy adversary equals brute force on random instances") {
    for (std::uint64_t seed : {7ull, 8ull, 9ull, 10ull}) {
        for (int budget : {1, 2, 3}) {
            RandomSpec spec;
            spec.s1_count = 3;
            spec.s2_count = 4;
            spec.actions_per_state = 2;
            spec.alt_lo_frac = 0.0;
            spec.alt_hi_frac = 0.9;
            spec.seed = seed;
            Instance inst = gen_random(spec);
            inst.budget = budget;
            enumerate_policies(inst, [&](const Policy& pi) {
                const auto rep = worst_case_reward_uncertainty(inst, pi);
                CHECK(close(rep.worst_case, brute_force_worst_reward(inst, pi)));
                // Witness consistency.
                CHECK(close(evaluate_scenario(inst, pi, rep.witness), rep.worst_case));
                CHECK(close(rep.loss, loss(inst, pi)));
            });
        }
    }
}

TEST_CASE("worst case is monotone in the budget") {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        RandomSpec spec;
        spec.s1_count = 2 + static_cast<int>(seed % 3);
        spec.s2_count = 2 + static_cast<int>(seed % 4);
        spec.actions_per_state = 2;
        spec.alt_hi_frac = 0.9;
        spec.seed = 4000 + seed;
        Instance inst = gen_random(spec);
        const auto pi = nominal_optimal_policy(inst).first;
        double prev = reach_probabilities(inst, pi).nominal;
        for (int k = 1; k <= spec.s2_count; ++k) {
            inst.budget = k;
            if (!validate(inst).empty()) break;
            const double worst = worst_case_reward_uncertainty(inst, pi).worst_case;
            CHECK(worst <= prev + 1e-12);
            prev = worst;
        }
    }
}

TEST_CASE("the reward evaluator refuses transition instances and vice versa") {
    const auto sat = gen_3sat(CnfFormula{1, {{1, 1, 1}}});
    const auto tp = gen_3partition({1, 1, 1}, 3);
    const auto pi_sat = nominal_optimal_policy(sat.instance).first;
    const auto pi_tp = nominal_optimal_policy(tp.instance).first;
    CHECK_THROWS_AS(worst_case_reward_uncertainty(sat.instance, pi_sat), Error);
    CHECK_THROWS_AS(worst_case_transition_uncertainty(tp.instance, pi_tp), Error);
}

namespace {

/// Single uncertain-deterministic hop: nominal to a unit-reward terminal, the
/// adversary can reroute to the worthless one.
Instance reroute_instance(int budget) {
    Instance inst;
    inst.horizon = 1;
    inst.initial = "z";
    inst.kind = UncertaintyKind::transition;
    inst.budget = budget;
    State z;
    z.id = "z";
    z.stage = 0;
    Action a;
    a.name = "go";
    a.nominal = {{"t1", 1.0}};
    a.alternatives = {{{"t2", 1.0}}};
    z.actions.push_back(a);
    inst.states.push_back(z);
    State t1;
    t1.id = "t1";
    t1.stage = 1;
    t1.reward = 1.0;
    inst.states.push_back(t1);
    State t2 = t1;
    t2.id = "t2";
    t2.reward = 0.0;
    inst.states.push_back(t2);
    return inst;
}

} // namespace

TEST_CASE("a rerouting adversary drains the single uncertain hop") {
    const auto pi = make_policy({{"z", "go"}});
    const auto rep = worst_case_transition_uncertainty(reroute_instance(1), pi);
    CHECK(close(rep.nominal, 1.0));
    CHECK(close(rep.worst_case, 0.0));
    REQUIRE(rep.witness.remapped.size() == 1);
    CHECK(rep.witness.remapped[0].state == "z");
    CHECK(close(evaluate_scenario(reroute_instance(1), pi, rep.witness), 0.0));
}

TEST_CASE("budget zero transition uncertainty returns the nominal value") {
    const auto pi = make_policy({{"z", "go"}});
    const auto rep = worst_case_transition_uncertainty(reroute_instance(0), pi);
    CHECK(close(rep.worst_case, 1.0));
    CHECK(rep.witness.remapped.empty());
}

TEST_CASE("the satisfiability construction keeps half the reward under the proof policy") {
    // Satisfiable single-clause formula;  the assignment x1 = true fulfills it.
    const auto out = gen_3sat(CnfFormula{1, {{1, 1, 1}}});
    Policy pi;
    pi.assignment["s0"] = "a";
    pi.assignment["sc_1"] = "a_x1";
    pi.assignment["sc_2"] = "a";
    pi.assignment["sv_1"] = "a_x1";   // walk the literal opposite to the assignment
    pi.assignment["sl_x1"] = "a";
    pi.assignment["sl_nx1"] = "a_prime";
    pi.assignment["sv_2"] = "a";
    pi.assignment["d"] = "a";
    for (const auto& s : out.instance.states)
        if (s.stage < out.instance.horizon && !pi.assignment.count(s.id))
            pi.assignment[s.id] = s.actions[0].name; // pass-through chain states
    // The proof policy picks the satisfied literal in the clause row but the
    // falsified branch in the variable row.
    pi.assignment["sv_1"] = "a_nx1";
    pi.assignment["sl_nx1"] = "a";
    pi.assignment["sl_x1"] = "a_prime";
    const auto rep = worst_case_transition_uncertainty(out.instance, pi);
    CHECK(rep.worst_case >= 0.5 - 1e-9);
    CHECK(close(evaluate_scenario(out.instance, pi, rep.witness), rep.worst_case));
}

TEST_CASE("the scenario cap errs instead of truncating") {
    // Nine uncertain sites on the chosen path with budget 9 explodes fast.
    Instance inst;
    inst.horizon = 10;
    inst.initial = "c0";
    inst.kind = UncertaintyKind::transition;
    inst.budget = 9;
    for (int i = 0; i <= 9; ++i) {
        State s;
        s.id = "c" + std::to_string(i);
        s.stage = i;
        Action a;
        a.name = "go";
        a.nominal = {{"c" + std::to_string(i + 1), 1.0}};
        for (int alt = 0; alt < 3; ++alt) a.alternatives.push_back({{"x" + std::to_string(i + 1), 1.0}});
        s.actions.push_back(a);
        inst.states.push_back(s);
        if (i > 0) {
            State x;
            x.id = "x" + std::to_string(i);
            x.stage = i;
            Action go;
            go.name = "go";
            go.nominal = {{i == 9 ? "t_dead" : "x" + std::to_string(i + 1), 1.0}};
            x.actions.push_back(go);
            inst.states.push_back(x);
        }
    }
    State top;
    top.id = "c10";
    top.stage = 10;
    top.reward = 1.0;
    inst.states.push_back(top);
    State x10;
    x10.id = "x10";
    x10.stage = 10;
    x10.reward = 0.0;
    inst.states.push_back(x10);
    State dead;
    dead.id = "t_dead";
    dead.stage = 10;
    dead.reward = 0.0;
    inst.states.push_back(dead);
    REQUIRE(validate(inst).empty());
    Policy pi;
    for (const auto& s : inst.states)
        if (s.stage < inst.horizon) pi.assignment[s.id] = "go";
    CHECK_THROWS_AS(worst_case_transition_uncertainty(inst, pi, 1000), Error);
    CHECK_NOTHROW(worst_case_transition_uncertainty(inst, pi, 1'000'000));
}

TEST_CASE("transition scenarios are enumerated deterministically") {
    const auto out = gen_3sat(CnfFormula{2, {{1, 2, 2}, {-1, -2, -2}}});
    const auto pi = nominal_optimal_policy(out.instance).first;
    const auto a = worst_case_transition_uncertainty(out.instance, pi);
    const auto b = worst_case_transition_uncertainty(out.instance, pi);
    CHECK(a.worst_case == b.worst_case);
    REQUIRE(a.witness.remapped.size() == b.witness.remapped.size());
    for (std::size_t i = 0; i < a.witness.remapped.size(); ++i) {
        CHECK(a.witness.remapped[i].state == b.witness.remapped[i].state);
        CHECK(a.witness.remapped[i].action == b.witness.remapped[i].action);
    }
}
