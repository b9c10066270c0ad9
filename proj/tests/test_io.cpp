#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

#include "common.hpp"
#include "ldst/io.hpp"
#include "ldst/oracle.hpp"
#include "ldst/robust.hpp"

using namespace ldst;
using ldst::testing::close;
using ldst::testing::two_arms;

TEST_CASE("instances survive a serialization round trip") {
    for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
        RandomSpec spec;
        spec.s1_count = 4;
        spec.s2_count = 4;
        spec.actions_per_state = 2;
        spec.alt_hi_frac = 0.8;
        spec.seed = seed;
        const Instance inst = gen_random(spec);
        const Instance back = io::instance_from_json(io::to_json(inst));
        CHECK(validate(back).empty());
        // Value-level equality policy by policy, which is what matters.
        enumerate_policies(inst, [&](const Policy& pi) {
            CHECK(close(worst_case_reward_uncertainty(inst, pi).worst_case,
                        worst_case_reward_uncertainty(back, pi).worst_case));
        });
        // And byte-level stability of the serialized form.
        CHECK(io::to_json(inst).dump() == io::to_json(back).dump());
    }
}

TEST_CASE("transition instances round trip with their alternatives") {
    const auto out = gen_3sat(CnfFormula{1, {{1, 1, 1}}});
    const Instance back = io::instance_from_json(io::to_json(out.instance));
    CHECK(validate(back).empty());
    CHECK(close(exact_optimum(back).value, exact_optimum(out.instance).value));
}

TEST_CASE("action rewards ride along in their own section") {
    Instance inst = two_arms();
    for (auto& s : inst.states)
        if (s.id == "ma") s.actions[0].reward = 2.5;
    const io::Json j = io::to_json(inst);
    REQUIRE(j.contains("action_rewards"));
    const Instance back = io::instance_from_json(j);
    double found = -1.0;
    for (const auto& s : back.states)
        if (s.id == "ma") found = s.actions[0].reward;
    CHECK(close(found, 2.5));
}

TEST_CASE("policies round trip") {
    const Policy pi = testing::make_policy({{"s0", "a"}, {"ma", "go"}, {"mb", "go"}});
    const Policy back = io::policy_from_json(io::to_json(pi));
    CHECK(back.assignment == pi.assignment);
}

TEST_CASE("reports serialize with the witness attached") {
    const auto rep = worst_case_reward_uncertainty(
        two_arms(), testing::make_policy({{"s0", "a"}, {"ma", "go"}, {"mb", "go"}}));
    const io::Json j = io::to_json(rep);
    CHECK(close(j.at("nominal").get<double>(), 1.0));
    CHECK(close(j.at("worst_case").get<double>(), 0.0));
    CHECK(j.at("witness").at("kind") == "reward");
    CHECK(j.at("witness").at("flips")[0] == "t1");
}

TEST_CASE("malformed instance files raise typed input errors") {
    CHECK_THROWS_AS(io::instance_from_json(io::Json::array()), Error);
    io::Json j = io::to_json(two_arms());
    j.erase("states");
    CHECK_THROWS_AS(io::instance_from_json(j), Error);
    io::Json k = io::to_json(two_arms());
    k["actions"][0]["state"] = "ghost";
    CHECK_THROWS_AS(io::instance_from_json(k), Error);
}

TEST_CASE("dimacs parsing accepts the standard form") {
    std::istringstream in("c a comment\np cnf 3 2\n1 -2 3 0\n-1 2 2 0\n");
    const CnfFormula f = io::parse_dimacs(in);
    CHECK(f.num_vars == 3);
    REQUIRE(f.clauses.size() == 2);
    CHECK(f.clauses[0] == std::vector<int>{1, -2, 3});
    CHECK(f.clauses[1] == std::vector<int>{-1, 2, 2});
}

TEST_CASE("dimacs parsing spans clauses across lines and rejects damage") {
    std::istringstream multi("p cnf 2 1\n1\n-2 1\n0\n");
    CHECK(io::parse_dimacs(multi).clauses.size() == 1);

    std::istringstream missing_p("1 2 3 0\n");
    CHECK_THROWS_AS(io::parse_dimacs(missing_p), Error);
    std::istringstream unterminated("p cnf 2 1\n1 -2\n");
    CHECK_THROWS_AS(io::parse_dimacs(unterminated), Error);
    std::istringstream wrong_count("p cnf 2 2\n1 2 2 0\n");
    CHECK_THROWS_AS(io::parse_dimacs(wrong_count), Error);
    std::istringstream garbage("p cnf 2 1\n1 two 0\n");
    CHECK_THROWS_AS(io::parse_dimacs(garbage), Error);
}

TEST_CASE("graph json loaders check their shapes") {
    io::Json j{{"layers", io::Json::array({io::Json::array({"s1"}), io::Json::array({"t1"})})},
               {"arcs", io::Json::array({io::Json::array({"s1", "t1"})})},
               {"pairs", io::Json::array({io::Json::array({"s1", "t1"})})}};
    const LayeredDigraph g = io::layered_from_json(j);
    CHECK(g.layers.size() == 2);
    CHECK(g.arcs.size() == 1);

    io::Json bad = j;
    bad["arcs"] = io::Json::array({io::Json::array({"s1"})});
    CHECK_THROWS_AS(io::layered_from_json(bad), Error);

    io::Json pg{{"partition", io::Json{{"1,1", io::Json::array({"a", "b"})}}},
                {"edges", io::Json::array({io::Json::array({"a", "b"})})},
                {"ell", 1}};
    const PartitionedGraph p = io::partitioned_from_json(pg);
    CHECK(p.cells.at({1, 1}).size() == 2);
    io::Json badkey = pg;
    badkey["partition"] = io::Json{{"x", io::Json::array({"a"})}};
    CHECK_THROWS_AS(io::partitioned_from_json(badkey), Error);
}
