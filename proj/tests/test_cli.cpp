#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "common.hpp"
#include "ldst/io.hpp"
#include "ldst/oracle.hpp"

using namespace ldst;
namespace fs = std::filesystem;

namespace {

struct RunResult {
    int status = -1;
    std::string out;
};

RunResult run(const std::string& args) {
    const std::string cmd = std::string(LDST_CLI_PATH) + " " + args + " 2>&1";
    std::array<char, 4096> buf{};
    RunResult res;
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    while (fgets(buf.data(), buf.size(), pipe)) res.out += buf.data();
    const int rc = pclose(pipe);
    res.status = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
    return res;
}

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("ldst_cli_test_" + std::to_string(::getpid()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

} // namespace

TEST_CASE("validate exits 0 on clean files and 1 with diagnostics otherwise") {
    TempDir tmp;
    io::save_instance(testing::two_arms(), tmp.file("ok.json"));
    auto res = run("validate " + tmp.file("ok.json"));
    CHECK(res.status == 0);

    Instance broken = testing::two_arms();
    for (auto& s : broken.states)
        if (s.id == "ma") s.actions[0].nominal["t1"] = 0.9;
    io::save_instance(broken, tmp.file("broken.json"));
    res = run("validate " + tmp.file("broken.json"));
    CHECK(res.status == 1);
    CHECK(res.out.find("probability mass") != std::string::npos);
}

TEST_CASE("truncated json exits 1 and points at the parse location") {
    TempDir tmp;
    std::ofstream(tmp.file("trunc.json")) << "{\"horizon\": 2, \"states\": [";
    const auto res = run("validate " + tmp.file("trunc.json"));
    CHECK(res.status == 1);
    CHECK(res.out.find("parse error") != std::string::npos);
}

TEST_CASE("solve prints the value and writes policy and report files") {
    TempDir tmp;
    io::save_instance(testing::two_arms(), tmp.file("inst.json"));
    const auto res = run("solve " + tmp.file("inst.json") + " --method exact --policy-out " +
                         tmp.file("pol.json") + " --report-out " + tmp.file("rep.json"));
    CHECK(res.status == 0);
    CHECK(res.out.substr(0, 1) == "0"); // exact optimum is 0
    CHECK(fs::exists(tmp.file("pol.json")));
    CHECK(fs::exists(tmp.file("rep.json")));
}

TEST_CASE("solve and eval agree through the policy file round trip") {
    TempDir tmp;
    RandomSpec spec;
    spec.s1_count = 4;
    spec.s2_count = 4;
    spec.actions_per_state = 2;
    spec.seed = 42;
    io::save_instance(gen_random(spec), tmp.file("inst.json"));
    const auto solved = run("solve " + tmp.file("inst.json") + " --method exact --policy-out " +
                            tmp.file("pol.json"));
    REQUIRE(solved.status == 0);
    const auto eval = run("eval " + tmp.file("inst.json") + " " + tmp.file("pol.json"));
    REQUIRE(eval.status == 0);
    const auto pos = eval.out.find("R_hat=");
    REQUIRE(pos != std::string::npos);
    const std::string rhat = eval.out.substr(pos + 6, eval.out.find('\n', pos) - pos - 6);
    CHECK(solved.out.find(rhat.substr(0, 10)) != std::string::npos);
}

TEST_CASE("nominal and exact coincide when the budget is zero") {
    TempDir tmp;
    Instance inst = testing::two_arms();
    inst.budget = 0;
    io::save_instance(inst, tmp.file("inst.json"));
    const auto nominal = run("solve " + tmp.file("inst.json") + " --method nominal");
    const auto exact = run("solve " + tmp.file("inst.json") + " --method exact");
    CHECK(nominal.status == 0);
    CHECK(exact.status == 0);
    CHECK(nominal.out == exact.out);
}

TEST_CASE("approx requires the supported shape and exits 2 otherwise") {
    TempDir tmp;
    Instance k2 = testing::two_arms();
    k2.budget = 2;
    io::save_instance(k2, tmp.file("k2.json"));
    const auto res = run("solve " + tmp.file("k2.json") + " --method approx --eps 0.5");
    CHECK(res.status == 2);
    CHECK(res.out.find("budget") != std::string::npos);
}

TEST_CASE("approx lands within the guaranteed factor of exact") {
    TempDir tmp;
    RandomSpec spec;
    spec.s1_count = 5;
    spec.s2_count = 4;
    spec.actions_per_state = 2;
    spec.seed = 42;
    io::save_instance(gen_random(spec), tmp.file("inst.json"));
    const auto exact = run("solve " + tmp.file("inst.json") + " --method exact");
    const auto approx = run("solve " + tmp.file("inst.json") + " --method approx --eps 0.5");
    REQUIRE(exact.status == 0);
    REQUIRE(approx.status == 0);
    CHECK(std::stod(approx.out) >= std::stod(exact.out) / 5.5 - 1e-9);
}

TEST_CASE("generators write instances that validate, deterministically") {
    TempDir tmp;
    auto res = run("gen three-partition --b 1,1,1,1,1,1 --B 3 --out " + tmp.file("tp.json"));
    REQUIRE(res.status == 0);
    CHECK(run("validate " + tmp.file("tp.json")).status == 0);
    CHECK(fs::exists(tmp.file("tp.json.cert.json")));

    res = run("gen random --s1 3 --s2 3 --actions 2 --seed 42 --out " + tmp.file("r1.json"));
    REQUIRE(res.status == 0);
    res = run("gen random --s1 3 --s2 3 --actions 2 --seed 42 --out " + tmp.file("r2.json"));
    REQUIRE(res.status == 0);
    std::ifstream a(tmp.file("r1.json")), b(tmp.file("r2.json"));
    const std::string sa((std::istreambuf_iterator<char>(a)), std::istreambuf_iterator<char>());
    const std::string sb((std::istreambuf_iterator<char>(b)), std::istreambuf_iterator<char>());
    CHECK(sa == sb);
}

TEST_CASE("malformed dimacs input exits 1") {
    TempDir tmp;
    std::ofstream(tmp.file("bad.cnf")) << "p cnf 1 1\n1 1\n";
    const auto res =
        run("gen three-sat --cnf " + tmp.file("bad.cnf") + " --out " + tmp.file("sat.json"));
    CHECK(res.status == 1);
}

TEST_CASE("bench walks a directory, tolerating broken rows") {
    TempDir tmp;
    fs::create_directories(tmp.file("corpus"));
    RandomSpec spec;
    spec.s1_count = 3;
    spec.s2_count = 3;
    spec.actions_per_state = 2;
    for (std::uint64_t seed = 0; seed < 3; ++seed) {
        spec.seed = 600 + seed;
        io::save_instance(gen_random(spec),
                          tmp.file("corpus/r" + std::to_string(seed) + ".json"));
    }
    // One oversized row: budget 2 is outside the approximation's shape.
    Instance k2 = testing::two_arms();
    k2.budget = 2;
    io::save_instance(k2, tmp.file("corpus/zz_shape.json"));

    const auto res = run("bench --dir " + tmp.file("corpus") + " --eps 0.5 --report " +
                         tmp.file("report.json"));
    REQUIRE(res.status == 0);
    const io::Json rows = io::load_json(tmp.file("report.json"));
    REQUIRE(rows.size() == 4);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(!rows[i].contains("error"));
        CHECK(rows[i].at("ratio").get<double>() >= 1.0 / 5.5 - 1e-9);
    }
    CHECK(rows[3].contains("error"));
}

TEST_CASE("bench over an empty directory succeeds with an empty table") {
    TempDir tmp;
    fs::create_directories(tmp.file("empty"));
    const auto res =
        run("bench --dir " + tmp.file("empty") + " --report " + tmp.file("report.json"));
    CHECK(res.status == 0);
    CHECK(io::load_json(tmp.file("report.json")).empty());
}
