#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "ldst/io.hpp"
#include "ldst/oracle.hpp"

namespace {

using namespace ldst;

int exit_code(const Error& e) {
    switch (e.code()) {
        case Errc::unsupported_shape:
        case Errc::cap_exceeded:
        case Errc::numerical:
            return 2;
        default:
            return 1;
    }
}

std::string fmt12(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

int cmd_validate(const std::string& path) {
    const Instance inst = io::load_instance(path);
    const auto diags = validate(inst);
    for (const auto& d : diags)
        std::cout << (d.location.empty() ? std::string("instance") : d.location) << ": " << d.message
                  << "\n";
    return diags.empty() ? 0 : 1;
}

int cmd_solve(const std::string& path, const std::string& method, double eps,
              const std::string& policy_out, const std::string& report_out,
              std::uint64_t policy_cap, std::uint64_t scenario_cap) {
    const Instance inst = io::load_instance(path);
    Policy policy;
    double value = 0.0;
    io::Json report;
    if (method == "nominal") {
        auto [pol, val] = nominal_optimal_policy(inst);
        policy = std::move(pol);
        value = val;
        report = io::Json{{"method", "nominal"}, {"value", value}};
    } else if (method == "exact") {
        const auto res = exact_optimum(inst, policy_cap, scenario_cap);
        policy = res.policy;
        value = res.value;
        report = io::Json{{"method", "exact"}, {"value", value}, {"policies", res.policies}};
    } else if (method == "approx") {
        const auto res = approximate(inst, eps);
        policy = res.policy;
        value = res.value;
        report = io::to_json(res.report);
        report["method"] = "approx";
        report["value"] = value;
    } else {
        throw Error(Errc::bad_input, "unknown method '" + method + "'");
    }
    if (!policy_out.empty()) io::save_policy(policy, policy_out);
    if (!report_out.empty()) io::save_json(report, report_out);
    std::cout << fmt12(value) << "\n";
    return 0;
}

int cmd_eval(const std::string& instance_path, const std::string& policy_path,
             std::uint64_t scenario_cap) {
    const Instance inst = io::load_instance(instance_path);
    const Policy policy = io::load_policy(policy_path);
    const RobustReport rep = robust_report(inst, policy, scenario_cap);
    std::cout << "R=" << fmt12(rep.nominal) << "\n";
    std::cout << "R_hat=" << fmt12(rep.worst_case) << "\n";
    std::cout << "L=" << fmt12(rep.loss) << "\n";
    std::cout << "witness=" << io::to_json(rep.witness).dump() << "\n";
    return 0;
}

void write_generated(const Instance& inst, const io::Json& cert, const std::string& out) {
    io::save_instance(inst, out);
    io::save_json(cert, out + ".cert.json");
    std::cout << "wrote " << out << "\n";
}

int cmd_bench(const std::string& dir, double eps, const std::string& report_path,
              std::uint64_t policy_cap, std::uint64_t scenario_cap) {
    namespace fs = std::filesystem;
    std::vector<std::string> files;
    if (!dir.empty() && fs::exists(dir))
        for (const auto& entry : fs::directory_iterator(dir)) {
            if (!entry.is_regular_file()) continue;
            const std::string name = entry.path().filename().string();
            if (name.size() > 5 && name.substr(name.size() - 5) == ".json" &&
                name.find(".cert.json") == std::string::npos)
                files.push_back(entry.path().string());
        }
    std::sort(files.begin(), files.end());

    io::Json rows = io::Json::array();
    std::printf("%-32s %14s %14s %8s %6s %8s\n", "instance", "optimum", "approx", "ratio", "grid",
                "ms");
    for (const auto& file : files) {
        io::Json row;
        row["instance"] = fs::path(file).filename().string();
        const auto start = std::chrono::steady_clock::now();
        try {
            const Instance inst = io::load_instance(file);
            const auto opt = exact_optimum(inst, policy_cap, scenario_cap);
            const auto approx_res = approximate(inst, eps);
            row["optimum"] = opt.value;
            row["value"] = approx_res.value;
            if (opt.value > 0.0) row["ratio"] = approx_res.value / opt.value;
            else row["ratio"] = nullptr;
            row["grid_size"] = approx_res.report.grid_size;
        } catch (const Error& e) {
            row["error"] = e.what();
        }
        const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                            std::chrono::steady_clock::now() - start)
                            .count();
        row["millis"] = ms;
        if (row.contains("error")) {
            std::printf("%-32s %s\n", row["instance"].get<std::string>().c_str(),
                        row["error"].get<std::string>().c_str());
        } else {
            std::printf("%-32s %14s %14s %8s %6d %8lld\n",
                        row["instance"].get<std::string>().c_str(),
                        fmt12(row["optimum"].get<double>()).c_str(),
                        fmt12(row["value"].get<double>()).c_str(),
                        row["ratio"].is_null()
                            ? "-"
                            : fmt12(row["ratio"].get<double>()).substr(0, 8).c_str(),
                        row["grid_size"].get<int>(), static_cast<long long>(ms));
        }
        rows.push_back(std::move(row));
    }
    if (!report_path.empty()) io::save_json(rows, report_path);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Finite-horizon MDP toolkit for budgeted uncertainty: exact and "
                 "approximate robust policies, evaluators, and instance generators"};
    app.require_subcommand(1);

    std::string instance_path, policy_path, method = "exact", out_path, report_path;
    std::string graph_path, cnf_path, dir_path, policy_out, report_out;
    double eps = 0.5;
    std::uint64_t policy_cap = kDefaultPolicyCap, scenario_cap = kDefaultScenarioCap;

    auto* validate_cmd = app.add_subcommand("validate", "check a model file against every invariant");
    validate_cmd->add_option("instance", instance_path, "instance JSON file")->required();

    auto* solve_cmd = app.add_subcommand("solve", "compute a policy");
    solve_cmd->add_option("instance", instance_path)->required();
    solve_cmd->add_option("--method", method, "nominal | exact | approx")
        ->check(CLI::IsMember({"nominal", "exact", "approx"}));
    solve_cmd->add_option("--eps", eps, "approximation parameter");
    solve_cmd->add_option("--policy-out", policy_out, "write the policy JSON here");
    solve_cmd->add_option("--report-out", report_out, "write the solve report here");
    solve_cmd->add_option("--policy-cap", policy_cap);
    solve_cmd->add_option("--scenario-cap", scenario_cap);

    auto* eval_cmd = app.add_subcommand("eval", "nominal and worst-case value of a policy");
    eval_cmd->add_option("instance", instance_path)->required();
    eval_cmd->add_option("policy", policy_path)->required();
    eval_cmd->add_option("--scenario-cap", scenario_cap);

    auto* gen = app.add_subcommand("gen", "instance generators");
    gen->require_subcommand(1);

    std::vector<long long> items;
    long long target = 0;
    auto* g3p = gen->add_subcommand("three-partition", "number-partition hardness family");
    g3p->add_option("--b", items, "comma-separated item sizes (3n values)")
        ->required()
        ->delimiter(',');
    g3p->add_option("--B", target, "per-group sum")->required();
    g3p->add_option("--out", out_path)->required();

    auto* gdp = gen->add_subcommand("disjoint-paths", "disjoint-paths hardness family");
    gdp->add_option("--graph", graph_path, "layered graph JSON (or a DAG with 'vertices')")
        ->required();
    gdp->add_option("--eps", eps, "geometric weight parameter")->required();
    gdp->add_option("--out", out_path)->required();

    auto* gvc = gen->add_subcommand("maxmin-vc", "max-min vertex-cover hardness family");
    gvc->add_option("--graph", graph_path, "partitioned graph JSON")->required();
    gvc->add_option("--out", out_path)->required();

    auto* gsat = gen->add_subcommand("three-sat", "satisfiability hardness family");
    gsat->add_option("--cnf", cnf_path, "DIMACS cnf file")->required();
    gsat->add_option("--out", out_path)->required();

    RandomSpec rnd;
    auto* grand = gen->add_subcommand("random", "seeded random 2-stage instance");
    grand->add_option("--s1", rnd.s1_count, "middle states");
    grand->add_option("--s2", rnd.s2_count, "terminal states");
    grand->add_option("--actions", rnd.actions_per_state, "actions per middle state");
    grand->add_option("--reward-lo", rnd.reward_lo);
    grand->add_option("--reward-hi", rnd.reward_hi);
    grand->add_option("--alt-zero-prob", rnd.alt_zero_prob);
    grand->add_option("--alt-lo-frac", rnd.alt_lo_frac);
    grand->add_option("--alt-hi-frac", rnd.alt_hi_frac);
    grand->add_option("--seed", rnd.seed)->required();
    grand->add_option("--out", out_path)->required();

    auto* bench_cmd = app.add_subcommand("bench", "exact vs approx across an instance directory");
    bench_cmd->add_option("--dir", dir_path, "directory of instance JSON files")->required();
    bench_cmd->add_option("--eps", eps, "approximation parameter");
    bench_cmd->add_option("--report", report_path, "write the row array here");
    bench_cmd->add_option("--policy-cap", policy_cap);
    bench_cmd->add_option("--scenario-cap", scenario_cap);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (validate_cmd->parsed()) return cmd_validate(instance_path);
        if (solve_cmd->parsed())
            return cmd_solve(instance_path, method, eps, policy_out, report_out, policy_cap,
                             scenario_cap);
        if (eval_cmd->parsed()) return cmd_eval(instance_path, policy_path, scenario_cap);
        if (gen->parsed()) {
            if (g3p->parsed()) {
                const auto out = gen_3partition(items, target);
                write_generated(out.instance, io::certificate(out), out_path);
            } else if (gdp->parsed()) {
                const io::Json j = io::load_json(graph_path);
                const LayeredDigraph layered =
                    j.contains("layers") ? io::layered_from_json(j)
                                         : layerize(io::digraph_from_json(j), io::pairs_from_json(j));
                const auto out = gen_disjoint_paths(layered, eps);
                write_generated(out.instance, io::certificate(out), out_path);
            } else if (gvc->parsed()) {
                const auto out = gen_maxmin_vc(io::partitioned_from_json(io::load_json(graph_path)));
                write_generated(out.instance, io::certificate(out), out_path);
            } else if (gsat->parsed()) {
                const auto out = gen_3sat(io::load_dimacs(cnf_path));
                write_generated(out.instance, io::certificate(out), out_path);
            } else if (grand->parsed()) {
                write_generated(gen_random(rnd), io::certificate(rnd), out_path);
            }
            return 0;
        }
        if (bench_cmd->parsed())
            return cmd_bench(dir_path, eps, report_path, policy_cap, scenario_cap);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
