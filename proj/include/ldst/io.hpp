#pragma once

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "ldst/approx.hpp"
#include "ldst/model.hpp"
#include "ldst/reductions.hpp"
#include "ldst/robust.hpp"

namespace ldst::io {

/// Insertion-ordered JSON keeps serialized files stable byte-for-byte.
using Json = nlohmann::ordered_json;

Json to_json(const Instance& instance);
Instance instance_from_json(const Json& j);
Instance load_instance(const std::string& path);
void save_instance(const Instance& instance, const std::string& path);

Json to_json(const Policy& policy);
Policy policy_from_json(const Json& j);
Policy load_policy(const std::string& path);
void save_policy(const Policy& policy, const std::string& path);

Json to_json(const Scenario& scenario);
Json to_json(const RobustReport& report);
Json to_json(const ApproxReport& report);

/// Graph inputs for the generators.
std::vector<std::pair<std::string, std::string>> pairs_from_json(const Json& j);
Digraph digraph_from_json(const Json& j);             // {"vertices", "arcs", "pairs"}
LayeredDigraph layered_from_json(const Json& j);      // {"layers", "arcs", "pairs"}
PartitionedGraph partitioned_from_json(const Json& j); // {"partition", "edges", "ell"}
Json to_json(const PartitionedGraph& graph);

/// DIMACS cnf: comment lines 'c', problem line "p cnf <vars> <clauses>",
/// clauses as whitespace-separated literals terminated by 0.
CnfFormula parse_dimacs(std::istream& in);
CnfFormula load_dimacs(const std::string& path);

/// Self-check sidecars the generators emit next to each instance.
Json certificate(const ThreePartitionOutput& out);
Json certificate(const DisjointPathsOutput& out);
Json certificate(const MaxMinVcOutput& out);
Json certificate(const ThreeSatOutput& out);
Json certificate(const RandomSpec& spec);

/// Throws Error(bad_input) with the parse location on malformed files.
Json load_json(const std::string& path);
void save_json(const Json& j, const std::string& path);

} // namespace ldst::io
