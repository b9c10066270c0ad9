#include "ldst/io.hpp"

#include <fstream>
#include <sstream>

namespace ldst::io {

namespace {

[[noreturn]] void fail(const std::string& what) { throw Error(Errc::bad_input, what); }

const Json& field(const Json& j, const char* key) {
    auto it = j.find(key);
    if (it == j.end()) fail(std::string("missing field '") + key + "'");
    return *it;
}

double number(const Json& j, const char* what) {
    if (!j.is_number()) fail(std::string(what) + " must be a number");
    return j.get<double>();
}

std::string text(const Json& j, const char* what) {
    if (!j.is_string()) fail(std::string(what) + " must be a string");
    return j.get<std::string>();
}

std::map<std::string, double> distribution_from_json(const Json& j) {
    if (!j.is_object()) fail("a distribution must be an object of state -> probability");
    std::map<std::string, double> dist;
    for (const auto& [k, v] : j.items()) dist[k] = number(v, "probability");
    return dist;
}

Json distribution_to_json(const std::map<std::string, double>& dist) {
    Json j = Json::object();
    for (const auto& [k, v] : dist) j[k] = v;
    return j;
}

} // namespace

Json to_json(const Instance& inst) {
    Json j;
    j["horizon"] = inst.horizon;
    j["states"] = Json::array();
    for (const auto& s : inst.states) j["states"].push_back({{"id", s.id}, {"stage", s.stage}});
    j["initial"] = inst.initial;
    j["actions"] = Json::array();
    Json action_rewards = Json::array();
    for (const auto& s : inst.states)
        for (const auto& a : s.actions) {
            Json ja;
            ja["state"] = s.id;
            ja["name"] = a.name;
            ja["nominal"] = distribution_to_json(a.nominal);
            if (!a.alternatives.empty()) {
                ja["alternatives"] = Json::array();
                for (const auto& alt : a.alternatives)
                    ja["alternatives"].push_back(distribution_to_json(alt));
            }
            j["actions"].push_back(std::move(ja));
            if (a.reward != 0.0)
                action_rewards.push_back({{"state", s.id}, {"name", a.name}, {"reward", a.reward}});
        }
    j["rewards"] = Json::array();
    for (const auto& s : inst.states) {
        if (s.stage != inst.horizon) continue;
        Json jr;
        jr["state"] = s.id;
        jr["nominal"] = s.reward;
        if (s.alt_reward) jr["alternative"] = *s.alt_reward;
        j["rewards"].push_back(std::move(jr));
    }
    j["uncertainty"] = {{"kind", inst.kind == UncertaintyKind::reward ? "reward" : "transition"},
                        {"budget", inst.budget}};
    if (!action_rewards.empty()) j["action_rewards"] = std::move(action_rewards);
    return j;
}

Instance instance_from_json(const Json& j) {
    if (!j.is_object()) fail("instance file must hold a JSON object");
    Instance inst;
    inst.horizon = static_cast<int>(number(field(j, "horizon"), "horizon"));
    inst.initial = text(field(j, "initial"), "initial");

    const Json& unc = field(j, "uncertainty");
    const std::string kind = text(field(unc, "kind"), "uncertainty kind");
    if (kind == "reward") inst.kind = UncertaintyKind::reward;
    else if (kind == "transition") inst.kind = UncertaintyKind::transition;
    else fail("uncertainty kind must be 'reward' or 'transition'");
    inst.budget = static_cast<int>(number(field(unc, "budget"), "budget"));

    std::map<std::string, std::size_t> index;
    const Json& states = field(j, "states");
    if (!states.is_array()) fail("'states' must be an array");
    for (const auto& js : states) {
        State s;
        s.id = text(field(js, "id"), "state id");
        s.stage = static_cast<int>(number(field(js, "stage"), "stage"));
        if (index.count(s.id)) fail("duplicate state '" + s.id + "' in states");
        index[s.id] = inst.states.size();
        inst.states.push_back(std::move(s));
    }

    const Json& actions = field(j, "actions");
    if (!actions.is_array()) fail("'actions' must be an array");
    for (const auto& ja : actions) {
        const std::string sid = text(field(ja, "state"), "action state");
        auto it = index.find(sid);
        if (it == index.end()) fail("action references unknown state '" + sid + "'");
        Action a;
        a.name = text(field(ja, "name"), "action name");
        a.nominal = distribution_from_json(field(ja, "nominal"));
        if (ja.contains("alternatives")) {
            const Json& alts = ja["alternatives"];
            if (!alts.is_array()) fail("'alternatives' must be an array of distributions");
            for (const auto& alt : alts) a.alternatives.push_back(distribution_from_json(alt));
        }
        inst.states[it->second].actions.push_back(std::move(a));
    }

    const Json& rewards = field(j, "rewards");
    if (!rewards.is_array()) fail("'rewards' must be an array");
    for (const auto& jr : rewards) {
        const std::string sid = text(field(jr, "state"), "reward state");
        auto it = index.find(sid);
        if (it == index.end()) fail("reward references unknown state '" + sid + "'");
        State& s = inst.states[it->second];
        s.reward = number(field(jr, "nominal"), "nominal reward");
        if (jr.contains("alternative")) s.alt_reward = number(jr["alternative"], "alternative reward");
    }

    if (j.contains("action_rewards")) {
        const Json& ar = j["action_rewards"];
        if (!ar.is_array()) fail("'action_rewards' must be an array");
        for (const auto& je : ar) {
            const std::string sid = text(field(je, "state"), "action-reward state");
            const std::string name = text(field(je, "name"), "action-reward name");
            auto it = index.find(sid);
            if (it == index.end()) fail("action reward references unknown state '" + sid + "'");
            bool found = false;
            for (auto& a : inst.states[it->second].actions)
                if (a.name == name) {
                    a.reward = number(field(je, "reward"), "action reward");
                    found = true;
                }
            if (!found) fail("action reward references unknown action '" + sid + "/" + name + "'");
        }
    }
    return inst;
}

Json to_json(const Policy& policy) {
    Json j;
    j["assignments"] = Json::object();
    for (const auto& [s, a] : policy.assignment) j["assignments"][s] = a;
    return j;
}

Policy policy_from_json(const Json& j) {
    Policy p;
    const Json& a = field(j, "assignments");
    if (!a.is_object()) fail("'assignments' must map states to actions");
    for (const auto& [k, v] : a.items()) p.assignment[k] = text(v, "assigned action");
    return p;
}

Json to_json(const Scenario& sc) {
    Json j;
    if (sc.kind == UncertaintyKind::reward) {
        j["kind"] = "reward";
        j["flips"] = sc.flipped;
    } else {
        j["kind"] = "transition";
        j["remaps"] = Json::array();
        for (const auto& r : sc.remapped)
            j["remaps"].push_back(
                {{"state", r.state}, {"action", r.action}, {"alternative", r.alternative}});
    }
    return j;
}

Json to_json(const RobustReport& rep) {
    Json j;
    j["nominal"] = rep.nominal;
    j["worst_case"] = rep.worst_case;
    j["loss"] = rep.loss;
    j["witness"] = to_json(rep.witness);
    return j;
}

Json to_json(const ApproxReport& rep) {
    Json j;
    j["epsilon"] = rep.epsilon;
    j["epsilon1"] = rep.epsilon1;
    j["epsilon2"] = rep.epsilon2;
    j["grid_size"] = rep.grid_size;
    j["alg1"] = {{"value", rep.alg1_value}, {"L", rep.alg1_L}, {"t_hat", rep.alg1_t_hat}};
    j["alg2"] = {{"value", rep.alg2_value}, {"L", rep.alg2_L}};
    j["chosen"] = rep.chosen;
    return j;
}

namespace {

std::vector<std::pair<std::string, std::string>> string_pairs(const Json& j, const char* what) {
    if (!j.is_array()) fail(std::string("'") + what + "' must be an array of [a, b] pairs");
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& e : j) {
        if (!e.is_array() || e.size() != 2) fail(std::string(what) + " entries must be pairs");
        out.emplace_back(text(e[0], what), text(e[1], what));
    }
    return out;
}

} // namespace

std::vector<std::pair<std::string, std::string>> pairs_from_json(const Json& j) {
    return string_pairs(field(j, "pairs"), "pairs");
}

Digraph digraph_from_json(const Json& j) {
    Digraph g;
    const Json& vs = field(j, "vertices");
    if (!vs.is_array()) fail("'vertices' must be an array");
    for (const auto& v : vs) g.vertices.push_back(text(v, "vertex"));
    g.arcs = string_pairs(field(j, "arcs"), "arcs");
    return g;
}

LayeredDigraph layered_from_json(const Json& j) {
    LayeredDigraph g;
    const Json& layers = field(j, "layers");
    if (!layers.is_array()) fail("'layers' must be an array of arrays");
    for (const auto& layer : layers) {
        if (!layer.is_array()) fail("each layer must be an array of vertex ids");
        std::vector<std::string> ids;
        for (const auto& v : layer) ids.push_back(text(v, "vertex"));
        g.layers.push_back(std::move(ids));
    }
    g.arcs = string_pairs(field(j, "arcs"), "arcs");
    g.pairs = string_pairs(field(j, "pairs"), "pairs");
    return g;
}

PartitionedGraph partitioned_from_json(const Json& j) {
    PartitionedGraph g;
    const Json& cells = field(j, "partition");
    if (!cells.is_object()) fail("'partition' must map \"i,j\" keys to vertex arrays");
    for (const auto& [key, verts] : cells.items()) {
        std::istringstream is(key);
        int i = 0, jj = 0;
        char comma = 0;
        if (!(is >> i >> comma >> jj) || comma != ',')
            fail("partition key '" + key + "' is not of the form \"i,j\"");
        if (!verts.is_array()) fail("partition cells must be arrays of vertex ids");
        std::vector<std::string> ids;
        for (const auto& v : verts) ids.push_back(text(v, "vertex"));
        g.cells[{i, jj}] = std::move(ids);
    }
    g.edges = string_pairs(field(j, "edges"), "edges");
    g.ell = static_cast<int>(number(field(j, "ell"), "ell"));
    return g;
}

Json to_json(const PartitionedGraph& g) {
    Json j;
    j["partition"] = Json::object();
    for (const auto& [cell, verts] : g.cells)
        j["partition"][std::to_string(cell.first) + "," + std::to_string(cell.second)] = verts;
    j["edges"] = Json::array();
    for (const auto& [u, v] : g.edges) j["edges"].push_back({u, v});
    j["ell"] = g.ell;
    return j;
}

CnfFormula parse_dimacs(std::istream& in) {
    CnfFormula f;
    std::string line;
    bool seen_problem = false;
    int declared_clauses = -1;
    std::vector<int> current;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == 'c') continue;
        if (line[0] == 'p') {
            std::istringstream is(line);
            std::string p, fmt;
            if (!(is >> p >> fmt >> f.num_vars >> declared_clauses) || fmt != "cnf")
                fail("malformed problem line: '" + line + "'");
            seen_problem = true;
            continue;
        }
        if (line[0] == '%') break; // some benchmark files end with '%'
        if (!seen_problem) fail("clause data before the 'p cnf' problem line");
        std::istringstream is(line);
        int lit = 0;
        while (is >> lit) {
            if (lit == 0) {
                f.clauses.push_back(current);
                current.clear();
            } else {
                current.push_back(lit);
            }
        }
        if (!is.eof()) fail("non-integer token in clause data: '" + line + "'");
    }
    if (!seen_problem) fail("missing 'p cnf' problem line");
    if (!current.empty()) fail("last clause is not terminated by 0");
    if (declared_clauses >= 0 && declared_clauses != static_cast<int>(f.clauses.size()))
        fail("problem line declares " + std::to_string(declared_clauses) + " clauses, found " +
             std::to_string(f.clauses.size()));
    return f;
}

CnfFormula load_dimacs(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail("cannot open '" + path + "'");
    return parse_dimacs(in);
}

Json certificate(const ThreePartitionOutput& out) {
    return Json{{"family", "three-partition"},
                {"n", out.n},
                {"B", out.target},
                {"yes_value", out.yes_value}};
}

Json certificate(const DisjointPathsOutput& out) {
    return Json{{"family", "disjoint-paths"}, {"ell", out.ell}, {"eps", out.eps}, {"yes_value", 1.0}};
}

Json certificate(const MaxMinVcOutput& out) {
    Json j{{"family", "maxmin-vc"},
           {"theta", out.theta},
           {"epsilon", out.epsilon},
           {"m_bar", out.m_bar},
           {"cross_per_pair", out.cross_per_pair},
           {"selected_edges", out.selected_edges},
           {"budget", out.budget},
           {"ell", out.padded.ell}};
    j["padded"] = to_json(out.padded);
    return j;
}

Json certificate(const ThreeSatOutput& out) {
    return Json{{"family", "three-sat"},
                {"num_vars", out.num_vars},
                {"num_clauses", out.num_clauses}};
}

Json certificate(const RandomSpec& spec) {
    return Json{{"family", "random"},
                {"seed", spec.seed},
                {"s1", spec.s1_count},
                {"s2", spec.s2_count},
                {"actions", spec.actions_per_state}};
}

Json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail("cannot open '" + path + "'");
    try {
        return Json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        fail("parse error in '" + path + "': " + e.what());
    }
}

void save_json(const Json& j, const std::string& path) {
    std::ofstream out(path);
    if (!out) fail("cannot write '" + path + "'");
    out << j.dump(2) << '\n';
}

Instance load_instance(const std::string& path) { return instance_from_json(load_json(path)); }
void save_instance(const Instance& inst, const std::string& path) { save_json(to_json(inst), path); }
Policy load_policy(const std::string& path) { return policy_from_json(load_json(path)); }
void save_policy(const Policy& policy, const std::string& path) { save_json(to_json(policy), path); }

} // namespace ldst::io
