#include "ldst/reductions.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

namespace ldst {

namespace {

std::string pad_index(long long i, long long max_value) {
    std::string digits = std::to_string(max_value);
    std::string s = std::to_string(i);
    if (s.size() < digits.size()) s.insert(0, digits.size() - s.size(), '0');
    return s;
}

/// Assembles the hardness constructions: states are declared with arbitrary
/// forward arcs, then build() assigns stages by longest path from the initial
/// state, pins terminals to the final stage, and pads every arc that skips
/// stages with a chain of pass-through states ("via_<from>_<to>_<stage>"),
/// each carrying a single certain action.
class StagedBuilder {
  public:
    void initial(const std::string& id) {
        declare(id, false);
        initial_ = id;
    }
    void state(const std::string& id) { declare(id, false); }
    void terminal(const std::string& id, double reward, std::optional<double> alt = {}) {
        declare(id, true);
        rewards_[id] = {reward, alt};
    }
    void action(const std::string& state, const std::string& name,
                std::map<std::string, double> dist) {
        Act a;
        a.name = name;
        a.dist = std::move(dist);
        acts_[state].push_back(std::move(a));
    }
    void uncertain(const std::string& state, const std::string& name, const std::string& nominal,
                   std::vector<std::string> alts) {
        Act a;
        a.name = name;
        a.dist[nominal] = 1.0;
        a.alt_targets = std::move(alts);
        acts_[state].push_back(std::move(a));
    }

    Instance build(UncertaintyKind kind, int budget) {
        for (const auto& [sid, acts] : acts_)
            for (const auto& a : acts) {
                for (const auto& [to, p] : a.dist) require_declared(sid, to, p);
                for (const auto& to : a.alt_targets) require_declared(sid, to, 1.0);
            }
        for (const auto& [sid, term] : kind_)
            if (!term && acts_[sid].empty())
                throw Error(Errc::bad_input, "construction state '" + sid + "' has no actions");

        const auto depth = longest_path_depths();
        int max_nonterm = 0;
        for (const auto& [sid, d] : depth)
            if (!kind_.at(sid)) max_nonterm = std::max(max_nonterm, d);
        const int horizon = max_nonterm + 1;

        Instance inst;
        inst.horizon = horizon;
        inst.initial = initial_;
        inst.kind = kind;
        inst.budget = budget;

        std::map<std::string, State> vias;
        auto route = [&](const std::string& from, const std::string& to) {
            const int from_depth = depth.at(from);
            const int to_stage = kind_.at(to) ? horizon : depth.at(to);
            std::string target = to;
            // Chains are keyed by (from, to); actions sharing both endpoints
            // reuse the same corridor.
            for (int stage = to_stage - 1; stage > from_depth; --stage) {
                const std::string vid = "via_" + from + "_" + to + "_" + std::to_string(stage);
                auto it = vias.find(vid);
                if (it == vias.end()) {
                    State v;
                    v.id = vid;
                    v.stage = stage;
                    Action go;
                    go.name = "go";
                    go.nominal[target] = 1.0;
                    v.actions.push_back(std::move(go));
                    vias.emplace(vid, std::move(v));
                }
                target = vid;
            }
            return target;
        };

        for (const auto& [sid, term] : kind_) {
            State st;
            st.id = sid;
            st.stage = term ? horizon : depth.at(sid);
            if (term) {
                st.reward = rewards_.at(sid).first;
                st.alt_reward = rewards_.at(sid).second;
            }
            for (const auto& a : acts_[sid]) {
                Action act;
                act.name = a.name;
                for (const auto& [to, p] : a.dist) act.nominal[route(sid, to)] += p;
                for (const auto& to : a.alt_targets) {
                    std::map<std::string, double> alt;
                    alt[route(sid, to)] = 1.0;
                    act.alternatives.push_back(std::move(alt));
                }
                st.actions.push_back(std::move(act));
            }
            inst.states.push_back(std::move(st));
        }
        for (auto& [vid, st] : vias) inst.states.push_back(std::move(st));
        return inst;
    }

  private:
    struct Act {
        std::string name;
        std::map<std::string, double> dist;
        std::vector<std::string> alt_targets;
    };

    void declare(const std::string& id, bool terminal) {
        if (!kind_.emplace(id, terminal).second)
            throw Error(Errc::bad_input, "construction declares state '" + id + "' twice");
    }
    void require_declared(const std::string& from, const std::string& to, double p) {
        if (p < 0.0)
            throw Error(Errc::bad_input, "construction uses a negative probability at '" + from + "'");
        if (!kind_.count(to))
            throw Error(Errc::bad_input,
                        "construction arc " + from + " -> " + to + " targets an undeclared state");
    }

    /// Longest path from the initial state over the union of nominal and
    /// alternative arcs; alternative outcomes need next-stage placement too.
    std::map<std::string, int> longest_path_depths() const {
        std::map<std::string, std::vector<std::string>> succ;
        std::map<std::string, int> indeg;
        for (const auto& [sid, term] : kind_) {
            (void)term;
            indeg.emplace(sid, 0);
        }
        auto arc = [&](const std::string& u, const std::string& v) {
            succ[u].push_back(v);
            ++indeg[v];
        };
        for (const auto& [sid, acts] : acts_)
            for (const auto& a : acts) {
                for (const auto& [to, p] : a.dist) {
                    (void)p;
                    arc(sid, to);
                }
                for (const auto& to : a.alt_targets) arc(sid, to);
            }

        std::map<std::string, int> depth;
        std::vector<std::string> queue;
        for (const auto& [sid, d] : indeg)
            if (d == 0) queue.push_back(sid);
        if (queue.size() != 1 || queue.front() != initial_)
            throw Error(Errc::bad_input, "construction has unreachable or multiple root states");
        depth[initial_] = 0;
        std::size_t head = 0;
        while (head < queue.size()) {
            const std::string u = queue[head++];
            for (const auto& v : succ[u]) {
                depth[v] = std::max(depth.count(v) ? depth[v] : 0, depth[u] + 1);
                if (--indeg[v] == 0) queue.push_back(v);
            }
        }
        if (queue.size() != kind_.size())
            throw Error(Errc::bad_input, "construction graph is cyclic or disconnected");
        return depth;
    }

    std::string initial_;
    std::map<std::string, bool> kind_; // id -> is terminal
    std::map<std::string, std::pair<double, std::optional<double>>> rewards_;
    std::map<std::string, std::vector<Act>> acts_;
};

} // namespace

ThreePartitionOutput gen_3partition(const std::vector<long long>& b, long long B) {
    if (b.empty() || b.size() % 3 != 0)
        throw Error(Errc::bad_input, "item count must be a positive multiple of 3");
    const int n = static_cast<int>(b.size() / 3);
    long long sum = 0;
    for (long long v : b) {
        if (v <= 0) throw Error(Errc::bad_input, "items must be positive");
        sum += v;
    }
    if (B <= 0 || sum != static_cast<long long>(n) * B)
        throw Error(Errc::bad_input, "items must sum to n*B (got " + std::to_string(sum) + ")");

    ThreePartitionOutput out;
    out.n = n;
    out.target = B;
    out.yes_value = 1.0 - 1.0 / static_cast<double>(n);

    Instance& inst = out.instance;
    inst.horizon = 2;
    inst.initial = "s0";
    inst.kind = UncertaintyKind::reward;
    inst.budget = 1;

    State s0;
    s0.id = "s0";
    s0.stage = 0;
    Action a0;
    a0.name = "a0";
    const double denom = static_cast<double>(n) * static_cast<double>(B);
    for (std::size_t i = 0; i < b.size(); ++i)
        a0.nominal["s" + pad_index(static_cast<long long>(i) + 1, static_cast<long long>(b.size()))] =
            static_cast<double>(b[i]) / denom;
    s0.actions.push_back(std::move(a0));
    inst.states.push_back(std::move(s0));

    for (std::size_t i = 0; i < b.size(); ++i) {
        State s;
        s.id = "s" + pad_index(static_cast<long long>(i) + 1, static_cast<long long>(b.size()));
        s.stage = 1;
        for (int j = 1; j <= n; ++j) {
            Action a;
            a.name = "a" + pad_index(j, n);
            a.nominal["t" + pad_index(j, n)] = 1.0;
            s.actions.push_back(std::move(a));
        }
        inst.states.push_back(std::move(s));
    }
    for (int j = 1; j <= n; ++j) {
        State t;
        t.id = "t" + pad_index(j, n);
        t.stage = 2;
        t.reward = 1.0;
        t.alt_reward = 0.0;
        inst.states.push_back(std::move(t));
    }
    return out;
}

LayeredDigraph layerize(const Digraph& dag,
                        const std::vector<std::pair<std::string, std::string>>& pairs) {
    if (pairs.empty()) throw Error(Errc::bad_input, "at least one source-sink pair is required");
    std::set<std::string> vertices(dag.vertices.begin(), dag.vertices.end());
    std::set<std::string> sources, sinks;
    for (const auto& [s, t] : pairs) {
        if (!vertices.count(s) || !vertices.count(t))
            throw Error(Errc::bad_input, "pair references an unknown vertex");
        if (!sources.insert(s).second || !sinks.insert(t).second)
            throw Error(Errc::bad_input, "sources and sinks must be distinct across pairs");
    }
    for (const auto& s : sources)
        if (sinks.count(s)) throw Error(Errc::bad_input, "a vertex cannot be both source and sink");

    std::map<std::string, std::vector<std::string>> succ, pred;
    for (const auto& [u, v] : dag.arcs) {
        if (!vertices.count(u) || !vertices.count(v))
            throw Error(Errc::bad_input, "arc references an unknown vertex");
        if (sinks.count(u)) throw Error(Errc::bad_input, "sink '" + u + "' has an outgoing arc");
        if (sources.count(v)) throw Error(Errc::bad_input, "source '" + v + "' has an incoming arc");
        succ[u].push_back(v);
        pred[v].push_back(u);
    }

    // Keep only vertices on some source-to-sink path.
    auto closure = [&](const std::set<std::string>& seed,
                       const std::map<std::string, std::vector<std::string>>& next) {
        std::set<std::string> seen = seed;
        std::vector<std::string> stack(seed.begin(), seed.end());
        while (!stack.empty()) {
            const std::string u = stack.back();
            stack.pop_back();
            auto it = next.find(u);
            if (it == next.end()) continue;
            for (const auto& v : it->second)
                if (seen.insert(v).second) stack.push_back(v);
        }
        return seen;
    };
    const auto fwd = closure(sources, succ);
    const auto bwd = closure(sinks, pred);
    std::set<std::string> kept;
    for (const auto& v : vertices)
        if (fwd.count(v) && bwd.count(v)) kept.insert(v);
    for (const auto& s : sources)
        if (!kept.count(s))
            throw Error(Errc::bad_input, "source '" + s + "' cannot reach any sink");
    for (const auto& t : sinks)
        if (!kept.count(t))
            throw Error(Errc::bad_input, "sink '" + t + "' is unreachable from the sources");

    // Longest distance from the source layer over the kept subgraph.
    std::map<std::string, int> indeg;
    for (const auto& v : kept) indeg[v] = 0;
    for (const auto& [u, vs] : succ) {
        if (!kept.count(u)) continue;
        for (const auto& v : vs)
            if (kept.count(v)) ++indeg[v];
    }
    std::vector<std::string> queue;
    for (const auto& [v, d] : indeg)
        if (d == 0) queue.push_back(v);
    std::map<std::string, int> depth;
    for (const auto& v : queue) {
        if (!sources.count(v))
            throw Error(Errc::bad_input, "vertex '" + v + "' has no incoming arcs but is not a source");
        depth[v] = 1;
    }
    std::size_t head = 0;
    while (head < queue.size()) {
        const std::string u = queue[head++];
        for (const auto& v : succ[u]) {
            if (!kept.count(v)) continue;
            depth[v] = std::max(depth.count(v) ? depth[v] : 0, depth[u] + 1);
            if (--indeg[v] == 0) queue.push_back(v);
        }
    }
    if (queue.size() != kept.size()) throw Error(Errc::bad_input, "input graph contains a cycle");

    int last = 2;
    for (const auto& [v, d] : depth)
        if (!sinks.count(v)) last = std::max(last, d + 1);
    for (const auto& t : sinks) depth[t] = last;

    LayeredDigraph out;
    out.layers.assign(static_cast<std::size_t>(last), {});
    for (const auto& [v, d] : depth) out.layers[static_cast<std::size_t>(d - 1)].push_back(v);
    for (auto& layer : out.layers) std::sort(layer.begin(), layer.end());
    out.pairs = pairs;
    for (const auto& [u, vs] : succ) {
        if (!kept.count(u)) continue;
        for (const auto& v : vs) {
            if (!kept.count(v)) continue;
            std::string at = u;
            for (int stage = depth[u] + 1; stage < depth[v]; ++stage) {
                const std::string vid = "via_" + u + "_" + v + "_" + std::to_string(stage);
                out.layers[static_cast<std::size_t>(stage - 1)].push_back(vid);
                out.arcs.emplace_back(at, vid);
                at = vid;
            }
            out.arcs.emplace_back(at, v);
        }
    }
    return out;
}

DisjointPathsOutput gen_disjoint_paths(const LayeredDigraph& graph, double eps) {
    if (!(eps > 0.0 && eps < 1.0)) throw Error(Errc::bad_input, "eps must lie in (0,1)");
    if (graph.layers.size() < 2) throw Error(Errc::bad_input, "graph needs at least two layers");
    const int ell = static_cast<int>(graph.pairs.size());
    if (ell < 1) throw Error(Errc::bad_input, "at least one source-sink pair is required");

    std::map<std::string, int> layer_of;
    for (std::size_t layer = 0; layer < graph.layers.size(); ++layer)
        for (const auto& v : graph.layers[layer]) {
            if (v == "s0") throw Error(Errc::bad_input, "vertex id 's0' is reserved");
            if (!layer_of.emplace(v, static_cast<int>(layer) + 1).second)
                throw Error(Errc::bad_input, "vertex '" + v + "' appears in two layers");
        }
    const int last = static_cast<int>(graph.layers.size());
    std::set<std::string> sources, sinks;
    std::map<std::string, int> sink_index;
    for (int i = 0; i < ell; ++i) {
        const auto& [s, t] = graph.pairs[static_cast<std::size_t>(i)];
        if (!layer_of.count(s) || layer_of[s] != 1)
            throw Error(Errc::bad_input, "source '" + s + "' is not in the first layer");
        if (!layer_of.count(t) || layer_of[t] != last)
            throw Error(Errc::bad_input, "sink '" + t + "' is not in the last layer");
        sources.insert(s);
        sinks.insert(t);
        sink_index[t] = i + 1;
    }
    if (sources.size() != graph.layers.front().size() ||
        static_cast<int>(sources.size()) != ell)
        throw Error(Errc::bad_input, "the first layer must consist exactly of the sources");
    if (sinks.size() != graph.layers.back().size() || static_cast<int>(sinks.size()) != ell)
        throw Error(Errc::bad_input, "the last layer must consist exactly of the sinks");

    std::map<std::string, std::vector<std::string>> out_arcs;
    for (const auto& [u, v] : graph.arcs) {
        if (!layer_of.count(u) || !layer_of.count(v))
            throw Error(Errc::bad_input, "arc references an unknown vertex");
        if (layer_of[v] != layer_of[u] + 1)
            throw Error(Errc::bad_input, "arc " + u + " -> " + v + " skips a layer");
        auto& outs = out_arcs[u];
        if (std::find(outs.begin(), outs.end(), v) != outs.end())
            throw Error(Errc::bad_input, "duplicate arc " + u + " -> " + v);
        outs.push_back(v);
    }
    for (const auto& [v, layer] : layer_of)
        if (layer < last && out_arcs[v].empty())
            throw Error(Errc::bad_input, "vertex '" + v + "' has no outgoing arc");

    double delta = 0.0;
    for (int i = 1; i <= ell; ++i) delta += std::pow(eps, i);

    DisjointPathsOutput out;
    out.ell = ell;
    out.eps = eps;
    Instance& inst = out.instance;
    inst.horizon = last;
    inst.initial = "s0";
    inst.kind = UncertaintyKind::reward;
    inst.budget = ell - 1;

    State s0;
    s0.id = "s0";
    s0.stage = 0;
    Action a0;
    a0.name = "a0";
    for (int i = 0; i < ell; ++i)
        a0.nominal[graph.pairs[static_cast<std::size_t>(i)].first] = std::pow(eps, i + 1) / delta;
    s0.actions.push_back(std::move(a0));
    inst.states.push_back(std::move(s0));

    for (const auto& [v, layer] : layer_of) {
        State st;
        st.id = v;
        st.stage = layer;
        if (layer == last) {
            st.reward = delta / std::pow(eps, sink_index.at(v));
            st.alt_reward = 0.0;
        } else {
            for (const auto& w : out_arcs[v]) {
                Action a;
                a.name = "a_" + w;
                a.nominal[w] = 1.0;
                st.actions.push_back(std::move(a));
            }
        }
        inst.states.push_back(std::move(st));
    }
    return out;
}

MaxMinVcOutput gen_maxmin_vc(const PartitionedGraph& graph) {
    if (graph.ell < 1) throw Error(Errc::bad_input, "cover threshold must be at least 1");
    int ni = 0, nj = 0;
    for (const auto& [cell, verts] : graph.cells) {
        (void)verts;
        ni = std::max(ni, cell.first);
        nj = std::max(nj, cell.second);
        if (cell.first < 1 || cell.second < 1)
            throw Error(Errc::bad_input, "cell indices are 1-based");
    }
    if (ni < 1 || nj < 1) throw Error(Errc::bad_input, "partition is empty");
    std::map<std::string, std::pair<int, int>> cell_of;
    for (int i = 1; i <= ni; ++i)
        for (int j = 1; j <= nj; ++j) {
            auto it = graph.cells.find({i, j});
            if (it == graph.cells.end())
                throw Error(Errc::bad_input, "missing cell (" + std::to_string(i) + "," +
                                                 std::to_string(j) + ")");
            for (const auto& v : it->second)
                if (!cell_of.emplace(v, it->first).second)
                    throw Error(Errc::bad_input, "vertex '" + v + "' appears in two cells");
        }

    MaxMinVcOutput out;
    out.padded.ell = graph.ell;
    out.padded.cells = graph.cells;

    // Same-i cross-j edges never appear in a selected subgraph; drop them.
    std::vector<std::pair<std::string, std::string>> edges;
    for (const auto& [u, v] : graph.edges) {
        auto iu = cell_of.find(u), iv = cell_of.find(v);
        if (iu == cell_of.end() || iv == cell_of.end())
            throw Error(Errc::bad_input, "edge references an unknown vertex");
        if (u == v) throw Error(Errc::bad_input, "self-loops are not allowed");
        if (iu->second.first == iv->second.first && iu->second.second != iv->second.second) continue;
        edges.emplace_back(u, v);
    }

    auto count_intra = [&](int i, int j) {
        long long cnt = 0;
        for (const auto& [u, v] : edges)
            if (cell_of.at(u) == std::make_pair(i, j) && cell_of.at(v) == std::make_pair(i, j)) ++cnt;
        return cnt;
    };
    auto count_cross = [&](std::pair<int, int> a, std::pair<int, int> b) {
        long long cnt = 0;
        for (const auto& [u, v] : edges) {
            const auto cu = cell_of.at(u), cv = cell_of.at(v);
            if ((cu == a && cv == b) || (cu == b && cv == a)) ++cnt;
        }
        return cnt;
    };

    long long m1 = 0, m2 = 0;
    for (int i = 1; i <= ni; ++i)
        for (int j = 1; j <= nj; ++j) m1 = std::max(m1, count_intra(i, j));
    for (int i = 1; i <= ni; ++i)
        for (int i2 = i + 1; i2 <= ni; ++i2)
            for (int j = 1; j <= nj; ++j)
                for (int j2 = 1; j2 <= nj; ++j2) m2 = std::max(m2, count_cross({i, j}, {i2, j2}));

    // Uniform padding. With a single row block there are no cross edges and
    // the spare third of each action's mass routes straight to the good
    // terminal; with several row blocks the per-pair cross count c is sized
    // so each cell sees exactly m_bar cross edges.
    long long c = 0, m_bar = 0;
    if (ni == 1) {
        m_bar = std::max<long long>(m1, 1);
    } else {
        const long long pairs_per_cell = static_cast<long long>(ni - 1) * nj;
        c = std::max({m2, (m1 + pairs_per_cell - 1) / pairs_per_cell, 1LL});
        m_bar = pairs_per_cell * c;
    }

    // Two dummy vertices per cell carry the padding edges.
    std::map<std::pair<int, int>, std::pair<std::string, std::string>> dummies;
    for (int i = 1; i <= ni; ++i)
        for (int j = 1; j <= nj; ++j) {
            const std::string suffix = std::to_string(i) + "_" + std::to_string(j);
            std::pair<std::string, std::string> d = {"dum1_" + suffix, "dum2_" + suffix};
            for (const auto& v : {d.first, d.second}) {
                if (cell_of.count(v))
                    throw Error(Errc::bad_input, "vertex id '" + v + "' is reserved for padding");
                cell_of.emplace(v, std::make_pair(i, j));
                out.padded.cells[{i, j}].push_back(v);
            }
            dummies[{i, j}] = std::move(d);
        }
    for (int i = 1; i <= ni; ++i)
        for (int j = 1; j <= nj; ++j)
            for (long long extra = count_intra(i, j); extra < m_bar; ++extra)
                edges.emplace_back(dummies[{i, j}].first, dummies[{i, j}].second);
    if (ni > 1)
        for (int i = 1; i <= ni; ++i)
            for (int i2 = i + 1; i2 <= ni; ++i2)
                for (int j = 1; j <= nj; ++j)
                    for (int j2 = 1; j2 <= nj; ++j2)
                        for (long long extra = count_cross({i, j}, {i2, j2}); extra < c; ++extra)
                            edges.emplace_back(dummies[{i, j}].first, dummies[{i2, j2}].first);
    out.padded.edges = edges;

    const long long num_vertices = static_cast<long long>(cell_of.size());
    const double eps = 2.0 * static_cast<double>(m_bar) /
                       (2.0 * static_cast<double>(m_bar) * ni + static_cast<double>(num_vertices));
    const long long m = ni == 1 ? m_bar
                                : static_cast<long long>(ni) * m_bar +
                                      static_cast<long long>(ni) * (ni - 1) / 2 * c;
    const int budget = static_cast<int>(m) + graph.ell - 1;
    if (budget > static_cast<int>(edges.size()) + num_vertices)
        throw Error(Errc::bad_input, "cover threshold makes the budget exceed the deviation sites");

    out.epsilon = eps;
    out.m_bar = m_bar;
    out.cross_per_pair = c;
    out.selected_edges = m;
    out.budget = budget;
    out.theta = 1.0 - static_cast<double>(graph.ell - 1) * (1.0 - eps * ni) /
                          static_cast<double>(num_vertices) -
                static_cast<double>(m) * 2.0 * eps / (3.0 * static_cast<double>(m_bar));

    StagedBuilder b;
    b.initial("s0");
    b.terminal("t0", 0.0);
    b.terminal("t1", 1.0);
    for (int i = 1; i <= ni; ++i) b.state("si_" + std::to_string(i));
    for (const auto& [v, cell] : cell_of) {
        (void)cell;
        b.state("sv_" + v);
    }
    for (std::size_t e = 0; e < edges.size(); ++e)
        b.state("se_" + pad_index(static_cast<long long>(e), static_cast<long long>(edges.size())));

    std::map<std::string, double> start;
    for (int i = 1; i <= ni; ++i) start["si_" + std::to_string(i)] = eps;
    for (const auto& [v, cell] : cell_of) {
        (void)cell;
        start["sv_" + v] = (1.0 - eps * ni) / static_cast<double>(num_vertices);
    }
    b.action("s0", "a0", std::move(start));

    for (int i = 1; i <= ni; ++i) {
        for (int j = 1; j <= nj; ++j) {
            std::map<std::string, double> dist;
            for (std::size_t e = 0; e < edges.size(); ++e) {
                const auto cu = cell_of.at(edges[e].first);
                const auto cv = cell_of.at(edges[e].second);
                const std::string se =
                    "se_" + pad_index(static_cast<long long>(e), static_cast<long long>(edges.size()));
                if (cu == std::make_pair(i, j) && cv == std::make_pair(i, j))
                    dist[se] = 2.0 / (3.0 * static_cast<double>(m_bar));
                else if (cu == std::make_pair(i, j) || cv == std::make_pair(i, j))
                    dist[se] = 1.0 / (3.0 * static_cast<double>(m_bar));
            }
            if (ni == 1) dist["t1"] = 1.0 / 3.0;
            b.action("si_" + std::to_string(i), "a" + pad_index(j, nj), std::move(dist));
        }
    }
    for (std::size_t e = 0; e < edges.size(); ++e)
        b.uncertain("se_" + pad_index(static_cast<long long>(e), static_cast<long long>(edges.size())),
                    "a0", "t1", {"sv_" + edges[e].first, "sv_" + edges[e].second});
    for (const auto& [v, cell] : cell_of) {
        (void)cell;
        b.uncertain("sv_" + v, "a0", "t1", {"t0"});
    }
    out.instance = b.build(UncertaintyKind::transition, budget);
    return out;
}

namespace {

std::string literal_name(int lit) {
    return lit > 0 ? "x" + std::to_string(lit) : "nx" + std::to_string(-lit);
}

} // namespace

ThreeSatOutput gen_3sat(const CnfFormula& formula) {
    if (formula.num_vars < 1) throw Error(Errc::bad_input, "formula needs at least one variable");
    if (formula.clauses.empty()) throw Error(Errc::bad_input, "formula needs at least one clause");
    for (const auto& clause : formula.clauses) {
        if (clause.size() != 3)
            throw Error(Errc::bad_input, "every clause must have exactly 3 literals");
        for (int lit : clause)
            if (lit == 0 || std::abs(lit) > formula.num_vars)
                throw Error(Errc::bad_input, "literal out of range: " + std::to_string(lit));
    }
    const int n = formula.num_vars;
    const int m = static_cast<int>(formula.clauses.size());

    ThreeSatOutput out;
    out.num_vars = n;
    out.num_clauses = m;

    StagedBuilder b;
    b.initial("s0");
    b.terminal("t1", 1.0);
    b.terminal("t2", 0.0);
    for (int i = 1; i <= m + 1; ++i) b.state("sc_" + std::to_string(i));
    for (int j = 1; j <= n + 1; ++j) b.state("sv_" + std::to_string(j));
    for (int j = 1; j <= n; ++j) {
        b.state("sl_" + literal_name(j));
        b.state("sl_" + literal_name(-j));
    }
    b.state("d");

    b.action("s0", "a", {{"sc_1", 0.5}, {"sv_1", 0.5}});
    for (int i = 1; i <= m; ++i) {
        std::set<int> lits(formula.clauses[static_cast<std::size_t>(i - 1)].begin(),
                           formula.clauses[static_cast<std::size_t>(i - 1)].end());
        for (int lit : lits)
            b.uncertain("sc_" + std::to_string(i), "a_" + literal_name(lit),
                        "sc_" + std::to_string(i + 1), {"sl_" + literal_name(lit)});
    }
    for (int j = 1; j <= n; ++j) {
        b.action("sv_" + std::to_string(j), "a_" + literal_name(j), {{"sl_" + literal_name(j), 1.0}});
        b.action("sv_" + std::to_string(j), "a_" + literal_name(-j),
                 {{"sl_" + literal_name(-j), 1.0}});
        for (int sign : {j, -j}) {
            b.uncertain("sl_" + literal_name(sign), "a", "sv_" + std::to_string(j + 1), {"t2"});
            b.action("sl_" + literal_name(sign), "a_prime", {{"d", 1.0}});
        }
    }
    b.uncertain("sc_" + std::to_string(m + 1), "a", "t1", {"d"});
    b.uncertain("sv_" + std::to_string(n + 1), "a", "t1", {"d"});
    b.uncertain("d", "a", "t1", {"t2"});

    out.instance = b.build(UncertaintyKind::transition, 2);
    return out;
}

Instance gen_random(const RandomSpec& spec) {
    if (spec.s1_count < 1 || spec.s2_count < 1 || spec.actions_per_state < 1)
        throw Error(Errc::bad_input, "sizes must be positive");
    if (!(spec.reward_lo >= 0.0 && spec.reward_hi >= spec.reward_lo))
        throw Error(Errc::bad_input, "reward range must satisfy 0 <= lo <= hi");
    if (!(spec.alt_lo_frac >= 0.0 && spec.alt_hi_frac <= 1.0 && spec.alt_lo_frac <= spec.alt_hi_frac))
        throw Error(Errc::bad_input, "alternative fraction range must lie inside [0,1]");

    std::mt19937_64 rng(spec.seed);
    // Uniform in [0,1) built from the top 53 bits; identical across platforms.
    auto uniform = [&rng]() { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
    auto simplex = [&](int size) {
        std::vector<double> w(static_cast<std::size_t>(size));
        double sum = 0.0;
        for (auto& v : w) {
            v = uniform() + 1e-9;
            sum += v;
        }
        for (auto& v : w) v /= sum;
        return w;
    };

    Instance inst;
    inst.horizon = 2;
    inst.initial = "s0";
    inst.kind = UncertaintyKind::reward;
    inst.budget = 1;

    std::vector<std::string> mids, terms;
    for (int i = 1; i <= spec.s1_count; ++i) mids.push_back("m" + pad_index(i, spec.s1_count));
    for (int j = 1; j <= spec.s2_count; ++j) terms.push_back("t" + pad_index(j, spec.s2_count));

    State s0;
    s0.id = "s0";
    s0.stage = 0;
    Action a0;
    a0.name = "a0";
    const auto w0 = simplex(spec.s1_count);
    for (int i = 0; i < spec.s1_count; ++i) a0.nominal[mids[static_cast<std::size_t>(i)]] = w0[static_cast<std::size_t>(i)];
    s0.actions.push_back(std::move(a0));
    inst.states.push_back(std::move(s0));

    for (int i = 0; i < spec.s1_count; ++i) {
        State s;
        s.id = mids[static_cast<std::size_t>(i)];
        s.stage = 1;
        for (int a = 1; a <= spec.actions_per_state; ++a) {
            Action act;
            act.name = "a" + pad_index(a, spec.actions_per_state);
            const auto w = simplex(spec.s2_count);
            for (int j = 0; j < spec.s2_count; ++j)
                act.nominal[terms[static_cast<std::size_t>(j)]] = w[static_cast<std::size_t>(j)];
            s.actions.push_back(std::move(act));
        }
        inst.states.push_back(std::move(s));
    }
    for (int j = 0; j < spec.s2_count; ++j) {
        State t;
        t.id = terms[static_cast<std::size_t>(j)];
        t.stage = 2;
        t.reward = spec.reward_lo + uniform() * (spec.reward_hi - spec.reward_lo);
        const double zero_draw = uniform();
        const double frac_draw = uniform();
        double frac = spec.alt_lo_frac + frac_draw * (spec.alt_hi_frac - spec.alt_lo_frac);
        if (zero_draw < spec.alt_zero_prob) frac = 0.0;
        t.alt_reward = t.reward * frac;
        inst.states.push_back(std::move(t));
    }
    return inst;
}

} // namespace ldst
