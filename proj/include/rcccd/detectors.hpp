#pragma once

// Base community detection algorithms used to build ensembles: asynchronous
// label propagation, multilevel Louvain, and agglomerative greedy modularity
// (CNM), plus Newman-Girvan modularity scoring.

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <random>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "rcccd/community.hpp"
#include "rcccd/graph.hpp"

namespace rcccd {

// Q = sum_c (in_c/m - (tot_c/2m)^2) over unweighted edge counts.
inline double modularity(const Graph& g, const Partition& p) {
    if (p.node_count() != g.node_count())
        throw std::invalid_argument("modularity: node count mismatch");
    const double m = static_cast<double>(g.edge_count());
    if (m == 0.0) throw std::invalid_argument("modularity: graph has no edges");
    std::vector<NodeId> label = p.labels();
    std::vector<double> in(p.size(), 0.0), tot(p.size(), 0.0);
    for (auto [u, v] : g.edges()) {
        if (label[u] == label[v]) in[label[u]] += 1.0;
        tot[label[u]] += 1.0;
        tot[label[v]] += 1.0;
    }
    double q = 0.0;
    for (std::size_t c = 0; c < p.size(); ++c) {
        const double frac = tot[c] / (2.0 * m);
        q += in[c] / m - frac * frac;
    }
    return q;
}

struct LpaResult {
    Partition partition;
    bool converged = true;
    int sweeps = 0;
};

// Asynchronous LPA: seeded random node order per sweep, majority neighbor
// label, ties broken uniformly at random from the tied set. A sweep with no
// change means every node's label is among its neighborhood majorities.
inline LpaResult label_propagation(const Graph& g, std::uint64_t seed,
                                   int max_sweeps = 100) {
    const std::size_t n = g.node_count();
    if (n == 0) throw std::invalid_argument("label_propagation: empty graph");
    std::mt19937_64 rng(seed);
    std::vector<NodeId> label(n);
    std::iota(label.begin(), label.end(), 0);
    std::vector<NodeId> order(n);
    std::iota(order.begin(), order.end(), 0);

    std::vector<std::size_t> count(n, 0);
    std::vector<NodeId> touched, best;
    bool converged = false;
    int sweep = 0;
    for (; sweep < max_sweeps; ++sweep) {
        std::shuffle(order.begin(), order.end(), rng);
        bool changed = false;
        for (NodeId v : order) {
            const auto& nbrs = g.neighbors(v);
            if (nbrs.empty()) continue;
            touched.clear();
            std::size_t max_count = 0;
            for (NodeId u : nbrs) {
                NodeId l = label[u];
                if (count[l]++ == 0) touched.push_back(l);
                max_count = std::max(max_count, count[l]);
            }
            best.clear();
            for (NodeId l : touched)
                if (count[l] == max_count) best.push_back(l);
            for (NodeId l : touched) count[l] = 0;
            std::sort(best.begin(), best.end());  // stable tie set for the draw
            NodeId pick = best.size() == 1
                              ? best[0]
                              : best[std::uniform_int_distribution<std::size_t>(
                                    0, best.size() - 1)(rng)];
            if (pick != label[v]) {
                label[v] = pick;
                changed = true;
            }
        }
        if (!changed) {
            converged = true;
            break;
        }
    }
    return {Partition::from_labels(label), converged, converged ? sweep + 1 : sweep};
}

namespace detail {

// Aggregated weighted graph used between Louvain levels.
struct WeightedLevelGraph {
    std::size_t n = 0;
    double total_weight = 0.0;  // sum of all edge weights incl. self-loops
    std::vector<std::vector<std::pair<NodeId, double>>> adj;  // excl. self-loops
    std::vector<double> self_loop;
    std::vector<double> strength;  // weighted degree incl. 2*self_loop
};

inline WeightedLevelGraph level_from_graph(const Graph& g) {
    WeightedLevelGraph lg;
    lg.n = g.node_count();
    lg.adj.resize(lg.n);
    lg.self_loop.assign(lg.n, 0.0);
    lg.strength.assign(lg.n, 0.0);
    for (auto [u, v] : g.edges()) {
        lg.adj[u].emplace_back(v, 1.0);
        lg.adj[v].emplace_back(u, 1.0);
        lg.strength[u] += 1.0;
        lg.strength[v] += 1.0;
        lg.total_weight += 1.0;
    }
    return lg;
}

inline bool louvain_local_move(const WeightedLevelGraph& lg, std::vector<NodeId>& comm,
                               std::mt19937_64& rng) {
    const double two_m = 2.0 * lg.total_weight;
    std::vector<double> comm_tot(lg.n, 0.0);
    for (NodeId v = 0; v < lg.n; ++v) comm_tot[comm[v]] += lg.strength[v];

    std::vector<NodeId> order(lg.n);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);

    std::vector<double> w_to(lg.n, 0.0);
    std::vector<NodeId> touched;
    bool improved_any = false;
    bool improved = true;
    while (improved) {
        improved = false;
        for (NodeId v : order) {
            const NodeId old = comm[v];
            touched.clear();
            for (auto [u, w] : lg.adj[v]) {
                NodeId c = comm[u];
                if (w_to[c] == 0.0) touched.push_back(c);
                w_to[c] += w;
            }
            comm_tot[old] -= lg.strength[v];
            double best_gain = 0.0;
            NodeId best_comm = old;
            const double base = w_to[old];  // staying put regains this
            for (NodeId c : touched) {
                const double gain = (w_to[c] - base) -
                                    lg.strength[v] * (comm_tot[c] - comm_tot[old]) / two_m;
                if (gain > best_gain + 1e-12 ||
                    (gain > best_gain - 1e-12 && gain > 1e-12 && c < best_comm)) {
                    best_gain = gain;
                    best_comm = c;
                }
            }
            comm_tot[best_comm] += lg.strength[v];
            for (NodeId c : touched) w_to[c] = 0.0;
            if (best_comm != old) {
                comm[v] = best_comm;
                improved = true;
                improved_any = true;
            }
        }
    }
    return improved_any;
}

inline WeightedLevelGraph aggregate(const WeightedLevelGraph& lg,
                                    const std::vector<NodeId>& comm,
                                    std::vector<NodeId>& dense) {
    // renumber communities densely, ordered by community id
    dense.assign(lg.n, 0);
    std::vector<NodeId> ids;
    {
        std::vector<char> present(lg.n, 0);
        for (NodeId c : comm) present[c] = 1;
        for (NodeId c = 0; c < lg.n; ++c)
            if (present[c]) ids.push_back(c);
        std::vector<NodeId> remap(lg.n, 0);
        for (NodeId i = 0; i < ids.size(); ++i) remap[ids[i]] = i;
        for (NodeId v = 0; v < lg.n; ++v) dense[v] = remap[comm[v]];
    }
    WeightedLevelGraph out;
    out.n = ids.size();
    out.adj.resize(out.n);
    out.self_loop.assign(out.n, 0.0);
    out.strength.assign(out.n, 0.0);
    out.total_weight = lg.total_weight;
    std::map<std::pair<NodeId, NodeId>, double> acc;
    for (NodeId v = 0; v < lg.n; ++v) {
        NodeId cv = dense[v];
        out.self_loop[cv] += lg.self_loop[v];
        for (auto [u, w] : lg.adj[v]) {
            if (u < v) continue;  // each undirected pair once
            NodeId cu = dense[u];
            if (cu == cv)
                out.self_loop[cv] += w;
            else
                acc[{std::min(cu, cv), std::max(cu, cv)}] += w;
        }
    }
    for (auto& [pair, w] : acc) {
        out.adj[pair.first].emplace_back(pair.second, w);
        out.adj[pair.second].emplace_back(pair.first, w);
        out.strength[pair.first] += w;
        out.strength[pair.second] += w;
    }
    for (NodeId c = 0; c < out.n; ++c) out.strength[c] += 2.0 * out.self_loop[c];
    return out;
}

}  // namespace detail

// Two-phase Louvain with seeded node visiting order; returns the final-level
// partition expanded to the original nodes.
inline Partition louvain(const Graph& g, std::uint64_t seed) {
    if (g.node_count() == 0) throw std::invalid_argument("louvain: empty graph");
    if (g.edge_count() == 0) throw std::invalid_argument("louvain: graph has no edges");
    std::mt19937_64 rng(seed);
    detail::WeightedLevelGraph lg = detail::level_from_graph(g);

    std::vector<NodeId> node_to_comm(g.node_count());
    std::iota(node_to_comm.begin(), node_to_comm.end(), 0);

    while (true) {
        std::vector<NodeId> comm(lg.n);
        std::iota(comm.begin(), comm.end(), 0);
        bool improved = detail::louvain_local_move(lg, comm, rng);
        std::vector<NodeId> dense;
        detail::WeightedLevelGraph next = detail::aggregate(lg, comm, dense);
        for (NodeId v = 0; v < node_to_comm.size(); ++v)
            node_to_comm[v] = dense[node_to_comm[v]];
        if (!improved || next.n == lg.n) break;
        lg = std::move(next);
    }
    return Partition::from_labels(node_to_comm);
}

// Agglomerative CNM: merge the connected community pair with the largest
// positive dQ; ties broken by smallest community-index pair. Community index
// is the smallest original node id it contains.
inline Partition greedy_modularity(const Graph& g) {
    const std::size_t n = g.node_count();
    if (g.edge_count() == 0) throw std::invalid_argument("greedy_modularity: graph has no edges");
    const double m = static_cast<double>(g.edge_count());

    std::vector<NodeId> comm(n);
    std::iota(comm.begin(), comm.end(), 0);
    std::vector<double> tot(n, 0.0);
    for (NodeId v = 0; v < n; ++v) tot[v] = static_cast<double>(g.degree(v));

    // between[c] maps neighbor community -> edge count; only live entries kept
    std::vector<std::unordered_map<NodeId, double>> between(n);
    for (auto [u, v] : g.edges()) {
        between[u][v] += 1.0;
        between[v][u] += 1.0;
    }
    std::vector<char> alive(n, 1);

    while (true) {
        double best_dq = 0.0;
        NodeId best_a = 0, best_b = 0;
        bool found = false;
        for (NodeId a = 0; a < n; ++a) {
            if (!alive[a]) continue;
            for (const auto& [b, e_ab] : between[a]) {
                if (b <= a) continue;
                const double dq = e_ab / m - tot[a] * tot[b] / (2.0 * m * m);
                if (!found || dq > best_dq + 1e-12 ||
                    (dq > best_dq - 1e-12 &&
                     (a < best_a || (a == best_a && b < best_b)))) {
                    if (dq > 1e-12) {
                        best_dq = dq;
                        best_a = a;
                        best_b = b;
                        found = true;
                    }
                }
            }
        }
        if (!found) break;
        // merge b into a
        const NodeId a = best_a, b = best_b;
        for (const auto& [c, w] : between[b]) {
            if (c == a) continue;
            between[c].erase(b);
            if (c != a) {
                between[a][c] += w;
                between[c][a] += w;
            }
        }
        between[a].erase(b);
        tot[a] += tot[b];
        between[b].clear();
        alive[b] = 0;
        for (NodeId v = 0; v < n; ++v)
            if (comm[v] == b) comm[v] = a;
    }
    return Partition::from_labels(comm);
}

}  // namespace rcccd
