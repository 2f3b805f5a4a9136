#pragma once

// Undirected simple graph with dense 0-based node ids, plus the weighted
// pair map used to build thresholded similarity graphs.

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <limits>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

namespace rcccd {

using NodeId = std::uint32_t;
using Edge = std::pair<NodeId, NodeId>;  // always stored with first < second

inline std::uint64_t pair_key(NodeId a, NodeId b) {
    if (a > b) std::swap(a, b);
    return (static_cast<std::uint64_t>(a) << 32) | b;
}

class Graph {
public:
    Graph() = default;

    // Edges may arrive in any orientation and with duplicates; they are
    // normalized, deduplicated, and self-loops rejected.
    Graph(std::size_t node_count, std::vector<Edge> edges)
        : n_(node_count) {
        std::vector<Edge> norm;
        norm.reserve(edges.size());
        for (auto [u, v] : edges) {
            if (u >= n_ || v >= n_)
                throw std::invalid_argument("Graph: edge endpoint out of range");
            if (u == v)
                throw std::invalid_argument("Graph: self-loop not allowed");
            if (u > v) std::swap(u, v);
            norm.emplace_back(u, v);
        }
        std::sort(norm.begin(), norm.end());
        norm.erase(std::unique(norm.begin(), norm.end()), norm.end());
        edges_ = std::move(norm);
        adj_.assign(n_, {});
        for (auto [u, v] : edges_) {
            adj_[u].push_back(v);
            adj_[v].push_back(u);
        }
        for (auto& nbrs : adj_) std::sort(nbrs.begin(), nbrs.end());
    }

    std::size_t node_count() const { return n_; }
    std::size_t edge_count() const { return edges_.size(); }
    const std::vector<Edge>& edges() const { return edges_; }
    const std::vector<NodeId>& neighbors(NodeId v) const {
        check_node(v);
        return adj_[v];
    }
    std::size_t degree(NodeId v) const { return neighbors(v).size(); }

    bool has_edge(NodeId u, NodeId v) const {
        check_node(u);
        check_node(v);
        const auto& a = adj_[u].size() <= adj_[v].size() ? adj_[u] : adj_[v];
        NodeId other = adj_[u].size() <= adj_[v].size() ? v : u;
        return std::binary_search(a.begin(), a.end(), other);
    }

    void check_node(NodeId v) const {
        if (v >= n_) throw std::invalid_argument("Graph: node id out of range");
    }

private:
    std::size_t n_ = 0;
    std::vector<Edge> edges_;
    std::vector<std::vector<NodeId>> adj_;
};

// Sparse map of unordered node pairs to weights in [0,1]; absent pair means 0.
class WeightedPairGraph {
public:
    explicit WeightedPairGraph(std::size_t node_count) : n_(node_count) {}

    std::size_t node_count() const { return n_; }

    void set(NodeId u, NodeId v, double w) {
        if (u >= n_ || v >= n_)
            throw std::invalid_argument("WeightedPairGraph: node id out of range");
        if (u == v) throw std::invalid_argument("WeightedPairGraph: self pair");
        if (w < 0.0 || w > 1.0)
            throw std::invalid_argument("WeightedPairGraph: weight outside [0,1]");
        weights_[pair_key(u, v)] = w;
    }

    void add(NodeId u, NodeId v, double w) {
        if (u >= n_ || v >= n_)
            throw std::invalid_argument("WeightedPairGraph: node id out of range");
        if (u == v) throw std::invalid_argument("WeightedPairGraph: self pair");
        weights_[pair_key(u, v)] += w;
    }

    double get(NodeId u, NodeId v) const {
        auto it = weights_.find(pair_key(u, v));
        return it == weights_.end() ? 0.0 : it->second;
    }

    const std::unordered_map<std::uint64_t, double>& pairs() const { return weights_; }

private:
    std::size_t n_;
    std::unordered_map<std::uint64_t, double> weights_;
};

struct InducedSubgraph {
    Graph graph;                        // ids remapped to 0..|nodes|-1
    std::vector<NodeId> original_ids;   // local id -> original id, ascending
};

inline InducedSubgraph induced_subgraph(const Graph& g, const std::vector<NodeId>& nodes) {
    std::vector<NodeId> sorted = nodes;
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    std::unordered_map<NodeId, NodeId> local;
    local.reserve(sorted.size());
    for (NodeId i = 0; i < sorted.size(); ++i) {
        g.check_node(sorted[i]);
        local[sorted[i]] = i;
    }
    std::vector<Edge> edges;
    for (NodeId u : sorted) {
        auto lu = local[u];
        for (NodeId v : g.neighbors(u)) {
            if (v <= u) continue;
            auto it = local.find(v);
            if (it != local.end()) edges.emplace_back(lu, it->second);
        }
    }
    return {Graph(sorted.size(), std::move(edges)), std::move(sorted)};
}

// Maximal connected node sets, ordered by smallest contained node id.
inline std::vector<std::vector<NodeId>> connected_components(const Graph& g) {
    const std::size_t n = g.node_count();
    std::vector<NodeId> comp(n, static_cast<NodeId>(-1));
    std::vector<std::vector<NodeId>> out;
    std::vector<NodeId> stack;
    for (NodeId s = 0; s < n; ++s) {
        if (comp[s] != static_cast<NodeId>(-1)) continue;
        NodeId id = static_cast<NodeId>(out.size());
        out.emplace_back();
        stack.push_back(s);
        comp[s] = id;
        while (!stack.empty()) {
            NodeId u = stack.back();
            stack.pop_back();
            out[id].push_back(u);
            for (NodeId v : g.neighbors(u)) {
                if (comp[v] == static_cast<NodeId>(-1)) {
                    comp[v] = id;
                    stack.push_back(v);
                }
            }
        }
        std::sort(out[id].begin(), out[id].end());
    }
    return out;  // discovery from ascending seeds fixes the ordering
}

inline Graph threshold_graph(const WeightedPairGraph& w, double beta) {
    if (beta < 0.0 || beta > 1.0)
        throw std::invalid_argument("threshold_graph: beta outside [0,1]");
    std::vector<Edge> edges;
    for (const auto& [key, weight] : w.pairs()) {
        if (weight >= beta) {
            edges.emplace_back(static_cast<NodeId>(key >> 32),
                               static_cast<NodeId>(key & 0xffffffffu));
        }
    }
    return Graph(w.node_count(), std::move(edges));
}

enum class IndexBase { Auto, Zero, One };

// Whitespace-separated "u v" per line; '#' starts a comment. LFR network.dat
// lists each edge in both orientations; the Graph constructor deduplicates.
// With IndexBase::Auto, files whose smallest id is >= 1 are taken as 1-based.
inline Graph load_edge_list(const std::string& path, IndexBase base = IndexBase::Auto) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open edge list: " + path);
    std::vector<std::pair<long, long>> raw;
    long min_id = std::numeric_limits<long>::max();
    long max_id = -1;
    std::string line;
    while (std::getline(in, line)) {
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        long u, v;
        if (!(ls >> u >> v)) continue;
        if (u < 0 || v < 0) throw std::runtime_error("edge list: negative node id");
        raw.emplace_back(u, v);
        min_id = std::min({min_id, u, v});
        max_id = std::max({max_id, u, v});
    }
    if (raw.empty()) return Graph(0, {});
    long offset = 0;
    if (base == IndexBase::One || (base == IndexBase::Auto && min_id >= 1)) offset = 1;
    std::vector<Edge> edges;
    edges.reserve(raw.size());
    for (auto [u, v] : raw) {
        if (u - offset < 0 || v - offset < 0)
            throw std::runtime_error("edge list: id below declared base");
        edges.emplace_back(static_cast<NodeId>(u - offset), static_cast<NodeId>(v - offset));
    }
    return Graph(static_cast<std::size_t>(max_id - offset + 1), std::move(edges));
}

inline void save_edge_list(const Graph& g, const std::string& path, IndexBase base = IndexBase::Zero) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write edge list: " + path);
    const NodeId off = (base == IndexBase::One) ? 1 : 0;
    for (auto [u, v] : g.edges()) out << (u + off) << "\t" << (v + off) << "\n";
}

}  // namespace rcccd
