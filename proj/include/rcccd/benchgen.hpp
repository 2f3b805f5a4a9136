#pragma once

// Simplified LFR-style benchmark generator: power-law degrees and community
// sizes, mixing parameter mu, optional overlapping memberships, plus tiny
// planted-partition graphs for tests. This is a re-derivation of the LFR
// construction, not a port of the reference binary; the realized mixing is
// measured and returned so the approximation stays auditable.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "rcccd/community.hpp"
#include "rcccd/graph.hpp"

namespace rcccd {

struct LfrConfig {
    std::size_t n = 1000;
    double tau1 = 2.0;   // degree exponent
    double tau2 = 1.0;   // community size exponent
    double avg_degree = 15.0;
    std::size_t max_degree = 50;
    std::size_t c_min = 20;
    std::size_t c_max = 50;
    double mu = 0.1;
    std::size_t o_n = 0;  // overlapping node count
    std::size_t o_m = 2;  // memberships per overlapping node
    std::uint64_t seed = 0;

    void validate() const {
        if (n == 0) throw std::invalid_argument("LfrConfig: n must be positive");
        if (c_min > c_max || c_max > n)
            throw std::invalid_argument("LfrConfig: need c_min <= c_max <= n");
        if (mu < 0.0 || mu > 1.0) throw std::invalid_argument("LfrConfig: mu outside [0,1]");
        if (o_n > n) throw std::invalid_argument("LfrConfig: o_n exceeds n");
        if (o_n > 0 && o_m < 1) throw std::invalid_argument("LfrConfig: o_m must be >= 1");
        if (avg_degree > static_cast<double>(max_degree) || max_degree >= n)
            throw std::invalid_argument("LfrConfig: need avg_degree <= max_degree < n");
    }
};

struct LfrNetwork {
    Graph graph;
    Cover ground_truth;
    double realized_mu = 0.0;
};

class GenerationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {

// Discrete truncated power law P(x) ~ x^-tau on [lo, hi].
struct PowerLawSampler {
    std::vector<double> cdf;
    long lo;

    PowerLawSampler(long lo_, long hi, double tau) : lo(lo_) {
        if (lo < 1 || lo > hi) throw std::invalid_argument("PowerLawSampler: bad bounds");
        cdf.resize(static_cast<std::size_t>(hi - lo + 1));
        double acc = 0.0;
        for (long x = lo; x <= hi; ++x) {
            acc += std::pow(static_cast<double>(x), -tau);
            cdf[static_cast<std::size_t>(x - lo)] = acc;
        }
        for (double& c : cdf) c /= acc;
    }

    double mean() const {
        double m = 0.0, prev = 0.0;
        for (std::size_t i = 0; i < cdf.size(); ++i) {
            m += (cdf[i] - prev) * static_cast<double>(lo + static_cast<long>(i));
            prev = cdf[i];
        }
        return m;
    }

    long sample(std::mt19937_64& rng) const {
        const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
        auto it = std::lower_bound(cdf.begin(), cdf.end(), u);
        return lo + static_cast<long>(it - cdf.begin());
    }
};

// Smallest lower cutoff whose truncated power law hits the target mean.
inline long fit_min_degree(double tau, long hi, double target_mean) {
    long best = 1;
    double best_err = 1e300;
    for (long lo = 1; lo <= hi; ++lo) {
        const double m = PowerLawSampler(lo, hi, tau).mean();
        const double err = std::abs(m - target_mean);
        if (err < best_err) {
            best_err = err;
            best = lo;
        }
        if (m >= target_mean) break;  // mean increases with lo
    }
    return best;
}

struct Membership {
    NodeId node;
    std::size_t community;
    std::size_t internal_stubs;
};

}  // namespace detail

inline LfrNetwork generate_lfr(const LfrConfig& cfg) {
    cfg.validate();
    std::mt19937_64 rng(cfg.seed);
    const std::size_t n = cfg.n;

    // degree sequence
    const long d_lo = detail::fit_min_degree(cfg.tau1, static_cast<long>(cfg.max_degree),
                                             cfg.avg_degree);
    detail::PowerLawSampler deg_sampler(d_lo, static_cast<long>(cfg.max_degree), cfg.tau1);
    std::vector<std::size_t> degree(n);
    for (auto& d : degree) d = static_cast<std::size_t>(deg_sampler.sample(rng));

    std::vector<std::size_t> internal(n);
    for (std::size_t v = 0; v < n; ++v)
        internal[v] = static_cast<std::size_t>(
            std::lround((1.0 - cfg.mu) * static_cast<double>(degree[v])));

    // overlapping nodes need at least one internal stub per membership
    std::vector<NodeId> overlap_pool;
    for (NodeId v = 0; v < n; ++v)
        if (internal[v] >= cfg.o_m) overlap_pool.push_back(v);
    if (overlap_pool.size() < cfg.o_n)
        throw GenerationError("generate_lfr: not enough nodes with internal degree >= o_m");
    std::shuffle(overlap_pool.begin(), overlap_pool.end(), rng);
    std::vector<char> is_overlap(n, 0);
    for (std::size_t i = 0; i < cfg.o_n; ++i) is_overlap[overlap_pool[i]] = 1;

    const std::size_t memberships_target = n + cfg.o_n * (cfg.o_m - 1);
    if (memberships_target < cfg.c_min)
        throw GenerationError("generate_lfr: fewer memberships than c_min");

    detail::PowerLawSampler size_sampler(static_cast<long>(cfg.c_min),
                                         static_cast<long>(cfg.c_max), cfg.tau2);

    const int kMaxAttempts = 20;
    std::string last_error;
    std::size_t max_internal = 0;
    for (std::size_t v = 0; v < n; ++v) {
        const std::size_t parts = is_overlap[v] ? cfg.o_m : 1;
        max_internal = std::max(max_internal, (internal[v] + parts - 1) / parts);
    }
    if (max_internal >= cfg.c_max)
        throw GenerationError("generate_lfr: internal degree " +
                              std::to_string(max_internal) +
                              " cannot fit in any community of size <= " +
                              std::to_string(cfg.c_max));

    for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
        // community sizes drawn to cover the node count; the extra overlap
        // memberships are absorbed by enlarging communities with headroom,
        // which also leaves room for high-internal-degree nodes
        std::vector<std::size_t> sizes;
        std::size_t total = 0;
        while (total < std::min(n, memberships_target)) {
            const std::size_t s = static_cast<std::size_t>(size_sampler.sample(rng));
            sizes.push_back(s);
            total += s;
        }
        std::size_t excess = total > n ? total - n : 0;
        while (excess > 0) {
            bool reduced = false;
            for (auto& s : sizes) {
                if (excess == 0) break;
                if (s > cfg.c_min) {
                    --s;
                    --excess;
                    reduced = true;
                }
            }
            if (!reduced) break;
        }
        if (excess > 0) {
            last_error = "cannot shave community sizes to node count";
            continue;
        }
        {
            std::size_t grow = memberships_target - std::min(n, memberships_target);
            std::sort(sizes.rbegin(), sizes.rend());
            while (grow > 0) {
                bool grown = false;
                for (auto& s : sizes) {
                    if (grow == 0) break;
                    if (s < cfg.c_max) {
                        ++s;
                        --grow;
                        grown = true;
                    }
                }
                if (!grown) break;
            }
            if (grow > 0) {
                last_error = "no headroom for overlap memberships";
                continue;
            }
        }
        // make sure the biggest community can host the most demanding node
        std::sort(sizes.rbegin(), sizes.rend());
        while (sizes.front() <= max_internal) {
            bool moved = false;
            for (std::size_t i = sizes.size(); i-- > 1;) {
                if (sizes[i] > cfg.c_min && sizes.front() < cfg.c_max) {
                    --sizes[i];
                    ++sizes.front();
                    moved = true;
                    break;
                }
            }
            if (!moved) break;
        }
        if (sizes.front() <= max_internal) {
            last_error = "largest community cannot host the highest internal degree";
            continue;
        }

        // membership requests: per node, one slot per community it joins, each
        // carrying the internal stubs that community must host
        std::vector<detail::Membership> requests;
        for (NodeId v = 0; v < n; ++v) {
            const std::size_t parts = is_overlap[v] ? cfg.o_m : 1;
            const std::size_t base = internal[v] / parts;
            const std::size_t rem = internal[v] % parts;
            for (std::size_t p = 0; p < parts; ++p)
                requests.push_back({v, 0, base + (p < rem ? 1 : 0)});
        }
        std::sort(requests.begin(), requests.end(),
                  [](const detail::Membership& a, const detail::Membership& b) {
                      if (a.internal_stubs != b.internal_stubs)
                          return a.internal_stubs > b.internal_stubs;
                      return a.node < b.node;
                  });
        if (!requests.empty() && requests.front().internal_stubs >= cfg.c_max) {
            throw GenerationError(
                "generate_lfr: internal degree " +
                std::to_string(requests.front().internal_stubs) +
                " cannot fit in any community of size <= " + std::to_string(cfg.c_max));
        }

        // greedy placement: hardest requests first, random feasible community
        std::vector<std::size_t> capacity = sizes;
        std::vector<std::set<std::size_t>> joined(n);
        bool ok = true;
        std::vector<std::size_t> feasible;
        for (auto& req : requests) {
            feasible.clear();
            for (std::size_t c = 0; c < sizes.size(); ++c)
                if (capacity[c] > 0 && sizes[c] > req.internal_stubs &&
                    !joined[req.node].count(c))
                    feasible.push_back(c);
            if (feasible.empty()) {
                ok = false;
                last_error = "no feasible community for a membership request";
                break;
            }
            const std::size_t pick = feasible[std::uniform_int_distribution<std::size_t>(
                0, feasible.size() - 1)(rng)];
            req.community = pick;
            --capacity[pick];
            joined[req.node].insert(pick);
        }
        if (!ok) continue;

        // internal edges: configuration matching within each community
        std::set<std::uint64_t> edge_set;
        std::vector<Edge> edges;
        auto try_add = [&](NodeId a, NodeId b) {
            if (a == b) return false;
            const auto key = pair_key(a, b);
            if (edge_set.count(key)) return false;
            edge_set.insert(key);
            edges.emplace_back(std::min(a, b), std::max(a, b));
            return true;
        };

        std::vector<std::vector<NodeId>> stubs_by_comm(sizes.size());
        for (const auto& req : requests)
            for (std::size_t s = 0; s < req.internal_stubs; ++s)
                stubs_by_comm[req.community].push_back(req.node);

        for (auto& stubs : stubs_by_comm) {
            const std::size_t comm_edges_begin = edges.size();
            std::shuffle(stubs.begin(), stubs.end(), rng);
            if (stubs.size() % 2) stubs.pop_back();  // odd leftover stub is dropped
            std::vector<std::pair<NodeId, NodeId>> retry;
            for (std::size_t i = 0; i + 1 < stubs.size(); i += 2)
                if (!try_add(stubs[i], stubs[i + 1]))
                    retry.emplace_back(stubs[i], stubs[i + 1]);
            // double-edge swaps against pairs accepted for this community
            std::size_t budget = 100 * (stubs.size() + 1);
            while (!retry.empty() && budget-- > 0 && edges.size() > comm_edges_begin) {
                auto [a, b] = retry.back();
                const std::size_t pick = std::uniform_int_distribution<std::size_t>(
                    comm_edges_begin, edges.size() - 1)(rng);
                auto [c, d] = edges[pick];
                if (a == c || a == d || b == c || b == d) continue;
                if (edge_set.count(pair_key(a, c)) || edge_set.count(pair_key(b, d)))
                    continue;
                edge_set.erase(pair_key(c, d));
                edges[pick] = {std::min(a, c), std::max(a, c)};
                edge_set.insert(pair_key(a, c));
                try_add(b, d);
                retry.pop_back();
            }
            // anything still unmatched is dropped
        }

        // external edges: global matching, rejecting intra-community pairs
        std::vector<NodeId> ext_stubs;
        for (NodeId v = 0; v < n; ++v) {
            const std::size_t ext = degree[v] - std::min(degree[v], internal[v]);
            for (std::size_t s = 0; s < ext; ++s) ext_stubs.push_back(v);
        }
        auto share_comm = [&](NodeId a, NodeId b) {
            for (std::size_t c : joined[a])
                if (joined[b].count(c)) return true;
            return false;
        };
        std::shuffle(ext_stubs.begin(), ext_stubs.end(), rng);
        if (ext_stubs.size() % 2) ext_stubs.pop_back();
        std::vector<std::pair<NodeId, NodeId>> ext_retry;
        std::vector<std::size_t> ext_edge_idx;  // indices into edges[] of external edges
        auto try_add_ext = [&](NodeId a, NodeId b) {
            if (a == b || share_comm(a, b)) return false;
            if (!try_add(a, b)) return false;
            ext_edge_idx.push_back(edges.size() - 1);
            return true;
        };
        for (std::size_t i = 0; i + 1 < ext_stubs.size(); i += 2)
            if (!try_add_ext(ext_stubs[i], ext_stubs[i + 1]))
                ext_retry.emplace_back(ext_stubs[i], ext_stubs[i + 1]);
        std::size_t budget = 100 * (ext_stubs.size() + 1);
        while (!ext_retry.empty() && budget-- > 0 && !ext_edge_idx.empty()) {
            auto [a, b] = ext_retry.back();
            const std::size_t pick = std::uniform_int_distribution<std::size_t>(
                0, ext_edge_idx.size() - 1)(rng);
            const std::size_t ei = ext_edge_idx[pick];
            auto [c, d] = edges[ei];
            if (a == c || a == d || b == c || b == d) continue;
            if (share_comm(a, c) || share_comm(b, d)) continue;
            if (edge_set.count(pair_key(a, c)) || edge_set.count(pair_key(b, d)))
                continue;
            edge_set.erase(pair_key(c, d));
            edges[ei] = {std::min(a, c), std::max(a, c)};
            edge_set.insert(pair_key(a, c));
            try_add_ext(b, d);
            ext_retry.pop_back();
        }
        // leftover external stubs are dropped

        // assemble outputs
        std::vector<NodeSet> gt(sizes.size());
        for (const auto& req : requests) gt[req.community].push_back(req.node);
        std::vector<NodeSet> gt_nonempty;
        for (auto& c : gt)
            if (!c.empty()) gt_nonempty.push_back(std::move(c));

        Graph graph(n, edges);
        Cover ground_truth(n, std::move(gt_nonempty));

        std::size_t external_edges = 0;
        for (auto [u, v] : graph.edges())
            if (!share_comm(u, v)) ++external_edges;
        const double realized_mu =
            graph.edge_count() == 0
                ? 0.0
                : static_cast<double>(external_edges) /
                      static_cast<double>(graph.edge_count());
        return {std::move(graph), std::move(ground_truth), realized_mu};
    }
    throw GenerationError("generate_lfr: infeasible configuration (" + last_error + ")");
}

// c blocks of `size` nodes; intra-block edges with probability p_in, inter
// with p_out. Same seed, same output.
inline std::pair<Graph, Partition> planted_partition(std::size_t c, std::size_t size,
                                                     double p_in, double p_out,
                                                     std::uint64_t seed) {
    if (p_in < 0.0 || p_in > 1.0 || p_out < 0.0 || p_out > 1.0)
        throw std::invalid_argument("planted_partition: probability outside [0,1]");
    const std::size_t n = c * size;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::vector<Edge> edges;
    for (NodeId u = 0; u < n; ++u)
        for (NodeId v = u + 1; v < n; ++v) {
            const bool same = (u / size) == (v / size);
            if (unif(rng) < (same ? p_in : p_out)) edges.emplace_back(u, v);
        }
    std::vector<NodeId> labels(n);
    for (NodeId v = 0; v < n; ++v) labels[v] = v / static_cast<NodeId>(size);
    return {Graph(n, std::move(edges)), Partition::from_labels(labels)};
}

// LFR-compatible outputs: network.dat (1-based, both orientations) and
// community.dat ("node comm [comm...]" rows, 1-based).
inline void save_lfr_files(const LfrNetwork& net, const std::string& network_path,
                           const std::string& community_path) {
    {
        std::ofstream out(network_path);
        if (!out) throw std::runtime_error("cannot write " + network_path);
        for (auto [u, v] : net.graph.edges()) {
            out << (u + 1) << "\t" << (v + 1) << "\n";
            out << (v + 1) << "\t" << (u + 1) << "\n";
        }
    }
    {
        std::ofstream out(community_path);
        if (!out) throw std::runtime_error("cannot write " + community_path);
        const std::size_t n = net.graph.node_count();
        std::vector<std::vector<std::size_t>> comms(n);
        for (std::size_t i = 0; i < net.ground_truth.size(); ++i)
            for (NodeId v : net.ground_truth.community(i)) comms[v].push_back(i + 1);
        for (std::size_t v = 0; v < n; ++v) {
            out << (v + 1);
            for (std::size_t ci : comms[v]) out << "\t" << ci;
            out << "\n";
        }
    }
}

}  // namespace rcccd
