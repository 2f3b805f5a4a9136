#pragma once

// The rough-clustering consensus engine: ensemble node similarity,
// beta-granulation, prototype count selection, granule-to-prototype composite
// similarity, and the rough lower/upper assignment.

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "rcccd/community.hpp"
#include "rcccd/graph.hpp"

namespace rcccd {

// S(v_i,v_j) = sum over covers of mc/( |CS_i| * |CS_j| ) / p, where mc counts
// the communities of that cover holding both nodes and CS is evaluated
// per cover. Accumulated community-by-community; never an O(n^2) dense loop.
inline WeightedPairGraph node_similarity(const Ensemble& np) {
    const std::size_t n = np.node_count();
    WeightedPairGraph sim(n);
    const double p = static_cast<double>(np.size());
    std::vector<double> cs(n);
    for (const Cover& cover : np.covers()) {
        std::fill(cs.begin(), cs.end(), 0.0);
        for (const auto& comm : cover.communities())
            for (NodeId v : comm) cs[v] += 1.0;
        for (const auto& comm : cover.communities()) {
            for (std::size_t i = 0; i < comm.size(); ++i) {
                const NodeId u = comm[i];
                for (std::size_t j = i + 1; j < comm.size(); ++j) {
                    const NodeId v = comm[j];
                    sim.add(u, v, 1.0 / (cs[u] * cs[v] * p));
                }
            }
        }
    }
    return sim;
}

struct Granulation {
    std::vector<NodeSet> granules;  // disjoint, union = V; sorted by size desc,
                                    // ties by smallest member id
    double beta = 0.0;
    std::vector<NodeId> granule_of;  // node -> granule index

    std::size_t size() const { return granules.size(); }
};

// Granules are the connected components of the similarity graph thresholded
// at beta (inclusive), mapped back to node sets of g.
inline Granulation granulate(const Graph& g, const WeightedPairGraph& sim, double beta) {
    if (sim.node_count() != g.node_count())
        throw std::invalid_argument("granulate: node count mismatch");
    Graph g_beta = threshold_graph(sim, beta);
    Granulation out;
    out.beta = beta;
    out.granules = connected_components(g_beta);
    std::stable_sort(out.granules.begin(), out.granules.end(),
                     [](const NodeSet& a, const NodeSet& b) {
                         if (a.size() != b.size()) return a.size() > b.size();
                         return a.front() < b.front();
                     });
    out.granule_of.assign(g.node_count(), 0);
    for (NodeId i = 0; i < out.granules.size(); ++i)
        for (NodeId v : out.granules[i]) out.granule_of[v] = i;
    return out;
}

enum class KSelection {
    CoverQuantile,  // coverage-quantile of the covers' community counts
    HistogramMass,  // prefix of rank-merged size bars reaching `coverage` mass
};

namespace detail {

// Rank-merged size-frequency histogram: bar r accumulates the node counts of
// every cover's r-th largest community; k = minimal number of top bars whose
// cumulative share reaches `coverage` of the total. Systematically cuts the
// (1 - coverage) tail mass, so it under-counts when sizes are heavy-tailed.
inline std::size_t select_k_histogram(const Ensemble& np, double coverage) {
    std::size_t max_k = 0;
    for (const Cover& c : np.covers()) max_k = std::max(max_k, c.size());
    std::vector<double> bar(max_k, 0.0);
    for (const Cover& c : np.covers()) {
        std::vector<std::size_t> sizes;
        sizes.reserve(c.size());
        for (const auto& comm : c.communities()) sizes.push_back(comm.size());
        std::sort(sizes.rbegin(), sizes.rend());
        for (std::size_t r = 0; r < sizes.size(); ++r)
            bar[r] += static_cast<double>(sizes[r]);
    }
    std::sort(bar.rbegin(), bar.rend());
    double total = 0.0;
    for (double b : bar) total += b;
    double cum = 0.0;
    for (std::size_t k = 0; k < bar.size(); ++k) {
        cum += bar[k];
        if (cum >= coverage * total) return k + 1;
    }
    return bar.size();
}

}  // namespace detail

// Prototype count from the ensemble. The default takes the coverage-quantile
// of the covers' community counts: merging-prone covers sit below the
// quantile, so k follows the finest consistent covers, which empirically
// tracks the true community count. HistogramMass is the size-mass prefix
// rule, kept selectable for comparison.
inline std::size_t select_k(const Ensemble& np, double coverage = 0.9,
                            KSelection strategy = KSelection::CoverQuantile) {
    if (coverage <= 0.0 || coverage > 1.0)
        throw std::invalid_argument("select_k: coverage outside (0,1]");
    if (strategy == KSelection::HistogramMass)
        return detail::select_k_histogram(np, coverage);
    std::vector<std::size_t> ks;
    ks.reserve(np.size());
    for (const Cover& c : np.covers()) ks.push_back(c.size());
    std::sort(ks.begin(), ks.end());
    std::size_t idx = static_cast<std::size_t>(coverage * static_cast<double>(ks.size()));
    if (idx >= ks.size()) idx = ks.size() - 1;
    return ks[idx];
}

struct GranuleSimilarities {
    std::size_t k = 0;  // prototype count; granules k..q-1 are the leftovers
    // indexed [prototype][leftover - k]
    std::vector<std::vector<double>> s_gr;
    std::vector<std::vector<double>> s_er;
    std::vector<std::vector<double>> cs;
};

enum class CsNormalization {
    GranuleColumn,  // each leftover granule's column scaled by its max over prototypes
    PrototypeRow,   // each prototype's row scaled by its max over leftover granules
};

// S_Gr sums pairwise node similarity between granules; S_Er counts edges of g
// between them. Both are normalized to [0,1] by their maxima along the chosen
// direction; CS is the mean of the two normalized values. A zero maximum makes
// that normalized term 0. Column normalization keeps CS comparable across
// prototypes of different sizes: the best prototype per granule scores 1, so a
// granule enters a boundary only when a second prototype is nearly as close.
// Row normalization inflates the scores of weakly connected prototypes (a tiny
// row maximum pushes ordinary values toward 1), which floods boundaries on
// noisy ensembles; it is kept selectable.
inline GranuleSimilarities granule_similarity(
    const Granulation& gr, const WeightedPairGraph& sim, const Graph& g, std::size_t k,
    CsNormalization norm = CsNormalization::GranuleColumn) {
    const std::size_t q = gr.size();
    if (k < 1 || k > q) throw std::invalid_argument("granule_similarity: k outside [1,q]");
    GranuleSimilarities out;
    out.k = k;
    const std::size_t left = q - k;
    out.s_gr.assign(k, std::vector<double>(left, 0.0));
    out.s_er.assign(k, std::vector<double>(left, 0.0));
    out.cs.assign(k, std::vector<double>(left, 0.0));

    auto accumulate = [&](std::vector<std::vector<double>>& acc, NodeId u, NodeId v,
                          double w) {
        const NodeId gu = gr.granule_of[u], gv = gr.granule_of[v];
        if (gu == gv) return;
        if (gu < k && gv >= k) acc[gu][gv - k] += w;
        if (gv < k && gu >= k) acc[gv][gu - k] += w;
    };
    for (const auto& [key, w] : sim.pairs())
        accumulate(out.s_gr, static_cast<NodeId>(key >> 32),
                   static_cast<NodeId>(key & 0xffffffffu), w);
    for (auto [u, v] : g.edges()) accumulate(out.s_er, u, v, 1.0);

    if (norm == CsNormalization::PrototypeRow) {
        for (std::size_t i = 0; i < k; ++i) {
            double max_gr = 0.0, max_er = 0.0;
            for (std::size_t j = 0; j < left; ++j) {
                max_gr = std::max(max_gr, out.s_gr[i][j]);
                max_er = std::max(max_er, out.s_er[i][j]);
            }
            for (std::size_t j = 0; j < left; ++j) {
                const double a = max_gr > 0.0 ? out.s_gr[i][j] / max_gr : 0.0;
                const double b = max_er > 0.0 ? out.s_er[i][j] / max_er : 0.0;
                out.cs[i][j] = 0.5 * (a + b);
            }
        }
    } else {
        for (std::size_t j = 0; j < left; ++j) {
            double max_gr = 0.0, max_er = 0.0;
            for (std::size_t i = 0; i < k; ++i) {
                max_gr = std::max(max_gr, out.s_gr[i][j]);
                max_er = std::max(max_er, out.s_er[i][j]);
            }
            for (std::size_t i = 0; i < k; ++i) {
                const double a = max_gr > 0.0 ? out.s_gr[i][j] / max_gr : 0.0;
                const double b = max_er > 0.0 ? out.s_er[i][j] / max_er : 0.0;
                out.cs[i][j] = 0.5 * (a + b);
            }
        }
    }
    return out;
}

enum class OrphanPolicy {
    Argmax,        // granule matching no prototype joins the argmax-CS one
    NewCommunity,  // ...or seeds a new community of its own
};

// Prototypes seed their communities as lower = upper = granule. Each leftover
// granule j collects T = { i : CS(i,j) >= gamma }: |T| > 1 sends it to every
// matched upper (boundary), |T| = 1 to that lower and upper, |T| = 0 falls
// back per the orphan policy so the uppers always cover V.
inline RoughCover assign(const Granulation& gr, const GranuleSimilarities& cs,
                         std::size_t k, double gamma,
                         OrphanPolicy policy = OrphanPolicy::Argmax) {
    if (gamma < 0.0 || gamma > 1.0)
        throw std::invalid_argument("assign: gamma outside [0,1]");
    const std::size_t q = gr.size();
    if (k > q || cs.k != k) throw std::invalid_argument("assign: inconsistent k");

    std::vector<RoughCommunity> comms(k);
    for (std::size_t i = 0; i < k; ++i) {
        comms[i].lower = gr.granules[i];
        comms[i].upper = gr.granules[i];
    }
    auto append = [](NodeSet& dst, const NodeSet& src) {
        dst.insert(dst.end(), src.begin(), src.end());
    };
    for (std::size_t j = k; j < q; ++j) {
        std::vector<std::size_t> matched;
        for (std::size_t i = 0; i < k; ++i)
            if (cs.cs[i][j - k] >= gamma) matched.push_back(i);
        if (matched.size() > 1) {
            for (std::size_t i : matched) append(comms[i].upper, gr.granules[j]);
        } else if (matched.size() == 1) {
            append(comms[matched[0]].lower, gr.granules[j]);
            append(comms[matched[0]].upper, gr.granules[j]);
        } else if (policy == OrphanPolicy::Argmax) {
            std::size_t best = 0;
            for (std::size_t i = 1; i < k; ++i)
                if (cs.cs[i][j - k] > cs.cs[best][j - k]) best = i;
            append(comms[best].lower, gr.granules[j]);
            append(comms[best].upper, gr.granules[j]);
        } else {
            comms.push_back({gr.granules[j], gr.granules[j]});
        }
    }
    return RoughCover(gr.granule_of.size(), std::move(comms));
}

struct ConsensusConfig {
    double beta = 0.75;
    double gamma = 0.8;
    double coverage = 0.9;
    KSelection k_selection = KSelection::CoverQuantile;
    CsNormalization cs_normalization = CsNormalization::GranuleColumn;
    OrphanPolicy orphan_policy = OrphanPolicy::Argmax;
    std::size_t k_override = 0;  // 0 means use select_k
};

// End-to-end RC-CCD: node_similarity -> granulate -> select_k ->
// granule_similarity -> assign.
inline RoughCover rc_ccd(const Graph& g, const Ensemble& np,
                         const ConsensusConfig& cfg = {}) {
    if (np.node_count() != g.node_count())
        throw std::invalid_argument("rc_ccd: node count mismatch");
    WeightedPairGraph sim = node_similarity(np);
    Granulation gr = granulate(g, sim, cfg.beta);
    std::size_t k = cfg.k_override ? cfg.k_override
                                   : select_k(np, cfg.coverage, cfg.k_selection);
    k = std::clamp<std::size_t>(k, 1, gr.size());
    GranuleSimilarities cs = granule_similarity(gr, sim, g, k, cfg.cs_normalization);
    return assign(gr, cs, k, cfg.gamma, cfg.orphan_policy);
}

}  // namespace rcccd
