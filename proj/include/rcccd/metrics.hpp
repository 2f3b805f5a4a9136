#pragma once

// Quality measures: crisp NMI, LFK overlapping NMI, participation
// coefficient, core accuracy against ground truth, and overlap confusion
// counts.

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <vector>

#include "rcccd/community.hpp"
#include "rcccd/graph.hpp"

namespace rcccd {

enum class NmiNorm { Arithmetic, Max, Sqrt };

// Information-theoretic NMI over the contingency table. 1 iff the partitions
// are identical up to relabeling; 0 against a constant partition.
inline double nmi(const Partition& a, const Partition& b,
                  NmiNorm norm = NmiNorm::Arithmetic) {
    if (a.node_count() != b.node_count())
        throw std::invalid_argument("nmi: node count mismatch");
    const double n = static_cast<double>(a.node_count());
    if (n == 0.0) throw std::invalid_argument("nmi: empty partitions");
    std::vector<NodeId> la = a.labels(), lb = b.labels();
    std::map<std::pair<NodeId, NodeId>, double> joint;
    std::vector<double> ca(a.size(), 0.0), cb(b.size(), 0.0);
    for (std::size_t v = 0; v < la.size(); ++v) {
        joint[{la[v], lb[v]}] += 1.0;
        ca[la[v]] += 1.0;
        cb[lb[v]] += 1.0;
    }
    double mi = 0.0;
    for (const auto& [cell, nij] : joint)
        mi += nij / n * std::log(n * nij / (ca[cell.first] * cb[cell.second]));
    auto entropy = [&](const std::vector<double>& c) {
        double h = 0.0;
        for (double x : c)
            if (x > 0.0) h -= x / n * std::log(x / n);
        return h;
    };
    const double ha = entropy(ca), hb = entropy(cb);
    double denom;
    switch (norm) {
        case NmiNorm::Max: denom = std::max(ha, hb); break;
        case NmiNorm::Sqrt: denom = std::sqrt(ha * hb); break;
        default: denom = 0.5 * (ha + hb); break;
    }
    if (denom == 0.0) return ha == 0.0 && hb == 0.0 ? 1.0 : 0.0;
    return std::clamp(mi / denom, 0.0, 1.0);
}

namespace detail {

inline double plogp_term(double w, double n) {
    return w <= 0.0 ? 0.0 : -w * std::log(w / n);
}

// Mean normalized conditional entropy H(X|Y) of the LFK measure, over binary
// membership vectors.
inline double lfk_half(const Cover& x, const Cover& y) {
    const double n = static_cast<double>(x.node_count());
    double sum = 0.0;
    for (const auto& xk : x.communities()) {
        const double a = static_cast<double>(xk.size());
        const double h_xk = plogp_term(a, n) + plogp_term(n - a, n);
        if (h_xk == 0.0) continue;  // community spans V: no uncertainty to explain
        double best = h_xk;
        for (const auto& yl : y.communities()) {
            NodeSet inter;
            std::set_intersection(xk.begin(), xk.end(), yl.begin(), yl.end(),
                                  std::back_inserter(inter));
            const double c11 = static_cast<double>(inter.size());
            const double c10 = a - c11;
            const double c01 = static_cast<double>(yl.size()) - c11;
            const double c00 = n - a - c01;
            // reject anti-correlated candidates, per the measure's definition
            if (plogp_term(c11, n) + plogp_term(c00, n) <
                plogp_term(c01, n) + plogp_term(c10, n))
                continue;
            const double b = static_cast<double>(yl.size());
            const double h_cond = plogp_term(c11, n) + plogp_term(c10, n) +
                                  plogp_term(c01, n) + plogp_term(c00, n) -
                                  plogp_term(b, n) - plogp_term(n - b, n);
            best = std::min(best, h_cond);
        }
        sum += best / h_xk;
    }
    return sum / static_cast<double>(x.size());
}

}  // namespace detail

// LFK normalized-conditional-entropy similarity between covers; symmetric,
// 1 on identical covers.
inline double overlapping_nmi(const Cover& a, const Cover& b) {
    if (a.node_count() != b.node_count())
        throw std::invalid_argument("overlapping_nmi: node count mismatch");
    if (a.size() == 0 || b.size() == 0)
        throw std::invalid_argument("overlapping_nmi: empty cover");
    const double v = 1.0 - 0.5 * (detail::lfk_half(a, b) + detail::lfk_half(b, a));
    return std::clamp(v, 0.0, 1.0);
}

// P(v) = 1 - sum_s (d_{v,s}/d_v)^2 with the modified total degree: each
// neighbor counts once per community it belongs to.
inline double participation_coefficient(const Graph& g, const Cover& c, NodeId v) {
    g.check_node(v);
    if (c.node_count() != g.node_count())
        throw std::invalid_argument("participation_coefficient: node count mismatch");
    std::vector<double> per_comm(c.size(), 0.0);
    double total = 0.0;
    for (std::size_t s = 0; s < c.size(); ++s) {
        const auto& comm = c.community(s);
        for (NodeId u : g.neighbors(v))
            if (std::binary_search(comm.begin(), comm.end(), u)) {
                per_comm[s] += 1.0;
                total += 1.0;
            }
    }
    if (total == 0.0)
        throw std::invalid_argument("participation_coefficient: node has no community-assigned neighbor");
    double sum_sq = 0.0;
    for (double d : per_comm) sum_sq += (d / total) * (d / total);
    return 1.0 - sum_sq;
}

namespace detail {

inline double jaccard(const NodeSet& a, const NodeSet& b) {
    NodeSet inter;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(),
                          std::back_inserter(inter));
    const double i = static_cast<double>(inter.size());
    const double u = static_cast<double>(a.size() + b.size()) - i;
    return u == 0.0 ? 0.0 : i / u;
}

// Maximum-weight assignment (Hungarian, O(n^3)) on a rows x cols score
// matrix; returns per-row matched column or -1.
inline std::vector<int> max_assignment(const std::vector<std::vector<double>>& score) {
    const std::size_t rows = score.size();
    if (rows == 0) return {};
    const std::size_t cols = score[0].size();
    const std::size_t dim = std::max(rows, cols);
    const double kInf = 1e100;
    // minimize negated scores on a padded square matrix
    std::vector<std::vector<double>> a(dim + 1, std::vector<double>(dim + 1, 0.0));
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j) a[i + 1][j + 1] = -score[i][j];
    std::vector<double> u(dim + 1, 0.0), v(dim + 1, 0.0);
    std::vector<std::size_t> p(dim + 1, 0), way(dim + 1, 0);
    for (std::size_t i = 1; i <= dim; ++i) {
        p[0] = i;
        std::size_t j0 = 0;
        std::vector<double> minv(dim + 1, kInf);
        std::vector<char> used(dim + 1, 0);
        do {
            used[j0] = 1;
            std::size_t i0 = p[j0], j1 = 0;
            double delta = kInf;
            for (std::size_t j = 1; j <= dim; ++j) {
                if (used[j]) continue;
                const double cur = a[i0][j] - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (std::size_t j = 0; j <= dim; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            std::size_t j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0);
    }
    std::vector<int> match(rows, -1);
    for (std::size_t j = 1; j <= dim; ++j)
        if (p[j] >= 1 && p[j] <= rows && j <= cols) match[p[j] - 1] = static_cast<int>(j - 1);
    return match;
}

}  // namespace detail

enum class CoreMatching { GreedyJaccard, Optimal };

// Match lower approximations to ground-truth communities (each GT community
// used at most once), then count lower nodes landing inside their matched GT
// community.
inline double core_accuracy(const RoughCover& rc, const Cover& gt,
                            CoreMatching matching = CoreMatching::GreedyJaccard) {
    if (rc.node_count() != gt.node_count())
        throw std::invalid_argument("core_accuracy: node count mismatch");
    std::size_t total = 0;
    for (const auto& c : rc.communities()) total += c.lower.size();
    if (total == 0) throw std::invalid_argument("core_accuracy: all lowers empty");

    std::vector<int> match(rc.size(), -1);
    if (matching == CoreMatching::Optimal) {
        std::vector<std::vector<double>> score(rc.size(),
                                               std::vector<double>(gt.size(), 0.0));
        for (std::size_t i = 0; i < rc.size(); ++i)
            for (std::size_t j = 0; j < gt.size(); ++j)
                score[i][j] = detail::jaccard(rc.communities()[i].lower, gt.community(j));
        match = detail::max_assignment(score);
    } else {
        std::vector<char> used(gt.size(), 0);
        for (std::size_t round = 0; round < std::min(rc.size(), gt.size()); ++round) {
            double best = -1.0;
            std::size_t bi = 0, bj = 0;
            for (std::size_t i = 0; i < rc.size(); ++i) {
                if (match[i] != -1) continue;
                for (std::size_t j = 0; j < gt.size(); ++j) {
                    if (used[j]) continue;
                    const double s = detail::jaccard(rc.communities()[i].lower,
                                                     gt.community(j));
                    if (s > best) {  // strict: ties keep the smaller (i, j)
                        best = s;
                        bi = i;
                        bj = j;
                    }
                }
            }
            match[bi] = static_cast<int>(bj);
            used[bj] = 1;
        }
    }
    std::size_t correct = 0;
    for (std::size_t i = 0; i < rc.size(); ++i) {
        if (match[i] < 0) continue;
        const auto& gtc = gt.community(static_cast<std::size_t>(match[i]));
        for (NodeId v : rc.communities()[i].lower)
            if (std::binary_search(gtc.begin(), gtc.end(), v)) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(total);
}

struct OverlapConfusion {
    std::size_t true_positives = 0;
    std::size_t false_positives = 0;
};

// Predicted overlap = nodes in >= 2 uppers; ground-truth overlap = nodes in
// >= 2 GT communities.
inline OverlapConfusion overlap_confusion(const RoughCover& rc, const Cover& gt) {
    if (rc.node_count() != gt.node_count())
        throw std::invalid_argument("overlap_confusion: node count mismatch");
    NodeSet predicted = overlapping_nodes(rc);
    std::vector<int> gt_count(gt.node_count(), 0);
    for (const auto& c : gt.communities())
        for (NodeId v : c) ++gt_count[v];
    OverlapConfusion out;
    for (NodeId v : predicted) {
        if (gt_count[v] >= 2)
            ++out.true_positives;
        else
            ++out.false_positives;
    }
    return out;
}

}  // namespace rcccd
