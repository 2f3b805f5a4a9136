#pragma once

// Community assignment types: covers, partitions, ensembles, and rough
// covers with lower/upper approximations.

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "rcccd/graph.hpp"

namespace rcccd {

using NodeSet = std::vector<NodeId>;  // kept sorted ascending

inline NodeSet sorted_unique(NodeSet s) {
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
    return s;
}

// Ordered list of nonempty communities; community identity is positional.
// Full coverage of V is not required and overlap is allowed.
class Cover {
public:
    Cover(std::size_t node_count, std::vector<NodeSet> communities)
        : n_(node_count) {
        communities_.reserve(communities.size());
        for (auto& c : communities) {
            if (c.empty()) throw std::invalid_argument("Cover: empty community");
            auto s = sorted_unique(std::move(c));
            if (s.back() >= n_)
                throw std::invalid_argument("Cover: member id out of range");
            communities_.push_back(std::move(s));
        }
    }

    std::size_t node_count() const { return n_; }
    std::size_t size() const { return communities_.size(); }
    const std::vector<NodeSet>& communities() const { return communities_; }
    const NodeSet& community(std::size_t i) const { return communities_.at(i); }

    bool is_partition() const {
        std::vector<char> seen(n_, 0);
        std::size_t total = 0;
        for (const auto& c : communities_) {
            for (NodeId v : c) {
                if (seen[v]) return false;
                seen[v] = 1;
            }
            total += c.size();
        }
        return total == n_;
    }

private:
    std::size_t n_;
    std::vector<NodeSet> communities_;
};

// A Cover whose communities are pairwise disjoint and exhaustive.
class Partition : public Cover {
public:
    Partition(std::size_t node_count, std::vector<NodeSet> communities)
        : Cover(node_count, std::move(communities)) {
        if (!is_partition())
            throw std::invalid_argument("Partition: communities must be disjoint and cover V");
    }

    static Partition from_labels(const std::vector<NodeId>& labels) {
        std::map<NodeId, NodeSet> groups;
        for (NodeId v = 0; v < labels.size(); ++v) groups[labels[v]].push_back(v);
        std::vector<NodeSet> comms;
        comms.reserve(groups.size());
        for (auto& [label, members] : groups) comms.push_back(std::move(members));
        // order communities by smallest member id for determinism
        std::sort(comms.begin(), comms.end(),
                  [](const NodeSet& a, const NodeSet& b) { return a.front() < b.front(); });
        return Partition(labels.size(), std::move(comms));
    }

    std::vector<NodeId> labels() const {
        std::vector<NodeId> out(node_count());
        for (NodeId c = 0; c < size(); ++c)
            for (NodeId v : community(c)) out[v] = c;
        return out;
    }
};

inline std::vector<std::size_t> membership(const Cover& cover, NodeId v) {
    if (v >= cover.node_count())
        throw std::invalid_argument("membership: node id out of range");
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < cover.size(); ++i) {
        const auto& c = cover.community(i);
        if (std::binary_search(c.begin(), c.end(), v)) out.push_back(i);
    }
    return out;
}

// Ordered collection of covers over the same node set.
class Ensemble {
public:
    explicit Ensemble(std::vector<Cover> covers) : covers_(std::move(covers)) {
        if (covers_.empty()) throw std::invalid_argument("Ensemble: empty");
        for (const auto& c : covers_)
            if (c.node_count() != covers_.front().node_count())
                throw std::invalid_argument("Ensemble: mixed node counts");
    }

    std::size_t node_count() const { return covers_.front().node_count(); }
    std::size_t size() const { return covers_.size(); }
    const std::vector<Cover>& covers() const { return covers_; }
    const Cover& cover(std::size_t r) const { return covers_.at(r); }

private:
    std::vector<Cover> covers_;
};

struct RoughCommunity {
    NodeSet lower;  // certain members, disjoint across communities
    NodeSet upper;  // possible members, superset of lower
};

class RoughCover {
public:
    RoughCover(std::size_t node_count, std::vector<RoughCommunity> communities)
        : n_(node_count), communities_(std::move(communities)) {
        std::vector<char> in_lower(n_, 0);
        for (auto& rc : communities_) {
            rc.lower = sorted_unique(std::move(rc.lower));
            rc.upper = sorted_unique(std::move(rc.upper));
            if (!rc.upper.empty() && rc.upper.back() >= n_)
                throw std::invalid_argument("RoughCover: member id out of range");
            if (!std::includes(rc.upper.begin(), rc.upper.end(),
                               rc.lower.begin(), rc.lower.end()))
                throw std::invalid_argument("RoughCover: lower not contained in upper");
            for (NodeId v : rc.lower) {
                if (in_lower[v])
                    throw std::invalid_argument("RoughCover: lowers overlap");
                in_lower[v] = 1;
            }
        }
    }

    std::size_t node_count() const { return n_; }
    std::size_t size() const { return communities_.size(); }
    const std::vector<RoughCommunity>& communities() const { return communities_; }

private:
    std::size_t n_;
    std::vector<RoughCommunity> communities_;
};

// Cover whose i-th community is the i-th upper approximation.
inline Cover crisp_projection(const RoughCover& rc) {
    std::vector<NodeSet> comms;
    comms.reserve(rc.size());
    for (const auto& c : rc.communities()) comms.push_back(c.upper);
    return Cover(rc.node_count(), std::move(comms));
}

// Nodes contained in at least two upper approximations.
inline NodeSet overlapping_nodes(const RoughCover& rc) {
    std::vector<int> count(rc.node_count(), 0);
    for (const auto& c : rc.communities())
        for (NodeId v : c.upper) ++count[v];
    NodeSet out;
    for (NodeId v = 0; v < rc.node_count(); ++v)
        if (count[v] >= 2) out.push_back(v);
    return out;
}

// ---------------------------------------------------------------------------
// File formats

// "community-per-line": line i lists the members of community i. The LFR
// community.dat layout ("node comm [comm...]" rows, 1-based) is accepted and
// pivoted; it is recognized by the first column enumerating 1..L.
inline Cover load_cover(const std::string& path, std::size_t node_count,
                        IndexBase base = IndexBase::Auto) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open cover file: " + path);
    std::vector<std::vector<long>> rows;
    long min_id = std::numeric_limits<long>::max();
    std::string line;
    while (std::getline(in, line)) {
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        std::vector<long> row;
        long x;
        while (ls >> x) row.push_back(x);
        if (row.empty()) continue;
        for (long id : row) min_id = std::min(min_id, id);
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw std::runtime_error("cover file is empty: " + path);

    bool node_comm = rows.size() == node_count;
    for (std::size_t i = 0; node_comm && i < rows.size(); ++i)
        node_comm = rows[i].size() >= 2 && rows[i][0] == static_cast<long>(i + 1);

    long offset = 0;
    if (base == IndexBase::One || (base == IndexBase::Auto && min_id >= 1)) offset = 1;

    std::map<long, NodeSet> by_comm;
    std::vector<NodeSet> comms;
    if (node_comm) {
        for (const auto& row : rows) {
            NodeId v = static_cast<NodeId>(row[0] - 1);
            for (std::size_t j = 1; j < row.size(); ++j)
                by_comm[row[j]].push_back(v);
        }
        for (auto& [id, members] : by_comm) comms.push_back(std::move(members));
    } else {
        for (const auto& row : rows) {
            NodeSet c;
            for (long id : row) {
                if (id - offset < 0) throw std::runtime_error("cover file: id below base");
                c.push_back(static_cast<NodeId>(id - offset));
            }
            comms.push_back(std::move(c));
        }
    }
    return Cover(node_count, std::move(comms));
}

inline void save_cover(const Cover& c, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write cover file: " + path);
    for (const auto& comm : c.communities()) {
        for (std::size_t i = 0; i < comm.size(); ++i)
            out << (i ? " " : "") << comm[i];
        out << "\n";
    }
}

struct RoughCoverParams {
    double beta = 0.75;
    double gamma = 0.8;
};

inline nlohmann::json rough_cover_to_json(const RoughCover& rc, const RoughCoverParams& params) {
    nlohmann::json j;
    j["params"] = {{"beta", params.beta}, {"gamma", params.gamma}, {"k", rc.size()}};
    j["node_count"] = rc.node_count();
    j["communities"] = nlohmann::json::array();
    for (const auto& c : rc.communities())
        j["communities"].push_back({{"lower", c.lower}, {"upper", c.upper}});
    return j;
}

inline RoughCover rough_cover_from_json(const nlohmann::json& j) {
    std::vector<RoughCommunity> comms;
    for (const auto& c : j.at("communities"))
        comms.push_back({c.at("lower").get<NodeSet>(), c.at("upper").get<NodeSet>()});
    return RoughCover(j.at("node_count").get<std::size_t>(), std::move(comms));
}

inline void save_rough_cover(const RoughCover& rc, const RoughCoverParams& params,
                             const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write rough cover: " + path);
    out << rough_cover_to_json(rc, params).dump(2) << "\n";
}

inline RoughCover load_rough_cover(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open rough cover: " + path);
    nlohmann::json j;
    in >> j;
    return rough_cover_from_json(j);
}

}  // namespace rcccd
