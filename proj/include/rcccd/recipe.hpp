#pragma once

// Standard ensemble construction shared by the CLI and the test harness:
// seeded detector runs, per-run bookkeeping, and the degenerate-cover filter.

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "rcccd/community.hpp"
#include "rcccd/detectors.hpp"
#include "rcccd/graph.hpp"

namespace rcccd {

struct EnsembleRunRecord {
    std::string algorithm;
    int run = 0;
    std::uint64_t seed = 0;
    std::size_t communities = 0;
    double modularity = 0.0;
    bool converged = true;
    bool kept = true;  // degenerate single-community covers are excluded
};

struct EnsembleSpec {
    int louvain_runs = 10;
    int lpa_runs = 10;
    int greedy_runs = 1;  // deterministic; >1 only duplicates
    bool keep_degenerate = false;
};

struct EnsembleBuild {
    std::vector<Cover> covers;         // the kept covers, in record order
    std::vector<EnsembleRunRecord> records;  // every run, kept or not

    Ensemble ensemble() const { return Ensemble(covers); }
};

// A single-community cover carries no co-clustering signal: it adds a
// constant 1/p to every pair similarity, which only dilutes the threshold
// beta. Dropped by default; the record keeps the run auditable.
inline EnsembleBuild build_ensemble(const Graph& g, const EnsembleSpec& spec,
                                    std::uint64_t master_seed) {
    EnsembleBuild out;
    std::mt19937_64 seeder(master_seed);
    auto add = [&](std::string algorithm, int run, std::uint64_t seed, Partition p,
                   bool converged) {
        EnsembleRunRecord rec;
        rec.algorithm = std::move(algorithm);
        rec.run = run;
        rec.seed = seed;
        rec.communities = p.size();
        rec.modularity = modularity(g, p);
        rec.converged = converged;
        rec.kept = spec.keep_degenerate || p.size() > 1;
        if (rec.kept) out.covers.push_back(std::move(p));
        out.records.push_back(std::move(rec));
    };
    for (int i = 0; i < spec.louvain_runs; ++i) {
        const std::uint64_t s = seeder();
        add("louvain", i, s, louvain(g, s), true);
    }
    for (int i = 0; i < spec.lpa_runs; ++i) {
        const std::uint64_t s = seeder();
        LpaResult r = label_propagation(g, s);
        add("lpa", i, s, std::move(r.partition), r.converged);
    }
    for (int i = 0; i < spec.greedy_runs; ++i)
        add("greedy", i, 0, greedy_modularity(g), true);
    return out;
}

}  // namespace rcccd
