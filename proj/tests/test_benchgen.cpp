#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>

#include <rcccd/benchgen.hpp>
#include <rcccd/metrics.hpp>

using namespace rcccd;

namespace {

std::string temp_path(const std::string& name) {
    return (std::filesystem::temp_directory_path() / name).string();
}

LfrConfig small_config(double mu, std::uint64_t seed) {
    LfrConfig cfg;
    cfg.n = 1000;
    cfg.avg_degree = 15.0;
    cfg.max_degree = 50;
    cfg.c_min = 20;
    cfg.c_max = 50;
    cfg.mu = mu;
    cfg.o_n = 100;
    cfg.o_m = 2;
    cfg.seed = seed;
    return cfg;
}

}  // namespace

TEST_CASE("lfr generation is deterministic in the seed") {
    LfrConfig cfg = small_config(0.3, 7);
    LfrNetwork a = generate_lfr(cfg);
    LfrNetwork b = generate_lfr(cfg);
    CHECK(a.graph.edges() == b.graph.edges());
    REQUIRE(a.ground_truth.size() == b.ground_truth.size());
    for (std::size_t i = 0; i < a.ground_truth.size(); ++i)
        CHECK(a.ground_truth.community(i) == b.ground_truth.community(i));
    CHECK(a.realized_mu == b.realized_mu);

    cfg.seed = 8;
    LfrNetwork c = generate_lfr(cfg);
    CHECK(c.graph.edges() != a.graph.edges());
}

TEST_CASE("lfr with mu zero and no overlap keeps every edge internal") {
    LfrConfig cfg = small_config(0.0, 3);
    cfg.o_n = 0;
    cfg.max_degree = 40;  // at mu=0 the full degree must fit inside one community
    LfrNetwork net = generate_lfr(cfg);
    CHECK(net.realized_mu == 0.0);
    CHECK(net.ground_truth.is_partition());
}

TEST_CASE("lfr small-config audit") {
    for (double mu : {0.1, 0.35, 0.6}) {
        LfrConfig cfg = small_config(mu, 11);
        LfrNetwork net = generate_lfr(cfg);

        CHECK(std::abs(net.realized_mu - mu) <= 0.03);

        const double mean_degree = 2.0 * static_cast<double>(net.graph.edge_count()) /
                                   static_cast<double>(net.graph.node_count());
        CHECK(mean_degree >= 13.5);
        CHECK(mean_degree <= 16.5);
        for (NodeId v = 0; v < net.graph.node_count(); ++v)
            CHECK(net.graph.degree(v) <= cfg.max_degree);

        for (const auto& c : net.ground_truth.communities()) {
            CHECK(c.size() >= cfg.c_min);
            CHECK(c.size() <= cfg.c_max);
        }

        // exactly o_n nodes carry o_m memberships, everyone else exactly one
        std::vector<int> count(net.graph.node_count(), 0);
        for (const auto& c : net.ground_truth.communities())
            for (NodeId v : c) ++count[v];
        std::size_t doubled = 0;
        for (int k : count) {
            CHECK((k == 1 || k == 2));
            if (k == 2) ++doubled;
        }
        CHECK(doubled == cfg.o_n);
    }
}

TEST_CASE("lfr rejects invalid configurations") {
    LfrConfig cfg = small_config(0.3, 1);
    cfg.mu = 1.5;
    CHECK_THROWS_AS(generate_lfr(cfg), std::invalid_argument);
    cfg = small_config(0.3, 1);
    cfg.c_min = 60;
    cfg.c_max = 50;
    CHECK_THROWS_AS(generate_lfr(cfg), std::invalid_argument);
    cfg = small_config(0.3, 1);
    cfg.o_n = 2000;
    CHECK_THROWS_AS(generate_lfr(cfg), std::invalid_argument);
    cfg = small_config(0.3, 1);
    cfg.avg_degree = 80.0;
    CHECK_THROWS_AS(generate_lfr(cfg), std::invalid_argument);
    // internal degree cannot fit into any community
    cfg = small_config(0.0, 1);
    cfg.o_n = 0;
    cfg.avg_degree = 45.0;
    cfg.c_min = 20;
    cfg.c_max = 25;
    CHECK_THROWS_AS(generate_lfr(cfg), GenerationError);
}

TEST_CASE("planted partition extremes and determinism") {
    auto [cliques, gt] = planted_partition(3, 5, 1.0, 0.0, 1);
    CHECK(cliques.edge_count() == 3 * 10);  // three 5-cliques
    auto comps = connected_components(cliques);
    REQUIRE(comps.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) CHECK(comps[i] == gt.community(i));

    auto [empty, gt2] = planted_partition(2, 4, 0.0, 0.0, 1);
    CHECK(empty.edge_count() == 0);
    CHECK(gt2.size() == 2);

    auto [g1, p1] = planted_partition(3, 6, 0.7, 0.05, 42);
    auto [g2, p2] = planted_partition(3, 6, 0.7, 0.05, 42);
    CHECK(g1.edges() == g2.edges());
    CHECK(p1.labels() == p2.labels());

    CHECK_THROWS_AS(planted_partition(2, 3, 1.5, 0.0, 1), std::invalid_argument);
}

TEST_CASE("lfr file output round trips through the loaders") {
    LfrConfig cfg = small_config(0.2, 5);
    cfg.n = 200;
    cfg.o_n = 20;
    LfrNetwork net = generate_lfr(cfg);

    const std::string net_path = temp_path("rcccd_network.dat");
    const std::string comm_path = temp_path("rcccd_community.dat");
    save_lfr_files(net, net_path, comm_path);

    Graph g = load_edge_list(net_path);
    CHECK(g.node_count() == net.graph.node_count());
    CHECK(g.edges() == net.graph.edges());

    Cover gt = load_cover(comm_path, cfg.n);
    REQUIRE(gt.size() == net.ground_truth.size());
    CHECK_THAT(overlapping_nmi(gt, net.ground_truth),
               Catch::Matchers::WithinAbs(1.0, 1e-12));

    std::remove(net_path.c_str());
    std::remove(comm_path.c_str());
}
