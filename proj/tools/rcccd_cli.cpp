// rcccd: generate benchmarks, build detector ensembles, run the rough
// consensus, evaluate against ground truth, and orchestrate recipes.
//
// Exit codes: 0 ok, 1 input error, 2 runtime error.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include <rcccd/rcccd.hpp>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace rcccd;

namespace {

// ---------------------------------------------------------------------------
// Small helpers

std::string fmt6(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6f", x);
    return buf;
}

// Stable 64-bit string hash (FNV-1a) for deriving per-stage seeds.
std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::uint64_t mix_seed(std::uint64_t base, std::uint64_t salt) {
    std::mt19937_64 rng(base ^ (salt * 0x9e3779b97f4a7c15ull));
    return rng();
}

// All CLI outputs go through write-then-rename so interrupted runs never
// leave truncated artifacts.
void atomic_write(const fs::path& path, const std::string& content) {
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp);
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
        out << content;
    }
    fs::rename(tmp, path);
}

template <typename Fn>
void atomic_save(const fs::path& path, Fn&& save_to) {
    const fs::path tmp = path.string() + ".tmp";
    save_to(tmp.string());
    fs::rename(tmp, path);
}

// ---------------------------------------------------------------------------
// generate

LfrConfig lfr_config_from_json(const json& j) {
    LfrConfig cfg;
    cfg.n = j.value("n", cfg.n);
    cfg.tau1 = j.value("tau1", cfg.tau1);
    cfg.tau2 = j.value("tau2", cfg.tau2);
    cfg.avg_degree = j.value("avg_degree", cfg.avg_degree);
    cfg.max_degree = j.value("max_degree", cfg.max_degree);
    cfg.c_min = j.value("c_min", cfg.c_min);
    cfg.c_max = j.value("c_max", cfg.c_max);
    cfg.o_n = j.value("o_n", cfg.o_n);
    cfg.o_m = j.value("o_m", cfg.o_m);
    cfg.seed = j.value("seed", cfg.seed);
    return cfg;
}

std::vector<double> mu_grid_from_json(const json& j) {
    if (!j.contains("mu")) throw std::invalid_argument("generate config: missing \"mu\"");
    const json& mu = j.at("mu");
    std::vector<double> grid;
    if (mu.is_number()) {
        grid.push_back(mu.get<double>());
    } else if (mu.is_array()) {
        for (const auto& x : mu) grid.push_back(x.get<double>());
    } else if (mu.is_object()) {
        const double from = mu.at("from").get<double>();
        const double to = mu.at("to").get<double>();
        const double step = mu.at("step").get<double>();
        if (step <= 0.0) throw std::invalid_argument("generate config: mu step must be > 0");
        for (double m = from; m <= to + 1e-9; m += step) grid.push_back(m);
    } else {
        throw std::invalid_argument("generate config: mu must be number, list, or range");
    }
    if (grid.empty()) throw std::invalid_argument("generate config: empty mu grid");
    return grid;
}

// Writes <out>/net<i>/{network.dat, community.dat, meta.json} per grid point.
void run_generate(const json& config, const fs::path& out_dir) {
    LfrConfig base = lfr_config_from_json(config);
    const std::vector<double> grid = mu_grid_from_json(config);
    fs::create_directories(out_dir);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        LfrConfig cfg = base;
        cfg.mu = grid[i];
        const fs::path net_dir = out_dir / ("net" + std::to_string(i + 1));
        fs::create_directories(net_dir);
        LfrNetwork net = generate_lfr(cfg);
        atomic_save(net_dir / "network.dat", [&](const std::string& p) {
            save_edge_list(net.graph, p, IndexBase::One);
        });
        atomic_save(net_dir / "community.dat", [&](const std::string& p) {
            std::vector<std::vector<std::size_t>> comms(cfg.n);
            for (std::size_t c = 0; c < net.ground_truth.size(); ++c)
                for (NodeId v : net.ground_truth.community(c)) comms[v].push_back(c + 1);
            std::ostringstream os;
            for (std::size_t v = 0; v < cfg.n; ++v) {
                os << (v + 1);
                for (std::size_t ci : comms[v]) os << "\t" << ci;
                os << "\n";
            }
            std::ofstream f(p);
            f << os.str();
        });
        json meta = {{"n", cfg.n},
                     {"mu", cfg.mu},
                     {"realized_mu", net.realized_mu},
                     {"seed", cfg.seed},
                     {"avg_degree", cfg.avg_degree},
                     {"max_degree", cfg.max_degree},
                     {"c_min", cfg.c_min},
                     {"c_max", cfg.c_max},
                     {"o_n", cfg.o_n},
                     {"o_m", cfg.o_m},
                     {"communities", net.ground_truth.size()}};
        atomic_write(net_dir / "meta.json", meta.dump(2) + "\n");
    }
}

// ---------------------------------------------------------------------------
// ensemble

std::string run_file_name(const EnsembleRunRecord& rec) {
    return rec.algorithm + "_" + std::to_string(rec.run) + ".cover";
}

// Writes one cover file per run plus manifest.json describing all of them.
void run_ensemble(const Graph& g, const EnsembleSpec& spec, std::uint64_t seed,
                  const fs::path& out_dir) {
    fs::create_directories(out_dir);
    EnsembleBuild build = build_ensemble(g, spec, seed);
    json runs = json::array();
    std::size_t cover_idx = 0;
    for (const auto& rec : build.records) {
        const std::string fname = run_file_name(rec);
        // every run is written, kept or not, so the manifest stays auditable
        const Cover* cover = nullptr;
        std::optional<Partition> rerun;
        if (rec.kept) {
            cover = &build.covers[cover_idx++];
        } else {
            // degenerate covers were not retained in build.covers: re-derive
            if (rec.algorithm == "louvain") rerun = louvain(g, rec.seed);
            else if (rec.algorithm == "lpa") rerun = label_propagation(g, rec.seed).partition;
            else rerun = greedy_modularity(g);
            cover = &*rerun;
        }
        atomic_save(out_dir / fname,
                    [&](const std::string& p) { save_cover(*cover, p); });
        runs.push_back({{"algorithm", rec.algorithm},
                        {"run", rec.run},
                        {"seed", rec.seed},
                        {"file", fname},
                        {"communities", rec.communities},
                        {"modularity", rec.modularity},
                        {"converged", rec.converged},
                        {"kept", rec.kept}});
    }
    json manifest = {{"node_count", g.node_count()},
                     {"master_seed", seed},
                     {"runs", std::move(runs)}};
    atomic_write(out_dir / "manifest.json", manifest.dump(2) + "\n");
}

// ---------------------------------------------------------------------------
// consensus

Ensemble load_manifest_ensemble(const fs::path& manifest_path, std::size_t node_count,
                                bool keep_degenerate) {
    std::ifstream in(manifest_path);
    if (!in) throw std::invalid_argument("cannot open manifest: " + manifest_path.string());
    json manifest;
    in >> manifest;
    if (!manifest.contains("runs") || !manifest["runs"].is_array())
        throw std::invalid_argument("manifest: missing \"runs\" array");
    const fs::path dir = manifest_path.parent_path();
    std::vector<Cover> covers;
    for (const auto& run : manifest["runs"]) {
        if (!run.contains("file"))
            throw std::invalid_argument("manifest: run entry without \"file\"");
        if (!keep_degenerate && !run.value("kept", true)) continue;
        const fs::path f = dir / run.at("file").get<std::string>();
        if (!fs::exists(f))
            throw std::invalid_argument("manifest references missing cover: " + f.string());
        covers.push_back(load_cover(f.string(), node_count, IndexBase::Zero));
    }
    if (covers.empty()) throw std::invalid_argument("manifest: no usable covers");
    return Ensemble(std::move(covers));
}

// ---------------------------------------------------------------------------
// evaluate

struct ProvenanceRow {
    std::string network = "-";
    std::string seed = "-";
    std::string beta = "-";
    std::string gamma = "-";
    std::string mu = "-";
};

void append_row(std::ostringstream& csv, const ProvenanceRow& prov,
                const std::string& algorithm, const std::string& metric, double value) {
    csv << prov.network << "," << algorithm << "," << metric << "," << fmt6(value) << ","
        << prov.seed << "," << prov.beta << "," << prov.gamma << "," << prov.mu << "\n";
}

const char* kCsvHeader = "network,algorithm,metric,value,seed,beta,gamma,mu\n";

// ---------------------------------------------------------------------------
// experiment

struct StageResult {
    std::string status;  // ok | failed | skipped
    std::string message;
};

struct SweepParams {
    EnsembleSpec spec;
    ConsensusConfig cfg;
    std::uint64_t seed = 0;
};

// One CSV row block per network and algorithm: the consensus cover plus each
// base detector's max-modularity run.
std::string sweep_networks(const fs::path& nets_dir, const SweepParams& params) {
    std::ostringstream csv;
    csv << kCsvHeader;
    std::vector<fs::path> net_dirs;
    for (const auto& e : fs::directory_iterator(nets_dir))
        if (e.is_directory() && e.path().filename().string().rfind("net", 0) == 0)
            net_dirs.push_back(e.path());
    std::sort(net_dirs.begin(), net_dirs.end(), [](const fs::path& a, const fs::path& b) {
        auto num = [](const fs::path& p) {
            return std::stoul(p.filename().string().substr(3));
        };
        return num(a) < num(b);
    });
    if (net_dirs.empty()) throw std::invalid_argument("sweep: no net* directories in " +
                                                      nets_dir.string());
    for (std::size_t ni = 0; ni < net_dirs.size(); ++ni) {
        const fs::path& nd = net_dirs[ni];
        Graph g = load_edge_list((nd / "network.dat").string());
        json meta;
        std::ifstream(nd / "meta.json") >> meta;
        const std::size_t n = meta.at("n").get<std::size_t>();
        if (g.node_count() < n) g = Graph(n, g.edges());
        Cover gt = load_cover((nd / "community.dat").string(), n);

        ProvenanceRow prov;
        prov.network = nd.filename().string();
        prov.seed = std::to_string(params.seed);
        prov.beta = fmt6(params.cfg.beta);
        prov.gamma = fmt6(params.cfg.gamma);
        prov.mu = fmt6(meta.at("mu").get<double>());

        EnsembleBuild build =
            build_ensemble(g, params.spec, mix_seed(params.seed, ni + 1));
        RoughCover rc = rc_ccd(g, build.ensemble(), params.cfg);
        append_row(csv, prov, "rc-ccd", "onmi", overlapping_nmi(crisp_projection(rc), gt));
        append_row(csv, prov, "rc-ccd", "k", static_cast<double>(rc.size()));

        // base rows report each detector's max-modularity run
        std::map<std::string, std::size_t> best;
        for (std::size_t i = 0; i < build.records.size(); ++i) {
            const auto& rec = build.records[i];
            auto it = best.find(rec.algorithm);
            if (it == best.end() ||
                rec.modularity > build.records[it->second].modularity)
                best[rec.algorithm] = i;
        }
        std::size_t cover_idx = 0;
        std::map<std::size_t, std::size_t> record_to_cover;
        for (std::size_t i = 0; i < build.records.size(); ++i)
            if (build.records[i].kept) record_to_cover[i] = cover_idx++;
        for (const auto& [alg, idx] : best) {
            if (!build.records[idx].kept) continue;  // degenerate best: skip row
            const Cover& cover = build.covers[record_to_cover[idx]];
            append_row(csv, prov, alg, "onmi", overlapping_nmi(cover, gt));
            append_row(csv, prov, alg, "k",
                       static_cast<double>(build.records[idx].communities));
        }
    }
    return csv.str();
}

struct StabilityParams {
    std::vector<int> runs_list{10, 50, 100};
    int replications = 20;
    ConsensusConfig cfg;
    std::uint64_t seed = 0;
    std::string net = "net1";
};

// Per replication: an ensemble of N runs, consensus on top, score vs GT; base
// rows use the max-modularity run of each detector within the replication.
std::string stability_network(const fs::path& nets_dir, const StabilityParams& params) {
    const fs::path nd = nets_dir / params.net;
    Graph g = load_edge_list((nd / "network.dat").string());
    json meta;
    std::ifstream(nd / "meta.json") >> meta;
    const std::size_t n = meta.at("n").get<std::size_t>();
    if (g.node_count() < n) g = Graph(n, g.edges());
    Cover gt = load_cover((nd / "community.dat").string(), n);

    std::ostringstream csv;
    csv << "algorithm,runs,mean,std\n";
    std::map<std::pair<std::string, int>, std::vector<double>> scores;
    std::vector<std::string> algs{"rc-ccd", "louvain", "lpa", "greedy"};
    for (int runs : params.runs_list) {
        EnsembleSpec spec;
        spec.louvain_runs = runs / 2;
        spec.lpa_runs = runs - runs / 2;
        spec.greedy_runs = 1;
        for (int rep = 0; rep < params.replications; ++rep) {
            EnsembleBuild build = build_ensemble(
                g, spec, mix_seed(params.seed, 1000ull * runs + rep + 1));
            RoughCover rc = rc_ccd(g, build.ensemble(), params.cfg);
            scores[{"rc-ccd", runs}].push_back(
                overlapping_nmi(crisp_projection(rc), gt));
            std::map<std::string, std::size_t> best;
            for (std::size_t i = 0; i < build.records.size(); ++i) {
                const auto& rec = build.records[i];
                auto it = best.find(rec.algorithm);
                if (it == best.end() ||
                    rec.modularity > build.records[it->second].modularity)
                    best[rec.algorithm] = i;
            }
            std::size_t cover_idx = 0;
            std::map<std::size_t, std::size_t> record_to_cover;
            for (std::size_t i = 0; i < build.records.size(); ++i)
                if (build.records[i].kept) record_to_cover[i] = cover_idx++;
            for (const auto& [alg, idx] : best)
                if (build.records[idx].kept)
                    scores[{alg, runs}].push_back(
                        overlapping_nmi(build.covers[record_to_cover[idx]], gt));
        }
        for (const auto& alg : algs) {
            auto it = scores.find({alg, runs});
            if (it == scores.end() || it->second.empty()) continue;
            const auto& xs = it->second;
            double mean = 0.0;
            for (double x : xs) mean += x;
            mean /= static_cast<double>(xs.size());
            double var = 0.0;
            for (double x : xs) var += (x - mean) * (x - mean);
            var /= static_cast<double>(xs.size());
            csv << alg << "," << runs << "," << fmt6(mean) << "," << fmt6(std::sqrt(var))
                << "\n";
        }
    }
    return csv.str();
}

ConsensusConfig consensus_config_from_json(const json& j) {
    ConsensusConfig cfg;
    cfg.beta = j.value("beta", cfg.beta);
    cfg.gamma = j.value("gamma", cfg.gamma);
    cfg.coverage = j.value("coverage", cfg.coverage);
    cfg.k_override = j.value("k_override", cfg.k_override);
    const std::string ks = j.value("k_selection", std::string("quantile"));
    if (ks == "quantile") cfg.k_selection = KSelection::CoverQuantile;
    else if (ks == "histogram") cfg.k_selection = KSelection::HistogramMass;
    else throw std::invalid_argument("unknown k_selection: " + ks);
    const std::string norm = j.value("cs_normalization", std::string("column"));
    if (norm == "column") cfg.cs_normalization = CsNormalization::GranuleColumn;
    else if (norm == "row") cfg.cs_normalization = CsNormalization::PrototypeRow;
    else throw std::invalid_argument("unknown cs_normalization: " + norm);
    const std::string orphan = j.value("orphan_policy", std::string("argmax"));
    if (orphan == "argmax") cfg.orphan_policy = OrphanPolicy::Argmax;
    else if (orphan == "new-community") cfg.orphan_policy = OrphanPolicy::NewCommunity;
    else throw std::invalid_argument("unknown orphan_policy: " + orphan);
    return cfg;
}

EnsembleSpec ensemble_spec_from_json(const json& j) {
    EnsembleSpec spec;
    spec.louvain_runs = j.value("louvain", spec.louvain_runs);
    spec.lpa_runs = j.value("lpa", spec.lpa_runs);
    spec.greedy_runs = j.value("greedy", spec.greedy_runs);
    spec.keep_degenerate = j.value("keep_degenerate", spec.keep_degenerate);
    return spec;
}

// Stages with satisfied needs run in parallel waves under the worker cap;
// each stage writes its own artifacts, so scheduling cannot affect bytes.
int run_experiment(const fs::path& recipe_path, const fs::path& out_dir,
                   unsigned workers) {
    std::ifstream in(recipe_path);
    if (!in) throw std::invalid_argument("cannot open recipe: " + recipe_path.string());
    json recipe;
    in >> recipe;
    const std::uint64_t master_seed = recipe.value("seed", 0ull);
    fs::create_directories(out_dir);

    std::vector<json> stages;
    if (recipe.contains("stages"))
        for (const auto& s : recipe["stages"]) stages.push_back(s);
    std::vector<std::string> names;
    std::map<std::string, std::size_t> index;
    for (const auto& s : stages) {
        const std::string name = s.at("name").get<std::string>();
        if (index.count(name)) throw std::invalid_argument("duplicate stage: " + name);
        index[name] = names.size();
        names.push_back(name);
    }
    for (const auto& s : stages)
        for (const auto& need : s.value("needs", std::vector<std::string>{}))
            if (!index.count(need))
                throw std::invalid_argument("stage needs unknown stage: " + need);

    std::vector<StageResult> results(stages.size());
    std::vector<char> done(stages.size(), 0);

    auto run_stage = [&](std::size_t i) -> StageResult {
        const json& s = stages[i];
        const std::string type = s.at("type").get<std::string>();
        const std::uint64_t stage_seed =
            s.contains("seed") ? s["seed"].get<std::uint64_t>()
                               : mix_seed(master_seed, fnv1a(names[i]));
        try {
            if (type == "generate") {
                json config = s.at("params");
                if (!config.contains("seed")) config["seed"] = stage_seed;
                run_generate(config, out_dir / names[i]);
            } else if (type == "sweep") {
                const auto& needs = s.at("needs");
                SweepParams p;
                p.spec = ensemble_spec_from_json(s.value("params", json::object()));
                p.cfg = consensus_config_from_json(s.value("params", json::object()));
                p.seed = stage_seed;
                const std::string csv =
                    sweep_networks(out_dir / needs.at(0).get<std::string>(), p);
                atomic_write(out_dir / (names[i] + ".csv"), csv);
            } else if (type == "stability") {
                const auto& needs = s.at("needs");
                const json params = s.value("params", json::object());
                StabilityParams p;
                p.cfg = consensus_config_from_json(params);
                p.seed = stage_seed;
                p.replications = params.value("replications", p.replications);
                p.net = params.value("net", p.net);
                if (params.contains("runs")) {
                    p.runs_list.clear();
                    for (const auto& r : params["runs"]) p.runs_list.push_back(r.get<int>());
                }
                const std::string csv =
                    stability_network(out_dir / needs.at(0).get<std::string>(), p);
                atomic_write(out_dir / (names[i] + ".csv"), csv);
            } else {
                return {"failed", "unknown stage type: " + type};
            }
        } catch (const std::exception& e) {
            return {"failed", e.what()};
        }
        return {"ok", ""};
    };

    // wave scheduling over the dependency DAG
    std::size_t completed = 0;
    while (completed < stages.size()) {
        std::vector<std::size_t> ready;
        for (std::size_t i = 0; i < stages.size(); ++i) {
            if (done[i]) continue;
            bool ok = true, blocked = false, failed_dep = false;
            for (const auto& need : stages[i].value("needs", std::vector<std::string>{})) {
                const std::size_t d = index[need];
                if (!done[d]) blocked = true;
                else if (results[d].status != "ok") failed_dep = true;
            }
            if (blocked) ok = false;
            if (!ok) continue;
            if (failed_dep) {
                results[i] = {"skipped", "dependency failed"};
                done[i] = 1;
                ++completed;
            } else {
                ready.push_back(i);
            }
        }
        if (ready.empty()) {
            if (completed < stages.size())
                throw std::invalid_argument("recipe has a dependency cycle");
            break;
        }
        for (std::size_t at = 0; at < ready.size(); at += workers) {
            std::vector<std::future<StageResult>> futs;
            for (std::size_t j = at; j < std::min(at + workers, ready.size()); ++j)
                futs.push_back(std::async(std::launch::async, run_stage, ready[j]));
            for (std::size_t j = 0; j < futs.size(); ++j) {
                results[ready[at + j]] = futs[j].get();
                done[ready[at + j]] = 1;
                ++completed;
            }
        }
    }

    std::ostringstream summary;
    summary << "stage,status,message\n";
    bool any_failed = false;
    for (std::size_t i = 0; i < stages.size(); ++i) {
        std::string msg = results[i].message;
        std::replace(msg.begin(), msg.end(), ',', ';');
        std::replace(msg.begin(), msg.end(), '\n', ' ');
        summary << names[i] << "," << results[i].status << "," << msg << "\n";
        if (results[i].status != "ok") any_failed = true;
    }
    atomic_write(out_dir / "summary.csv", summary.str());
    return any_failed ? 2 : 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"rough consensus community detection"};
    app.require_subcommand(1);

    // generate
    auto* gen = app.add_subcommand("generate", "generate LFR-style benchmark networks");
    std::string gen_config, gen_out;
    gen->add_option("--config", gen_config, "JSON config file")->required();
    gen->add_option("--out", gen_out, "output directory")->required();

    // ensemble
    auto* ens = app.add_subcommand("ensemble", "run a detector ensemble on a graph");
    std::string ens_graph, ens_out;
    int ens_louvain = 10, ens_lpa = 10, ens_greedy = 1;
    std::uint64_t ens_seed = 0;
    bool ens_keep_degenerate = false;
    ens->add_option("--graph", ens_graph, "edge list file")->required();
    ens->add_option("--out", ens_out, "output directory")->required();
    ens->add_option("--louvain", ens_louvain, "louvain runs");
    ens->add_option("--lpa", ens_lpa, "label propagation runs");
    ens->add_option("--greedy", ens_greedy, "greedy modularity runs");
    ens->add_option("--seed", ens_seed, "master seed");
    ens->add_flag("--keep-degenerate", ens_keep_degenerate,
                  "keep single-community covers in the ensemble");

    // consensus
    auto* cons = app.add_subcommand("consensus", "rough consensus over an ensemble");
    std::string cons_graph, cons_manifest, cons_out;
    std::string cons_orphan = "argmax", cons_ksel = "quantile", cons_norm = "column";
    ConsensusConfig cons_cfg;
    bool cons_keep_degenerate = false;
    cons->add_option("--graph", cons_graph, "edge list file")->required();
    cons->add_option("--manifest", cons_manifest, "ensemble manifest.json")->required();
    cons->add_option("--out", cons_out, "rough cover output (json)")->required();
    cons->add_option("--beta", cons_cfg.beta, "granulation threshold");
    cons->add_option("--gamma", cons_cfg.gamma, "assignment threshold");
    cons->add_option("--coverage", cons_cfg.coverage, "k selection coverage");
    cons->add_option("--k-override", cons_cfg.k_override, "fixed community count");
    cons->add_option("--orphan-policy", cons_orphan, "argmax | new-community");
    cons->add_option("--k-selection", cons_ksel, "quantile | histogram");
    cons->add_option("--cs-normalization", cons_norm, "column | row");
    cons->add_flag("--keep-degenerate", cons_keep_degenerate,
                   "also use covers the ensemble marked degenerate");

    // evaluate
    auto* eval = app.add_subcommand("evaluate", "score results against ground truth");
    std::string eval_graph, eval_gt, eval_result, eval_partition, eval_out;
    std::string eval_metrics = "onmi", eval_network = "-", eval_algorithm = "-";
    std::string eval_seed = "-", eval_mu = "-";
    eval->add_option("--graph", eval_graph, "edge list file")->required();
    eval->add_option("--ground-truth", eval_gt, "ground truth cover file")->required();
    eval->add_option("--result", eval_result, "rough cover json to score");
    eval->add_option("--partition", eval_partition, "crisp cover file to score");
    eval->add_option("--metrics", eval_metrics,
                     "comma list: nmi,onmi,core,overlap,k");
    eval->add_option("--out", eval_out, "CSV output (default stdout)");
    eval->add_option("--network", eval_network, "provenance: network label");
    eval->add_option("--algorithm", eval_algorithm, "provenance: algorithm label");
    eval->add_option("--seed", eval_seed, "provenance: seed");
    eval->add_option("--mu", eval_mu, "provenance: mu");

    // experiment
    auto* exp = app.add_subcommand("experiment", "run a recipe of stages");
    std::string exp_recipe, exp_out;
    unsigned exp_workers = 1;
    exp->add_option("--recipe", exp_recipe, "recipe json")->required();
    exp->add_option("--out", exp_out, "report directory")->required();
    exp->add_option("--workers", exp_workers, "parallel stage cap")
        ->check(CLI::Range(1, 64));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 1;  // any parse failure is an input error
    }

    try {
        if (gen->parsed()) {
            std::ifstream in(gen_config);
            if (!in) throw std::invalid_argument("cannot open config: " + gen_config);
            json config;
            in >> config;
            run_generate(config, gen_out);
        } else if (ens->parsed()) {
            Graph g = load_edge_list(ens_graph);
            EnsembleSpec spec;
            spec.louvain_runs = ens_louvain;
            spec.lpa_runs = ens_lpa;
            spec.greedy_runs = ens_greedy;
            spec.keep_degenerate = ens_keep_degenerate;
            run_ensemble(g, spec, ens_seed, ens_out);
        } else if (cons->parsed()) {
            Graph g = load_edge_list(cons_graph);
            json j = {{"k_selection", cons_ksel},
                      {"cs_normalization", cons_norm},
                      {"orphan_policy", cons_orphan}};
            ConsensusConfig cfg = consensus_config_from_json(j);
            cfg.beta = cons_cfg.beta;
            cfg.gamma = cons_cfg.gamma;
            cfg.coverage = cons_cfg.coverage;
            cfg.k_override = cons_cfg.k_override;
            Ensemble np = load_manifest_ensemble(cons_manifest, g.node_count(),
                                                 cons_keep_degenerate);
            RoughCover rc = rc_ccd(g, np, cfg);
            atomic_save(cons_out, [&](const std::string& p) {
                save_rough_cover(rc, {cfg.beta, cfg.gamma}, p);
            });
        } else if (eval->parsed()) {
            Graph g = load_edge_list(eval_graph);
            Cover gt = load_cover(eval_gt, g.node_count());
            if (eval_result.empty() == eval_partition.empty())
                throw std::invalid_argument(
                    "evaluate: pass exactly one of --result / --partition");
            std::set<std::string> metrics;
            {
                std::istringstream ms(eval_metrics);
                std::string m;
                while (std::getline(ms, m, ',')) metrics.insert(m);
            }
            ProvenanceRow prov;
            prov.network = eval_network;
            prov.seed = eval_seed;
            prov.mu = eval_mu;
            std::ostringstream csv;
            csv << kCsvHeader;
            if (!eval_result.empty()) {
                RoughCover rc = load_rough_cover(eval_result);
                std::ifstream rin(eval_result);
                json rj;
                rin >> rj;
                prov.beta = fmt6(rj.at("params").value("beta", 0.75));
                prov.gamma = fmt6(rj.at("params").value("gamma", 0.8));
                Cover proj = crisp_projection(rc);
                if (metrics.count("onmi"))
                    append_row(csv, prov, eval_algorithm, "onmi",
                               overlapping_nmi(proj, gt));
                if (metrics.count("core"))
                    append_row(csv, prov, eval_algorithm, "core", core_accuracy(rc, gt));
                if (metrics.count("overlap")) {
                    OverlapConfusion conf = overlap_confusion(rc, gt);
                    append_row(csv, prov, eval_algorithm, "overlap_tp",
                               static_cast<double>(conf.true_positives));
                    append_row(csv, prov, eval_algorithm, "overlap_fp",
                               static_cast<double>(conf.false_positives));
                }
                if (metrics.count("k"))
                    append_row(csv, prov, eval_algorithm, "k",
                               static_cast<double>(rc.size()));
                if (metrics.count("nmi"))
                    throw std::invalid_argument(
                        "evaluate: crisp nmi is undefined on a rough cover; use onmi");
            } else {
                Cover cover = load_cover(eval_partition, g.node_count());
                if (metrics.count("onmi"))
                    append_row(csv, prov, eval_algorithm, "onmi",
                               overlapping_nmi(cover, gt));
                if (metrics.count("nmi")) {
                    Partition pa(cover.node_count(), cover.communities());
                    Partition pb(gt.node_count(), gt.communities());
                    append_row(csv, prov, eval_algorithm, "nmi", nmi(pa, pb));
                }
                if (metrics.count("k"))
                    append_row(csv, prov, eval_algorithm, "k",
                               static_cast<double>(cover.size()));
            }
            if (eval_out.empty())
                std::cout << csv.str();
            else
                atomic_write(eval_out, csv.str());
        } else if (exp->parsed()) {
            return run_experiment(exp_recipe, exp_out, exp_workers);
        }
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const GenerationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
