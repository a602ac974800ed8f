// Batch experiment front end: graph set generation, policy/v0 sweeps with
// seeded parallel execution, and plot-ready curve extraction.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gossim/experiment.hpp"
#include "gossim/graph.hpp"
#include "gossim/metrics.hpp"

namespace fs = std::filesystem;
using namespace gossim;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_usage = 1;
constexpr int exit_run_failure = 2;
constexpr int exit_unsatisfiable = 3;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// "count=20,n=100,edges-per-node=2,d-max=8,seed=42"
GraphGenSpec parse_gen_spec(const std::string& text) {
    GraphGenSpec spec;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t comma = text.find(',', pos);
        std::string item = text.substr(
            pos, comma == std::string::npos ? std::string::npos : comma - pos);
        std::size_t eq = item.find('=');
        if (eq == std::string::npos)
            throw UsageError("bad graph spec item '" + item + "'");
        std::string key = item.substr(0, eq);
        unsigned long long value = std::stoull(item.substr(eq + 1));
        if (key == "count")
            spec.count = std::uint32_t(value);
        else if (key == "n")
            spec.n = std::uint32_t(value);
        else if (key == "edges-per-node" || key == "epn")
            spec.edges_per_node = std::uint32_t(value);
        else if (key == "d-max" || key == "dmax")
            spec.d_max = std::uint32_t(value);
        else if (key == "seed")
            spec.seed = value;
        else
            throw UsageError("unknown graph spec key '" + key + "'");
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    return spec;
}

int cmd_gen_graphs(std::uint32_t n, std::uint32_t edges_per_node,
                   std::uint32_t d_max, std::uint32_t count,
                   std::uint64_t seed, const std::string& out_dir) {
    GraphGenSpec spec{count, n, edges_per_node, d_max, seed};
    auto graphs = generate_graph_set(spec);
    fs::create_directories(out_dir);
    for (const auto& g : graphs) {
        fs::path path = fs::path(out_dir) / (g.graph_id + ".dot");
        std::ofstream out(path, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write " + path.string());
        out << export_dot(g);
    }
    std::cout << "wrote " << graphs.size() << " graphs to " << out_dir << "\n";
    return exit_ok;
}

int cmd_run(const ExperimentPlan& plan, const std::string& out_dir) {
    auto graphs = resolve_graphs(plan);
    auto result = run_experiment(plan, graphs);
    write_experiment_files(out_dir, plan, result);
    std::cout << "completed " << result.reports.size() << " runs ("
              << graphs.size() << " graphs x " << plan.policies.size()
              << " policies x " << plan.v0_values.size() << " v0 x "
              << plan.seeds_per_point << " seeds)\n"
              << "results: " << (fs::path(out_dir) / "results.csv").string()
              << "\naggregated: "
              << (fs::path(out_dir) / "aggregated.csv").string()
              << "\nmanifest: "
              << (fs::path(out_dir) / "manifest.json").string() << "\n";
    return exit_ok;
}

int cmd_curves(const std::string& in_dir, double rho_min,
               const std::string& out_dir) {
    fs::path in_path = fs::path(in_dir) / "aggregated.csv";
    std::ifstream in(in_path);
    if (!in) throw std::runtime_error("cannot open " + in_path.string());
    auto rows = parse_aggregated_csv(in);
    fs::create_directories(out_dir);
    std::vector<std::string> policies;
    for (const auto& r : rows)
        if (std::find(policies.begin(), policies.end(), r.policy) ==
            policies.end())
            policies.push_back(r.policy);
    std::sort(policies.begin(), policies.end());
    for (const auto& policy : policies) {
        auto cov = extract_curve(rows, policy, CurveMetric::coverage, rho_min);
        auto del = extract_curve(rows, policy, CurveMetric::delay, rho_min);
        auto write = [&](const std::string& name, const std::string& text) {
            fs::path path = fs::path(out_dir) / name;
            std::ofstream out(path, std::ios::binary);
            if (!out) throw std::runtime_error("cannot write " + path.string());
            out << text;
        };
        write("curves_" + policy + "_coverage.csv", curve_csv(cov, "coverage"));
        write("curves_" + policy + "_delay.csv", curve_csv(del, "delay"));
    }
    std::cout << "wrote curve tables for " << policies.size()
              << " policies to " << out_dir << "\n";
    return exit_ok;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"gossip dissemination simulator and experiment harness"};
    app.require_subcommand(1);

    // gen-graphs
    auto* gen = app.add_subcommand("gen-graphs",
                                   "generate a set of overlay graphs as DOT");
    std::uint32_t gg_n = 100, gg_epn = 2, gg_dmax = 8, gg_count = 20;
    std::uint64_t gg_seed = 1;
    std::string gg_out = "graphs";
    gen->add_option("--n", gg_n, "nodes per graph");
    gen->add_option("--edges-per-node", gg_epn, "attachments per node");
    gen->add_option("--d-max", gg_dmax, "maximum diameter");
    gen->add_option("--count", gg_count, "number of graphs");
    gen->add_option("--seed", gg_seed, "generation seed");
    gen->add_option("--out-dir", gg_out, "output directory");

    // run
    auto* runcmd = app.add_subcommand("run", "execute an experiment sweep");
    std::string r_graphs, r_policy = "fixed-prob", r_preset, r_out = "out";
    std::string r_manifest;
    double r_sigma = 0.2, r_alpha = 1.0 / 3.0, r_v0 = 0.0, r_mean = 200.0;
    std::uint64_t r_delta = 300, r_tmon = 100, r_master = 1, r_steps = 5000;
    std::uint32_t r_sweep = 0, r_ttl = 8, r_seeds = 3, r_jobs = 0;
    std::size_t r_cache = 256;
    bool r_dump = false, r_two_stage = false;
    runcmd->add_option("--graphs", r_graphs,
                       "DOT directory or generation spec "
                       "(count=20,n=100,edges-per-node=2,d-max=8,seed=1); "
                       "default: generate the standard 20-graph set");
    runcmd->add_option("--policy", r_policy, "comma-separated policy list");
    runcmd->add_option("--preset", r_preset, "named parameter preset");
    runcmd->add_option("--sigma", r_sigma, "stimulus increment");
    runcmd->add_option("--delta", r_delta, "stimulus decay duration");
    runcmd->add_option("--alpha", r_alpha, "low-rate sensitivity");
    runcmd->add_option("--t-mon", r_tmon, "monitoring period");
    runcmd->add_option("--v0", r_v0, "single base probability");
    runcmd->add_option("--sweep-v0", r_sweep, "sweep K values in (0,1]");
    runcmd->add_option("--steps", r_steps, "run length");
    runcmd->add_option("--ttl", r_ttl, "initial TTL");
    runcmd->add_option("--cache", r_cache, "dedup cache capacity");
    runcmd->add_option("--mean-intergen", r_mean,
                       "mean steps between events per node");
    runcmd->add_option("--seeds", r_seeds, "replicates per sweep point");
    runcmd->add_option("--master-seed", r_master, "master seed");
    runcmd->add_option("--out", r_out, "output directory");
    runcmd->add_option("--jobs", r_jobs, "worker threads (0 = all cores)");
    runcmd->add_flag("--dump-traces", r_dump, "write per-run trace files");
    runcmd->add_flag("--delay-two-stage", r_two_stage,
                     "per-message delay averaging instead of pooled");
    runcmd->add_option("--manifest", r_manifest,
                       "replay a recorded manifest (overrides other options)");

    // curves
    auto* curves = app.add_subcommand("curves", "emit plot-ready curve tables");
    std::string c_in = "out", c_out = "curves";
    double c_rho_min = 0.0;
    curves->add_option("--in", c_in, "experiment output directory");
    curves->add_option("--rho-min", c_rho_min, "drop points with rho below");
    curves->add_option("--out", c_out, "curve output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return exit_usage;
    }

    try {
        if (gen->parsed())
            return cmd_gen_graphs(gg_n, gg_epn, gg_dmax, gg_count, gg_seed,
                                  gg_out);
        if (runcmd->parsed()) {
            ExperimentPlan plan;
            if (!r_manifest.empty()) {
                std::ifstream in(r_manifest);
                if (!in)
                    throw std::runtime_error("cannot open " + r_manifest);
                plan = plan_from_manifest(nlohmann::json::parse(in));
                if (r_jobs != 0) plan.jobs = r_jobs;
            } else {
                if (r_graphs.empty())
                    plan.gen_spec = GraphGenSpec{}; // desk-scale default set
                else if (fs::is_directory(r_graphs))
                    plan.graphs_dir = r_graphs;
                else
                    plan.gen_spec = parse_gen_spec(r_graphs);
                std::size_t pos = 0;
                while (pos <= r_policy.size()) {
                    std::size_t comma = r_policy.find(',', pos);
                    std::string name = r_policy.substr(
                        pos, comma == std::string::npos ? std::string::npos
                                                        : comma - pos);
                    auto p = parse_policy(name);
                    if (!p) throw UsageError("unknown policy '" + name + "'");
                    plan.policies.push_back(*p);
                    if (comma == std::string::npos) break;
                    pos = comma + 1;
                }
                if (!r_preset.empty()) {
                    auto preset = find_preset(r_preset);
                    if (!preset)
                        throw UsageError("unknown preset '" + r_preset + "'");
                    plan.params = *preset;
                    plan.preset_name = r_preset;
                } else {
                    plan.params = {r_tmon, r_sigma, r_delta, r_alpha};
                }
                if (r_sweep > 0 && r_v0 > 0.0)
                    throw UsageError("--v0 and --sweep-v0 are exclusive");
                if (r_sweep > 0)
                    plan.v0_values = sweep_v0(r_sweep);
                else if (r_v0 > 0.0)
                    plan.v0_values = {r_v0};
                else
                    plan.v0_values = sweep_v0(25); // desk-scale default
                plan.seeds_per_point = r_seeds;
                plan.master_seed = r_master;
                plan.steps = r_steps;
                plan.ttl = r_ttl;
                plan.cache_capacity = r_cache;
                plan.mean_intergen = r_mean;
                plan.two_stage_delay = r_two_stage;
                plan.dump_traces = r_dump;
                plan.jobs = r_jobs;
            }
            return cmd_run(plan, r_out);
        }
        if (curves->parsed()) return cmd_curves(c_in, c_rho_min, c_out);
        return exit_usage;
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_usage;
    } catch (const ConstraintUnsatisfiable& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_unsatisfiable;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_run_failure;
    }
}
