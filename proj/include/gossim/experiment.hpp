#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "gossim/config.hpp"
#include "gossim/graph.hpp"
#include "gossim/metrics.hpp"
#include "gossim/simulate.hpp"

namespace gossim {

struct GraphGenSpec {
    std::uint32_t count = 20;
    std::uint32_t n = 100;
    std::uint32_t edges_per_node = 2;
    std::uint32_t d_max = 8;
    std::uint64_t seed = 1;
};

// A batch of runs: |policies| x |v0_values| x |graphs| x seeds_per_point.
struct ExperimentPlan {
    // Graph source: a directory of DOT files, or a generation spec.
    std::string graphs_dir; // empty -> generate from gen_spec
    GraphGenSpec gen_spec;

    std::vector<Policy> policies;
    std::vector<double> v0_values;
    PresetParams params{100, 0.2, 300, 1.0 / 3.0};
    std::string preset_name; // echo only; empty for explicit parameters

    std::uint32_t seeds_per_point = 3;
    std::uint64_t master_seed = 1;
    std::uint64_t steps = 5000;
    std::uint32_t ttl = 8;
    std::size_t cache_capacity = 256;
    double mean_intergen = 200.0;
    bool two_stage_delay = false;
    bool dump_traces = false;
    std::uint32_t jobs = 0; // 0 -> hardware concurrency
};

// K values uniformly spaced in (0, 1]: i/K for i = 1..K.
inline std::vector<double> sweep_v0(std::uint32_t k) {
    if (k < 1) throw std::invalid_argument("sweep_v0: K must be >= 1");
    std::vector<double> values;
    values.reserve(k);
    for (std::uint32_t i = 1; i <= k; ++i)
        values.push_back(static_cast<double>(i) / static_cast<double>(k));
    return values;
}

inline std::uint64_t derive_run_seed(std::uint64_t master_seed,
                                     std::uint64_t graph_index,
                                     std::uint64_t policy_index,
                                     std::uint64_t v0_index,
                                     std::uint64_t replicate) {
    std::uint64_t h = mix64(master_seed);
    h = mix64(h ^ (graph_index + 0x100));
    h = mix64(h ^ (policy_index + 0x200));
    h = mix64(h ^ (v0_index + 0x300));
    h = mix64(h ^ (replicate + 0x400));
    return h;
}

inline std::vector<Graph> generate_graph_set(const GraphGenSpec& spec) {
    std::vector<Graph> graphs;
    graphs.reserve(spec.count);
    for (std::uint32_t i = 0; i < spec.count; ++i) {
        std::uint64_t seed = mix64(spec.seed ^ (0x9000 + i));
        Graph g = generate_overlay(spec.n, spec.edges_per_node, spec.d_max, seed);
        char name[32];
        std::snprintf(name, sizeof name, "g%03u", i);
        g.graph_id = name;
        graphs.push_back(std::move(g));
    }
    return graphs;
}

inline std::vector<Graph> load_graph_dir(const std::string& dir) {
    namespace fs = std::filesystem;
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir))
        if (entry.is_regular_file() && entry.path().extension() == ".dot")
            files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    if (files.empty())
        throw std::runtime_error("no .dot files in " + dir);
    std::vector<Graph> graphs;
    graphs.reserve(files.size());
    for (const auto& f : files) {
        std::ifstream in(f);
        if (!in) throw std::runtime_error("cannot open " + f.string());
        Graph g = import_dot(in);
        g.graph_id = f.stem().string();
        graphs.push_back(std::move(g));
    }
    return graphs;
}

inline std::vector<Graph> resolve_graphs(const ExperimentPlan& plan) {
    return plan.graphs_dir.empty() ? generate_graph_set(plan.gen_spec)
                                   : load_graph_dir(plan.graphs_dir);
}

struct RunOutcome {
    MetricsReport report;
    std::string trace_text; // only filled when the plan dumps traces
};

struct ExperimentResult {
    std::vector<MetricsReport> reports; // run-index order
    std::vector<AggregateRow> aggregated;
    std::vector<std::string> trace_texts; // empty unless dump_traces
};

inline SimConfig make_run_config(const ExperimentPlan& plan, const Graph& g,
                                 Policy policy, double v0,
                                 std::uint64_t run_seed) {
    SimConfig cfg;
    cfg.steps = plan.steps;
    cfg.n = g.node_count;
    cfg.edges_per_node = plan.gen_spec.edges_per_node;
    cfg.ttl_init = plan.ttl;
    cfg.cache_capacity = plan.cache_capacity;
    cfg.mean_intergen = plan.mean_intergen;
    cfg.policy = policy;
    cfg.v0 = v0;
    cfg.sigma = plan.params.sigma;
    cfg.delta = plan.params.delta;
    cfg.alpha = plan.params.alpha;
    cfg.t_mon = plan.params.t_mon;
    cfg.run_seed = run_seed;
    return cfg;
}

// Executes the full plan on a shared-nothing worker pool. Results land in
// run-index order, so parallel and serial execution produce identical
// output. A failed run aborts the experiment with the offending
// (policy, v0, graph, seed) identified.
inline ExperimentResult run_experiment(const ExperimentPlan& plan,
                                       const std::vector<Graph>& graphs) {
    if (plan.policies.empty())
        throw std::invalid_argument("experiment: no policies");
    if (plan.v0_values.empty())
        throw std::invalid_argument("experiment: no v0 values");
    if (graphs.empty()) throw std::invalid_argument("experiment: no graphs");
    if (plan.seeds_per_point < 1)
        throw std::invalid_argument("experiment: seeds_per_point must be >= 1");

    struct RunSpec {
        std::size_t policy_idx, v0_idx, graph_idx, replicate;
    };
    std::vector<RunSpec> specs;
    specs.reserve(plan.policies.size() * plan.v0_values.size() *
                  graphs.size() * plan.seeds_per_point);
    for (std::size_t p = 0; p < plan.policies.size(); ++p)
        for (std::size_t v = 0; v < plan.v0_values.size(); ++v)
            for (std::size_t gi = 0; gi < graphs.size(); ++gi)
                for (std::size_t r = 0; r < plan.seeds_per_point; ++r)
                    specs.push_back({p, v, gi, r});

    ExperimentResult result;
    result.reports.resize(specs.size());
    if (plan.dump_traces) result.trace_texts.resize(specs.size());

    std::uint32_t jobs = plan.jobs == 0
                             ? std::max(1u, std::thread::hardware_concurrency())
                             : plan.jobs;
    jobs = std::min<std::uint32_t>(jobs, specs.size());

    std::atomic<std::size_t> next{0};
    std::mutex error_mutex;
    std::string first_error;

    auto worker = [&]() {
        while (true) {
            std::size_t idx = next.fetch_add(1);
            if (idx >= specs.size()) return;
            const RunSpec& s = specs[idx];
            const Graph& g = graphs[s.graph_idx];
            Policy policy = plan.policies[s.policy_idx];
            double v0 = plan.v0_values[s.v0_idx];
            std::uint64_t run_seed =
                derive_run_seed(plan.master_seed, s.graph_idx, s.policy_idx,
                                s.v0_idx, s.replicate);
            try {
                SimConfig cfg = make_run_config(plan, g, policy, v0, run_seed);
                Trace trace = run(cfg, g);
                result.reports[idx] =
                    compute_report(trace, cfg, g.graph_id, plan.two_stage_delay);
                if (plan.dump_traces)
                    result.trace_texts[idx] = serialize_trace(trace);
            } catch (const std::exception& e) {
                std::lock_guard lock(error_mutex);
                if (first_error.empty())
                    first_error = "run failed (policy=" +
                                  std::string(policy_name(policy)) +
                                  ", v0=" + format_double(v0) +
                                  ", graph=" + g.graph_id +
                                  ", replicate=" + std::to_string(s.replicate) +
                                  "): " + e.what();
                next.store(specs.size()); // stop claiming work
                return;
            }
        }
    };

    if (jobs <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(jobs);
        for (std::uint32_t i = 0; i < jobs; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    if (!first_error.empty()) throw std::runtime_error(first_error);

    result.aggregated = aggregate(result.reports);
    return result;
}

inline nlohmann::json manifest_json(const ExperimentPlan& plan) {
    nlohmann::json j;
    j["format"] = "gossim-experiment-v1";
    if (plan.graphs_dir.empty()) {
        j["graphs"] = {{"kind", "generate"},
                       {"count", plan.gen_spec.count},
                       {"n", plan.gen_spec.n},
                       {"edges_per_node", plan.gen_spec.edges_per_node},
                       {"d_max", plan.gen_spec.d_max},
                       {"seed", plan.gen_spec.seed}};
    } else {
        j["graphs"] = {{"kind", "dir"}, {"path", plan.graphs_dir}};
    }
    nlohmann::json policies = nlohmann::json::array();
    for (Policy p : plan.policies) policies.push_back(policy_name(p));
    j["policies"] = policies;
    j["v0_values"] = plan.v0_values;
    j["params"] = {{"t_mon", plan.params.t_mon},
                   {"sigma", plan.params.sigma},
                   {"delta", plan.params.delta},
                   {"alpha", plan.params.alpha}};
    j["preset"] = plan.preset_name;
    j["seeds_per_point"] = plan.seeds_per_point;
    j["master_seed"] = plan.master_seed;
    j["steps"] = plan.steps;
    j["ttl"] = plan.ttl;
    j["cache_capacity"] = plan.cache_capacity;
    j["mean_intergen"] = plan.mean_intergen;
    j["two_stage_delay"] = plan.two_stage_delay;
    j["dump_traces"] = plan.dump_traces;
    return j;
}

inline ExperimentPlan plan_from_manifest(const nlohmann::json& j) {
    if (j.value("format", "") != "gossim-experiment-v1")
        throw std::runtime_error("manifest: unknown format");
    ExperimentPlan plan;
    const auto& graphs = j.at("graphs");
    if (graphs.at("kind") == "generate") {
        plan.gen_spec.count = graphs.at("count");
        plan.gen_spec.n = graphs.at("n");
        plan.gen_spec.edges_per_node = graphs.at("edges_per_node");
        plan.gen_spec.d_max = graphs.at("d_max");
        plan.gen_spec.seed = graphs.at("seed");
    } else if (graphs.at("kind") == "dir") {
        plan.graphs_dir = graphs.at("path");
    } else {
        throw std::runtime_error("manifest: unknown graph source kind");
    }
    for (const auto& name : j.at("policies")) {
        auto p = parse_policy(name.get<std::string>());
        if (!p)
            throw std::runtime_error("manifest: unknown policy '" +
                                     name.get<std::string>() + "'");
        plan.policies.push_back(*p);
    }
    plan.v0_values = j.at("v0_values").get<std::vector<double>>();
    const auto& params = j.at("params");
    plan.params = {params.at("t_mon"), params.at("sigma"), params.at("delta"),
                   params.at("alpha")};
    plan.preset_name = j.value("preset", "");
    plan.seeds_per_point = j.at("seeds_per_point");
    plan.master_seed = j.at("master_seed");
    plan.steps = j.at("steps");
    plan.ttl = j.at("ttl");
    plan.cache_capacity = j.at("cache_capacity");
    plan.mean_intergen = j.at("mean_intergen");
    plan.two_stage_delay = j.value("two_stage_delay", false);
    plan.dump_traces = j.value("dump_traces", false);
    return plan;
}

// Writes results.csv, aggregated.csv, manifest.json and (optionally) one
// trace file per run under out_dir.
inline void write_experiment_files(const std::string& out_dir,
                                   const ExperimentPlan& plan,
                                   const ExperimentResult& result) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    auto write_file = [](const fs::path& path, const std::string& text) {
        std::ofstream out(path, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write " + path.string());
        out << text;
    };
    write_file(fs::path(out_dir) / "results.csv", results_csv(result.reports));
    write_file(fs::path(out_dir) / "aggregated.csv",
               aggregated_csv(result.aggregated));
    write_file(fs::path(out_dir) / "manifest.json",
               manifest_json(plan).dump(2) + "\n");
    if (plan.dump_traces) {
        fs::create_directories(fs::path(out_dir) / "traces");
        for (std::size_t i = 0; i < result.trace_texts.size(); ++i) {
            char name[32];
            std::snprintf(name, sizeof name, "run_%06zu.trace", i);
            write_file(fs::path(out_dir) / "traces" / name,
                       result.trace_texts[i]);
        }
    }
}

} // namespace gossim
