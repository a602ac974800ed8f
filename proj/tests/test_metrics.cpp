#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <map>
#include <random>
#include <sstream>

#include "gossim/experiment.hpp"
#include "gossim/metrics.hpp"
#include "gossim/simulate.hpp"

using namespace gossim;

namespace {

Trace synthetic_trace(std::uint32_t messages,
                      const std::vector<std::vector<std::uint32_t>>& hops_per_msg,
                      std::uint64_t data_tx) {
    Trace t;
    for (std::uint32_t m = 0; m < messages; ++m)
        t.generated.push_back({m, /*source=*/0, /*time=*/m});
    for (std::uint32_t m = 0; m < hops_per_msg.size(); ++m) {
        std::uint32_t rcv = 1;
        for (std::uint32_t h : hops_per_msg[m])
            t.first_receptions.push_back({m, 0, rcv++, h, m + h});
    }
    t.data_tx = data_tx;
    return t;
}

} // namespace

TEST_CASE("coverage averages receiver fractions over messages") {
    // n=5: one message reaches all 4 others, one reaches 2 -> (1.0+0.5)/2
    Trace t = synthetic_trace(2, {{1, 1, 2, 2}, {1, 1}}, 0);
    CHECK(coverage(t, 5).value() == Catch::Approx(0.75));

    Trace none = synthetic_trace(1, {{}}, 0);
    CHECK(coverage(none, 5).value() == 0.0);

    Trace empty;
    CHECK(!coverage(empty, 5).has_value());
}

TEST_CASE("full flooding coverage is exactly one") {
    Trace t = synthetic_trace(3, {{1, 1, 1}, {1, 2, 2}, {1, 1, 3}}, 0);
    CHECK(coverage(t, 4).value() == 1.0);
}

TEST_CASE("delay is the pooled mean of hop counts") {
    Trace t = synthetic_trace(2, {{1, 2}, {2, 3}}, 0);
    CHECK(delay(t).value() == Catch::Approx(2.0));
    Trace empty;
    CHECK(!delay(empty).has_value());
}

TEST_CASE("two-stage delay averages per message first") {
    // msg0 hops {1,1,1}, msg1 hops {5}: pooled = 2.0, two-stage = 3.0
    Trace t = synthetic_trace(2, {{1, 1, 1}, {5}}, 0);
    CHECK(delay(t).value() == Catch::Approx(2.0));
    CHECK(delay_two_stage(t).value() == Catch::Approx(3.0));
}

TEST_CASE("flooding delay on a path graph splits by source position") {
    Graph path = import_dot("graph G { 0 -- 1; 1 -- 2; }");
    SimConfig cfg;
    cfg.n = path.node_count;
    cfg.policy = Policy::fixed_prob;
    cfg.v0 = 1.0;
    cfg.steps = 600;
    cfg.mean_intergen = 30.0;
    cfg.cache_capacity = 4096;
    cfg.ttl_init = 2;
    Trace t = run(cfg, path);
    std::map<std::uint32_t, std::pair<double, int>> by_source;
    for (const auto& r : t.first_receptions) {
        by_source[r.source].first += r.hops;
        ++by_source[r.source].second;
    }
    REQUIRE(by_source.size() == 3);
    // hub floods both leaves in one hop; a leaf needs one and two hops
    CHECK(by_source[1].first / by_source[1].second == Catch::Approx(1.0));
    for (std::uint32_t leaf : {0u, 2u}) {
        double mean = by_source[leaf].first / by_source[leaf].second;
        CHECK(mean > 1.0);
        CHECK(mean <= 1.5);
    }
}

TEST_CASE("overhead ratio divides by the spanning-tree bound") {
    Trace t = synthetic_trace(10, {}, 990);
    CHECK(overhead_ratio(t, 100).value() == Catch::Approx(1.0));
    t.data_tx = 1980;
    CHECK(overhead_ratio(t, 100).value() == Catch::Approx(2.0));
    Trace empty;
    CHECK(!overhead_ratio(empty, 100).has_value());
}

TEST_CASE("overhead ratio is linear in data_tx") {
    Trace t = synthetic_trace(7, {}, 423);
    double r1 = overhead_ratio(t, 50).value();
    t.data_tx *= 2;
    CHECK(overhead_ratio(t, 50).value() == Catch::Approx(2.0 * r1));
}

TEST_CASE("flooding never exceeds the per-edge transmission bound") {
    Graph g = generate_overlay(40, 2, 8, 91);
    SimConfig cfg;
    cfg.n = g.node_count;
    cfg.policy = Policy::fixed_prob;
    cfg.v0 = 1.0;
    cfg.steps = 1500;
    cfg.mean_intergen = 100.0;
    cfg.cache_capacity = 1u << 20;
    Trace t = run(cfg, g);
    double bound = 2.0 * double(g.edge_count()) / double(g.node_count - 1);
    CHECK(overhead_ratio(t, g.node_count).value() <= bound);
    CHECK(overhead_ratio(t, g.node_count).value() >=
          coverage(t, g.node_count).value());
}

TEST_CASE("metrics recomputed from a serialized trace are bit-identical") {
    Graph g = generate_overlay(30, 2, 8, 47);
    SimConfig cfg;
    cfg.n = g.node_count;
    cfg.policy = Policy::adaptive1;
    cfg.v0 = 0.35;
    cfg.steps = 1000;
    cfg.mean_intergen = 25.0;
    cfg.t_mon = 50;
    Trace t = run(cfg, g);
    Trace back = parse_trace(serialize_trace(t));
    CHECK(coverage(back, cfg.n).value() == coverage(t, cfg.n).value());
    CHECK(delay(back).value() == delay(t).value());
    CHECK(overhead_ratio(back, cfg.n).value() ==
          overhead_ratio(t, cfg.n).value());
}

namespace {

MetricsReport quick_report(const std::string& policy, double v0, double cov,
                           double del, double rho, std::uint32_t n = 100) {
    MetricsReport r;
    r.policy = policy;
    r.v0 = v0;
    r.n = n;
    r.messages_generated = 100;
    r.coverage_mean = cov;
    r.delay_mean = del;
    r.rho = rho;
    r.data_tx = std::uint64_t(rho * (n - 1) * 100);
    return r;
}

} // namespace

TEST_CASE("aggregation reduces each (policy, v0) group") {
    std::vector<MetricsReport> reports{
        quick_report("fixed-prob", 0.5, 0.4, 3.0, 1.0),
        quick_report("fixed-prob", 0.5, 0.6, 4.0, 2.0),
        quick_report("fixed-prob", 0.9, 0.9, 3.5, 2.5),
    };
    auto rows = aggregate(reports);
    REQUIRE(rows.size() == 2);
    const auto& g1 = rows[0]; // rho mean 1.5 sorts first
    CHECK(g1.v0 == 0.5);
    CHECK(g1.runs == 2);
    CHECK(g1.coverage_mean.value() == Catch::Approx(0.5));
    CHECK(g1.coverage_sd == Catch::Approx(0.1414213562).margin(1e-6));
    CHECK(g1.rho_mean.value() == Catch::Approx(1.5));
    const auto& g2 = rows[1];
    CHECK(g2.runs == 1);
    CHECK(g2.coverage_sd == 0.0);
}

TEST_CASE("aggregation is invariant under input order") {
    std::vector<MetricsReport> reports;
    std::mt19937 shuffle_rng(4);
    for (int i = 0; i < 100; ++i)
        reports.push_back(quick_report(i % 2 ? "adaptive1" : "fixed-prob",
                                       (i % 5 + 1) / 5.0, 0.01 * i,
                                       1.0 + 0.01 * i, 0.02 * i));
    auto before = aggregated_csv(aggregate(reports));
    std::shuffle(reports.begin(), reports.end(), shuffle_rng);
    auto after = aggregated_csv(aggregate(reports));
    CHECK(before == after);
}

TEST_CASE("aggregation rejects mixed n within a group") {
    std::vector<MetricsReport> reports{
        quick_report("fixed-prob", 0.5, 0.4, 3.0, 1.0, 100),
        quick_report("fixed-prob", 0.5, 0.6, 4.0, 2.0, 50),
    };
    CHECK_THROWS_AS(aggregate(reports), std::invalid_argument);
}

TEST_CASE("results csv has the pinned header and round-trips aggregates") {
    std::vector<MetricsReport> reports{quick_report("adaptive2", 0.25, 0.5,
                                                    3.25, 1.75)};
    std::string csv = results_csv(reports);
    CHECK(csv.rfind("policy,graph_id,run_seed,v0,sigma,delta,alpha,t_mon,n,m,"
                    "coverage,delay,rho,data_tx,control_tx\n", 0) == 0);

    auto rows = aggregate(reports);
    std::string agg = aggregated_csv(rows);
    std::istringstream in(agg);
    auto parsed = parse_aggregated_csv(in);
    REQUIRE(parsed.size() == 1);
    CHECK(parsed[0].policy == "adaptive2");
    CHECK(parsed[0].v0 == 0.25);
    CHECK(parsed[0].coverage_mean.value() == 0.5);
    CHECK(parsed[0].rho_mean.value() == 1.75);
    CHECK(aggregated_csv(parsed) == agg);
}

TEST_CASE("curve extraction sorts by rho and applies the filter") {
    std::vector<MetricsReport> reports{
        quick_report("adaptive1", 0.3, 0.5, 3.0, 1.2),
        quick_report("adaptive1", 0.1, 0.3, 3.5, 0.8),
        quick_report("adaptive1", 0.9, 0.9, 2.5, 2.4),
        quick_report("fixed-prob", 0.5, 0.6, 3.0, 1.5),
    };
    auto rows = aggregate(reports);
    auto all = extract_curve(rows, "adaptive1", CurveMetric::coverage);
    REQUIRE(all.size() == 3);
    CHECK(std::is_sorted(all.begin(), all.end(),
                         [](auto& a, auto& b) { return a.rho < b.rho; }));
    auto filtered = extract_curve(rows, "adaptive1", CurveMetric::coverage, 1.0);
    REQUIRE(filtered.size() == 2);
    CHECK(filtered.front().rho == Catch::Approx(1.2));
}

TEST_CASE("curve interpolation brackets or declines") {
    std::vector<CurvePoint> pts{{1.0, 0.2, 0}, {2.0, 0.6, 0}, {3.0, 1.0, 0}};
    CHECK(interpolate_at_rho(pts, 1.5).value() == Catch::Approx(0.4));
    CHECK(interpolate_at_rho(pts, 2.0).value() == Catch::Approx(0.6));
    CHECK(!interpolate_at_rho(pts, 0.5).has_value());
    CHECK(!interpolate_at_rho(pts, 3.5).has_value());
}
