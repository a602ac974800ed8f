#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "gossim/config.hpp"
#include "gossim/simulate.hpp"

namespace gossim {

// Shortest round-trip decimal representation (deterministic, exact).
inline std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

inline double parse_double(std::string_view s) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size())
        throw std::runtime_error("bad numeric field: '" + std::string(s) + "'");
    return v;
}

// Number of distinct receivers per generated message, indexed as in
// trace.generated.
inline std::vector<std::uint32_t> per_message_receivers(const Trace& trace) {
    std::unordered_map<std::uint64_t, std::size_t> index;
    index.reserve(trace.generated.size());
    for (std::size_t i = 0; i < trace.generated.size(); ++i)
        index.emplace(trace.generated[i].msg_id, i);
    std::vector<std::uint32_t> counts(trace.generated.size(), 0);
    for (const auto& r : trace.first_receptions) {
        auto it = index.find(r.msg_id);
        if (it == index.end())
            throw std::runtime_error("trace reception for unknown message");
        ++counts[it->second];
    }
    return counts;
}

// Mean over generated messages of receivers/(n-1); the source is excluded
// from both numerator and denominator. No generated messages -> nullopt.
inline std::optional<double> coverage(const Trace& trace, std::uint32_t n) {
    if (n < 2) throw std::invalid_argument("coverage: n must be >= 2");
    if (trace.generated.empty()) return std::nullopt;
    auto counts = per_message_receivers(trace);
    double sum = 0.0;
    for (std::uint32_t c : counts) sum += static_cast<double>(c) / (n - 1);
    return sum / static_cast<double>(counts.size());
}

// Pooled mean hop count over all first receptions.
inline std::optional<double> delay(const Trace& trace) {
    if (trace.first_receptions.empty()) return std::nullopt;
    double sum = 0.0;
    for (const auto& r : trace.first_receptions) sum += r.hops;
    return sum / static_cast<double>(trace.first_receptions.size());
}

// Two-stage variant: mean hops per message first, then mean over messages
// that were received anywhere. Kept for sensitivity checks against the
// pooled estimator.
inline std::optional<double> delay_two_stage(const Trace& trace) {
    if (trace.first_receptions.empty()) return std::nullopt;
    std::unordered_map<std::uint64_t, std::pair<double, std::uint32_t>> acc;
    for (const auto& r : trace.first_receptions) {
        auto& [sum, cnt] = acc[r.msg_id];
        sum += r.hops;
        ++cnt;
    }
    double total = 0.0;
    for (const auto& [id, sc] : acc) total += sc.first / sc.second;
    return total / static_cast<double>(acc.size());
}

// data_tx / ((n-1) * m): transmissions against the spanning-tree lower bound
// of n-1 sends per message. Control traffic is excluded and reported apart.
inline std::optional<double> overhead_ratio(const Trace& trace,
                                            std::uint32_t n) {
    if (n < 2) throw std::invalid_argument("overhead_ratio: n must be >= 2");
    if (trace.generated.empty()) return std::nullopt;
    return static_cast<double>(trace.data_tx) /
           (static_cast<double>(n - 1) *
            static_cast<double>(trace.generated.size()));
}

// Per-run metrics plus the parameters that produced them.
struct MetricsReport {
    std::string policy;
    std::string graph_id;
    std::uint64_t run_seed = 0;
    double v0 = 0.0;
    double sigma = 0.0;
    std::uint64_t delta = 0;
    double alpha = 0.0;
    std::uint64_t t_mon = 0;
    std::uint32_t n = 0;
    std::uint64_t messages_generated = 0;
    std::optional<double> coverage_mean;
    std::optional<double> delay_mean;
    std::optional<double> rho;
    std::uint64_t data_tx = 0;
    std::uint64_t control_tx = 0;
};

inline MetricsReport compute_report(const Trace& trace, const SimConfig& cfg,
                                    const std::string& graph_id,
                                    bool two_stage_delay = false) {
    MetricsReport rep;
    rep.policy = std::string(policy_name(cfg.policy));
    rep.graph_id = graph_id;
    rep.run_seed = cfg.run_seed;
    rep.v0 = cfg.v0;
    rep.sigma = cfg.sigma;
    rep.delta = cfg.delta;
    rep.alpha = cfg.alpha;
    rep.t_mon = cfg.t_mon;
    rep.n = cfg.n;
    rep.messages_generated = trace.generated.size();
    rep.coverage_mean = coverage(trace, cfg.n);
    rep.delay_mean = two_stage_delay ? delay_two_stage(trace) : delay(trace);
    rep.rho = overhead_ratio(trace, cfg.n);
    rep.data_tx = trace.data_tx;
    rep.control_tx = trace.control_tx;
    return rep;
}

// Mean/sd of the per-run metrics over all (graph, seed) runs of one
// (policy, v0) sweep point.
struct AggregateRow {
    std::string policy;
    double v0 = 0.0;
    double sigma = 0.0;
    std::uint64_t delta = 0;
    double alpha = 0.0;
    std::uint64_t t_mon = 0;
    std::uint32_t n = 0;
    double m_mean = 0.0;
    std::optional<double> coverage_mean, delay_mean, rho_mean;
    double coverage_sd = 0.0, delay_sd = 0.0, rho_sd = 0.0;
    double data_tx_mean = 0.0, control_tx_mean = 0.0;
    std::uint64_t runs = 0;
};

namespace detail {

struct MeanSd {
    double mean = 0.0;
    double sd = 0.0; // sample standard deviation; 0 for a single value
};

inline MeanSd mean_sd(const std::vector<double>& xs) {
    MeanSd out;
    if (xs.empty()) return out;
    double sum = 0.0;
    for (double x : xs) sum += x;
    out.mean = sum / static_cast<double>(xs.size());
    if (xs.size() > 1) {
        double ss = 0.0;
        for (double x : xs) ss += (x - out.mean) * (x - out.mean);
        out.sd = std::sqrt(ss / static_cast<double>(xs.size() - 1));
    }
    return out;
}

} // namespace detail

// Groups reports by (policy, v0) and reduces each group to means and sample
// standard deviations, sorted by policy then mean rho for curve plotting.
// Mixed n within a group is an error.
inline std::vector<AggregateRow> aggregate(
    std::span<const MetricsReport> reports) {
    if (reports.empty())
        throw std::invalid_argument("aggregate: no reports");
    std::map<std::pair<std::string, double>, std::vector<const MetricsReport*>>
        groups;
    for (const auto& r : reports)
        groups[{r.policy, r.v0}].push_back(&r);

    std::vector<AggregateRow> rows;
    rows.reserve(groups.size());
    for (auto& [key, members] : groups) {
        // canonical member order makes the float reductions independent of
        // input order
        std::sort(members.begin(), members.end(),
                  [](const MetricsReport* a, const MetricsReport* b) {
                      if (a->graph_id != b->graph_id)
                          return a->graph_id < b->graph_id;
                      if (a->run_seed != b->run_seed)
                          return a->run_seed < b->run_seed;
                      return std::tie(a->data_tx, a->control_tx,
                                      a->messages_generated) <
                             std::tie(b->data_tx, b->control_tx,
                                      b->messages_generated);
                  });
        AggregateRow row;
        const MetricsReport& first = *members.front();
        row.policy = first.policy;
        row.v0 = first.v0;
        row.sigma = first.sigma;
        row.delta = first.delta;
        row.alpha = first.alpha;
        row.t_mon = first.t_mon;
        row.n = first.n;
        row.runs = members.size();
        std::vector<double> cov, del, rho;
        double m_sum = 0.0, data_sum = 0.0, ctrl_sum = 0.0;
        for (const MetricsReport* r : members) {
            if (r->n != first.n)
                throw std::invalid_argument(
                    "aggregate: mixed n within group " + first.policy);
            if (r->coverage_mean) cov.push_back(*r->coverage_mean);
            if (r->delay_mean) del.push_back(*r->delay_mean);
            if (r->rho) rho.push_back(*r->rho);
            m_sum += static_cast<double>(r->messages_generated);
            data_sum += static_cast<double>(r->data_tx);
            ctrl_sum += static_cast<double>(r->control_tx);
        }
        auto nmem = static_cast<double>(members.size());
        row.m_mean = m_sum / nmem;
        row.data_tx_mean = data_sum / nmem;
        row.control_tx_mean = ctrl_sum / nmem;
        if (!cov.empty()) {
            auto ms = detail::mean_sd(cov);
            row.coverage_mean = ms.mean;
            row.coverage_sd = ms.sd;
        }
        if (!del.empty()) {
            auto ms = detail::mean_sd(del);
            row.delay_mean = ms.mean;
            row.delay_sd = ms.sd;
        }
        if (!rho.empty()) {
            auto ms = detail::mean_sd(rho);
            row.rho_mean = ms.mean;
            row.rho_sd = ms.sd;
        }
        rows.push_back(std::move(row));
    }
    std::sort(rows.begin(), rows.end(),
              [](const AggregateRow& a, const AggregateRow& b) {
                  if (a.policy != b.policy) return a.policy < b.policy;
                  double ra = a.rho_mean.value_or(0.0);
                  double rb = b.rho_mean.value_or(0.0);
                  if (ra != rb) return ra < rb;
                  return a.v0 < b.v0;
              });
    return rows;
}

inline constexpr std::string_view results_csv_header =
    "policy,graph_id,run_seed,v0,sigma,delta,alpha,t_mon,n,m,coverage,delay,"
    "rho,data_tx,control_tx";

inline constexpr std::string_view aggregated_csv_header =
    "policy,graph_id,run_seed,v0,sigma,delta,alpha,t_mon,n,m,coverage,delay,"
    "rho,data_tx,control_tx,coverage_sd,delay_sd,rho_sd,runs";

namespace detail {

inline std::string opt_field(const std::optional<double>& v) {
    return v ? format_double(*v) : std::string();
}

} // namespace detail

inline std::string results_csv(std::span<const MetricsReport> reports) {
    std::string out(results_csv_header);
    out += '\n';
    for (const auto& r : reports) {
        out += r.policy;
        out += ',' + r.graph_id;
        out += ',' + std::to_string(r.run_seed);
        out += ',' + format_double(r.v0);
        out += ',' + format_double(r.sigma);
        out += ',' + std::to_string(r.delta);
        out += ',' + format_double(r.alpha);
        out += ',' + std::to_string(r.t_mon);
        out += ',' + std::to_string(r.n);
        out += ',' + std::to_string(r.messages_generated);
        out += ',' + detail::opt_field(r.coverage_mean);
        out += ',' + detail::opt_field(r.delay_mean);
        out += ',' + detail::opt_field(r.rho);
        out += ',' + std::to_string(r.data_tx);
        out += ',' + std::to_string(r.control_tx);
        out += '\n';
    }
    return out;
}

// Aggregated rows reuse the per-run columns (graph_id "*", run_seed 0,
// counter columns hold per-run means) and append the spread columns.
inline std::string aggregated_csv(std::span<const AggregateRow> rows) {
    std::string out(aggregated_csv_header);
    out += '\n';
    for (const auto& r : rows) {
        out += r.policy;
        out += ",*,0";
        out += ',' + format_double(r.v0);
        out += ',' + format_double(r.sigma);
        out += ',' + std::to_string(r.delta);
        out += ',' + format_double(r.alpha);
        out += ',' + std::to_string(r.t_mon);
        out += ',' + std::to_string(r.n);
        out += ',' + format_double(r.m_mean);
        out += ',' + detail::opt_field(r.coverage_mean);
        out += ',' + detail::opt_field(r.delay_mean);
        out += ',' + detail::opt_field(r.rho_mean);
        out += ',' + format_double(r.data_tx_mean);
        out += ',' + format_double(r.control_tx_mean);
        out += ',' + format_double(r.coverage_sd);
        out += ',' + format_double(r.delay_sd);
        out += ',' + format_double(r.rho_sd);
        out += ',' + std::to_string(r.runs);
        out += '\n';
    }
    return out;
}

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::size_t pos = 0;
    while (true) {
        std::size_t comma = line.find(',', pos);
        if (comma == std::string::npos) {
            fields.push_back(line.substr(pos));
            break;
        }
        fields.push_back(line.substr(pos, comma - pos));
        pos = comma + 1;
    }
    return fields;
}

} // namespace detail

inline std::vector<AggregateRow> parse_aggregated_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line != aggregated_csv_header)
        throw std::runtime_error("aggregated csv: bad or missing header");
    std::vector<AggregateRow> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto f = detail::split_csv_line(line);
        if (f.size() != 19)
            throw std::runtime_error("aggregated csv: wrong column count");
        AggregateRow r;
        r.policy = f[0];
        r.v0 = parse_double(f[3]);
        r.sigma = parse_double(f[4]);
        r.delta = std::stoull(f[5]);
        r.alpha = parse_double(f[6]);
        r.t_mon = std::stoull(f[7]);
        r.n = static_cast<std::uint32_t>(std::stoul(f[8]));
        r.m_mean = parse_double(f[9]);
        if (!f[10].empty()) r.coverage_mean = parse_double(f[10]);
        if (!f[11].empty()) r.delay_mean = parse_double(f[11]);
        if (!f[12].empty()) r.rho_mean = parse_double(f[12]);
        r.data_tx_mean = parse_double(f[13]);
        r.control_tx_mean = parse_double(f[14]);
        r.coverage_sd = parse_double(f[15]);
        r.delay_sd = parse_double(f[16]);
        r.rho_sd = parse_double(f[17]);
        r.runs = std::stoull(f[18]);
        rows.push_back(std::move(r));
    }
    return rows;
}

// One plot-ready curve point: metric mean and spread at a mean overhead.
struct CurvePoint {
    double rho = 0.0;
    double value = 0.0;
    double sd = 0.0;
};

enum class CurveMetric { coverage, delay };

// Extracts one policy's (rho, metric) curve from aggregated rows, sorted
// ascending by rho, optionally dropping points with rho below rho_min.
inline std::vector<CurvePoint> extract_curve(
    std::span<const AggregateRow> rows, std::string_view policy,
    CurveMetric metric, double rho_min = 0.0) {
    std::vector<CurvePoint> pts;
    for (const auto& r : rows) {
        if (r.policy != policy || !r.rho_mean) continue;
        if (*r.rho_mean < rho_min) continue;
        if (metric == CurveMetric::coverage && r.coverage_mean)
            pts.push_back({*r.rho_mean, *r.coverage_mean, r.coverage_sd});
        else if (metric == CurveMetric::delay && r.delay_mean)
            pts.push_back({*r.rho_mean, *r.delay_mean, r.delay_sd});
    }
    std::sort(pts.begin(), pts.end(),
              [](const CurvePoint& a, const CurvePoint& b) {
                  return a.rho < b.rho;
              });
    return pts;
}

inline std::string curve_csv(std::span<const CurvePoint> pts,
                             std::string_view value_name) {
    std::string out = "rho,";
    out += value_name;
    out += ',';
    out += value_name;
    out += "_sd\n";
    for (const auto& p : pts) {
        out += format_double(p.rho);
        out += ',' + format_double(p.value);
        out += ',' + format_double(p.sd);
        out += '\n';
    }
    return out;
}

// Linear interpolation of a curve at a target rho. Returns nullopt when the
// curve does not bracket the target.
inline std::optional<double> interpolate_at_rho(std::span<const CurvePoint> pts,
                                                double rho) {
    if (pts.empty()) return std::nullopt;
    if (rho < pts.front().rho || rho > pts.back().rho) return std::nullopt;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        const auto& a = pts[i];
        const auto& b = pts[i + 1];
        if (rho >= a.rho && rho <= b.rho) {
            if (b.rho == a.rho) return a.value;
            double w = (rho - a.rho) / (b.rho - a.rho);
            return a.value + w * (b.value - a.value);
        }
    }
    return pts.back().value;
}

} // namespace gossim
