#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <istream>
#include <optional>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <vector>

#include "gossim/rng.hpp"

namespace gossim {

// Undirected overlay the protocols run on. Node ids are dense 0..n-1 so the
// hot loops can index arrays directly.
struct Graph {
    std::uint32_t node_count = 0;
    std::vector<std::vector<std::uint32_t>> adjacency; // sorted neighbor ids
    std::string graph_id;
    std::uint64_t gen_seed = 0;

    std::span<const std::uint32_t> neighbors(std::uint32_t v) const {
        return adjacency[v];
    }

    std::uint32_t degree(std::uint32_t v) const {
        return static_cast<std::uint32_t>(adjacency[v].size());
    }

    bool has_edge(std::uint32_t u, std::uint32_t v) const {
        const auto& a = adjacency[u];
        return std::binary_search(a.begin(), a.end(), v);
    }

    std::size_t edge_count() const {
        std::size_t deg_sum = 0;
        for (const auto& a : adjacency) deg_sum += a.size();
        return deg_sum / 2;
    }
};

struct ConstraintUnsatisfiable : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DotParseError : std::runtime_error {
    int line;
    DotParseError(int line_no, const std::string& what)
        : std::runtime_error("dot parse error at line " +
                             std::to_string(line_no) + ": " + what),
          line(line_no) {}
};

struct DirectedGraphError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline bool same_topology(const Graph& a, const Graph& b) {
    return a.node_count == b.node_count && a.adjacency == b.adjacency;
}

inline std::vector<std::uint32_t> bfs_distances(const Graph& g,
                                                std::uint32_t start) {
    constexpr std::uint32_t unreached = 0xffffffffu;
    std::vector<std::uint32_t> dist(g.node_count, unreached);
    std::deque<std::uint32_t> queue{start};
    dist[start] = 0;
    while (!queue.empty()) {
        std::uint32_t v = queue.front();
        queue.pop_front();
        for (std::uint32_t w : g.neighbors(v)) {
            if (dist[w] == unreached) {
                dist[w] = dist[v] + 1;
                queue.push_back(w);
            }
        }
    }
    return dist;
}

inline bool is_connected(const Graph& g) {
    if (g.node_count == 0) return false;
    auto dist = bfs_distances(g, 0);
    return std::none_of(dist.begin(), dist.end(),
                        [](std::uint32_t d) { return d == 0xffffffffu; });
}

// Longest shortest path, by BFS from every node. Throws on disconnected
// input rather than returning an arbitrary number.
inline std::uint32_t diameter(const Graph& g) {
    if (g.node_count == 0)
        throw std::invalid_argument("diameter: empty graph");
    std::uint32_t best = 0;
    for (std::uint32_t v = 0; v < g.node_count; ++v) {
        auto dist = bfs_distances(g, v);
        for (std::uint32_t d : dist) {
            if (d == 0xffffffffu)
                throw std::invalid_argument("diameter: graph is disconnected");
            best = std::max(best, d);
        }
    }
    return best;
}

namespace detail {

inline std::uint64_t edge_key(std::uint32_t u, std::uint32_t v) {
    if (u > v) std::swap(u, v);
    return (static_cast<std::uint64_t>(u) << 32) | v;
}

// One attachment round: every node initiates edges_per_node edges to
// distinct uniformly random partners, redrawing duplicates and self-loops.
// An attachment whose candidate pool is exhausted (possible only on tiny
// graphs) is skipped.
inline Graph attach_random_edges(std::uint32_t n, std::uint32_t edges_per_node,
                                 std::uint64_t seed) {
    Graph g;
    g.node_count = n;
    g.adjacency.assign(n, {});
    g.gen_seed = seed;
    Rng rng(seed);
    std::unordered_set<std::uint64_t> edges;
    for (std::uint32_t u = 0; u < n; ++u) {
        for (std::uint32_t k = 0; k < edges_per_node; ++k) {
            if (g.adjacency[u].size() >= n - 1) break; // pool exhausted
            std::uint32_t v;
            do {
                v = rng.next_below(n);
            } while (v == u || edges.contains(detail::edge_key(u, v)));
            edges.insert(detail::edge_key(u, v));
            g.adjacency[u].push_back(v);
            g.adjacency[v].push_back(u);
        }
    }
    for (auto& a : g.adjacency) std::sort(a.begin(), a.end());
    return g;
}

} // namespace detail

// Random overlay with exactly n*edges_per_node edges (minus any attachments
// skipped on tiny graphs), rejection-sampled until connected with
// diameter <= d_max. Attempt i uses seed+i, so results are reproducible.
inline Graph generate_overlay(std::uint32_t n, std::uint32_t edges_per_node,
                              std::uint32_t d_max, std::uint64_t seed,
                              std::uint32_t max_attempts = 1000) {
    if (n < 2) throw std::invalid_argument("generate_overlay: n must be >= 2");
    if (edges_per_node < 1)
        throw std::invalid_argument("generate_overlay: edges_per_node >= 1");
    if (d_max < 1)
        throw std::invalid_argument("generate_overlay: d_max must be >= 1");
    for (std::uint32_t attempt = 0; attempt < max_attempts; ++attempt) {
        Graph g = detail::attach_random_edges(n, edges_per_node, seed + attempt);
        if (!is_connected(g)) continue;
        if (diameter(g) > d_max) continue;
        return g;
    }
    throw ConstraintUnsatisfiable(
        "generate_overlay: no connected graph with diameter <= " +
        std::to_string(d_max) + " in " + std::to_string(max_attempts) +
        " attempts");
}

// DOT export, bit-exact: "graph G {" header, one "  u -- v;" line per edge
// with u < v in ascending (u, v) order, closing "}".
inline std::string export_dot(const Graph& g) {
    std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
    edges.reserve(g.edge_count());
    for (std::uint32_t u = 0; u < g.node_count; ++u)
        for (std::uint32_t v : g.neighbors(u))
            if (u < v) edges.emplace_back(u, v);
    std::sort(edges.begin(), edges.end());
    std::string out = "graph G {\n";
    for (auto [u, v] : edges) {
        out += "  ";
        out += std::to_string(u);
        out += " -- ";
        out += std::to_string(v);
        out += ";\n";
    }
    out += "}\n";
    return out;
}

namespace detail {

struct DotTokenizer {
    std::istream& in;
    int line = 1;

    // Returns the next token, tracking line numbers. Token kinds: integers,
    // identifiers, "--", "->", "{", "}", ";".
    std::optional<std::string> next() {
        int c;
        while ((c = in.get()) != EOF) {
            if (c == '\n') {
                ++line;
                continue;
            }
            if (std::isspace(c)) continue;
            if (c == '{' || c == '}' || c == ';')
                return std::string(1, static_cast<char>(c));
            if (c == '-') {
                int d = in.get();
                if (d == '-') return std::string("--");
                if (d == '>') return std::string("->");
                throw DotParseError(line, "stray '-'");
            }
            if (std::isalnum(c) || c == '_') {
                std::string tok(1, static_cast<char>(c));
                while ((c = in.peek()) != EOF && (std::isalnum(c) || c == '_'))
                    tok += static_cast<char>(in.get());
                return tok;
            }
            throw DotParseError(line,
                                std::string("unexpected character '") +
                                    static_cast<char>(c) + "'");
        }
        return std::nullopt;
    }
};

inline std::uint32_t parse_node_id(const std::string& tok, int line) {
    if (tok.empty() || !std::all_of(tok.begin(), tok.end(), ::isdigit))
        throw DotParseError(line, "expected numeric node id, got '" + tok + "'");
    unsigned long v = std::stoul(tok);
    if (v > 0xfffffffeul) throw DotParseError(line, "node id out of range");
    return static_cast<std::uint32_t>(v);
}

} // namespace detail

// Parses the DOT subset produced by export_dot, tolerating arbitrary
// whitespace, edge chains (a -- b -- c;) and node-only statements.
inline Graph import_dot(std::istream& in) {
    detail::DotTokenizer tz{in};
    auto tok = tz.next();
    if (!tok) throw DotParseError(tz.line, "empty input");
    if (*tok == "digraph") throw DirectedGraphError("directed graphs are not supported");
    if (*tok != "graph")
        throw DotParseError(tz.line, "expected 'graph', got '" + *tok + "'");
    tok = tz.next();
    if (tok && *tok != "{") tok = tz.next(); // optional graph name
    if (!tok || *tok != "{") throw DotParseError(tz.line, "expected '{'");

    std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
    std::uint32_t max_id = 0;
    bool saw_edge = false;
    bool closed = false;
    while ((tok = tz.next())) {
        if (*tok == "}") {
            closed = true;
            break;
        }
        std::uint32_t u = detail::parse_node_id(*tok, tz.line);
        // statement: id (-- id)* ;  — node-only statements are ignored
        while ((tok = tz.next())) {
            if (*tok == ";") break;
            if (*tok == "->")
                throw DirectedGraphError("directed edges are not supported");
            if (*tok != "--")
                throw DotParseError(tz.line, "expected '--' or ';', got '" + *tok + "'");
            tok = tz.next();
            if (!tok) throw DotParseError(tz.line, "edge missing right-hand node");
            std::uint32_t v = detail::parse_node_id(*tok, tz.line);
            if (u == v) throw DotParseError(tz.line, "self-loop");
            edges.emplace_back(std::min(u, v), std::max(u, v));
            max_id = std::max({max_id, u, v});
            saw_edge = true;
            u = v;
        }
        if (!tok) throw DotParseError(tz.line, "unterminated statement");
    }
    if (!closed) throw DotParseError(tz.line, "missing '}'");

    Graph g;
    g.node_count = saw_edge ? max_id + 1 : 0;
    g.adjacency.assign(g.node_count, {});
    std::sort(edges.begin(), edges.end());
    if (std::adjacent_find(edges.begin(), edges.end()) != edges.end())
        throw DotParseError(tz.line, "duplicate edge");
    for (auto [u, v] : edges) {
        g.adjacency[u].push_back(v);
        g.adjacency[v].push_back(u);
    }
    for (auto& a : g.adjacency) std::sort(a.begin(), a.end());
    return g;
}

inline Graph import_dot(const std::string& text) {
    std::istringstream in(text);
    return import_dot(in);
}

} // namespace gossim
