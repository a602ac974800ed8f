#include <catch2/catch_amalgamated.hpp>

#include <set>
#include <vector>

#include "gossim/graph.hpp"

using namespace gossim;

namespace {

// O(n^3) all-pairs shortest path, independent of the BFS implementation.
int floyd_warshall_diameter(const Graph& g) {
    const int n = int(g.node_count);
    const int inf = 1 << 20;
    std::vector<std::vector<int>> d(n, std::vector<int>(n, inf));
    for (int v = 0; v < n; ++v) d[v][v] = 0;
    for (int u = 0; u < n; ++u)
        for (std::uint32_t v : g.neighbors(std::uint32_t(u))) d[u][v] = 1;
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                d[i][j] = std::min(d[i][j], d[i][k] + d[k][j]);
    int best = 0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            REQUIRE(d[i][j] < inf);
            best = std::max(best, d[i][j]);
        }
    return best;
}

Graph path3() {
    return import_dot("graph G { 0 -- 1; 1 -- 2; }");
}

} // namespace

TEST_CASE("generated overlay satisfies the default-scale constraints") {
    Graph g = generate_overlay(100, 2, 8, 12345);
    CHECK(g.node_count == 100);
    CHECK(g.edge_count() == 200);
    CHECK(is_connected(g));
    CHECK(diameter(g) <= 8);
}

TEST_CASE("adjacency is symmetric with no self-loops or parallel edges") {
    Graph g = generate_overlay(100, 2, 8, 777);
    std::size_t degree_sum = 0;
    for (std::uint32_t u = 0; u < g.node_count; ++u) {
        degree_sum += g.degree(u);
        std::set<std::uint32_t> uniq(g.adjacency[u].begin(),
                                     g.adjacency[u].end());
        CHECK(uniq.size() == g.adjacency[u].size()); // no parallel edges
        CHECK(!uniq.contains(u));                    // no self-loop
        for (std::uint32_t v : g.neighbors(u)) CHECK(g.has_edge(v, u));
    }
    CHECK(degree_sum == 2 * g.edge_count());
}

TEST_CASE("generation is reproducible and seed-sensitive") {
    Graph a = generate_overlay(100, 2, 8, 42);
    Graph b = generate_overlay(100, 2, 8, 42);
    Graph c = generate_overlay(100, 2, 8, 43);
    CHECK(same_topology(a, b));
    CHECK(!same_topology(a, c));
}

TEST_CASE("two-node overlay is the single edge") {
    Graph g = generate_overlay(2, 1, 1, 9);
    CHECK(g.node_count == 2);
    CHECK(g.edge_count() == 1);
    CHECK(g.has_edge(0, 1));
}

TEST_CASE("diameter on known graphs") {
    CHECK(diameter(path3()) == 2);
    Graph k4 = import_dot(
        "graph G { 0 -- 1; 0 -- 2; 0 -- 3; 1 -- 2; 1 -- 3; 2 -- 3; }");
    CHECK(diameter(k4) == 1);
}

TEST_CASE("diameter matches the Floyd-Warshall oracle on generated overlays") {
    for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
        Graph g = generate_overlay(60, 2, 10, seed);
        CHECK(int(diameter(g)) == floyd_warshall_diameter(g));
    }
}

TEST_CASE("diameter rejects disconnected input") {
    Graph g = import_dot("graph G { 0 -- 1; 2 -- 3; }");
    CHECK(!is_connected(g));
    CHECK_THROWS_AS(diameter(g), std::invalid_argument);
}

TEST_CASE("generated overlays pass oracle re-verification") {
    for (std::uint64_t seed = 100; seed < 110; ++seed) {
        Graph g = generate_overlay(100, 2, 8, seed);
        CHECK(is_connected(g));
        auto ecc_max = 0u;
        for (std::uint32_t v = 0; v < g.node_count; ++v)
            for (std::uint32_t d : bfs_distances(g, v))
                ecc_max = std::max(ecc_max, d);
        CHECK(ecc_max <= 8);
    }
}

TEST_CASE("unsatisfiable constraints raise ConstraintUnsatisfiable") {
    // Diameter 1 demands a complete graph; sparse attachment cannot reach it.
    CHECK_THROWS_AS(generate_overlay(100, 2, 1, 5, 50),
                    ConstraintUnsatisfiable);
}

TEST_CASE("dot import reads a simple edge list") {
    Graph g = path3();
    CHECK(g.node_count == 3);
    CHECK(g.edge_count() == 2);
    CHECK(g.has_edge(0, 1));
    CHECK(g.has_edge(1, 2));
    CHECK(!g.has_edge(0, 2));
}

TEST_CASE("dot export is bit-exact and round-trips") {
    Graph g = import_dot("graph G { 1 -- 2; 0 -- 1; }");
    CHECK(export_dot(g) == "graph G {\n  0 -- 1;\n  1 -- 2;\n}\n");

    Graph big = generate_overlay(100, 2, 8, 4242);
    Graph back = import_dot(export_dot(big));
    CHECK(same_topology(big, back));
}

TEST_CASE("dot import tolerates whitespace, chains and node statements") {
    Graph g = import_dot("graph   G\n{\n  0 -- 1 -- 2;\n  7;\n\t2--0;\n}\n");
    CHECK(g.node_count == 3);
    CHECK(g.edge_count() == 3);
}

TEST_CASE("directed input is rejected") {
    CHECK_THROWS_AS(import_dot("digraph G { 0 -> 1; }"), DirectedGraphError);
    CHECK_THROWS_AS(import_dot("graph G { 0 -> 1; }"), DirectedGraphError);
}

TEST_CASE("malformed input reports the offending line") {
    try {
        import_dot("graph G {\n  0 -- 1;\n  zap zap;\n}\n");
        FAIL("expected DotParseError");
    } catch (const DotParseError& e) {
        CHECK(e.line == 3);
    }
}
