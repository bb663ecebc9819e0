#include "doctest.h"
#include "helpers.hpp"
#include "meshattn/graph.hpp"

using namespace meshattn;
using namespace meshattn::testing;

TEST_CASE("build_graph symmetrizes a single directed edge") {
    Graph g = build_graph({0, 0, 1, 0, 2, 0}, 2, std::vector<NodeType>(3, NodeType::Normal),
                          {{0, 1}});
    CHECK(g.edges.size() == 2);
    CHECK(g.edges[0] == std::pair<std::uint32_t, std::uint32_t>{0, 1});
    CHECK(g.edges[1] == std::pair<std::uint32_t, std::uint32_t>{1, 0});
}

TEST_CASE("build_graph deduplicates repeated edges") {
    Graph g = build_graph({0, 0, 1, 0, 2, 0}, 2, std::vector<NodeType>(3, NodeType::Normal),
                          {{0, 1}, {1, 0}, {0, 1}});
    CHECK(g.edges.size() == 2);
    CHECK(g.num_undirected_edges() == 1);
}

TEST_CASE("build_graph drops self-loops") {
    Graph g = build_graph({0, 0, 1, 0}, 2, std::vector<NodeType>(2, NodeType::Normal),
                          {{0, 0}, {0, 1}});
    CHECK(g.edges.size() == 2);
}

TEST_CASE("build_graph rejects out-of-range endpoints") {
    CHECK_THROWS_WITH_AS(build_graph({0, 0, 1, 0, 2, 0}, 2,
                                     std::vector<NodeType>(3, NodeType::Normal), {{0, 5}}),
                         doctest::Contains("IndexOutOfRange"), Error);
}

TEST_CASE("build_graph rejects ragged coordinates") {
    CHECK_THROWS_AS(build_graph({0, 0, 1}, 2, std::vector<NodeType>(2, NodeType::Normal), {}),
                    Error);
}

TEST_CASE("adjacency_mask nnz and rows") {
    Graph tri = build_graph({0, 0, 1, 0, 0, 1}, 2, std::vector<NodeType>(3, NodeType::Normal),
                            {{0, 1}, {1, 2}, {2, 0}});
    CHECK(adjacency_mask(tri, false).nnz() == 6);
    CHECK(adjacency_mask(tri, true).nnz() == 9);

    Graph path = path_graph(3);
    SparseMask m = adjacency_mask(path);
    REQUIRE(m.row_nnz(1) == 2);
    CHECK(m.row_begin(1)[0] == 0);
    CHECK(m.row_begin(1)[1] == 2);
}

TEST_CASE("masks from graphs are symmetric") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        Graph g = random_graph(24, 0.2, seed);
        SparseMask m = adjacency_mask(g);
        const auto dense = dense_from_mask(m);
        for (std::size_t i = 0; i < m.num_rows; ++i) {
            for (std::size_t j = 0; j < m.num_cols; ++j) {
                CHECK(dense[i * m.num_cols + j] == dense[j * m.num_cols + i]);
            }
        }
    }
}

TEST_CASE("degree_stats") {
    // star K_{1,4}
    Graph star = build_graph({0, 0, 1, 0, 0, 1, -1, 0, 0, -1}, 2,
                             std::vector<NodeType>(5, NodeType::Normal),
                             {{0, 1}, {0, 2}, {0, 3}, {0, 4}});
    CHECK(degree_stats(adjacency_mask(star)).deg_max == 4);

    Graph path = path_graph(3);
    DegreeStats stats = degree_stats(adjacency_mask(path));
    CHECK(stats.deg_max == 2);
    CHECK(stats.deg_mean == doctest::Approx(4.0 / 3.0));

    SUBCASE("matches per-row counting on a random graph") {
        Graph g = random_graph(10, 0.3, 7);
        SparseMask m = adjacency_mask(g);
        std::size_t max_count = 0;
        std::size_t total = 0;
        for (std::size_t i = 0; i < m.num_rows; ++i) {
            max_count = std::max(max_count, m.row_nnz(i));
            total += m.row_nnz(i);
        }
        DegreeStats s = degree_stats(m);
        CHECK(s.deg_max == max_count);
        CHECK(s.deg_mean == doctest::Approx(double(total) / 10.0));
    }

    SUBCASE("empty graph raises") {
        SparseMask empty;
        empty.row_offsets = {0};
        CHECK_THROWS_AS(degree_stats(empty), Error);
    }
}

TEST_CASE("decompose round-trips") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        Graph g = random_graph(12, 0.3, seed);
        GraphParts parts = decompose(g);
        Graph g2 = build_graph(parts.coords, parts.coord_dim, parts.node_types, parts.edge_pairs);
        CHECK(g2.coords == g.coords);
        CHECK(g2.node_type == g.node_type);
        CHECK(g2.edges == g.edges);
    }
}

TEST_CASE("SparseMask::contains") {
    Graph path = path_graph(4);
    SparseMask m = adjacency_mask(path);
    CHECK(m.contains(0, 1));
    CHECK_FALSE(m.contains(0, 2));
    CHECK_FALSE(m.contains(0, 0));
}
