#include <cmath>
#include <numeric>

#include "doctest.h"
#include "helpers.hpp"
#include "meshattn/positional.hpp"

using namespace meshattn;
using namespace meshattn::testing;

TEST_CASE("coords mode is a passthrough") {
    Graph g = random_graph(10, 0.3, 2);
    PeSpec spec{PeMode::Coords, 0};
    CHECK(pe_width(spec, g.coord_dim) == 2);
    CHECK(positional_encoding(g, spec) == g.coords);
}

TEST_CASE("none mode has zero width") {
    Graph g = path_graph(4);
    PeSpec spec{PeMode::None, 0};
    CHECK(pe_width(spec, 2) == 0);
    CHECK(positional_encoding(g, spec).empty());
}

TEST_CASE("random walk diagonal") {
    SUBCASE("step 1 is zero without self-loops") {
        Graph g = cycle_graph(6);
        const auto pe = positional_encoding(g, {PeMode::RandomWalk, 1});
        for (double v : pe) CHECK(v == 0.0);
    }
    SUBCASE("C4 return probability at step 2 is 1/2") {
        Graph g = cycle_graph(4);
        const auto pe = positional_encoding(g, {PeMode::RandomWalk, 2});
        for (std::size_t i = 0; i < 4; ++i) {
            CHECK(pe[i * 2 + 0] == doctest::Approx(0.0));
            CHECK(pe[i * 2 + 1] == doctest::Approx(0.5));
        }
    }
    SUBCASE("path of 3 closed-form") {
        Graph g = path_graph(3);
        const auto pe = positional_encoding(g, {PeMode::RandomWalk, 2});
        CHECK(pe[0 * 2 + 1] == doctest::Approx(0.5));
        CHECK(pe[1 * 2 + 1] == doctest::Approx(1.0));
        CHECK(pe[2 * 2 + 1] == doctest::Approx(0.5));
    }
    SUBCASE("matches a dense matrix-power oracle") {
        Graph g = random_graph(12, 0.3, 8);
        const std::size_t n = g.num_nodes;
        const auto pe = positional_encoding(g, {PeMode::RandomWalk, 3});
        SparseMask adj = adjacency_mask(g);
        std::vector<double> walk(n * n, 0.0);  // D^-1 A
        for (std::size_t i = 0; i < n; ++i) {
            const double inv = adj.row_nnz(i) ? 1.0 / double(adj.row_nnz(i)) : 0.0;
            for (const std::uint32_t* j = adj.row_begin(i); j != adj.row_end(i); ++j) {
                walk[i * n + *j] = inv;
            }
        }
        std::vector<double> power(walk);
        for (std::size_t k = 1; k <= 3; ++k) {
            if (k > 1) {
                std::vector<double> next(n * n, 0.0);
                for (std::size_t i = 0; i < n; ++i) {
                    for (std::size_t m = 0; m < n; ++m) {
                        for (std::size_t j = 0; j < n; ++j) {
                            next[i * n + j] += power[i * n + m] * walk[m * n + j];
                        }
                    }
                }
                power = next;
            }
            for (std::size_t i = 0; i < n; ++i) {
                CHECK(pe[i * 3 + (k - 1)] == doctest::Approx(power[i * n + i]).epsilon(1e-10));
            }
        }
    }
}

TEST_CASE("laplacian eigenvector encoding") {
    Graph g = random_graph(16, 0.3, 4);
    const std::size_t n = g.num_nodes;
    const std::size_t m = 3;
    PeInfo info;
    const auto pe = positional_encoding(g, {PeMode::LaplacianEig, m}, &info);
    CHECK_FALSE(info.disconnected);

    // Dense symmetric normalized Laplacian for the residual check.
    SparseMask adj = adjacency_mask(g);
    std::vector<double> lap(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) lap[i * n + i] = adj.row_nnz(i) ? 1.0 : 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (const std::uint32_t* j = adj.row_begin(i); j != adj.row_end(i); ++j) {
            lap[i * n + *j] = -1.0 / std::sqrt(double(adj.row_nnz(i)) * double(adj.row_nnz(*j)));
        }
    }

    for (std::size_t c = 0; c < m; ++c) {
        std::vector<double> v(n), lv(n, 0.0);
        for (std::size_t i = 0; i < n; ++i) v[i] = pe[i * m + c];
        double norm = 0.0;
        for (double x : v) norm += x * x;
        CHECK(norm == doctest::Approx(1.0).epsilon(1e-8));
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) lv[i] += lap[i * n + j] * v[j];
        }
        const double lambda =
            std::inner_product(v.begin(), v.end(), lv.begin(), 0.0);
        CHECK(lambda > 1e-8);  // nonzero eigenvalue
        for (std::size_t i = 0; i < n; ++i) {
            CHECK(lv[i] == doctest::Approx(lambda * v[i]).epsilon(1e-6).scale(1.0));
        }
        // Sign convention: the largest-magnitude entry is positive.
        double best = 0.0;
        for (double x : v) {
            if (std::abs(x) > std::abs(best)) best = x;
        }
        CHECK(best > 0.0);
    }
}

TEST_CASE("laplacian encoding reports disconnection") {
    // Two disjoint triangles.
    std::vector<double> coords(12, 0.0);
    std::vector<NodeType> types(6, NodeType::Normal);
    Graph g = build_graph(coords, 2, types,
                          {{0, 1}, {1, 2}, {2, 0}, {3, 4}, {4, 5}, {5, 3}});
    PeInfo info;
    const auto pe = positional_encoding(g, {PeMode::LaplacianEig, 2}, &info);
    CHECK(info.disconnected);
    CHECK(pe.size() == 12);
}

TEST_CASE("laplacian encoding rejects m >= N") {
    Graph g = path_graph(4);
    CHECK_THROWS_WITH_AS(positional_encoding(g, {PeMode::LaplacianEig, 4}),
                         doctest::Contains("InvalidConfig"), Error);
}
