#pragma once

#include <random>
#include <vector>

#include "meshattn/augment.hpp"
#include "meshattn/graph.hpp"

namespace meshattn::testing {

inline Graph random_graph(std::size_t n, double edge_prob, std::uint64_t seed,
                          std::size_t coord_dim = 2) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<double> coords(n * coord_dim);
    for (double& c : coords) c = unit(rng);
    std::vector<NodeType> types(n, NodeType::Normal);
    std::uniform_int_distribution<int> type_pick(0, kNumNodeTypes - 1);
    for (NodeType& t : types) t = static_cast<NodeType>(type_pick(rng));
    std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
    for (std::uint32_t i = 0; i < n; ++i) {
        for (std::uint32_t j = i + 1; j < n; ++j) {
            if (unit(rng) < edge_prob) edges.emplace_back(i, j);
        }
    }
    return build_graph(coords, coord_dim, types, edges);
}

inline Graph path_graph(std::size_t n) {
    std::vector<double> coords(n * 2, 0.0);
    for (std::size_t i = 0; i < n; ++i) coords[2 * i] = static_cast<double>(i);
    std::vector<NodeType> types(n, NodeType::Normal);
    std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
    for (std::uint32_t i = 0; i + 1 < n; ++i) edges.emplace_back(i, i + 1);
    return build_graph(coords, 2, types, edges);
}

inline Graph cycle_graph(std::size_t n) {
    std::vector<double> coords(n * 2, 0.0);
    for (std::size_t i = 0; i < n; ++i) coords[2 * i] = static_cast<double>(i);
    std::vector<NodeType> types(n, NodeType::Normal);
    std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
    for (std::uint32_t i = 0; i < n; ++i) {
        edges.emplace_back(i, static_cast<std::uint32_t>((i + 1) % n));
    }
    return build_graph(coords, 2, types, edges);
}

// Dense boolean oracles for the sparse mask algebra.

inline std::vector<char> dense_from_mask(const SparseMask& m) {
    std::vector<char> dense(m.num_rows * m.num_cols, 0);
    for (std::size_t i = 0; i < m.num_rows; ++i) {
        for (const std::uint32_t* c = m.row_begin(i); c != m.row_end(i); ++c) {
            dense[i * m.num_cols + *c] = 1;
        }
    }
    return dense;
}

inline std::vector<char> dense_bool_multiply(const std::vector<char>& a,
                                             const std::vector<char>& b, std::size_t n) {
    std::vector<char> out(n * n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < n; ++k) {
            if (!a[i * n + k]) continue;
            for (std::size_t j = 0; j < n; ++j) {
                if (b[k * n + j]) out[i * n + j] = 1;
            }
        }
    }
    return out;
}

inline std::vector<char> dense_bool_power(const std::vector<char>& a, std::size_t n,
                                          unsigned k) {
    std::vector<char> out = a;
    for (unsigned i = 1; i < k; ++i) out = dense_bool_multiply(out, a, n);
    return out;
}

inline std::vector<char> dense_union(const std::vector<char>& a, const std::vector<char>& b) {
    std::vector<char> out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] || b[i];
    return out;
}

inline bool equals_dense(const SparseMask& m, const std::vector<char>& dense) {
    return dense_from_mask(m) == dense;
}

}  // namespace meshattn::testing
