#include "meshattn/graph.hpp"

#include <algorithm>
#include <cmath>

namespace meshattn {

bool SparseMask::contains(std::size_t row, std::uint32_t col) const {
    return std::binary_search(row_begin(row), row_end(row), col);
}

void NodeFeatures::validate() const {
    if (field_names.size() != width || dynamic_mask.size() != width) {
        raise(ErrorCode::ShapeMismatch, "field_names/dynamic_mask length must equal feature width");
    }
    if (values.size() != num_nodes * width) {
        raise(ErrorCode::ShapeMismatch, "feature array size mismatch");
    }
    for (double v : values) {
        if (!std::isfinite(v)) raise(ErrorCode::NonFiniteValue, "non-finite node feature");
    }
}

Graph build_graph(const std::vector<double>& coords, std::size_t coord_dim,
                  const std::vector<NodeType>& node_types,
                  const std::vector<std::pair<std::uint32_t, std::uint32_t>>& edge_pairs) {
    if (coord_dim == 0 || coords.size() % coord_dim != 0) {
        raise(ErrorCode::RaggedCoords, "coords array is not rectangular");
    }
    const std::size_t n = coords.size() / coord_dim;
    if (node_types.size() != n) {
        raise(ErrorCode::ShapeMismatch, "node_types length must match node count");
    }

    std::vector<std::pair<std::uint32_t, std::uint32_t>> directed;
    directed.reserve(edge_pairs.size() * 2);
    for (const auto& [s, r] : edge_pairs) {
        if (s >= n || r >= n) {
            raise(ErrorCode::IndexOutOfRange,
                  "edge (" + std::to_string(s) + "," + std::to_string(r) + ") on N=" +
                      std::to_string(n));
        }
        if (s == r) continue;  // self-loops dropped from the raw list
        directed.emplace_back(s, r);
        directed.emplace_back(r, s);
    }
    std::sort(directed.begin(), directed.end());
    directed.erase(std::unique(directed.begin(), directed.end()), directed.end());

    Graph g;
    g.num_nodes = n;
    g.coord_dim = coord_dim;
    g.coords = coords;
    g.node_type = node_types;
    g.edges = std::move(directed);
    return g;
}

SparseMask mask_from_pairs(std::size_t num_rows, std::size_t num_cols,
                           std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs) {
    std::sort(pairs.begin(), pairs.end());
    pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());

    SparseMask m;
    m.num_rows = num_rows;
    m.num_cols = num_cols;
    m.row_offsets.assign(num_rows + 1, 0);
    m.col_indices.reserve(pairs.size());
    for (const auto& [r, c] : pairs) {
        if (r >= num_rows || c >= num_cols) {
            raise(ErrorCode::IndexOutOfRange, "mask entry out of range");
        }
        m.row_offsets[r + 1]++;
        m.col_indices.push_back(c);
    }
    for (std::size_t i = 0; i < num_rows; ++i) m.row_offsets[i + 1] += m.row_offsets[i];
    return m;
}

SparseMask adjacency_mask(const Graph& g, bool self_loops) {
    std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs = g.edges;
    if (self_loops) {
        for (std::uint32_t i = 0; i < g.num_nodes; ++i) pairs.emplace_back(i, i);
    }
    return mask_from_pairs(g.num_nodes, g.num_nodes, std::move(pairs));
}

DegreeStats degree_stats(const SparseMask& m) {
    if (m.num_rows == 0) raise(ErrorCode::EmptyGraph, "degree_stats on empty mask");
    DegreeStats stats;
    for (std::size_t i = 0; i < m.num_rows; ++i) {
        stats.deg_max = std::max(stats.deg_max, m.row_nnz(i));
    }
    stats.deg_mean = static_cast<double>(m.nnz()) / static_cast<double>(m.num_rows);
    return stats;
}

GraphParts decompose(const Graph& g) {
    GraphParts parts;
    parts.coords = g.coords;
    parts.coord_dim = g.coord_dim;
    parts.node_types = g.node_type;
    parts.edge_pairs = g.edges;
    return parts;
}

}  // namespace meshattn
