#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "meshattn/errors.hpp"

namespace meshattn {

enum class NodeType : std::uint32_t {
    Normal = 0,
    Inflow = 1,
    Outflow = 2,
    Wall = 3,
    Obstacle = 4,
};

constexpr int kNumNodeTypes = 5;

/// Undirected mesh graph. Immutable after construction: the edge list is
/// symmetrized (every (i,j) has its (j,i) twin), deduplicated and free of
/// self-loops.
struct Graph {
    std::size_t num_nodes = 0;
    std::size_t coord_dim = 0;  // D in {2,3}
    std::vector<double> coords;  // num_nodes x coord_dim, row-major
    std::vector<NodeType> node_type;
    std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;  // directed pairs (sender, receiver)

    double coord(std::size_t node, std::size_t axis) const {
        return coords[node * coord_dim + axis];
    }
    /// Number of undirected edges (half the directed pair count).
    std::size_t num_undirected_edges() const { return edges.size() / 2; }
};

/// Boolean sparse matrix in compressed-row form; the attention mask and all
/// its augmentations. Column indices are strictly sorted within each row.
struct SparseMask {
    std::size_t num_rows = 0;
    std::size_t num_cols = 0;
    std::vector<std::uint64_t> row_offsets;  // num_rows + 1
    std::vector<std::uint32_t> col_indices;  // nnz, sorted per row

    std::size_t nnz() const { return col_indices.size(); }
    std::size_t row_nnz(std::size_t row) const {
        return static_cast<std::size_t>(row_offsets[row + 1] - row_offsets[row]);
    }
    const std::uint32_t* row_begin(std::size_t row) const {
        return col_indices.data() + row_offsets[row];
    }
    const std::uint32_t* row_end(std::size_t row) const {
        return col_indices.data() + row_offsets[row + 1];
    }
    bool contains(std::size_t row, std::uint32_t col) const;
    bool operator==(const SparseMask& other) const = default;
};

/// Per-node input features. dynamic_mask marks the columns that receive
/// training noise and are rolled forward autoregressively.
struct NodeFeatures {
    std::size_t num_nodes = 0;
    std::size_t width = 0;  // p
    std::vector<double> values;  // num_nodes x width, row-major
    std::vector<std::string> field_names;
    std::vector<bool> dynamic_mask;

    double& at(std::size_t node, std::size_t field) { return values[node * width + field]; }
    double at(std::size_t node, std::size_t field) const { return values[node * width + field]; }
    void validate() const;
};

/// Symmetrizes, deduplicates and bounds-checks the raw edge list.
Graph build_graph(const std::vector<double>& coords, std::size_t coord_dim,
                  const std::vector<NodeType>& node_types,
                  const std::vector<std::pair<std::uint32_t, std::uint32_t>>& edge_pairs);

/// Builds a CSR mask from sorted unique (row, col) pairs.
SparseMask mask_from_pairs(std::size_t num_rows, std::size_t num_cols,
                           std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs);

SparseMask adjacency_mask(const Graph& g, bool self_loops = false);

struct DegreeStats {
    std::size_t deg_max = 0;
    double deg_mean = 0.0;
};

DegreeStats degree_stats(const SparseMask& m);

/// Decomposes a graph back into its raw constructor arguments (coords,
/// node types, directed edge pairs).
struct GraphParts {
    std::vector<double> coords;
    std::size_t coord_dim = 0;
    std::vector<NodeType> node_types;
    std::vector<std::pair<std::uint32_t, std::uint32_t>> edge_pairs;
};

GraphParts decompose(const Graph& g);

}  // namespace meshattn
