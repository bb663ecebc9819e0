#pragma once

#include <cstddef>
#include <vector>

#include "meshattn/graph.hpp"

namespace meshattn {

enum class PeMode { None, Coords, LaplacianEig, RandomWalk };

struct PeSpec {
    PeMode mode = PeMode::Coords;
    std::size_t num_components = 0;  // m for LaplacianEig / RandomWalk
};

struct PeInfo {
    bool disconnected = false;  // reported, not fatal, for LaplacianEig
};

/// Output width q for a given spec and coordinate dimension.
std::size_t pe_width(const PeSpec& spec, std::size_t coord_dim);

/// N x q positional-encoding matrix, row-major.
///   Coords       -> raw coordinates (q = D)
///   LaplacianEig -> eigenvectors of the symmetric normalized Laplacian for
///                   the m smallest nonzero eigenvalues, each column sign-fixed
///                   so its largest-magnitude entry is positive
///   RandomWalk   -> column k is the diagonal of (D^-1 A)^k, k = 1..m
///   None         -> q = 0
std::vector<double> positional_encoding(const Graph& g, const PeSpec& spec,
                                        PeInfo* info = nullptr);

}  // namespace meshattn
