#pragma once

#include <cstdint>
#include <vector>

#include "meshattn/rollout.hpp"

namespace meshattn {

/// Synthetic heat diffusion on a random planar point cloud. Nodes are uniform
/// in the unit square, connected by a symmetrized k-nearest-neighbor graph;
/// convex-hull nodes are typed Wall. The field evolves by explicit Euler on
/// the combinatorial graph Laplacian with dt chosen inside the stability
/// bound dt * kappa * deg_max < 0.5, which preserves the field sum and the
/// discrete max principle.
struct HeatGenConfig {
    std::size_t num_points = 200;
    std::size_t num_frames = 30;
    double kappa = 1.0;
    std::size_t k_neighbors = 6;
    std::uint64_t seed = 0;
    std::size_t max_retries = 20;  // reseeds on disconnected samples
};

Trajectory gen_heat_trajectory(const HeatGenConfig& cfg);

/// `count` trajectories with per-index seeds derived from cfg.seed.
std::vector<Trajectory> gen_heat_dataset(const HeatGenConfig& cfg, std::size_t count);

}  // namespace meshattn
