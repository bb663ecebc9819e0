#pragma once

#include <filesystem>
#include <vector>

#include "meshattn/model.hpp"
#include "meshattn/rollout.hpp"

namespace meshattn {

constexpr int kMgfFormatVersion = 1;

/// MGF directory layout: meta.json, coords.f32, edges.u32, node_type.u32,
/// fields.f32 ([T,N,F] row-major). Blobs are little-endian; declared byte
/// lengths must match file sizes exactly.
void save_mgf(const Trajectory& traj, const std::filesystem::path& dir);
Trajectory load_mgf(const std::filesystem::path& dir);

/// Dataset = directory of traj_NNN subdirectories, each an MGF trajectory.
void save_dataset(const std::vector<Trajectory>& trajs, const std::filesystem::path& dir);
std::vector<Trajectory> load_dataset(const std::filesystem::path& dir);

/// Weights checkpoint: same blob convention — meta.json descriptor plus one
/// named little-endian f32 blob per parameter array.
struct Checkpoint {
    ModelConfig config;
    Weights weights;
    TargetKind target_kind = TargetKind::Delta;
};

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& dir);
Checkpoint load_checkpoint(const std::filesystem::path& dir);

}  // namespace meshattn
