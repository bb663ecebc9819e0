#pragma once

#include <functional>
#include <string>
#include <vector>

#include "meshattn/graph.hpp"
#include "meshattn/tensor.hpp"

namespace meshattn {

/// T timesteps of per-node field arrays over a fixed graph.
struct Trajectory {
    Graph graph;
    std::size_t num_frames = 0;  // T
    std::size_t num_fields = 0;  // F
    std::vector<double> fields;  // T x N x F, row-major
    double dt = 0.0;
    std::vector<std::string> field_names;
    std::vector<bool> dynamic_mask;  // per field
    int history_depth = 0;           // 0 or 1

    double field(std::size_t t, std::size_t node, std::size_t f) const {
        return fields[(t * graph.num_nodes + node) * num_fields + f];
    }
    double& field(std::size_t t, std::size_t node, std::size_t f) {
        return fields[(t * graph.num_nodes + node) * num_fields + f];
    }
    /// N x F snapshot of one frame.
    Tensor frame(std::size_t t) const;
    std::size_t num_dynamic() const;
    void validate() const;
};

enum class TargetKind { Absolute, Delta };

TargetKind target_kind_from_name(const std::string& name);
std::string target_kind_name(TargetKind kind);

/// One-step predictor: given the fields at the current frame (and the
/// previous frame when history is used), returns the full N x F fields of the
/// next frame. Non-dynamic columns it returns are overwritten by rollout's
/// teacher forcing.
using Predictor = std::function<Tensor(const Trajectory& traj, const Tensor& fields,
                                       const Tensor* prev_fields, std::size_t t)>;

/// Autoregressive rollout over `steps` transitions starting at frame
/// `start_t`. Returns steps+1 frames, the start frame included. Non-dynamic
/// (boundary) fields are copied bitwise from the ground-truth trajectory at
/// every step.
std::vector<Tensor> rollout(const Predictor& predict, const Trajectory& traj, std::size_t start_t,
                            std::size_t steps);

/// Mean over (T-1)*N of the squared one-step prediction error, summed over
/// dynamic field components. Optional sqrt reports the root instead.
double one_step_metric(const Predictor& predict, const Trajectory& traj, bool take_sqrt = false);

/// Same normalization, but each frame t is compared against the t-times
/// composed prediction from frame 0 (one rollout, prefixes reused).
double all_rollout_metric(const Predictor& predict, const Trajectory& traj,
                          bool take_sqrt = false);

/// Repeats the current state: the zero-delta persistence baseline.
Predictor persistence_predictor();

/// Returns the ground-truth next frame (for oracle-closure tests).
Predictor oracle_predictor();

}  // namespace meshattn
