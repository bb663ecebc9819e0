#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "meshattn/model.hpp"
#include "meshattn/rollout.hpp"

namespace meshattn {

enum class OptimizerKind { AdamW, Adam };

enum class ScheduleKind { WarmupCosine, ExponentialTail };

struct Schedule {
    ScheduleKind kind = ScheduleKind::WarmupCosine;
    // WarmupCosine: linear 0 -> lr_max over warmup_iters, cosine to lr_min.
    double lr_max = 1e-3;
    double lr_min = 1e-6;
    std::size_t warmup_iters = 1000;
    // ExponentialTail: flat lr for flat_fraction of the run, then exponential
    // decay reaching decay_to at the final step.
    double lr_flat = 1e-4;
    double decay_to = 1e-6;
    double flat_fraction = 0.75;

    std::size_t total_iters = 10000;
};

double lr_at(const Schedule& schedule, std::size_t step);

/// Default schedule for a preset: lr_max 1e-3 (S/M/L) or 1e-4 (XL), warmup
/// 1k iters (S/M) or 5k (L/XL), cosine floor 1e-6 (1e-7 for XL).
Schedule default_schedule(Preset preset, std::size_t total_iters);

struct TrainConfig {
    OptimizerKind optimizer = OptimizerKind::AdamW;
    double beta1 = 0.9;
    double beta2 = 0.95;
    double weight_decay = 1e-4;
    double adam_eps = 1e-8;
    Schedule schedule;
    std::vector<double> noise_sigmas;  // per dynamic field
    std::size_t grad_accumulation = 1;
    std::size_t steps = 0;  // 0 -> schedule.total_iters
    std::uint64_t seed = 0;
    TargetKind target_kind = TargetKind::Delta;
    std::size_t loss_log_every = 10;
    std::size_t final_loss_window = 100;  // trailing-mean window for final_loss
};

struct RunRecord {
    double flop_budget = 0.0;  // C
    double param_count = 0.0;  // P
    double training_nodes = 0.0;  // D
    double final_loss = 0.0;
    double final_all_rollout_metric = 0.0;
};

struct AdamState {
    std::vector<Tensor> m;
    std::vector<Tensor> v;
    std::size_t step = 0;
};

AdamState init_adam_state(const Weights& w);

/// Decoupled-weight-decay Adam update with bias-corrected moments. Adam mode
/// omits the decoupled decay term.
void adamw_step(Weights& w, const Weights& grads, AdamState& state, double lr,
                const TrainConfig& cfg);

/// Adds N(0, sigma_f) noise to each dynamic field; static fields untouched.
/// Deterministic per seed.
NodeFeatures add_noise(const NodeFeatures& x, const std::vector<double>& sigmas,
                       std::uint64_t seed);

/// Mean over all N * p entries of the squared error.
double l2_loss(const Tensor& pred, const Tensor& target);

/// Feature assembly for one frame: [fields | history deltas (dynamic only,
/// when history_depth = 1) | one-hot node type | positional encoding].
NodeFeatures assemble_features(const Trajectory& traj, const Tensor& fields,
                               const Tensor* prev_fields, const std::vector<double>& pe,
                               std::size_t pe_q);

/// Model input width implied by a trajectory's layout and a PE width.
std::size_t model_input_width(const Trajectory& traj, std::size_t pe_q);

struct LossPoint {
    std::size_t step;
    double lr;
    double loss;
};

struct TrainResult {
    Weights weights;
    RunRecord record;
    std::vector<LossPoint> loss_curve;
};

struct Dataset {
    std::vector<Trajectory> trajectories;
};

/// Next-step training loop: per step, sample a (trajectory, t) pair,
/// regenerate the random-edge augmentation when enabled, add noise, forward,
/// L2 loss, backward, AdamW with the scheduled lr. Targets always come from
/// the clean trajectory. Aborts with NonFiniteLoss on instability.
TrainResult train_steps(const ModelConfig& model_cfg, Weights weights, const Dataset& dataset,
                        const TrainConfig& train_cfg);

/// Wraps a trained model as a rollout predictor. Masks are built once per
/// trajectory graph (with a fresh random-edge seed per step when the spec
/// asks for it).
Predictor model_predictor(const ModelConfig& cfg, const Weights& weights, TargetKind kind,
                          std::uint64_t seed = 0);

struct PretrainConfig {
    double mask_fraction = 0.15;
    TrainConfig train;
};

struct PretrainResult {
    Weights encoder_weights;  // decoder stack is discarded
    std::vector<LossPoint> loss_curve;
};

/// Two stacked transformer models trained to reconstruct masked node
/// features; loss is taken on the masked nodes only. Returns the encoder
/// stack's weights.
PretrainResult mask_pretrain(const ModelConfig& encoder_cfg, const ModelConfig& decoder_cfg,
                             const Dataset& dataset, const PretrainConfig& cfg);

/// Transfers a pretrained encoder into a fine-tuning model: all arrays with
/// matching shapes are copied, the decode MLP is freshly initialized.
Weights finetune_from(const ModelConfig& new_cfg, const Weights& pretrained,
                      const ModelConfig& pretrained_cfg, std::uint64_t seed);

}  // namespace meshattn
