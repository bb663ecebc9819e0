#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "meshattn/augment.hpp"
#include "meshattn/positional.hpp"
#include "meshattn/tape.hpp"

namespace meshattn {

enum class Preset { S, M, L, XL, Custom };

/// Architecture hyperparameters. `input_width` is the full feature width the
/// encoder sees, positional-encoding columns included.
struct ModelConfig {
    std::size_t embed_dim = 64;    // d
    std::size_t num_layers = 10;   // L
    std::size_t num_heads = 2;     // H, must divide d
    std::size_t expansion = 3;     // e, gated width = e*d
    std::size_t input_width = 9;   // p_in (+ PE)
    std::size_t output_width = 2;  // p_out
    PeSpec pe;
    AugmentSpec augment;
    bool self_loops = false;
    AttentionMode attention_mode = AttentionMode::NeighborhoodSoftmax;
    Preset preset = Preset::Custom;

    std::size_t head_dim() const { return embed_dim / num_heads; }
    std::size_t gated_dim() const { return expansion * embed_dim; }
    void validate() const;
};

/// Named presets matching the published S/M/L/XL rows; feature widths are the
/// Cylinder-style defaults (node-type one-hot + 2 velocities + 2-D coords).
ModelConfig preset_config(Preset preset);
Preset preset_from_name(const std::string& name);
std::string preset_name(Preset preset);

struct LayerWeights {
    Tensor wq, wk, wv, wo;  // d x d
    Tensor g1, g2;          // rmsnorm gains, d
    Tensor wl, wr;          // d x ed
    Tensor bl, br;          // ed
    Tensor wf;              // ed x d
    Tensor bf;              // d
};

struct Weights {
    Tensor enc_w1, enc_b1, enc_w2, enc_b2;
    std::vector<LayerWeights> layers;
    Tensor dec_w1, dec_b1, dec_w2, dec_b2;

    void for_each(const std::function<void(const std::string&, Tensor&)>& fn);
    void for_each(const std::function<void(const std::string&, const Tensor&)>& fn) const;
    std::vector<Tensor*> flat();
    std::size_t num_scalars() const;
};

/// Enumerates every parameter array's name and shape for a config, in the
/// same order init_weights draws them and checkpoints store them.
void for_each_param_shape(
    const ModelConfig& cfg,
    const std::function<void(const std::string&, const std::vector<std::size_t>&)>& fn);

/// Normal(0, 1/fan_in) matrices, zero biases, unit norm gains. Deterministic
/// per seed.
Weights init_weights(const ModelConfig& cfg, std::uint64_t seed);

std::size_t param_count(const ModelConfig& cfg);

struct FlopsEstimate {
    double transformer_per_node = 0.0;  // L * 26 d^2
    double mps_per_node = 0.0;          // 6 d^2 + L * 22 d^2 (message-passing formula)
    double two_p = 0.0;                 // 2 * param_count
    double ratio_transformer = 0.0;
    double ratio_mps = 0.0;
};

FlopsEstimate flops_estimate(const ModelConfig& cfg);

/// Training FLOPs under the 2P forward approximation with backward = 2x
/// forward: 6 * P * D.
double training_flops(double param_count, double training_nodes);

/// Tape handles for every weight array, in Weights order.
struct WeightVars {
    Tape::Var enc_w1, enc_b1, enc_w2, enc_b2;
    struct Layer {
        Tape::Var wq, wk, wv, wo, g1, g2, wl, bl, wr, br, wf, bf;
    };
    std::vector<Layer> layers;
    Tape::Var dec_w1, dec_b1, dec_w2, dec_b2;
};

WeightVars register_weights(Tape& tape, const Weights& w, bool requires_grad = true);

/// Gradients read back from the tape after backward, Weights-shaped.
Weights collect_grads(const Tape& tape, const WeightVars& vars, const ModelConfig& cfg);

constexpr double kRmsNormEps = 1e-6;

/// Encode -> L transformer blocks -> Decode, recorded on the tape.
Tape::Var model_forward(Tape& tape, const ModelConfig& cfg, const WeightVars& w, Tape::Var x,
                        const MaskSet& masks);

/// One transformer block (masked multi-head attention + gated MLP, post-norm
/// residuals).
Tape::Var block_forward(Tape& tape, const ModelConfig& cfg, const WeightVars::Layer& lw,
                        Tape::Var z, const MaskSet& masks, std::size_t layer);

/// Gradient-free convenience forward; x is N x input_width.
Tensor forward(const ModelConfig& cfg, const Weights& w, const Tensor& x, const MaskSet& masks);

}  // namespace meshattn
