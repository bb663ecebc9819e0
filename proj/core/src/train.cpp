#include "meshattn/train.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <random>

namespace meshattn {

namespace {

// Named, seeded RNG streams: mixes a base seed, a stream tag and a step.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream, std::uint64_t step) {
    std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (stream + 1) + step;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

constexpr std::uint64_t kStreamSample = 1;
constexpr std::uint64_t kStreamNoise = 2;
constexpr std::uint64_t kStreamEdges = 3;
constexpr std::uint64_t kStreamGlobal = 4;
constexpr std::uint64_t kStreamMaskRows = 5;

}  // namespace

double lr_at(const Schedule& schedule, std::size_t step) {
    if (step > schedule.total_iters) {
        raise(ErrorCode::StepOutOfRange, "lr_at: step beyond schedule length");
    }
    if (schedule.kind == ScheduleKind::WarmupCosine) {
        if (step < schedule.warmup_iters) {
            return schedule.lr_max * static_cast<double>(step) /
                   static_cast<double>(schedule.warmup_iters);
        }
        const double span = static_cast<double>(schedule.total_iters - schedule.warmup_iters);
        const double progress =
            span > 0.0 ? static_cast<double>(step - schedule.warmup_iters) / span : 1.0;
        return schedule.lr_min +
               0.5 * (schedule.lr_max - schedule.lr_min) * (1.0 + std::cos(M_PI * progress));
    }
    // ExponentialTail
    const std::size_t flat_steps = static_cast<std::size_t>(
        std::llround(schedule.flat_fraction * static_cast<double>(schedule.total_iters)));
    if (step <= flat_steps) return schedule.lr_flat;
    const double tail = static_cast<double>(schedule.total_iters - flat_steps);
    const double progress = static_cast<double>(step - flat_steps) / tail;
    return schedule.lr_flat * std::pow(schedule.decay_to / schedule.lr_flat, progress);
}

Schedule default_schedule(Preset preset, std::size_t total_iters) {
    Schedule s;
    s.total_iters = total_iters;
    s.lr_max = preset == Preset::XL ? 1e-4 : 1e-3;
    s.lr_min = preset == Preset::XL ? 1e-7 : 1e-6;
    s.warmup_iters = (preset == Preset::L || preset == Preset::XL) ? 5000 : 1000;
    s.warmup_iters = std::min(s.warmup_iters, total_iters / 2);
    return s;
}

AdamState init_adam_state(const Weights& w) {
    AdamState state;
    w.for_each([&state](const std::string&, const Tensor& t) {
        state.m.push_back(Tensor::zeros_like(t));
        state.v.push_back(Tensor::zeros_like(t));
    });
    return state;
}

namespace {

void adam_update(const std::vector<Tensor*>& params, const std::vector<const Tensor*>& grads,
                 AdamState& state, double lr, const TrainConfig& cfg) {
    state.step += 1;
    const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.step));
    const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.step));
    for (std::size_t a = 0; a < params.size(); ++a) {
        Tensor& w = *params[a];
        const Tensor& g = *grads[a];
        if (!w.same_shape(g)) raise(ErrorCode::ShapeMismatch, "adamw_step: gradient shape");
        Tensor& m = state.m[a];
        Tensor& v = state.v[a];
        for (std::size_t i = 0; i < w.size(); ++i) {
            m.data[i] = cfg.beta1 * m.data[i] + (1.0 - cfg.beta1) * g.data[i];
            v.data[i] = cfg.beta2 * v.data[i] + (1.0 - cfg.beta2) * g.data[i] * g.data[i];
            const double mhat = m.data[i] / bc1;
            const double vhat = v.data[i] / bc2;
            w.data[i] -= lr * mhat / (std::sqrt(vhat) + cfg.adam_eps);
            if (cfg.optimizer == OptimizerKind::AdamW) {
                w.data[i] -= lr * cfg.weight_decay * w.data[i];
            }
        }
    }
}

}  // namespace

void adamw_step(Weights& w, const Weights& grads, AdamState& state, double lr,
                const TrainConfig& cfg) {
    std::vector<Tensor*> params = w.flat();
    std::vector<const Tensor*> gptrs;
    const_cast<Weights&>(grads).for_each(
        [&gptrs](const std::string&, Tensor& t) { gptrs.push_back(&t); });
    if (params.size() != gptrs.size()) {
        raise(ErrorCode::ShapeMismatch, "adamw_step: parameter count mismatch");
    }
    adam_update(params, gptrs, state, lr, cfg);
}

NodeFeatures add_noise(const NodeFeatures& x, const std::vector<double>& sigmas,
                       std::uint64_t seed) {
    std::size_t dynamic = 0;
    for (bool d : x.dynamic_mask) dynamic += d ? 1 : 0;
    if (sigmas.size() != dynamic) {
        raise(ErrorCode::ShapeMismatch, "add_noise: one sigma per dynamic field required");
    }
    NodeFeatures out = x;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> unit(0.0, 1.0);
    std::size_t k = 0;
    for (std::size_t f = 0; f < x.width; ++f) {
        if (!x.dynamic_mask[f]) continue;
        const double sigma = sigmas[k++];
        if (sigma > 0.0) {
            for (std::size_t i = 0; i < x.num_nodes; ++i) out.at(i, f) += sigma * unit(rng);
        }
    }
    return out;
}

double l2_loss(const Tensor& pred, const Tensor& target) {
    if (!pred.same_shape(target)) raise(ErrorCode::ShapeMismatch, "l2_loss: shapes differ");
    double total = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const double d = pred.data[i] - target.data[i];
        total += d * d;
    }
    return total / static_cast<double>(pred.size());
}

std::size_t model_input_width(const Trajectory& traj, std::size_t pe_q) {
    return traj.num_fields + (traj.history_depth == 1 ? traj.num_dynamic() : 0) + kNumNodeTypes +
           pe_q;
}

NodeFeatures assemble_features(const Trajectory& traj, const Tensor& fields,
                               const Tensor* prev_fields, const std::vector<double>& pe,
                               std::size_t pe_q) {
    const std::size_t n = traj.graph.num_nodes;
    const std::size_t f_count = traj.num_fields;
    const std::size_t hist = traj.history_depth == 1 ? traj.num_dynamic() : 0;
    const std::size_t width = f_count + hist + kNumNodeTypes + pe_q;

    NodeFeatures x;
    x.num_nodes = n;
    x.width = width;
    x.values.assign(n * width, 0.0);
    x.field_names.reserve(width);
    x.dynamic_mask.assign(width, false);

    for (std::size_t f = 0; f < f_count; ++f) {
        x.field_names.push_back(traj.field_names[f]);
        x.dynamic_mask[f] = traj.dynamic_mask[f];
    }
    for (std::size_t f = 0; f < f_count; ++f) {
        if (traj.dynamic_mask[f] && traj.history_depth == 1) {
            x.field_names.push_back("d_" + traj.field_names[f]);
        }
    }
    for (int t = 0; t < kNumNodeTypes; ++t) x.field_names.push_back("type_" + std::to_string(t));
    for (std::size_t q = 0; q < pe_q; ++q) x.field_names.push_back("pe_" + std::to_string(q));

    for (std::size_t i = 0; i < n; ++i) {
        std::size_t col = 0;
        for (std::size_t f = 0; f < f_count; ++f) x.at(i, col++) = fields.at(i, f);
        if (hist > 0) {
            for (std::size_t f = 0; f < f_count; ++f) {
                if (!traj.dynamic_mask[f]) continue;
                x.at(i, col++) = prev_fields ? fields.at(i, f) - prev_fields->at(i, f) : 0.0;
            }
        }
        x.at(i, col + static_cast<std::size_t>(traj.graph.node_type[i])) = 1.0;
        col += kNumNodeTypes;
        for (std::size_t q = 0; q < pe_q; ++q) x.at(i, col++) = pe[i * pe_q + q];
    }
    return x;
}

namespace {

Tensor features_tensor(const NodeFeatures& x) {
    Tensor t = Tensor::matrix(x.num_nodes, x.width);
    t.data = x.values;
    return t;
}

// Target over the dynamic field columns only, from the clean trajectory.
Tensor dynamic_target(const Trajectory& traj, std::size_t t, TargetKind kind) {
    const std::size_t n = traj.graph.num_nodes;
    Tensor target = Tensor::matrix(n, traj.num_dynamic());
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t col = 0;
        for (std::size_t f = 0; f < traj.num_fields; ++f) {
            if (!traj.dynamic_mask[f]) continue;
            const double next = traj.field(t + 1, i, f);
            target.at(i, col++) =
                kind == TargetKind::Delta ? next - traj.field(t, i, f) : next;
        }
    }
    return target;
}

struct TrajectoryContext {
    std::vector<double> pe;
    std::size_t pe_q = 0;
    MaskSet masks;  // rebuilt per step when random edges reseed
};

TrajectoryContext make_context(const Trajectory& traj, const ModelConfig& cfg,
                               std::uint64_t edge_seed, std::uint64_t global_seed) {
    TrajectoryContext ctx;
    ctx.pe_q = pe_width(cfg.pe, traj.graph.coord_dim);
    ctx.pe = positional_encoding(traj.graph, cfg.pe);
    ctx.masks = build_mask_set(traj.graph, cfg.augment, cfg.num_layers, cfg.num_heads,
                               cfg.self_loops, edge_seed, global_seed);
    return ctx;
}

}  // namespace

TrainResult train_steps(const ModelConfig& model_cfg, Weights weights, const Dataset& dataset,
                        const TrainConfig& train_cfg) {
    model_cfg.validate();
    if (dataset.trajectories.empty()) {
        raise(ErrorCode::InvalidConfig, "train_steps: empty dataset");
    }
    const std::size_t steps =
        train_cfg.steps > 0 ? train_cfg.steps : train_cfg.schedule.total_iters;
    Schedule schedule = train_cfg.schedule;
    if (schedule.total_iters < steps) schedule.total_iters = steps;

    const bool reseed_edges = model_cfg.augment.reseed_per_step &&
                              model_cfg.augment.random_edge_fraction > 0.0;
    std::vector<TrajectoryContext> contexts;
    contexts.reserve(dataset.trajectories.size());
    for (std::size_t i = 0; i < dataset.trajectories.size(); ++i) {
        const Trajectory& traj = dataset.trajectories[i];
        traj.validate();
        contexts.push_back(make_context(traj, model_cfg,
                                        derive_seed(train_cfg.seed, kStreamEdges, i),
                                        derive_seed(train_cfg.seed, kStreamGlobal, i)));
        if (model_input_width(traj, contexts.back().pe_q) != model_cfg.input_width) {
            raise(ErrorCode::ShapeMismatch, "dataset feature width does not match model config");
        }
        if (traj.num_dynamic() != model_cfg.output_width) {
            raise(ErrorCode::ShapeMismatch, "dynamic field count does not match model output");
        }
        if (traj.num_frames < 2 + static_cast<std::size_t>(traj.history_depth)) {
            raise(ErrorCode::TooShort, "trajectory has no sampleable transition");
        }
    }

    std::mt19937_64 sample_rng(derive_seed(train_cfg.seed, kStreamSample, 0));
    std::uniform_int_distribution<std::size_t> pick_traj(0, dataset.trajectories.size() - 1);

    TrainResult result;
    std::vector<double> losses;
    losses.reserve(steps);
    double nodes_processed = 0.0;

    AdamState adam = init_adam_state(weights);

    for (std::size_t step = 0; step < steps; ++step) {
        Weights grad_acc;
        double step_loss = 0.0;
        for (std::size_t micro = 0; micro < train_cfg.grad_accumulation; ++micro) {
            const std::size_t ti = pick_traj(sample_rng);
            const Trajectory& traj = dataset.trajectories[ti];
            TrajectoryContext& ctx = contexts[ti];
            const std::size_t t_lo = traj.history_depth == 1 ? 1 : 0;
            std::uniform_int_distribution<std::size_t> pick_t(t_lo, traj.num_frames - 2);
            const std::size_t t = pick_t(sample_rng);

            if (reseed_edges) {
                ctx.masks = build_mask_set(
                    traj.graph, model_cfg.augment, model_cfg.num_layers, model_cfg.num_heads,
                    model_cfg.self_loops,
                    derive_seed(train_cfg.seed, kStreamEdges, step * 1000 + micro),
                    derive_seed(train_cfg.seed, kStreamGlobal, ti));
            }

            Tensor cur = traj.frame(t);
            Tensor prev;
            const Tensor* prev_ptr = nullptr;
            if (traj.history_depth == 1 && t > 0) {
                prev = traj.frame(t - 1);
                prev_ptr = &prev;
            }
            NodeFeatures features = assemble_features(traj, cur, prev_ptr, ctx.pe, ctx.pe_q);
            if (!train_cfg.noise_sigmas.empty()) {
                features = add_noise(features, train_cfg.noise_sigmas,
                                     derive_seed(train_cfg.seed, kStreamNoise,
                                                 step * 1000 + micro));
            }
            const Tensor target = dynamic_target(traj, t, train_cfg.target_kind);

            Tape tape;
            WeightVars vars = register_weights(tape, weights, /*requires_grad=*/true);
            Tape::Var x = tape.leaf(features_tensor(features));
            Tape::Var out = model_forward(tape, model_cfg, vars, x, ctx.masks);
            Tape::Var loss = tape.mse(out, target);
            const double loss_value = tape.scalar_value(loss);
            if (!std::isfinite(loss_value)) {
                raise(ErrorCode::NonFiniteLoss,
                      "non-finite loss at step " + std::to_string(step));
            }
            tape.backward(loss);
            Weights grads = collect_grads(tape, vars, model_cfg);

            step_loss += loss_value;
            nodes_processed += static_cast<double>(traj.graph.num_nodes);

            if (micro == 0) {
                grad_acc = std::move(grads);
            } else {
                std::vector<Tensor*> acc = grad_acc.flat();
                std::vector<Tensor*> cur_g = grads.flat();
                for (std::size_t a = 0; a < acc.size(); ++a) {
                    for (std::size_t j = 0; j < acc[a]->size(); ++j) {
                        acc[a]->data[j] += cur_g[a]->data[j];
                    }
                }
            }
        }
        if (train_cfg.grad_accumulation > 1) {
            const double inv = 1.0 / static_cast<double>(train_cfg.grad_accumulation);
            std::vector<Tensor*> acc = grad_acc.flat();
            for (Tensor* t : acc) {
                for (double& v : t->data) v *= inv;
            }
            step_loss *= inv;
        }

        adamw_step(weights, grad_acc, adam, lr_at(schedule, step), train_cfg);
        losses.push_back(step_loss);
        if (step % train_cfg.loss_log_every == 0 || step + 1 == steps) {
            result.loss_curve.push_back({step, lr_at(schedule, step), step_loss});
        }
    }

    const std::size_t window = std::min<std::size_t>(train_cfg.final_loss_window, losses.size());
    double tail = 0.0;
    for (std::size_t i = losses.size() - window; i < losses.size(); ++i) tail += losses[i];

    result.record.param_count = static_cast<double>(weights.num_scalars());
    result.record.training_nodes = nodes_processed;
    result.record.flop_budget = training_flops(result.record.param_count, nodes_processed);
    result.record.final_loss = window > 0 ? tail / static_cast<double>(window) : 0.0;
    result.weights = std::move(weights);
    return result;
}

Predictor model_predictor(const ModelConfig& cfg, const Weights& weights, TargetKind kind,
                          std::uint64_t seed) {
    struct State {
        ModelConfig cfg;
        Weights weights;
        TargetKind kind;
        std::uint64_t seed;
        const Graph* graph = nullptr;
        std::vector<double> pe;
        std::size_t pe_q = 0;
        MaskSet masks;
        std::size_t call_count = 0;
    };
    auto state = std::make_shared<State>();
    state->cfg = cfg;
    state->weights = weights;
    state->kind = kind;
    state->seed = seed;

    return [state](const Trajectory& traj, const Tensor& fields, const Tensor* prev,
                   std::size_t t) -> Tensor {
        State& s = *state;
        const bool reseed = s.cfg.augment.reseed_per_step &&
                            s.cfg.augment.random_edge_fraction > 0.0;
        if (s.graph != &traj.graph || (reseed && s.call_count > 0) || s.call_count == 0) {
            const std::uint64_t edge_seed = derive_seed(s.seed, kStreamEdges, s.call_count);
            const std::uint64_t global_seed = derive_seed(s.seed, kStreamGlobal, 0);
            if (s.graph != &traj.graph) {
                s.pe_q = pe_width(s.cfg.pe, traj.graph.coord_dim);
                s.pe = positional_encoding(traj.graph, s.cfg.pe);
                s.graph = &traj.graph;
            }
            s.masks = build_mask_set(traj.graph, s.cfg.augment, s.cfg.num_layers, s.cfg.num_heads,
                                     s.cfg.self_loops, edge_seed, global_seed);
        }
        s.call_count += 1;

        NodeFeatures features = assemble_features(traj, fields, prev, s.pe, s.pe_q);
        const Tensor out = forward(s.cfg, s.weights, features_tensor(features), s.masks);

        Tensor next = fields;
        for (std::size_t i = 0; i < traj.graph.num_nodes; ++i) {
            std::size_t col = 0;
            for (std::size_t f = 0; f < traj.num_fields; ++f) {
                if (!traj.dynamic_mask[f]) continue;
                next.at(i, f) = s.kind == TargetKind::Delta ? fields.at(i, f) + out.at(i, col)
                                                            : out.at(i, col);
                ++col;
            }
        }
        (void)t;
        return next;
    };
}

PretrainResult mask_pretrain(const ModelConfig& encoder_cfg, const ModelConfig& decoder_cfg,
                             const Dataset& dataset, const PretrainConfig& cfg) {
    encoder_cfg.validate();
    decoder_cfg.validate();
    if (cfg.mask_fraction <= 0.0 || cfg.mask_fraction >= 1.0) {
        raise(ErrorCode::InvalidConfig, "mask_fraction must lie in (0,1)");
    }
    if (encoder_cfg.output_width != decoder_cfg.input_width) {
        raise(ErrorCode::ShapeMismatch, "encoder output width must feed the decoder input");
    }
    if (dataset.trajectories.empty()) {
        raise(ErrorCode::InvalidConfig, "mask_pretrain: empty dataset");
    }
    // Masking replaces the dynamic field columns, which must form a prefix of
    // the field list so one contiguous token can stand in for them.
    const Trajectory& first = dataset.trajectories.front();
    const std::size_t num_dynamic = first.num_dynamic();
    for (std::size_t f = 0; f < num_dynamic; ++f) {
        if (!first.dynamic_mask[f]) {
            raise(ErrorCode::InvalidConfig, "dynamic fields must be a contiguous prefix");
        }
    }

    const TrainConfig& tc = cfg.train;
    const std::size_t steps = tc.steps > 0 ? tc.steps : tc.schedule.total_iters;
    Schedule schedule = tc.schedule;
    if (schedule.total_iters < steps) schedule.total_iters = steps;

    Weights enc = init_weights(encoder_cfg, derive_seed(tc.seed, 10, 0));
    Weights dec = init_weights(decoder_cfg, derive_seed(tc.seed, 11, 0));
    Tensor token = Tensor::vec(num_dynamic, 0.0);

    std::vector<TrajectoryContext> contexts;
    for (std::size_t i = 0; i < dataset.trajectories.size(); ++i) {
        contexts.push_back(make_context(dataset.trajectories[i], encoder_cfg,
                                        derive_seed(tc.seed, kStreamEdges, i),
                                        derive_seed(tc.seed, kStreamGlobal, i)));
    }
    // Decoder consumes the encoder's latent output; it attends over the same
    // graph with its own (unaugmented-dilation) plan.
    std::vector<MaskSet> dec_masks;
    for (std::size_t i = 0; i < dataset.trajectories.size(); ++i) {
        dec_masks.push_back(build_mask_set(dataset.trajectories[i].graph, decoder_cfg.augment,
                                           decoder_cfg.num_layers, decoder_cfg.num_heads,
                                           decoder_cfg.self_loops,
                                           derive_seed(tc.seed, kStreamEdges, 500000 + i),
                                           derive_seed(tc.seed, kStreamGlobal, 500000 + i)));
    }

    AdamState adam;
    {
        // Single optimizer over encoder + decoder + token.
        Weights tmp;  // state built from the concatenated flat list below
        (void)tmp;
        adam.step = 0;
        auto push_zeros = [&adam](const Tensor& t) {
            adam.m.push_back(Tensor::zeros_like(t));
            adam.v.push_back(Tensor::zeros_like(t));
        };
        enc.for_each([&](const std::string&, const Tensor& t) { push_zeros(t); });
        dec.for_each([&](const std::string&, const Tensor& t) { push_zeros(t); });
        push_zeros(token);
    }

    std::mt19937_64 sample_rng(derive_seed(tc.seed, kStreamSample, 0));
    std::uniform_int_distribution<std::size_t> pick_traj(0, dataset.trajectories.size() - 1);

    PretrainResult result;
    for (std::size_t step = 0; step < steps; ++step) {
        const std::size_t ti = pick_traj(sample_rng);
        const Trajectory& traj = dataset.trajectories[ti];
        TrajectoryContext& ctx = contexts[ti];
        std::uniform_int_distribution<std::size_t> pick_t(0, traj.num_frames - 1);
        const std::size_t t = pick_t(sample_rng);

        const std::size_t n = traj.graph.num_nodes;
        const std::size_t masked = static_cast<std::size_t>(
            std::llround(cfg.mask_fraction * static_cast<double>(n)));
        if (masked == 0) raise(ErrorCode::NoMaskedNodes, "mask fraction selects no nodes");
        std::vector<std::uint8_t> row_mask(n, 0);
        {
            std::mt19937_64 rows_rng(derive_seed(tc.seed, kStreamMaskRows, step));
            std::vector<std::uint32_t> order(n);
            for (std::uint32_t i = 0; i < n; ++i) order[i] = i;
            std::shuffle(order.begin(), order.end(), rows_rng);
            for (std::size_t i = 0; i < masked; ++i) row_mask[order[i]] = 1;
        }

        Tensor cur = traj.frame(t);
        NodeFeatures features = assemble_features(traj, cur, nullptr, ctx.pe, ctx.pe_q);

        // Reconstruction target: the clean dynamic fields of the same frame.
        Tensor target = Tensor::matrix(n, num_dynamic);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t f = 0; f < num_dynamic; ++f) target.at(i, f) = cur.at(i, f);
        }

        Tape tape;
        WeightVars enc_vars = register_weights(tape, enc, true);
        WeightVars dec_vars = register_weights(tape, dec, true);
        Tape::Var token_var = tape.leaf(token, true);
        Tape::Var x = tape.leaf(features_tensor(features));
        Tape::Var x_masked = tape.apply_mask_token(x, token_var, row_mask, 0);
        Tape::Var latent = model_forward(tape, encoder_cfg, enc_vars, x_masked, ctx.masks);
        Tape::Var recon = model_forward(tape, decoder_cfg, dec_vars, latent, dec_masks[ti]);
        Tape::Var loss = tape.mse_rows(recon, target, row_mask);
        const double loss_value = tape.scalar_value(loss);
        if (!std::isfinite(loss_value)) {
            raise(ErrorCode::NonFiniteLoss, "non-finite pretrain loss");
        }
        tape.backward(loss);

        std::vector<Tensor*> params;
        std::vector<Tensor> grads;
        Weights enc_grads = collect_grads(tape, enc_vars, encoder_cfg);
        Weights dec_grads = collect_grads(tape, dec_vars, decoder_cfg);
        for (Tensor* p : enc.flat()) params.push_back(p);
        for (Tensor* p : dec.flat()) params.push_back(p);
        params.push_back(&token);
        for (Tensor* g : enc_grads.flat()) grads.push_back(*g);
        for (Tensor* g : dec_grads.flat()) grads.push_back(*g);
        grads.push_back(tape.grad(token_var));
        std::vector<const Tensor*> gptrs;
        for (const Tensor& g : grads) gptrs.push_back(&g);

        adam_update(params, gptrs, adam, lr_at(schedule, step), tc);

        if (step % tc.loss_log_every == 0 || step + 1 == steps) {
            result.loss_curve.push_back({step, lr_at(schedule, step), loss_value});
        }
    }
    result.encoder_weights = std::move(enc);
    return result;
}

Weights finetune_from(const ModelConfig& new_cfg, const Weights& pretrained,
                      const ModelConfig& pretrained_cfg, std::uint64_t seed) {
    (void)pretrained_cfg;
    Weights w = init_weights(new_cfg, seed);
    // Copy every array whose name and shape survive the head swap.
    std::vector<std::pair<std::string, const Tensor*>> source;
    pretrained.for_each([&source](const std::string& name, const Tensor& t) {
        source.emplace_back(name, &t);
    });
    w.for_each([&source](const std::string& name, Tensor& t) {
        for (const auto& [src_name, src] : source) {
            if (src_name == name && src->shape == t.shape) {
                t = *src;
                break;
            }
        }
    });
    return w;
}

}  // namespace meshattn
