#include "meshattn/model.hpp"

#include <random>

namespace meshattn {

void ModelConfig::validate() const {
    if (embed_dim == 0 || num_layers == 0 || num_heads == 0 || expansion == 0) {
        raise(ErrorCode::InvalidConfig, "model dimensions must be positive");
    }
    if (embed_dim % num_heads != 0) {
        raise(ErrorCode::InvalidConfig, "embed_dim must be divisible by num_heads");
    }
    if (input_width == 0 || output_width == 0) {
        raise(ErrorCode::InvalidConfig, "input/output widths must be positive");
    }
}

ModelConfig preset_config(Preset preset) {
    ModelConfig cfg;
    cfg.preset = preset;
    cfg.input_width = 9;  // one-hot node type (5) + v_x, v_y + 2-D coords
    cfg.output_width = 2;
    cfg.pe.mode = PeMode::Coords;
    switch (preset) {
        case Preset::S:
            cfg.embed_dim = 64;
            cfg.num_layers = 10;
            cfg.num_heads = 2;
            break;
        case Preset::M:
            cfg.embed_dim = 128;
            cfg.num_layers = 15;
            cfg.num_heads = 4;
            break;
        case Preset::L:
            cfg.embed_dim = 256;
            cfg.num_layers = 15;
            cfg.num_heads = 4;
            break;
        case Preset::XL:
            cfg.embed_dim = 512;
            cfg.num_layers = 15;
            cfg.num_heads = 4;
            break;
        case Preset::Custom:
            break;
    }
    return cfg;
}

Preset preset_from_name(const std::string& name) {
    if (name == "S") return Preset::S;
    if (name == "M") return Preset::M;
    if (name == "L") return Preset::L;
    if (name == "XL") return Preset::XL;
    if (name == "custom") return Preset::Custom;
    raise(ErrorCode::InvalidConfig, "unknown preset: " + name);
}

std::string preset_name(Preset preset) {
    switch (preset) {
        case Preset::S: return "S";
        case Preset::M: return "M";
        case Preset::L: return "L";
        case Preset::XL: return "XL";
        case Preset::Custom: return "custom";
    }
    return "custom";
}

namespace {

std::string layer_prefix(std::size_t l) {
    std::string idx = std::to_string(l);
    if (idx.size() < 2) idx = "0" + idx;
    return "layer." + idx + ".";
}

}  // namespace

void for_each_param_shape(
    const ModelConfig& cfg,
    const std::function<void(const std::string&, const std::vector<std::size_t>&)>& fn) {
    const std::size_t d = cfg.embed_dim, ed = cfg.gated_dim();
    fn("enc.w1", {cfg.input_width, d});
    fn("enc.b1", {d});
    fn("enc.w2", {d, d});
    fn("enc.b2", {d});
    for (std::size_t l = 0; l < cfg.num_layers; ++l) {
        const std::string p = layer_prefix(l);
        fn(p + "wq", {d, d});
        fn(p + "wk", {d, d});
        fn(p + "wv", {d, d});
        fn(p + "wo", {d, d});
        fn(p + "g1", {d});
        fn(p + "g2", {d});
        fn(p + "wl", {d, ed});
        fn(p + "bl", {ed});
        fn(p + "wr", {d, ed});
        fn(p + "br", {ed});
        fn(p + "wf", {ed, d});
        fn(p + "bf", {d});
    }
    fn("dec.w1", {d, d});
    fn("dec.b1", {d});
    fn("dec.w2", {d, cfg.output_width});
    fn("dec.b2", {cfg.output_width});
}

void Weights::for_each(const std::function<void(const std::string&, Tensor&)>& fn) {
    fn("enc.w1", enc_w1);
    fn("enc.b1", enc_b1);
    fn("enc.w2", enc_w2);
    fn("enc.b2", enc_b2);
    for (std::size_t l = 0; l < layers.size(); ++l) {
        const std::string p = layer_prefix(l);
        LayerWeights& lw = layers[l];
        fn(p + "wq", lw.wq);
        fn(p + "wk", lw.wk);
        fn(p + "wv", lw.wv);
        fn(p + "wo", lw.wo);
        fn(p + "g1", lw.g1);
        fn(p + "g2", lw.g2);
        fn(p + "wl", lw.wl);
        fn(p + "bl", lw.bl);
        fn(p + "wr", lw.wr);
        fn(p + "br", lw.br);
        fn(p + "wf", lw.wf);
        fn(p + "bf", lw.bf);
    }
    fn("dec.w1", dec_w1);
    fn("dec.b1", dec_b1);
    fn("dec.w2", dec_w2);
    fn("dec.b2", dec_b2);
}

void Weights::for_each(const std::function<void(const std::string&, const Tensor&)>& fn) const {
    const_cast<Weights*>(this)->for_each(
        [&fn](const std::string& name, Tensor& t) { fn(name, t); });
}

std::vector<Tensor*> Weights::flat() {
    std::vector<Tensor*> out;
    for_each([&out](const std::string&, Tensor& t) { out.push_back(&t); });
    return out;
}

std::size_t Weights::num_scalars() const {
    std::size_t n = 0;
    for_each([&n](const std::string&, const Tensor& t) { n += t.size(); });
    return n;
}

Weights init_weights(const ModelConfig& cfg, std::uint64_t seed) {
    cfg.validate();
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> unit(0.0, 1.0);

    Weights w;
    w.layers.resize(cfg.num_layers);
    // Allocate arrays in the canonical order.
    std::vector<Tensor*> slots;
    {
        // Build the tensors via the flat view: first size them.
        std::vector<std::vector<std::size_t>> shapes;
        std::vector<std::string> names;
        for_each_param_shape(cfg, [&](const std::string& name, const std::vector<std::size_t>& s) {
            names.push_back(name);
            shapes.push_back(s);
        });
        std::size_t idx = 0;
        w.for_each([&](const std::string& name, Tensor& t) {
            if (name != names[idx]) raise(ErrorCode::InvalidConfig, "weight ordering mismatch");
            t = Tensor(shapes[idx]);
            ++idx;
        });
    }

    w.for_each([&](const std::string& name, Tensor& t) {
        const bool is_gain = name.find(".g1") != std::string::npos ||
                             name.find(".g2") != std::string::npos;
        const bool is_bias = name.find(".b") != std::string::npos && !is_gain;
        if (is_gain) {
            for (double& v : t.data) v = 1.0;
        } else if (is_bias) {
            // zeros already
        } else {
            const double std_dev = 1.0 / std::sqrt(static_cast<double>(t.shape[0]));
            for (double& v : t.data) v = unit(rng) * std_dev;
        }
    });
    return w;
}

std::size_t param_count(const ModelConfig& cfg) {
    cfg.validate();
    std::size_t total = 0;
    for_each_param_shape(cfg, [&total](const std::string&, const std::vector<std::size_t>& s) {
        total += Tensor::count(s);
    });
    return total;
}

FlopsEstimate flops_estimate(const ModelConfig& cfg) {
    cfg.validate();
    const double d2 = static_cast<double>(cfg.embed_dim) * static_cast<double>(cfg.embed_dim);
    const double l = static_cast<double>(cfg.num_layers);
    FlopsEstimate est;
    est.transformer_per_node = l * 26.0 * d2;
    est.mps_per_node = 6.0 * d2 + l * 22.0 * d2;
    est.two_p = 2.0 * static_cast<double>(param_count(cfg));
    est.ratio_transformer = est.transformer_per_node / est.two_p;
    est.ratio_mps = est.mps_per_node / est.two_p;
    return est;
}

double training_flops(double params, double training_nodes) {
    if (params <= 0.0 || training_nodes <= 0.0) {
        raise(ErrorCode::NonPositiveInput, "training_flops needs positive P and D");
    }
    return 6.0 * params * training_nodes;
}

WeightVars register_weights(Tape& tape, const Weights& w, bool requires_grad) {
    WeightVars vars;
    vars.layers.resize(w.layers.size());
    std::vector<Tape::Var*> slots = {&vars.enc_w1, &vars.enc_b1, &vars.enc_w2, &vars.enc_b2};
    for (auto& lv : vars.layers) {
        for (Tape::Var* s : {&lv.wq, &lv.wk, &lv.wv, &lv.wo, &lv.g1, &lv.g2, &lv.wl, &lv.bl,
                             &lv.wr, &lv.br, &lv.wf, &lv.bf}) {
            slots.push_back(s);
        }
    }
    for (Tape::Var* s : {&vars.dec_w1, &vars.dec_b1, &vars.dec_w2, &vars.dec_b2}) slots.push_back(s);

    std::size_t idx = 0;
    w.for_each([&](const std::string&, const Tensor& t) {
        *slots[idx] = tape.leaf(t, requires_grad);
        ++idx;
    });
    return vars;
}

Weights collect_grads(const Tape& tape, const WeightVars& vars, const ModelConfig& cfg) {
    Weights grads;
    grads.layers.resize(cfg.num_layers);
    std::vector<const Tape::Var*> slots = {&vars.enc_w1, &vars.enc_b1, &vars.enc_w2, &vars.enc_b2};
    for (const auto& lv : vars.layers) {
        for (const Tape::Var* s : {&lv.wq, &lv.wk, &lv.wv, &lv.wo, &lv.g1, &lv.g2, &lv.wl, &lv.bl,
                                   &lv.wr, &lv.br, &lv.wf, &lv.bf}) {
            slots.push_back(s);
        }
    }
    for (const Tape::Var* s : {&vars.dec_w1, &vars.dec_b1, &vars.dec_w2, &vars.dec_b2}) {
        slots.push_back(s);
    }
    std::size_t idx = 0;
    grads.for_each([&](const std::string&, Tensor& t) {
        t = tape.grad(*slots[idx]);
        ++idx;
    });
    return grads;
}

Tape::Var block_forward(Tape& tape, const ModelConfig& cfg, const WeightVars::Layer& lw,
                        Tape::Var z, const MaskSet& masks, std::size_t layer) {
    const std::size_t dh = cfg.head_dim();

    Tape::Var q = tape.matmul(z, lw.wq);
    Tape::Var k = tape.matmul(z, lw.wk);
    Tape::Var v = tape.matmul(z, lw.wv);

    std::vector<Tape::Var> heads;
    heads.reserve(cfg.num_heads);
    for (std::size_t h = 0; h < cfg.num_heads; ++h) {
        Tape::Var qh = tape.slice_cols(q, h * dh, dh);
        Tape::Var kh = tape.slice_cols(k, h * dh, dh);
        Tape::Var vh = tape.slice_cols(v, h * dh, dh);
        heads.push_back(
            tape.masked_attention(qh, kh, vh, masks.mask_for(layer, h), cfg.attention_mode));
    }
    Tape::Var attn = tape.matmul(tape.concat_cols(heads), lw.wo);
    Tape::Var z_mid = tape.rmsnorm(tape.add(attn, z), lw.g1, kRmsNormEps);

    Tape::Var left = tape.gelu(tape.linear(z_mid, lw.wl, lw.bl));
    Tape::Var right = tape.linear(z_mid, lw.wr, lw.br);
    Tape::Var gated = tape.linear(tape.hadamard(left, right), lw.wf, lw.bf);
    return tape.rmsnorm(tape.add(gated, z_mid), lw.g2, kRmsNormEps);
}

Tape::Var model_forward(Tape& tape, const ModelConfig& cfg, const WeightVars& w, Tape::Var x,
                        const MaskSet& masks) {
    if (tape.value(x).cols() != cfg.input_width) {
        raise(ErrorCode::ShapeMismatch, "model input width does not match config");
    }
    if (masks.plan.num_layers != cfg.num_layers || masks.plan.num_heads != cfg.num_heads) {
        raise(ErrorCode::ShapeMismatch, "mask plan dimensions do not match config");
    }

    Tape::Var z = tape.linear(tape.gelu(tape.linear(x, w.enc_w1, w.enc_b1)), w.enc_w2, w.enc_b2);
    for (std::size_t l = 0; l < cfg.num_layers; ++l) {
        z = block_forward(tape, cfg, w.layers[l], z, masks, l);
    }
    return tape.linear(tape.gelu(tape.linear(z, w.dec_w1, w.dec_b1)), w.dec_w2, w.dec_b2);
}

Tensor forward(const ModelConfig& cfg, const Weights& w, const Tensor& x, const MaskSet& masks) {
    Tape tape;
    WeightVars vars = register_weights(tape, w, /*requires_grad=*/false);
    Tape::Var out = model_forward(tape, cfg, vars, tape.leaf(x), masks);
    return tape.value(out);
}

}  // namespace meshattn
