#include <cmath>
#include <random>

#include "doctest.h"
#include "helpers.hpp"
#include "meshattn/grad_check.hpp"
#include "meshattn/model.hpp"

using namespace meshattn;
using namespace meshattn::testing;

namespace {

Tensor random_input(std::size_t n, std::size_t width, std::uint64_t seed, double scale = 1.0) {
    Tensor x = Tensor::matrix(n, width);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(-scale, scale);
    for (double& v : x.data) v = dist(rng);
    return x;
}

MaskSet plain_masks(const Graph& g, const ModelConfig& cfg) {
    return build_mask_set(g, cfg.augment, cfg.num_layers, cfg.num_heads, cfg.self_loops, 0, 0);
}

}  // namespace

TEST_CASE("preset parameter counts match the published sizes within 5%") {
    const struct {
        Preset preset;
        double expected;
    } rows[] = {{Preset::S, 0.55e6}, {Preset::M, 3.2e6}, {Preset::L, 13e6}, {Preset::XL, 51e6}};
    for (const auto& row : rows) {
        const double p = static_cast<double>(param_count(preset_config(row.preset)));
        CHECK(std::abs(p - row.expected) / row.expected < 0.05);
    }
}

TEST_CASE("param_count equals the scalars init_weights allocates") {
    for (Preset preset : {Preset::S, Preset::M}) {
        ModelConfig cfg = preset_config(preset);
        CHECK(param_count(cfg) == init_weights(cfg, 1).num_scalars());
    }
    ModelConfig tiny;
    tiny.embed_dim = 8;
    tiny.num_layers = 2;
    tiny.num_heads = 2;
    tiny.input_width = 5;
    tiny.output_width = 3;
    CHECK(param_count(tiny) == init_weights(tiny, 1).num_scalars());
}

TEST_CASE("flops estimates match the published ratios within 0.02") {
    CHECK(flops_estimate(preset_config(Preset::S)).transformer_per_node ==
          doctest::Approx(1064960.0));

    const struct {
        Preset preset;
        double transformer;
        double mps;
    } rows[] = {{Preset::S, 0.97, 0.84},
                {Preset::M, 0.99, 0.86},
                {Preset::L, 0.98, 0.85},
                {Preset::XL, 0.98, 0.85}};
    for (const auto& row : rows) {
        FlopsEstimate est = flops_estimate(preset_config(row.preset));
        CHECK(std::abs(est.ratio_transformer - row.transformer) <= 0.02);
        CHECK(std::abs(est.ratio_mps - row.mps) <= 0.02);
    }
}

TEST_CASE("training_flops") {
    CHECK(training_flops(1, 1) == 6.0);
    CHECK(training_flops(0.55e6, 1e6) == doctest::Approx(3.3e12));
    CHECK(training_flops(2, 3) > training_flops(1, 3));
    CHECK(training_flops(2, 4) > training_flops(2, 3));
    CHECK_THROWS_WITH_AS(training_flops(0, 1), doctest::Contains("NonPositiveInput"), Error);
}

TEST_CASE("init_weights statistics and determinism") {
    ModelConfig cfg = preset_config(Preset::S);
    Weights a = init_weights(cfg, 42);
    Weights b = init_weights(cfg, 42);
    bool identical = true;
    std::vector<Tensor*> fa = a.flat();
    std::vector<Tensor*> fb = b.flat();
    for (std::size_t i = 0; i < fa.size(); ++i) {
        if (fa[i]->data != fb[i]->data) identical = false;
    }
    CHECK(identical);

    // A d x d matrix at d = 64: sample std close to 1/sqrt(64).
    const Tensor& wq = a.layers[0].wq;
    double mean = 0.0;
    for (double v : wq.data) mean += v;
    mean /= double(wq.size());
    double var = 0.0;
    for (double v : wq.data) var += (v - mean) * (v - mean);
    const double std_dev = std::sqrt(var / double(wq.size()));
    CHECK(std_dev > 0.8 / 8.0);
    CHECK(std_dev < 1.2 / 8.0);

    for (double v : a.layers[0].g1.data) CHECK(v == 1.0);
    for (double v : a.layers[0].bl.data) CHECK(v == 0.0);
}

TEST_CASE("block output matches a step-by-step composition") {
    ModelConfig cfg;
    cfg.embed_dim = 4;
    cfg.num_layers = 1;
    cfg.num_heads = 2;
    cfg.input_width = 4;
    cfg.output_width = 4;
    Graph g = random_graph(4, 0.6, 5);
    MaskSet masks = plain_masks(g, cfg);
    Weights w = init_weights(cfg, 9);
    Tensor z0 = random_input(4, 4, 10);

    Tape tape;
    WeightVars vars = register_weights(tape, w, false);
    Tape::Var block = block_forward(tape, cfg, vars.layers[0], tape.leaf(z0), masks, 0);

    Tape ref;
    WeightVars rv = register_weights(ref, w, false);
    Tape::Var z = ref.leaf(z0);
    Tape::Var q = ref.matmul(z, rv.layers[0].wq);
    Tape::Var k = ref.matmul(z, rv.layers[0].wk);
    Tape::Var v = ref.matmul(z, rv.layers[0].wv);
    std::vector<Tape::Var> heads;
    for (std::size_t h = 0; h < 2; ++h) {
        heads.push_back(ref.masked_attention(ref.slice_cols(q, h * 2, 2),
                                             ref.slice_cols(k, h * 2, 2),
                                             ref.slice_cols(v, h * 2, 2), masks.mask_for(0, h),
                                             AttentionMode::NeighborhoodSoftmax));
    }
    Tape::Var attn = ref.matmul(ref.concat_cols(heads), rv.layers[0].wo);
    Tape::Var zmid = ref.rmsnorm(ref.add(attn, z), rv.layers[0].g1, kRmsNormEps);
    Tape::Var gated = ref.hadamard(ref.gelu(ref.linear(zmid, rv.layers[0].wl, rv.layers[0].bl)),
                                   ref.linear(zmid, rv.layers[0].wr, rv.layers[0].br));
    Tape::Var expect = ref.rmsnorm(
        ref.add(ref.linear(gated, rv.layers[0].wf, rv.layers[0].bf), zmid), rv.layers[0].g2,
        kRmsNormEps);

    for (std::size_t i = 0; i < tape.value(block).size(); ++i) {
        CHECK(tape.value(block).data[i] ==
              doctest::Approx(ref.value(expect).data[i]).epsilon(1e-10));
    }
}

TEST_CASE("forward handles an isolated node") {
    ModelConfig cfg;
    cfg.embed_dim = 8;
    cfg.num_layers = 1;
    cfg.num_heads = 2;
    cfg.input_width = 3;
    cfg.output_width = 2;
    Graph g = build_graph({0.0, 0.0}, 2, {NodeType::Normal}, {});
    MaskSet masks = plain_masks(g, cfg);
    Weights w = init_weights(cfg, 3);
    Tensor out = forward(cfg, w, random_input(1, 3, 4), masks);
    CHECK(out.rows() == 1);
    CHECK(out.cols() == 2);
    CHECK(out.all_finite());
}

TEST_CASE("forward output is finite for inputs in [-10, 10]") {
    ModelConfig cfg;
    cfg.embed_dim = 16;
    cfg.num_layers = 3;
    cfg.num_heads = 4;
    cfg.input_width = 6;
    cfg.output_width = 2;
    Graph g = random_graph(20, 0.2, 12);
    MaskSet masks = plain_masks(g, cfg);
    Weights w = init_weights(cfg, 13);
    Tensor out = forward(cfg, w, random_input(20, 6, 14, 10.0), masks);
    CHECK(out.all_finite());
}

TEST_CASE("forward is permutation equivariant") {
    ModelConfig cfg;
    cfg.embed_dim = 16;
    cfg.num_layers = 2;
    cfg.num_heads = 2;
    cfg.input_width = 5;
    cfg.output_width = 3;
    Weights w = init_weights(cfg, 21);

    for (std::uint64_t seed = 0; seed < 3; ++seed) {
        Graph g = random_graph(15, 0.25, seed + 70);
        const std::size_t n = g.num_nodes;
        Tensor x = random_input(n, 5, seed + 80);

        std::vector<std::uint32_t> perm(n);
        for (std::uint32_t i = 0; i < n; ++i) perm[i] = i;
        std::mt19937_64 rng(seed);
        std::shuffle(perm.begin(), perm.end(), rng);  // perm[old] = new index

        GraphParts parts = decompose(g);
        GraphParts moved;
        moved.coord_dim = parts.coord_dim;
        moved.coords.resize(parts.coords.size());
        moved.node_types.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            moved.node_types[perm[i]] = parts.node_types[i];
            for (std::size_t c = 0; c < 2; ++c) {
                moved.coords[perm[i] * 2 + c] = parts.coords[i * 2 + c];
            }
        }
        for (const auto& [a, b] : parts.edge_pairs) moved.edge_pairs.emplace_back(perm[a], perm[b]);
        Graph pg = build_graph(moved.coords, 2, moved.node_types, moved.edge_pairs);

        Tensor px = Tensor::matrix(n, 5);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t c = 0; c < 5; ++c) px.at(perm[i], c) = x.at(i, c);
        }

        Tensor out = forward(cfg, w, x, plain_masks(g, cfg));
        Tensor pout = forward(cfg, w, px, plain_masks(pg, cfg));
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t c = 0; c < 3; ++c) {
                CHECK(out.at(i, c) == doctest::Approx(pout.at(perm[i], c)).epsilon(1e-9));
            }
        }
    }
}

TEST_CASE("mask locality bounds the receptive field on a path graph") {
    ModelConfig cfg;
    cfg.embed_dim = 8;
    cfg.num_layers = 2;
    cfg.num_heads = 2;
    cfg.input_width = 4;
    cfg.output_width = 2;
    const std::size_t n = 12;
    Graph g = path_graph(n);
    MaskSet masks = plain_masks(g, cfg);
    Weights w = init_weights(cfg, 31);

    Tensor x = random_input(n, 4, 32);
    Tensor base = forward(cfg, w, x, masks);
    Tensor bumped = x;
    bumped.at(0, 1) += 2.0;  // perturb node 0
    Tensor out = forward(cfg, w, bumped, masks);

    // Two attention layers on the base mask: influence reaches distance 2.
    bool changed_near = false;
    for (std::size_t i = 0; i < n; ++i) {
        double diff = 0.0;
        for (std::size_t c = 0; c < 2; ++c) diff += std::abs(out.at(i, c) - base.at(i, c));
        if (i <= 2 && diff > 0.0) changed_near = true;
        if (i > 2) CHECK(diff == 0.0);
    }
    CHECK(changed_near);
}

TEST_CASE("dilated heads widen the receptive field") {
    ModelConfig cfg;
    cfg.embed_dim = 8;
    cfg.num_layers = 5;
    cfg.num_heads = 2;
    cfg.input_width = 4;
    cfg.output_width = 2;
    cfg.augment.dilation_plan = DilationPlan::Dilation2;
    const std::size_t n = 20;
    Graph g = path_graph(n);
    MaskSet masks = plain_masks(g, cfg);
    Weights w = init_weights(cfg, 41);

    Tensor x = random_input(n, 4, 42);
    Tensor base = forward(cfg, w, x, masks);
    Tensor bumped = x;
    bumped.at(0, 0) += 2.0;
    Tensor out = forward(cfg, w, bumped, masks);

    // 5 layers with A^2 heads: reach <= 5 * 2 = 10 hops; beyond that, nothing.
    for (std::size_t i = 11; i < n; ++i) {
        for (std::size_t c = 0; c < 2; ++c) CHECK(out.at(i, c) == base.at(i, c));
    }
    // The dilated plan must beat the plain 5-hop reach somewhere in (5, 10].
    double beyond = 0.0;
    for (std::size_t i = 6; i <= 10; ++i) {
        for (std::size_t c = 0; c < 2; ++c) beyond += std::abs(out.at(i, c) - base.at(i, c));
    }
    CHECK(beyond > 0.0);
}

TEST_CASE("full model gradient check") {
    ModelConfig cfg;
    cfg.embed_dim = 8;
    cfg.num_layers = 2;
    cfg.num_heads = 2;
    cfg.input_width = 5;
    cfg.output_width = 2;
    Graph g = random_graph(10, 0.3, 51);
    MaskSet masks = plain_masks(g, cfg);
    Weights w = init_weights(cfg, 52);
    Tensor x = random_input(10, 5, 53);
    Tensor target = random_input(10, 2, 54);

    std::vector<Tensor*> params = w.flat();
    GradFn f = [&](std::vector<Tensor>* grads) {
        Tape tape;
        WeightVars vars = register_weights(tape, w, true);
        Tape::Var loss = tape.mse(model_forward(tape, cfg, vars, tape.leaf(x), masks), target);
        const double value = tape.scalar_value(loss);
        if (grads) {
            tape.backward(loss);
            Weights gw = collect_grads(tape, vars, cfg);
            grads->clear();
            for (Tensor* t : gw.flat()) grads->push_back(*t);
        }
        return value;
    };
    GradCheckResult res = finite_diff_check(f, params, 1e-5, 250, 99);
    CHECK(res.coords_checked >= 200);
    CHECK(res.max_rel_err < 1e-4);
}

TEST_CASE("config validation") {
    ModelConfig bad;
    bad.embed_dim = 10;
    bad.num_heads = 4;
    CHECK_THROWS_WITH_AS(bad.validate(), doctest::Contains("InvalidConfig"), Error);
}
