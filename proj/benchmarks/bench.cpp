#include <random>

#include <benchmark/benchmark.h>

#include "meshattn/augment.hpp"
#include "meshattn/model.hpp"

using namespace meshattn;

namespace {

Graph knn_like_graph(std::size_t n, std::size_t degree, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<double> coords(n * 2);
    for (double& c : coords) c = unit(rng);
    std::vector<NodeType> types(n, NodeType::Normal);
    std::uniform_int_distribution<std::uint32_t> pick(0, static_cast<std::uint32_t>(n - 1));
    std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
    for (std::uint32_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < degree; ++k) {
            std::uint32_t j = pick(rng);
            if (j != i) edges.emplace_back(i, j);
        }
    }
    return build_graph(coords, 2, types, edges);
}

Tensor random_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed) {
    Tensor t = Tensor::matrix(rows, cols);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> dist(0.0, 1.0);
    for (double& v : t.data) v = dist(rng);
    return t;
}

void BM_masked_attention(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const std::size_t dh = 32;
    Graph g = knn_like_graph(n, 8, 1);
    SparseMask mask = adjacency_mask(g);
    Tensor q = random_matrix(n, dh, 2);
    Tensor k = random_matrix(n, dh, 3);
    Tensor v = random_matrix(n, dh, 4);
    for (auto _ : state) {
        Tape tape;
        Tape::Var out = tape.masked_attention(tape.leaf(q), tape.leaf(k), tape.leaf(v), mask,
                                              AttentionMode::NeighborhoodSoftmax);
        benchmark::DoNotOptimize(tape.value(out).data.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(mask.nnz()));
}
BENCHMARK(BM_masked_attention)->Arg(500)->Arg(2000)->Arg(8000);

void BM_dilate(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    SparseMask mask = adjacency_mask(knn_like_graph(n, 8, 5));
    for (auto _ : state) {
        SparseMask d = dilate(mask, 2);
        benchmark::DoNotOptimize(d.col_indices.data());
    }
}
BENCHMARK(BM_dilate)->Arg(500)->Arg(2000)->Arg(8000);

void BM_model_forward(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    ModelConfig cfg;
    cfg.embed_dim = 64;
    cfg.num_layers = 4;
    cfg.num_heads = 2;
    cfg.input_width = 9;
    cfg.output_width = 2;
    Graph g = knn_like_graph(n, 8, 7);
    MaskSet masks =
        build_mask_set(g, cfg.augment, cfg.num_layers, cfg.num_heads, cfg.self_loops, 0, 0);
    Weights w = init_weights(cfg, 8);
    Tensor x = random_matrix(n, cfg.input_width, 9);
    for (auto _ : state) {
        Tensor out = forward(cfg, w, x, masks);
        benchmark::DoNotOptimize(out.data.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}
BENCHMARK(BM_model_forward)->Arg(200)->Arg(1000);

}  // namespace

BENCHMARK_MAIN();
