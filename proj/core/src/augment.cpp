#include "meshattn/augment.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

namespace meshattn {

namespace {

void require_square(const SparseMask& m) {
    if (m.num_rows != m.num_cols) raise(ErrorCode::NonSquare, "mask must be square");
}

// Boolean product a*b over matching inner dimension.
SparseMask bool_multiply(const SparseMask& a, const SparseMask& b) {
    SparseMask out;
    out.num_rows = a.num_rows;
    out.num_cols = b.num_cols;
    out.row_offsets.assign(a.num_rows + 1, 0);

    std::vector<std::uint8_t> seen(b.num_cols, 0);
    std::vector<std::uint32_t> row_cols;
    for (std::size_t i = 0; i < a.num_rows; ++i) {
        row_cols.clear();
        for (const std::uint32_t* mid = a.row_begin(i); mid != a.row_end(i); ++mid) {
            for (const std::uint32_t* j = b.row_begin(*mid); j != b.row_end(*mid); ++j) {
                if (!seen[*j]) {
                    seen[*j] = 1;
                    row_cols.push_back(*j);
                }
            }
        }
        std::sort(row_cols.begin(), row_cols.end());
        out.col_indices.insert(out.col_indices.end(), row_cols.begin(), row_cols.end());
        out.row_offsets[i + 1] = out.col_indices.size();
        for (std::uint32_t c : row_cols) seen[c] = 0;
    }
    return out;
}

SparseMask bool_union(const SparseMask& a, const SparseMask& b) {
    SparseMask out;
    out.num_rows = a.num_rows;
    out.num_cols = a.num_cols;
    out.row_offsets.assign(a.num_rows + 1, 0);
    std::vector<std::uint32_t> row;
    for (std::size_t i = 0; i < a.num_rows; ++i) {
        row.clear();
        std::set_union(a.row_begin(i), a.row_end(i), b.row_begin(i), b.row_end(i),
                       std::back_inserter(row));
        out.col_indices.insert(out.col_indices.end(), row.begin(), row.end());
        out.row_offsets[i + 1] = out.col_indices.size();
    }
    return out;
}

}  // namespace

SparseMask dilate(const SparseMask& m, unsigned k) {
    require_square(m);
    if (k == 0) raise(ErrorCode::NonPositiveInput, "dilation power must be >= 1");
    SparseMask out = m;
    for (unsigned step = 1; step < k; ++step) out = bool_multiply(out, m);
    return out;
}

SparseMask khop_union(const SparseMask& m, unsigned k_hops) {
    require_square(m);
    if (k_hops == 0) raise(ErrorCode::NonPositiveInput, "hop count must be >= 1");
    SparseMask acc = m;
    SparseMask power = m;
    for (unsigned step = 2; step <= k_hops; ++step) {
        power = bool_multiply(power, m);
        acc = bool_union(acc, power);
    }
    return acc;
}

std::size_t random_edge_count(const SparseMask& m, double fraction) {
    std::size_t off_diag = 0;
    for (std::size_t i = 0; i < m.num_rows; ++i) {
        for (const std::uint32_t* c = m.row_begin(i); c != m.row_end(i); ++c) {
            if (*c != i) ++off_diag;
        }
    }
    return static_cast<std::size_t>(std::llround(fraction * static_cast<double>(off_diag / 2)));
}

SparseMask add_random_edges(const SparseMask& m, std::size_t count, std::uint64_t seed) {
    require_square(m);
    const std::size_t n = m.num_rows;
    if (count == 0) return m;

    std::size_t existing = 0;  // undirected off-diagonal pairs already present
    for (std::size_t i = 0; i < n; ++i) {
        for (const std::uint32_t* c = m.row_begin(i); c != m.row_end(i); ++c) {
            if (*c > i) ++existing;
        }
    }
    const std::size_t total_pairs = n * (n - 1) / 2;
    const std::size_t available = total_pairs - existing;
    if (count > available) {
        raise(ErrorCode::TooManyRequested,
              "requested " + std::to_string(count) + " random pairs, only " +
                  std::to_string(available) + " non-edges exist");
    }

    std::mt19937_64 rng(seed);
    std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;
    pairs.reserve(m.nnz() + 2 * count);
    for (std::size_t i = 0; i < n; ++i) {
        for (const std::uint32_t* c = m.row_begin(i); c != m.row_end(i); ++c) {
            pairs.emplace_back(static_cast<std::uint32_t>(i), *c);
        }
    }

    if (count * 4 >= available) {
        // Dense regime: enumerate the complement and sample from it.
        std::vector<std::pair<std::uint32_t, std::uint32_t>> free_pairs;
        free_pairs.reserve(available);
        for (std::uint32_t i = 0; i < n; ++i) {
            for (std::uint32_t j = i + 1; j < n; ++j) {
                if (!m.contains(i, j)) free_pairs.emplace_back(i, j);
            }
        }
        std::shuffle(free_pairs.begin(), free_pairs.end(), rng);
        for (std::size_t k = 0; k < count; ++k) {
            pairs.emplace_back(free_pairs[k].first, free_pairs[k].second);
            pairs.emplace_back(free_pairs[k].second, free_pairs[k].first);
        }
    } else {
        std::uniform_int_distribution<std::uint32_t> pick(0, static_cast<std::uint32_t>(n - 1));
        std::set<std::pair<std::uint32_t, std::uint32_t>> added;
        while (added.size() < count) {
            std::uint32_t a = pick(rng);
            std::uint32_t b = pick(rng);
            if (a == b) continue;
            if (a > b) std::swap(a, b);
            if (m.contains(a, b)) continue;
            added.emplace(a, b);
        }
        for (const auto& [a, b] : added) {
            pairs.emplace_back(a, b);
            pairs.emplace_back(b, a);
        }
    }
    return mask_from_pairs(n, n, std::move(pairs));
}

std::vector<std::uint32_t> sample_global_nodes(const Graph& g, const AugmentSpec& spec,
                                               std::uint64_t seed) {
    std::vector<std::uint32_t> candidates;
    for (std::uint32_t i = 0; i < g.num_nodes; ++i) {
        if (spec.global_types.empty() ||
            std::find(spec.global_types.begin(), spec.global_types.end(), g.node_type[i]) !=
                spec.global_types.end()) {
            candidates.push_back(i);
        }
    }
    const std::size_t count = static_cast<std::size_t>(
        std::llround(spec.global_fraction * static_cast<double>(candidates.size())));
    if (count >= candidates.size()) return candidates;
    std::mt19937_64 rng(seed);
    std::shuffle(candidates.begin(), candidates.end(), rng);
    candidates.resize(count);
    std::sort(candidates.begin(), candidates.end());
    return candidates;
}

SparseMask add_global_nodes(const SparseMask& m, const std::vector<std::uint32_t>& nodes) {
    require_square(m);
    if (nodes.empty()) return m;
    std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;
    pairs.reserve(m.nnz() + 2 * nodes.size() * m.num_rows);
    for (std::size_t i = 0; i < m.num_rows; ++i) {
        for (const std::uint32_t* c = m.row_begin(i); c != m.row_end(i); ++c) {
            pairs.emplace_back(static_cast<std::uint32_t>(i), *c);
        }
    }
    for (std::uint32_t gnode : nodes) {
        for (std::uint32_t j = 0; j < m.num_rows; ++j) {
            if (j == gnode) continue;
            pairs.emplace_back(gnode, j);
            pairs.emplace_back(j, gnode);
        }
    }
    return mask_from_pairs(m.num_rows, m.num_cols, std::move(pairs));
}

SparseMask add_global(const SparseMask& m, const Graph& g, const AugmentSpec& spec,
                      std::uint64_t seed) {
    return add_global_nodes(m, sample_global_nodes(g, spec, seed));
}

HeadMaskPlan head_mask_plan(std::size_t num_layers, std::size_t num_heads, DilationPlan plan) {
    HeadMaskPlan out;
    out.num_layers = num_layers;
    out.num_heads = num_heads;
    out.slots.assign(num_layers * num_heads, MaskSlot::Base);
    if (plan == DilationPlan::None) return out;

    if (num_layers < 5) {
        raise(ErrorCode::PlanRequiresMoreLayers, "dilation plans need at least 5 layers");
    }
    if (num_heads < 2) {
        raise(ErrorCode::PlanRequiresMoreLayers, "dilation plans need at least 2 heads");
    }

    const std::size_t half = (num_heads + 1) / 2;  // upper-index half of the heads
    auto set_tail = [&](std::size_t first_layer, std::size_t last_layer, MaskSlot slot) {
        for (std::size_t l = first_layer; l <= last_layer; ++l) {
            for (std::size_t h = num_heads - half; h < num_heads; ++h) {
                out.slots[l * num_heads + h] = slot;
            }
        }
    };

    switch (plan) {
        case DilationPlan::Dilation2:
            set_tail(num_layers - 5, num_layers - 1, MaskSlot::Dilate2);
            break;
        case DilationPlan::Dilation3:
            set_tail(num_layers - 5, num_layers - 1, MaskSlot::Dilate3);
            break;
        case DilationPlan::Dilation2_3: {
            // Middle third gets A^2 (layers 6-10 when L=15), the last 5 get A^3.
            const std::size_t mid_first = num_layers / 3;          // 0-based
            const std::size_t mid_last = (2 * num_layers) / 3 - 1;  // inclusive
            set_tail(mid_first, mid_last, MaskSlot::Dilate2);
            set_tail(num_layers - 5, num_layers - 1, MaskSlot::Dilate3);
            break;
        }
        case DilationPlan::None:
            break;
    }
    return out;
}

MaskSet build_mask_set(const Graph& g, const AugmentSpec& spec, std::size_t num_layers,
                       std::size_t num_heads, bool self_loops,
                       std::uint64_t random_edge_seed, std::uint64_t global_seed) {
    const SparseMask adjacency = adjacency_mask(g, self_loops);

    SparseMask augmented = adjacency;
    if (spec.random_edge_fraction > 0.0) {
        augmented = add_random_edges(augmented, random_edge_count(augmented, spec.random_edge_fraction),
                                     random_edge_seed);
    }
    if (spec.global_fraction > 0.0) {
        augmented = add_global(augmented, g, spec, global_seed);
    }

    MaskSet set;
    set.registry.resize(3);
    set.registry[static_cast<std::size_t>(MaskSlot::Base)] = std::move(augmented);
    const bool needs_d2 = spec.dilation_plan == DilationPlan::Dilation2 ||
                          spec.dilation_plan == DilationPlan::Dilation2_3;
    const bool needs_d3 = spec.dilation_plan == DilationPlan::Dilation3 ||
                          spec.dilation_plan == DilationPlan::Dilation2_3;
    if (needs_d2) {
        SparseMask d2 = dilate(adjacency, 2);
        if (spec.dilation_union_base) d2 = khop_union(adjacency, 2);
        set.registry[static_cast<std::size_t>(MaskSlot::Dilate2)] = std::move(d2);
    }
    if (needs_d3) {
        SparseMask d3 = dilate(adjacency, 3);
        if (spec.dilation_union_base) d3 = khop_union(adjacency, 3);
        set.registry[static_cast<std::size_t>(MaskSlot::Dilate3)] = std::move(d3);
    }
    set.plan = head_mask_plan(num_layers, num_heads, spec.dilation_plan);
    return set;
}

}  // namespace meshattn
