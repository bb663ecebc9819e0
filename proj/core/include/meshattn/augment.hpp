#pragma once

#include <cstdint>
#include <vector>

#include "meshattn/graph.hpp"

namespace meshattn {

enum class DilationPlan {
    None,
    Dilation2,    // A^2 on half of the heads in the last 5 layers
    Dilation3,    // A^3 on half of the heads in the last 5 layers
    Dilation2_3,  // A^2 on half of the middle-third layers, A^3 on the last 5
};

/// Augmentation knobs for the attention mask. Random edges are regenerated
/// from a fresh seed every step when reseed_per_step is set; global nodes are
/// sampled once per model instantiation so rollouts stay deterministic.
struct AugmentSpec {
    DilationPlan dilation_plan = DilationPlan::None;
    double random_edge_fraction = 0.0;  // lambda, as a ratio of the undirected edge count
    double global_fraction = 0.0;       // sample fraction among matching nodes
    std::vector<NodeType> global_types;  // empty = any node type
    bool reseed_per_step = true;
    bool dilation_union_base = false;  // use A^k (default) or A^k union A on dilated heads

    bool any_augmentation() const {
        return dilation_plan != DilationPlan::None || random_edge_fraction > 0.0 ||
               global_fraction > 0.0;
    }
};

enum class MaskSlot : std::uint8_t { Base = 0, Dilate2 = 1, Dilate3 = 2 };

/// Maps every (layer, head) pair to one entry of a small mask registry.
struct HeadMaskPlan {
    std::size_t num_layers = 0;
    std::size_t num_heads = 0;
    std::vector<MaskSlot> slots;  // num_layers x num_heads, layer-major

    MaskSlot slot(std::size_t layer, std::size_t head) const {
        return slots[layer * num_heads + head];
    }
};

/// Boolean k-th power of a square mask: entry (i,j) iff a walk of length
/// exactly k exists from i to j.
SparseMask dilate(const SparseMask& m, unsigned k);

/// Boolean union of dilate(m, 1..K).
SparseMask khop_union(const SparseMask& m, unsigned k_hops);

/// Adds exactly `count` new symmetric pairs among node pairs (i != j) not
/// already present. Deterministic for a fixed seed.
SparseMask add_random_edges(const SparseMask& m, std::size_t count, std::uint64_t seed);

/// Requested symmetric-pair count for a fractional spec, measured against the
/// current undirected off-diagonal edge count.
std::size_t random_edge_count(const SparseMask& m, double fraction);

/// Connects every listed node symmetrically to all other nodes.
SparseMask add_global_nodes(const SparseMask& m, const std::vector<std::uint32_t>& nodes);

/// Samples global nodes per the spec's type predicate and fraction.
std::vector<std::uint32_t> sample_global_nodes(const Graph& g, const AugmentSpec& spec,
                                               std::uint64_t seed);

SparseMask add_global(const SparseMask& m, const Graph& g, const AugmentSpec& spec,
                      std::uint64_t seed);

HeadMaskPlan head_mask_plan(std::size_t num_layers, std::size_t num_heads, DilationPlan plan);

/// The three-slot mask registry plus its head plan, ready for a forward pass.
struct MaskSet {
    std::vector<SparseMask> registry;  // indexed by MaskSlot
    HeadMaskPlan plan;

    const SparseMask& mask_for(std::size_t layer, std::size_t head) const {
        return registry[static_cast<std::size_t>(plan.slot(layer, head))];
    }
};

/// Builds base + dilated + augmented masks for one forward/training step.
/// Dilations are taken from the raw adjacency; random edges and global nodes
/// augment the base slot.
MaskSet build_mask_set(const Graph& g, const AugmentSpec& spec, std::size_t num_layers,
                       std::size_t num_heads, bool self_loops,
                       std::uint64_t random_edge_seed, std::uint64_t global_seed);

}  // namespace meshattn
