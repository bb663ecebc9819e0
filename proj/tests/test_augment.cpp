#include <set>

#include "doctest.h"
#include "helpers.hpp"
#include "meshattn/augment.hpp"

using namespace meshattn;
using namespace meshattn::testing;

TEST_CASE("dilate path graph squared") {
    SparseMask m = adjacency_mask(path_graph(3));
    SparseMask d2 = dilate(m, 2);
    const std::set<std::pair<std::size_t, std::uint32_t>> expected = {
        {0, 0}, {0, 2}, {1, 1}, {2, 0}, {2, 2}};
    std::set<std::pair<std::size_t, std::uint32_t>> got;
    for (std::size_t i = 0; i < d2.num_rows; ++i) {
        for (const std::uint32_t* c = d2.row_begin(i); c != d2.row_end(i); ++c) {
            got.insert({i, *c});
        }
    }
    CHECK(got == expected);
}

TEST_CASE("dilate k=1 is the identity") {
    Graph g = random_graph(20, 0.2, 3);
    SparseMask m = adjacency_mask(g);
    CHECK(dilate(m, 1) == m);
}

TEST_CASE("dilate matches the dense boolean power oracle") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        Graph g = random_graph(12, 0.25, seed);
        SparseMask m = adjacency_mask(g);
        const auto dense = dense_from_mask(m);
        for (unsigned k = 2; k <= 3; ++k) {
            CHECK(equals_dense(dilate(m, k), dense_bool_power(dense, 12, k)));
        }
    }
}

TEST_CASE("khop_union matches the dense union oracle") {
    SUBCASE("K=1 is the identity") {
        SparseMask m = adjacency_mask(random_graph(16, 0.2, 9));
        CHECK(khop_union(m, 1) == m);
    }
    SUBCASE("path of 4, K=2") {
        SparseMask u = khop_union(adjacency_mask(path_graph(4)), 2);
        REQUIRE(u.row_nnz(0) == 3);
        CHECK(u.row_begin(0)[0] == 0);
        CHECK(u.row_begin(0)[1] == 1);
        CHECK(u.row_begin(0)[2] == 2);
    }
    SUBCASE("random graphs") {
        for (std::uint64_t seed = 0; seed < 20; ++seed) {
            Graph g = random_graph(14, 0.2, seed + 100);
            SparseMask m = adjacency_mask(g);
            const auto a = dense_from_mask(m);
            auto expect = a;
            auto power = a;
            for (unsigned k = 2; k <= 3; ++k) {
                power = dense_bool_multiply(power, a, 14);
                expect = dense_union(expect, power);
            }
            CHECK(equals_dense(khop_union(m, 3), expect));
            CHECK(khop_union(m, 2).nnz() >= m.nnz());
        }
    }
}

TEST_CASE("add_random_edges adds the exact symmetric count") {
    SparseMask empty;
    empty.num_rows = 10;
    empty.num_cols = 10;
    empty.row_offsets.assign(11, 0);

    CHECK(add_random_edges(empty, 0, 1) == empty);
    SparseMask two = add_random_edges(empty, 2, 1);
    CHECK(two.nnz() == 4);

    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        Graph g = random_graph(20, 0.15, seed);
        SparseMask m = adjacency_mask(g);
        const std::size_t add = 5;
        SparseMask out = add_random_edges(m, add, seed);
        CHECK(out.nnz() == m.nnz() + 2 * add);
        const auto dense = dense_from_mask(out);
        for (std::size_t i = 0; i < 20; ++i) {
            CHECK(dense[i * 20 + i] == 0);
            for (std::size_t j = 0; j < 20; ++j) CHECK(dense[i * 20 + j] == dense[j * 20 + i]);
        }
        CHECK(add_random_edges(m, add, seed) == out);
        CHECK_FALSE(add_random_edges(m, add, seed + 1000) == out);
    }
}

TEST_CASE("add_random_edges near-saturation uses every free pair") {
    SparseMask m = adjacency_mask(path_graph(5));
    // 10 undirected pairs total, 4 used by the path.
    SparseMask full = add_random_edges(m, 6, 0);
    CHECK(full.nnz() == 20);
    CHECK_THROWS_WITH_AS(add_random_edges(m, 7, 0), doctest::Contains("TooManyRequested"),
                         Error);
}

TEST_CASE("random_edge_count is a fraction of the undirected edge count") {
    SparseMask m = adjacency_mask(path_graph(11));  // 10 undirected edges
    CHECK(random_edge_count(m, 0.2) == 2);
    CHECK(random_edge_count(m, 0.0) == 0);
}

TEST_CASE("global nodes connect to everything") {
    Graph g = random_graph(5, 0.0, 1);
    SparseMask m = adjacency_mask(g);
    SparseMask out = add_global_nodes(m, {2});
    CHECK(out.row_nnz(2) == 4);
    for (std::size_t i = 0; i < 5; ++i) {
        if (i != 2) CHECK(out.contains(i, 2));
    }

    SUBCASE("empty selection is a no-op") { CHECK(add_global_nodes(m, {}) == m); }

    SUBCASE("dense set-union oracle on larger graphs") {
        for (std::uint64_t seed = 0; seed < 10; ++seed) {
            Graph big = random_graph(20, 0.2, seed + 40);
            SparseMask base = adjacency_mask(big);
            std::vector<std::uint32_t> globals = {3, 11};
            SparseMask aug = add_global_nodes(base, globals);
            auto dense = dense_from_mask(base);
            for (std::uint32_t v : globals) {
                for (std::size_t j = 0; j < 20; ++j) {
                    if (j != v) {
                        dense[v * 20 + j] = 1;
                        dense[j * 20 + v] = 1;
                    }
                }
            }
            CHECK(equals_dense(aug, dense));
        }
    }
}

TEST_CASE("sample_global_nodes respects type filter and fraction") {
    Graph g = random_graph(100, 0.05, 5);
    AugmentSpec spec;
    spec.global_fraction = 0.0;
    CHECK(sample_global_nodes(g, spec, 1).empty());

    spec.global_fraction = 0.1;
    spec.global_types = {NodeType::Wall};
    std::size_t walls = 0;
    for (NodeType t : g.node_type) walls += t == NodeType::Wall ? 1 : 0;
    const auto picked = sample_global_nodes(g, spec, 1);
    CHECK(picked.size() == static_cast<std::size_t>(std::llround(0.1 * double(walls))));
    for (std::uint32_t v : picked) CHECK(g.node_type[v] == NodeType::Wall);
    CHECK(sample_global_nodes(g, spec, 1) == picked);
}

TEST_CASE("head_mask_plan layouts") {
    SUBCASE("plan None maps every slot to base") {
        HeadMaskPlan plan = head_mask_plan(6, 4, DilationPlan::None);
        for (MaskSlot s : plan.slots) CHECK(s == MaskSlot::Base);
    }
    SUBCASE("Dilation2 at L=15, H=4: layers 11-15, upper two heads") {
        HeadMaskPlan plan = head_mask_plan(15, 4, DilationPlan::Dilation2);
        for (std::size_t l = 0; l < 15; ++l) {
            for (std::size_t h = 0; h < 4; ++h) {
                const bool dilated = l >= 10 && h >= 2;
                CHECK(plan.slot(l, h) == (dilated ? MaskSlot::Dilate2 : MaskSlot::Base));
            }
        }
    }
    SUBCASE("Dilation2_3 at L=15, H=4: middle third A^2, last five A^3") {
        HeadMaskPlan plan = head_mask_plan(15, 4, DilationPlan::Dilation2_3);
        for (std::size_t l = 0; l < 15; ++l) {
            for (std::size_t h = 0; h < 4; ++h) {
                MaskSlot expect = MaskSlot::Base;
                if (h >= 2 && l >= 5 && l < 10) expect = MaskSlot::Dilate2;
                if (h >= 2 && l >= 10) expect = MaskSlot::Dilate3;
                CHECK(plan.slot(l, h) == expect);
            }
        }
    }
    SUBCASE("half-head count rounds up") {
        HeadMaskPlan plan = head_mask_plan(5, 3, DilationPlan::Dilation3);
        std::size_t dilated = 0;
        for (std::size_t h = 0; h < 3; ++h) {
            dilated += plan.slot(4, h) == MaskSlot::Dilate3 ? 1 : 0;
        }
        CHECK(dilated == 2);
    }
    SUBCASE("too few layers or heads") {
        CHECK_THROWS_WITH_AS(head_mask_plan(4, 4, DilationPlan::Dilation2),
                             doctest::Contains("PlanRequiresMoreLayers"), Error);
        CHECK_THROWS_AS(head_mask_plan(15, 1, DilationPlan::Dilation2), Error);
    }
}

TEST_CASE("build_mask_set augments base but dilates raw adjacency") {
    Graph g = random_graph(30, 0.1, 11);
    AugmentSpec spec;
    spec.dilation_plan = DilationPlan::Dilation2;
    spec.random_edge_fraction = 0.2;
    spec.global_fraction = 0.05;
    MaskSet set = build_mask_set(g, spec, 15, 4, false, 1, 2);
    const SparseMask adj = adjacency_mask(g);
    CHECK(set.registry[static_cast<std::size_t>(MaskSlot::Dilate2)] == dilate(adj, 2));
    CHECK(set.registry[static_cast<std::size_t>(MaskSlot::Base)].nnz() >= adj.nnz());
    CHECK(&set.mask_for(14, 3) == &set.registry[static_cast<std::size_t>(MaskSlot::Dilate2)]);
    CHECK(&set.mask_for(0, 0) == &set.registry[static_cast<std::size_t>(MaskSlot::Base)]);
}

TEST_CASE("augmentation outputs keep sorted rows and symmetry") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        Graph g = random_graph(25, 0.15, seed + 60);
        SparseMask m = adjacency_mask(g);
        for (const SparseMask& out :
             {dilate(m, 2), khop_union(m, 3), add_random_edges(m, 4, seed),
              add_global_nodes(m, {1, 7})}) {
            for (std::size_t i = 0; i < out.num_rows; ++i) {
                for (const std::uint32_t* c = out.row_begin(i); c + 1 < out.row_end(i); ++c) {
                    CHECK(c[0] < c[1]);
                }
                for (const std::uint32_t* c = out.row_begin(i); c != out.row_end(i); ++c) {
                    CHECK(out.contains(*c, static_cast<std::uint32_t>(i)));
                }
            }
        }
    }
}
