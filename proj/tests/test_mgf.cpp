#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include "doctest.h"
#include "helpers.hpp"
#include "meshattn/config.hpp"
#include "meshattn/mgf.hpp"

using namespace meshattn;
using namespace meshattn::testing;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("mgf_test_" + std::to_string(std::random_device{}()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

Trajectory sample_trajectory(std::uint64_t seed) {
    Trajectory traj;
    traj.graph = random_graph(12, 0.3, seed);
    traj.num_frames = 4;
    traj.num_fields = 2;
    traj.fields.resize(4 * 12 * 2);
    std::mt19937_64 rng(seed + 9);
    std::uniform_real_distribution<double> dist(-2.0, 2.0);
    // Values representable exactly in f32 so the round trip is bitwise.
    for (double& v : traj.fields) v = static_cast<float>(dist(rng));
    for (double& c : traj.graph.coords) c = static_cast<float>(c);
    traj.dt = 0.25;
    traj.field_names = {"u", "v"};
    traj.dynamic_mask = {true, false};
    traj.history_depth = 0;
    return traj;
}

}  // namespace

TEST_CASE("mgf round trip is bitwise exact") {
    TempDir tmp;
    Trajectory traj = sample_trajectory(1);
    save_mgf(traj, tmp.path / "t0");
    Trajectory loaded = load_mgf(tmp.path / "t0");
    CHECK(loaded.graph.num_nodes == traj.graph.num_nodes);
    CHECK(loaded.graph.coords == traj.graph.coords);
    CHECK(loaded.graph.edges == traj.graph.edges);
    CHECK(loaded.graph.node_type == traj.graph.node_type);
    CHECK(loaded.fields == traj.fields);
    CHECK(loaded.dt == traj.dt);
    CHECK(loaded.field_names == traj.field_names);
    CHECK(loaded.dynamic_mask == traj.dynamic_mask);
    CHECK(loaded.history_depth == traj.history_depth);

    // Saving the loaded copy reproduces identical blobs.
    save_mgf(loaded, tmp.path / "t1");
    for (const char* blob : {"coords.f32", "edges.u32", "node_type.u32", "fields.f32"}) {
        std::ifstream a(tmp.path / "t0" / blob, std::ios::binary);
        std::ifstream b(tmp.path / "t1" / blob, std::ios::binary);
        std::string sa((std::istreambuf_iterator<char>(a)), std::istreambuf_iterator<char>());
        std::string sb((std::istreambuf_iterator<char>(b)), std::istreambuf_iterator<char>());
        CHECK(sa == sb);
        CHECK_FALSE(sa.empty());
    }
}

TEST_CASE("truncated blob raises LengthMismatch") {
    TempDir tmp;
    save_mgf(sample_trajectory(2), tmp.path / "t");
    const fs::path blob = tmp.path / "t" / "fields.f32";
    fs::resize_file(blob, fs::file_size(blob) - 4);
    CHECK_THROWS_WITH_AS(load_mgf(tmp.path / "t"), doctest::Contains("LengthMismatch"), Error);
}

TEST_CASE("future format version raises UnsupportedVersion") {
    TempDir tmp;
    save_mgf(sample_trajectory(3), tmp.path / "t");
    Json meta;
    {
        std::ifstream in(tmp.path / "t" / "meta.json");
        in >> meta;
    }
    meta["version"] = kMgfFormatVersion + 1;
    {
        std::ofstream out(tmp.path / "t" / "meta.json");
        out << meta.dump();
    }
    CHECK_THROWS_WITH_AS(load_mgf(tmp.path / "t"), doctest::Contains("UnsupportedVersion"),
                         Error);
}

TEST_CASE("corrupt metadata raises CorruptMeta") {
    TempDir tmp;
    save_mgf(sample_trajectory(4), tmp.path / "t");
    SUBCASE("unparseable json") {
        std::ofstream out(tmp.path / "t" / "meta.json");
        out << "{not json";
        out.close();
        CHECK_THROWS_WITH_AS(load_mgf(tmp.path / "t"), doctest::Contains("CorruptMeta"), Error);
    }
    SUBCASE("missing key") {
        Json meta;
        {
            std::ifstream in(tmp.path / "t" / "meta.json");
            in >> meta;
        }
        meta.erase("num_nodes");
        {
            std::ofstream out(tmp.path / "t" / "meta.json");
            out << meta.dump();
        }
        CHECK_THROWS_WITH_AS(load_mgf(tmp.path / "t"), doctest::Contains("CorruptMeta"), Error);
    }
    SUBCASE("blob length disagrees with header") {
        Json meta;
        {
            std::ifstream in(tmp.path / "t" / "meta.json");
            in >> meta;
        }
        meta["blobs"]["fields.f32"] = 7;
        {
            std::ofstream out(tmp.path / "t" / "meta.json");
            out << meta.dump();
        }
        CHECK_THROWS_WITH_AS(load_mgf(tmp.path / "t"), doctest::Contains("CorruptMeta"), Error);
    }
}

TEST_CASE("dataset save and load preserve order") {
    TempDir tmp;
    std::vector<Trajectory> trajs = {sample_trajectory(5), sample_trajectory(6),
                                     sample_trajectory(7)};
    save_dataset(trajs, tmp.path / "ds");
    std::vector<Trajectory> loaded = load_dataset(tmp.path / "ds");
    REQUIRE(loaded.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(loaded[i].fields == trajs[i].fields);
        CHECK(loaded[i].graph.coords == trajs[i].graph.coords);
    }
}

TEST_CASE("checkpoint round trip") {
    TempDir tmp;
    ModelConfig cfg;
    cfg.embed_dim = 8;
    cfg.num_layers = 2;
    cfg.num_heads = 2;
    cfg.input_width = 6;
    cfg.output_width = 2;
    Checkpoint ckpt;
    ckpt.config = cfg;
    ckpt.weights = init_weights(cfg, 11);
    // f32 storage: snap values so the round trip compares exactly.
    ckpt.weights.for_each([](const std::string&, Tensor& t) {
        for (double& v : t.data) v = static_cast<float>(v);
    });
    ckpt.target_kind = TargetKind::Absolute;
    save_checkpoint(ckpt, tmp.path / "ck");
    Checkpoint loaded = load_checkpoint(tmp.path / "ck");
    CHECK(loaded.config.embed_dim == 8);
    CHECK(loaded.target_kind == TargetKind::Absolute);
    std::vector<Tensor*> fa = ckpt.weights.flat();
    std::vector<Tensor*> fb = loaded.weights.flat();
    REQUIRE(fa.size() == fb.size());
    for (std::size_t i = 0; i < fa.size(); ++i) CHECK(fa[i]->data == fb[i]->data);
}
