#include "meshattn/mgf.hpp"

#include <algorithm>
#include <cstdint>
#include <fstream>

#include "json.hpp"
#include "meshattn/config.hpp"

namespace meshattn {

namespace fs = std::filesystem;

namespace {

// Blobs are raw little-endian scalars; the supported targets are all
// little-endian so no byte swapping happens here.

template <typename T>
void write_blob(const fs::path& path, const std::vector<T>& data) {
    std::ofstream out(path, std::ios::binary);
    if (!out) raise(ErrorCode::IoFailure, "cannot write " + path.string());
    out.write(reinterpret_cast<const char*>(data.data()),
              static_cast<std::streamsize>(data.size() * sizeof(T)));
    if (!out) raise(ErrorCode::IoFailure, "short write to " + path.string());
}

template <typename T>
std::vector<T> read_blob(const fs::path& path, std::size_t expected_count) {
    std::ifstream in(path, std::ios::binary | std::ios::ate);
    if (!in) raise(ErrorCode::IoFailure, "cannot read " + path.string());
    const std::size_t bytes = static_cast<std::size_t>(in.tellg());
    if (bytes != expected_count * sizeof(T)) {
        raise(ErrorCode::LengthMismatch,
              path.string() + ": expected " + std::to_string(expected_count * sizeof(T)) +
                  " bytes, found " + std::to_string(bytes));
    }
    std::vector<T> data(expected_count);
    in.seekg(0);
    in.read(reinterpret_cast<char*>(data.data()), static_cast<std::streamsize>(bytes));
    if (!in) raise(ErrorCode::IoFailure, "short read from " + path.string());
    return data;
}

Json load_meta(const fs::path& dir) {
    std::ifstream in(dir / "meta.json");
    if (!in) raise(ErrorCode::IoFailure, "missing meta.json in " + dir.string());
    Json meta;
    try {
        in >> meta;
    } catch (const nlohmann::json::exception& e) {
        raise(ErrorCode::CorruptMeta, dir.string() + ": " + e.what());
    }
    if (!meta.is_object()) raise(ErrorCode::CorruptMeta, dir.string() + ": meta not an object");
    return meta;
}

void check_version(const Json& meta, const fs::path& dir) {
    if (!meta.contains("version") || !meta.at("version").is_number_integer()) {
        raise(ErrorCode::CorruptMeta, dir.string() + ": missing format version");
    }
    const int version = meta.at("version").get<int>();
    if (version > kMgfFormatVersion) {
        raise(ErrorCode::UnsupportedVersion,
              dir.string() + ": format version " + std::to_string(version));
    }
}

template <typename T>
T require(const Json& meta, const char* key, const fs::path& dir) {
    if (!meta.contains(key)) {
        raise(ErrorCode::CorruptMeta, dir.string() + ": missing key '" + key + "'");
    }
    try {
        return meta.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
        raise(ErrorCode::CorruptMeta, dir.string() + ": bad key '" + key + "': " + e.what());
    }
}

}  // namespace

void save_mgf(const Trajectory& traj, const fs::path& dir) {
    traj.validate();
    fs::create_directories(dir);
    const Graph& g = traj.graph;

    std::vector<float> coords(g.coords.begin(), g.coords.end());
    std::vector<std::uint32_t> edges;
    edges.reserve(g.edges.size() * 2);
    for (const auto& [a, b] : g.edges) {
        edges.push_back(a);
        edges.push_back(b);
    }
    std::vector<std::uint32_t> types;
    types.reserve(g.num_nodes);
    for (NodeType t : g.node_type) types.push_back(static_cast<std::uint32_t>(t));
    std::vector<float> fields(traj.fields.begin(), traj.fields.end());

    write_blob(dir / "coords.f32", coords);
    write_blob(dir / "edges.u32", edges);
    write_blob(dir / "node_type.u32", types);
    write_blob(dir / "fields.f32", fields);

    Json meta{{"version", kMgfFormatVersion},
              {"num_nodes", g.num_nodes},
              {"coord_dim", g.coord_dim},
              {"num_edges", g.edges.size()},
              {"num_frames", traj.num_frames},
              {"num_fields", traj.num_fields},
              {"dt", traj.dt},
              {"field_names", traj.field_names},
              {"dynamic_mask", std::vector<int>(traj.dynamic_mask.begin(),
                                                traj.dynamic_mask.end())},
              {"history_depth", traj.history_depth},
              {"blobs",
               Json{{"coords.f32", coords.size() * sizeof(float)},
                    {"edges.u32", edges.size() * sizeof(std::uint32_t)},
                    {"node_type.u32", types.size() * sizeof(std::uint32_t)},
                    {"fields.f32", fields.size() * sizeof(float)}}}};
    std::ofstream out(dir / "meta.json");
    if (!out) raise(ErrorCode::IoFailure, "cannot write meta.json in " + dir.string());
    out << meta.dump(2) << "\n";
}

Trajectory load_mgf(const fs::path& dir) {
    const Json meta = load_meta(dir);
    check_version(meta, dir);

    const std::size_t num_nodes = require<std::size_t>(meta, "num_nodes", dir);
    const std::size_t coord_dim = require<std::size_t>(meta, "coord_dim", dir);
    const std::size_t num_edges = require<std::size_t>(meta, "num_edges", dir);
    const std::size_t num_frames = require<std::size_t>(meta, "num_frames", dir);
    const std::size_t num_fields = require<std::size_t>(meta, "num_fields", dir);

    // Declared blob lengths must agree with both the header counts and the
    // on-disk sizes; read_blob enforces the latter.
    const Json blobs = require<Json>(meta, "blobs", dir);
    auto declared = [&blobs, &dir](const char* name) -> std::size_t {
        if (!blobs.contains(name)) {
            raise(ErrorCode::CorruptMeta, dir.string() + ": missing blob entry " + name);
        }
        return blobs.at(name).get<std::size_t>();
    };
    if (declared("coords.f32") != num_nodes * coord_dim * sizeof(float) ||
        declared("edges.u32") != num_edges * 2 * sizeof(std::uint32_t) ||
        declared("node_type.u32") != num_nodes * sizeof(std::uint32_t) ||
        declared("fields.f32") != num_frames * num_nodes * num_fields * sizeof(float)) {
        raise(ErrorCode::CorruptMeta, dir.string() + ": blob lengths disagree with header");
    }

    const std::vector<float> coords = read_blob<float>(dir / "coords.f32", num_nodes * coord_dim);
    const std::vector<std::uint32_t> edges = read_blob<std::uint32_t>(dir / "edges.u32",
                                                                      num_edges * 2);
    const std::vector<std::uint32_t> types =
        read_blob<std::uint32_t>(dir / "node_type.u32", num_nodes);
    const std::vector<float> fields =
        read_blob<float>(dir / "fields.f32", num_frames * num_nodes * num_fields);

    Trajectory traj;
    traj.graph.num_nodes = num_nodes;
    traj.graph.coord_dim = coord_dim;
    traj.graph.coords.assign(coords.begin(), coords.end());
    traj.graph.edges.reserve(num_edges);
    for (std::size_t e = 0; e < num_edges; ++e) {
        const std::uint32_t a = edges[2 * e];
        const std::uint32_t b = edges[2 * e + 1];
        if (a >= num_nodes || b >= num_nodes) {
            raise(ErrorCode::IndexOutOfRange, dir.string() + ": edge endpoint out of range");
        }
        traj.graph.edges.emplace_back(a, b);
    }
    traj.graph.node_type.reserve(num_nodes);
    for (std::uint32_t t : types) {
        if (t >= static_cast<std::uint32_t>(kNumNodeTypes)) {
            raise(ErrorCode::CorruptMeta, dir.string() + ": node type out of range");
        }
        traj.graph.node_type.push_back(static_cast<NodeType>(t));
    }

    traj.num_frames = num_frames;
    traj.num_fields = num_fields;
    traj.fields.assign(fields.begin(), fields.end());
    traj.dt = require<double>(meta, "dt", dir);
    traj.field_names = require<std::vector<std::string>>(meta, "field_names", dir);
    const std::vector<int> dyn = require<std::vector<int>>(meta, "dynamic_mask", dir);
    traj.dynamic_mask.assign(dyn.begin(), dyn.end());
    traj.history_depth = require<int>(meta, "history_depth", dir);
    traj.validate();
    return traj;
}

namespace {

std::string traj_dir_name(std::size_t index) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "traj_%03zu", index);
    return buf;
}

}  // namespace

void save_dataset(const std::vector<Trajectory>& trajs, const fs::path& dir) {
    fs::create_directories(dir);
    for (std::size_t i = 0; i < trajs.size(); ++i) {
        save_mgf(trajs[i], dir / traj_dir_name(i));
    }
}

std::vector<Trajectory> load_dataset(const fs::path& dir) {
    if (!fs::is_directory(dir)) {
        raise(ErrorCode::IoFailure, "not a dataset directory: " + dir.string());
    }
    std::vector<fs::path> subdirs;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.is_directory() && entry.path().filename().string().rfind("traj_", 0) == 0) {
            subdirs.push_back(entry.path());
        }
    }
    std::sort(subdirs.begin(), subdirs.end());
    std::vector<Trajectory> trajs;
    trajs.reserve(subdirs.size());
    for (const fs::path& sub : subdirs) trajs.push_back(load_mgf(sub));
    return trajs;
}

void save_checkpoint(const Checkpoint& ckpt, const fs::path& dir) {
    fs::create_directories(dir);
    Json params = Json::array();
    std::size_t index = 0;
    ckpt.weights.for_each([&](const std::string& name, const Tensor& t) {
        const std::string file = "p" + std::to_string(index++) + ".f32";
        std::vector<float> blob(t.data.begin(), t.data.end());
        write_blob(dir / file, blob);
        params.push_back(Json{{"name", name},
                              {"shape", t.shape},
                              {"file", file},
                              {"bytes", blob.size() * sizeof(float)}});
    });
    Json meta{{"version", kMgfFormatVersion},
              {"config", to_json(ckpt.config)},
              {"target_kind", target_kind_name(ckpt.target_kind)},
              {"params", params}};
    std::ofstream out(dir / "meta.json");
    if (!out) raise(ErrorCode::IoFailure, "cannot write meta.json in " + dir.string());
    out << meta.dump(2) << "\n";
}

Checkpoint load_checkpoint(const fs::path& dir) {
    const Json meta = load_meta(dir);
    check_version(meta, dir);

    Checkpoint ckpt;
    ckpt.config = model_config_from_json(require<Json>(meta, "config", dir));
    ckpt.target_kind = target_kind_from_name(require<std::string>(meta, "target_kind", dir));
    ckpt.weights = init_weights(ckpt.config, 0);

    const Json params = require<Json>(meta, "params", dir);
    std::size_t cursor = 0;
    ckpt.weights.for_each([&](const std::string& name, Tensor& t) {
        if (cursor >= params.size()) {
            raise(ErrorCode::CorruptMeta, dir.string() + ": too few parameter entries");
        }
        const Json& entry = params.at(cursor++);
        if (entry.at("name").get<std::string>() != name ||
            entry.at("shape").get<std::vector<std::size_t>>() != t.shape) {
            raise(ErrorCode::CorruptMeta,
                  dir.string() + ": parameter mismatch at '" + name + "'");
        }
        const std::vector<float> blob =
            read_blob<float>(dir / entry.at("file").get<std::string>(), t.size());
        std::copy(blob.begin(), blob.end(), t.data.begin());
    });
    if (cursor != params.size()) {
        raise(ErrorCode::CorruptMeta, dir.string() + ": extra parameter entries");
    }
    return ckpt;
}

}  // namespace meshattn
