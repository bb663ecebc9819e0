#include "meshattn/config.hpp"

#include <algorithm>

namespace meshattn {

namespace {

void check_keys(const Json& j, std::initializer_list<const char*> allowed, const char* where) {
    if (!j.is_object()) raise(ErrorCode::InvalidConfig, std::string(where) + ": expected object");
    for (const auto& [key, value] : j.items()) {
        (void)value;
        const bool known =
            std::any_of(allowed.begin(), allowed.end(),
                        [&key](const char* a) { return key == a; });
        if (!known) {
            raise(ErrorCode::InvalidConfig,
                  std::string(where) + ": unknown key '" + key + "'");
        }
    }
}

template <typename T>
T get_or(const Json& j, const char* key, T fallback) {
    if (!j.contains(key)) return fallback;
    return j.at(key).get<T>();
}

const char* pe_mode_name(PeMode m) {
    switch (m) {
        case PeMode::None: return "none";
        case PeMode::Coords: return "coords";
        case PeMode::LaplacianEig: return "laplacian_eig";
        case PeMode::RandomWalk: return "random_walk";
    }
    return "none";
}

PeMode pe_mode_from_name(const std::string& name) {
    if (name == "none") return PeMode::None;
    if (name == "coords") return PeMode::Coords;
    if (name == "laplacian_eig") return PeMode::LaplacianEig;
    if (name == "random_walk") return PeMode::RandomWalk;
    raise(ErrorCode::InvalidConfig, "unknown positional-encoding mode: " + name);
}

const char* dilation_plan_name(DilationPlan p) {
    switch (p) {
        case DilationPlan::None: return "none";
        case DilationPlan::Dilation2: return "dilation2";
        case DilationPlan::Dilation3: return "dilation3";
        case DilationPlan::Dilation2_3: return "dilation2_3";
    }
    return "none";
}

DilationPlan dilation_plan_from_name(const std::string& name) {
    if (name == "none") return DilationPlan::None;
    if (name == "dilation2") return DilationPlan::Dilation2;
    if (name == "dilation3") return DilationPlan::Dilation3;
    if (name == "dilation2_3") return DilationPlan::Dilation2_3;
    raise(ErrorCode::InvalidConfig, "unknown dilation plan: " + name);
}

const char* node_type_name(NodeType t) {
    switch (t) {
        case NodeType::Normal: return "normal";
        case NodeType::Inflow: return "inflow";
        case NodeType::Outflow: return "outflow";
        case NodeType::Wall: return "wall";
        case NodeType::Obstacle: return "obstacle";
    }
    return "normal";
}

NodeType node_type_from_name(const std::string& name) {
    if (name == "normal") return NodeType::Normal;
    if (name == "inflow") return NodeType::Inflow;
    if (name == "outflow") return NodeType::Outflow;
    if (name == "wall") return NodeType::Wall;
    if (name == "obstacle") return NodeType::Obstacle;
    raise(ErrorCode::InvalidConfig, "unknown node type: " + name);
}

}  // namespace

Json to_json(const PeSpec& spec) {
    return Json{{"mode", pe_mode_name(spec.mode)}, {"num_components", spec.num_components}};
}

PeSpec pe_spec_from_json(const Json& j) {
    check_keys(j, {"mode", "num_components"}, "pe");
    PeSpec spec;
    spec.mode = pe_mode_from_name(j.at("mode").get<std::string>());
    spec.num_components = get_or<std::size_t>(j, "num_components", 0);
    return spec;
}

Json to_json(const AugmentSpec& spec) {
    Json types = Json::array();
    for (NodeType t : spec.global_types) types.push_back(node_type_name(t));
    return Json{{"dilation_plan", dilation_plan_name(spec.dilation_plan)},
                {"random_edge_fraction", spec.random_edge_fraction},
                {"global_fraction", spec.global_fraction},
                {"global_types", types},
                {"reseed_per_step", spec.reseed_per_step},
                {"dilation_union_base", spec.dilation_union_base}};
}

AugmentSpec augment_spec_from_json(const Json& j) {
    check_keys(j,
               {"dilation_plan", "random_edge_fraction", "global_fraction", "global_types",
                "reseed_per_step", "dilation_union_base"},
               "augment");
    AugmentSpec spec;
    spec.dilation_plan =
        dilation_plan_from_name(get_or<std::string>(j, "dilation_plan", "none"));
    spec.random_edge_fraction = get_or<double>(j, "random_edge_fraction", 0.0);
    spec.global_fraction = get_or<double>(j, "global_fraction", 0.0);
    spec.reseed_per_step = get_or<bool>(j, "reseed_per_step", true);
    spec.dilation_union_base = get_or<bool>(j, "dilation_union_base", false);
    if (j.contains("global_types")) {
        for (const auto& t : j.at("global_types")) {
            spec.global_types.push_back(node_type_from_name(t.get<std::string>()));
        }
    }
    return spec;
}

Json to_json(const ModelConfig& cfg) {
    return Json{{"embed_dim", cfg.embed_dim},
                {"num_layers", cfg.num_layers},
                {"num_heads", cfg.num_heads},
                {"expansion", cfg.expansion},
                {"input_width", cfg.input_width},
                {"output_width", cfg.output_width},
                {"pe", to_json(cfg.pe)},
                {"augment", to_json(cfg.augment)},
                {"self_loops", cfg.self_loops},
                {"attention_mode", cfg.attention_mode == AttentionMode::DenseLiteral
                                       ? "dense_literal"
                                       : "neighborhood_softmax"},
                {"preset", preset_name(cfg.preset)}};
}

ModelConfig model_config_from_json(const Json& j) {
    check_keys(j,
               {"embed_dim", "num_layers", "num_heads", "expansion", "input_width",
                "output_width", "pe", "augment", "self_loops", "attention_mode", "preset"},
               "model");
    ModelConfig cfg;
    if (j.contains("preset")) cfg = preset_config(preset_from_name(j.at("preset")));
    cfg.embed_dim = get_or<std::size_t>(j, "embed_dim", cfg.embed_dim);
    cfg.num_layers = get_or<std::size_t>(j, "num_layers", cfg.num_layers);
    cfg.num_heads = get_or<std::size_t>(j, "num_heads", cfg.num_heads);
    cfg.expansion = get_or<std::size_t>(j, "expansion", cfg.expansion);
    cfg.input_width = get_or<std::size_t>(j, "input_width", cfg.input_width);
    cfg.output_width = get_or<std::size_t>(j, "output_width", cfg.output_width);
    if (j.contains("pe")) cfg.pe = pe_spec_from_json(j.at("pe"));
    if (j.contains("augment")) cfg.augment = augment_spec_from_json(j.at("augment"));
    cfg.self_loops = get_or<bool>(j, "self_loops", cfg.self_loops);
    if (j.contains("attention_mode")) {
        const std::string mode = j.at("attention_mode").get<std::string>();
        if (mode == "neighborhood_softmax") {
            cfg.attention_mode = AttentionMode::NeighborhoodSoftmax;
        } else if (mode == "dense_literal") {
            cfg.attention_mode = AttentionMode::DenseLiteral;
        } else {
            raise(ErrorCode::InvalidConfig, "unknown attention mode: " + mode);
        }
    }
    cfg.validate();
    return cfg;
}

Json to_json(const Schedule& s) {
    return Json{{"kind", s.kind == ScheduleKind::WarmupCosine ? "warmup_cosine"
                                                              : "exponential_tail"},
                {"lr_max", s.lr_max},
                {"lr_min", s.lr_min},
                {"warmup_iters", s.warmup_iters},
                {"lr_flat", s.lr_flat},
                {"decay_to", s.decay_to},
                {"flat_fraction", s.flat_fraction},
                {"total_iters", s.total_iters}};
}

Schedule schedule_from_json(const Json& j) {
    check_keys(j,
               {"kind", "lr_max", "lr_min", "warmup_iters", "lr_flat", "decay_to",
                "flat_fraction", "total_iters"},
               "schedule");
    Schedule s;
    if (j.contains("kind")) {
        const std::string kind = j.at("kind").get<std::string>();
        if (kind == "warmup_cosine") {
            s.kind = ScheduleKind::WarmupCosine;
        } else if (kind == "exponential_tail") {
            s.kind = ScheduleKind::ExponentialTail;
        } else {
            raise(ErrorCode::InvalidConfig, "unknown schedule kind: " + kind);
        }
    }
    s.lr_max = get_or<double>(j, "lr_max", s.lr_max);
    s.lr_min = get_or<double>(j, "lr_min", s.lr_min);
    s.warmup_iters = get_or<std::size_t>(j, "warmup_iters", s.warmup_iters);
    s.lr_flat = get_or<double>(j, "lr_flat", s.lr_flat);
    s.decay_to = get_or<double>(j, "decay_to", s.decay_to);
    s.flat_fraction = get_or<double>(j, "flat_fraction", s.flat_fraction);
    s.total_iters = get_or<std::size_t>(j, "total_iters", s.total_iters);
    return s;
}

Json to_json(const TrainConfig& cfg) {
    return Json{{"optimizer", cfg.optimizer == OptimizerKind::AdamW ? "adamw" : "adam"},
                {"beta1", cfg.beta1},
                {"beta2", cfg.beta2},
                {"weight_decay", cfg.weight_decay},
                {"adam_eps", cfg.adam_eps},
                {"schedule", to_json(cfg.schedule)},
                {"noise_sigmas", cfg.noise_sigmas},
                {"grad_accumulation", cfg.grad_accumulation},
                {"steps", cfg.steps},
                {"seed", cfg.seed},
                {"target_kind", target_kind_name(cfg.target_kind)},
                {"loss_log_every", cfg.loss_log_every},
                {"final_loss_window", cfg.final_loss_window}};
}

TrainConfig train_config_from_json(const Json& j) {
    check_keys(j,
               {"optimizer", "beta1", "beta2", "weight_decay", "adam_eps", "schedule",
                "noise_sigmas", "grad_accumulation", "steps", "seed", "target_kind",
                "loss_log_every", "final_loss_window"},
               "train");
    TrainConfig cfg;
    if (j.contains("optimizer")) {
        const std::string opt = j.at("optimizer").get<std::string>();
        if (opt == "adamw") {
            cfg.optimizer = OptimizerKind::AdamW;
        } else if (opt == "adam") {
            cfg.optimizer = OptimizerKind::Adam;
        } else {
            raise(ErrorCode::InvalidConfig, "unknown optimizer: " + opt);
        }
    }
    cfg.beta1 = get_or<double>(j, "beta1", cfg.beta1);
    cfg.beta2 = get_or<double>(j, "beta2", cfg.beta2);
    cfg.weight_decay = get_or<double>(j, "weight_decay", cfg.weight_decay);
    cfg.adam_eps = get_or<double>(j, "adam_eps", cfg.adam_eps);
    if (j.contains("schedule")) cfg.schedule = schedule_from_json(j.at("schedule"));
    if (j.contains("noise_sigmas")) {
        cfg.noise_sigmas = j.at("noise_sigmas").get<std::vector<double>>();
    }
    cfg.grad_accumulation = get_or<std::size_t>(j, "grad_accumulation", cfg.grad_accumulation);
    cfg.steps = get_or<std::size_t>(j, "steps", cfg.steps);
    cfg.seed = get_or<std::uint64_t>(j, "seed", cfg.seed);
    if (j.contains("target_kind")) {
        cfg.target_kind = target_kind_from_name(j.at("target_kind").get<std::string>());
    }
    cfg.loss_log_every = get_or<std::size_t>(j, "loss_log_every", cfg.loss_log_every);
    cfg.final_loss_window = get_or<std::size_t>(j, "final_loss_window", cfg.final_loss_window);
    return cfg;
}

}  // namespace meshattn
