// meshattn-cli: batch front end for the mesh attention library.
//
// Subcommands cover the full pipeline: synthetic data generation, training,
// masked pretraining, rollout, evaluation, FLOPs accounting, scaling-law
// fitting and sweeps, and augmentation previews. Structured settings live in
// JSON configs (strictly validated, unknown keys rejected); flags carry only
// paths, seeds and sizes. Every command that writes artifacts copies its
// effective config into the output directory so runs are reproducible.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "meshattn/config.hpp"
#include "meshattn/heatgen.hpp"
#include "meshattn/mgf.hpp"
#include "meshattn/scaling.hpp"
#include "meshattn/train.hpp"

namespace fs = std::filesystem;
using namespace meshattn;

namespace {

Json load_json_file(const fs::path& path) {
    std::ifstream in(path);
    if (!in) raise(ErrorCode::IoFailure, "cannot open " + path.string());
    Json j;
    try {
        in >> j;
    } catch (const Json::exception& e) {
        raise(ErrorCode::CorruptMeta, path.string() + ": " + e.what());
    }
    return j;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) raise(ErrorCode::IoFailure, "cannot write " + path.string());
    out << text;
}

void check_keys(const Json& j, std::initializer_list<const char*> allowed, const char* where) {
    if (!j.is_object()) raise(ErrorCode::InvalidConfig, std::string(where) + ": expected object");
    for (const auto& [key, value] : j.items()) {
        (void)value;
        const bool known = std::any_of(allowed.begin(), allowed.end(),
                                       [&key](const char* a) { return key == a; });
        if (!known) {
            raise(ErrorCode::InvalidConfig, std::string(where) + ": unknown key '" + key + "'");
        }
    }
}

std::string loss_csv(const std::vector<LossPoint>& curve) {
    std::ostringstream out;
    out << "step,lr,loss\n";
    for (const LossPoint& p : curve) {
        out << p.step << ',' << p.lr << ',' << p.loss << '\n';
    }
    return out.str();
}

Json record_json(const RunRecord& r) {
    return Json{{"flop_budget", r.flop_budget},
                {"param_count", r.param_count},
                {"training_nodes", r.training_nodes},
                {"final_loss", r.final_loss},
                {"final_all_rollout_metric", r.final_all_rollout_metric}};
}

Dataset load_dataset_checked(const fs::path& dir) {
    Dataset ds;
    ds.trajectories = load_dataset(dir);
    if (ds.trajectories.empty()) {
        raise(ErrorCode::IoFailure, "no trajectories under " + dir.string());
    }
    return ds;
}

void check_widths(const ModelConfig& cfg, const Trajectory& traj) {
    const std::size_t q = pe_width(cfg.pe, traj.graph.coord_dim);
    const std::size_t want_in = model_input_width(traj, q);
    if (cfg.input_width != want_in) {
        raise(ErrorCode::InvalidConfig,
              "model input_width " + std::to_string(cfg.input_width) + " but data implies " +
                  std::to_string(want_in));
    }
    if (cfg.output_width != traj.num_dynamic()) {
        raise(ErrorCode::InvalidConfig,
              "model output_width " + std::to_string(cfg.output_width) +
                  " but data has " + std::to_string(traj.num_dynamic()) + " dynamic fields");
    }
}

// --- gen-data ---------------------------------------------------------------

int cmd_gen_data(const fs::path& out, std::size_t trajectories, std::size_t nodes,
                 std::size_t steps, std::uint64_t seed, double kappa, std::size_t k_neighbors) {
    HeatGenConfig cfg;
    cfg.num_points = nodes;
    cfg.num_frames = steps;
    cfg.seed = seed;
    cfg.kappa = kappa;
    cfg.k_neighbors = k_neighbors;
    std::vector<Trajectory> trajs = gen_heat_dataset(cfg, trajectories);
    fs::create_directories(out);
    save_dataset(trajs, out);
    const Json meta{{"generator", "heat"},         {"trajectories", trajectories},
                    {"nodes", nodes},              {"steps", steps},
                    {"seed", seed},                {"kappa", kappa},
                    {"k_neighbors", k_neighbors}};
    write_text(out / "gen_config.json", meta.dump(2) + "\n");
    std::printf("wrote %zu trajectories to %s\n", trajs.size(), out.string().c_str());
    return 0;
}

// --- train ------------------------------------------------------------------

struct TrainRunConfig {
    ModelConfig model;
    TrainConfig train;
    fs::path data;
    Json raw;
};

TrainRunConfig load_train_config(const fs::path& path) {
    Json j = load_json_file(path);
    check_keys(j, {"model", "train", "data"}, "run config");
    TrainRunConfig cfg;
    cfg.model = model_config_from_json(j.at("model"));
    cfg.train = j.contains("train") ? train_config_from_json(j.at("train")) : TrainConfig{};
    cfg.data = j.at("data").get<std::string>();
    cfg.raw = j;
    return cfg;
}

int cmd_train(const fs::path& config_path, const fs::path& out) {
    TrainRunConfig cfg = load_train_config(config_path);
    Dataset ds = load_dataset_checked(cfg.data);
    check_widths(cfg.model, ds.trajectories.front());

    TrainResult result =
        train_steps(cfg.model, init_weights(cfg.model, cfg.train.seed), ds, cfg.train);

    fs::create_directories(out);
    write_text(out / "config.json", cfg.raw.dump(2) + "\n");
    write_text(out / "loss.csv", loss_csv(result.loss_curve));
    write_text(out / "run_record.json", record_json(result.record).dump(2) + "\n");
    Checkpoint ckpt{cfg.model, std::move(result.weights), cfg.train.target_kind};
    save_checkpoint(ckpt, out / "checkpoint");
    std::printf("final loss %.6e, checkpoint in %s\n", result.record.final_loss,
                (out / "checkpoint").string().c_str());
    return 0;
}

// --- pretrain ---------------------------------------------------------------

int cmd_pretrain(const fs::path& config_path, double mask_fraction_flag, const fs::path& out) {
    Json j = load_json_file(config_path);
    check_keys(j, {"encoder", "decoder", "train", "data", "mask_fraction"}, "pretrain config");
    ModelConfig encoder = model_config_from_json(j.at("encoder"));
    ModelConfig decoder = model_config_from_json(j.at("decoder"));
    PretrainConfig cfg;
    cfg.train = j.contains("train") ? train_config_from_json(j.at("train")) : TrainConfig{};
    cfg.mask_fraction = j.value("mask_fraction", cfg.mask_fraction);
    if (mask_fraction_flag > 0.0) cfg.mask_fraction = mask_fraction_flag;
    Dataset ds = load_dataset_checked(j.at("data").get<std::string>());

    PretrainResult result = mask_pretrain(encoder, decoder, ds, cfg);

    fs::create_directories(out);
    j["mask_fraction"] = cfg.mask_fraction;
    write_text(out / "config.json", j.dump(2) + "\n");
    write_text(out / "loss.csv", loss_csv(result.loss_curve));
    Checkpoint ckpt{encoder, std::move(result.encoder_weights), cfg.train.target_kind};
    save_checkpoint(ckpt, out / "encoder_checkpoint");
    std::printf("encoder checkpoint in %s\n", (out / "encoder_checkpoint").string().c_str());
    return 0;
}

// --- rollout ----------------------------------------------------------------

int cmd_rollout(const fs::path& ckpt_path, const fs::path& data, std::size_t steps,
                const fs::path& out) {
    Checkpoint ckpt = load_checkpoint(ckpt_path);
    Dataset ds = load_dataset_checked(data);
    check_widths(ckpt.config, ds.trajectories.front());
    Predictor predict = model_predictor(ckpt.config, ckpt.weights, ckpt.target_kind);

    std::vector<Trajectory> predicted;
    for (const Trajectory& traj : ds.trajectories) {
        const std::size_t n = steps == 0 ? traj.num_frames - 1 : steps;
        std::vector<Tensor> frames = rollout(predict, traj, 0, n);
        Trajectory pred = traj;
        pred.num_frames = frames.size();
        pred.fields.clear();
        for (const Tensor& f : frames) {
            pred.fields.insert(pred.fields.end(), f.data.begin(), f.data.end());
        }
        predicted.push_back(std::move(pred));
    }
    fs::create_directories(out);
    save_dataset(predicted, out);
    const Json meta{{"checkpoint", ckpt_path.string()},
                    {"data", data.string()},
                    {"steps", steps},
                    {"trajectories", predicted.size()}};
    write_text(out / "rollout_config.json", meta.dump(2) + "\n");
    std::printf("wrote %zu predicted trajectories to %s\n", predicted.size(),
                out.string().c_str());
    return 0;
}

// --- eval -------------------------------------------------------------------

int cmd_eval(const fs::path& ckpt_path, const fs::path& data, const fs::path& out) {
    Checkpoint ckpt = load_checkpoint(ckpt_path);
    Dataset ds = load_dataset_checked(data);
    check_widths(ckpt.config, ds.trajectories.front());
    Predictor predict = model_predictor(ckpt.config, ckpt.weights, ckpt.target_kind);

    Json per = Json::array();
    double one_sum = 0.0;
    double all_sum = 0.0;
    for (std::size_t i = 0; i < ds.trajectories.size(); ++i) {
        const double one = one_step_metric(predict, ds.trajectories[i]);
        const double all = all_rollout_metric(predict, ds.trajectories[i]);
        one_sum += one;
        all_sum += all;
        per.push_back(Json{{"trajectory", i},
                           {"one_step", one},
                           {"all_rollout", all},
                           {"one_step_x1e3", one * 1e3},
                           {"all_rollout_x1e3", all * 1e3}});
    }
    const double k = static_cast<double>(ds.trajectories.size());
    Json report{{"checkpoint", ckpt_path.string()},
                {"data", data.string()},
                {"trajectories", per},
                {"aggregate",
                 Json{{"one_step", one_sum / k},
                      {"all_rollout", all_sum / k},
                      {"one_step_x1e3", one_sum / k * 1e3},
                      {"all_rollout_x1e3", all_sum / k * 1e3}}}};
    std::cout << report.dump(2) << "\n";
    if (!out.empty()) {
        fs::create_directories(out);
        write_text(out / "metrics.json", report.dump(2) + "\n");
    }
    return 0;
}

// --- flops ------------------------------------------------------------------

int cmd_flops(const fs::path& config_path, const std::string& preset) {
    ModelConfig cfg;
    if (!preset.empty()) {
        cfg = preset_config(preset_from_name(preset));
    } else if (!config_path.empty()) {
        Json j = load_json_file(config_path);
        cfg = model_config_from_json(j.contains("model") ? j.at("model") : j);
    } else {
        raise(ErrorCode::InvalidConfig, "flops needs --config or --preset");
    }
    FlopsEstimate est = flops_estimate(cfg);
    std::printf("d=%zu L=%zu H=%zu  params %zu\n", cfg.embed_dim, cfg.num_layers, cfg.num_heads,
                param_count(cfg));
    std::printf("%-24s %14.4e\n", "transformer per node", est.transformer_per_node);
    std::printf("%-24s %14.4e\n", "message passing per node", est.mps_per_node);
    std::printf("%-24s %14.4e\n", "2P approximation", est.two_p);
    std::printf("%-24s %14.3f\n", "transformer / 2P", est.ratio_transformer);
    std::printf("%-24s %14.3f\n", "message passing / 2P", est.ratio_mps);
    return 0;
}

// --- scaling-fit ------------------------------------------------------------

Json fit_json(const std::vector<IsoFlopMinimum>& minima, const PowerLawFit& fit) {
    Json jm = Json::array();
    for (const IsoFlopMinimum& m : minima) {
        jm.push_back(Json{{"budget", m.budget}, {"param_count", m.param_count}, {"loss", m.loss}});
    }
    return Json{{"minima", jm},
                {"fit", Json{{"exponent", fit.exponent},
                             {"coefficient", fit.coefficient},
                             {"r_squared", fit.r_squared}}}};
}

int cmd_scaling_fit(const fs::path& runs_csv, const fs::path& out) {
    std::ifstream in(runs_csv);
    if (!in) raise(ErrorCode::IoFailure, "cannot open " + runs_csv.string());
    // CSV: budget,param_count,loss with a header row.
    std::vector<IsoFlopGroup> groups;
    std::string line;
    std::getline(in, line);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream row(line);
        std::string b, p, l;
        if (!std::getline(row, b, ',') || !std::getline(row, p, ',') || !std::getline(row, l)) {
            raise(ErrorCode::CorruptMeta, "bad csv row: " + line);
        }
        double budget = 0.0;
        IsoFlopPoint point;
        try {
            budget = std::stod(b);
            point.param_count = std::stod(p);
            point.loss = std::stod(l);
        } catch (const std::exception&) {
            raise(ErrorCode::CorruptMeta, "bad csv row: " + line);
        }
        auto it = std::find_if(groups.begin(), groups.end(),
                               [budget](const IsoFlopGroup& g) { return g.budget == budget; });
        if (it == groups.end()) {
            groups.push_back({budget, {point}});
        } else {
            it->points.push_back(point);
        }
    }
    std::vector<IsoFlopMinimum> minima;
    for (const IsoFlopGroup& g : groups) minima.push_back(isoflop_minimum(g));
    PowerLawFit fit = fit_power_law(minima);
    Json report = fit_json(minima, fit);
    std::cout << report.dump(2) << "\n";
    if (!out.empty()) {
        fs::create_directories(out);
        write_text(out / "fit.json", report.dump(2) + "\n");
    }
    return 0;
}

// --- scaling-sweep ----------------------------------------------------------

int cmd_scaling_sweep(const fs::path& config_path, const fs::path& out, std::size_t workers) {
    Json j = load_json_file(config_path);
    check_keys(j, {"budgets", "models", "train", "data", "eval_data", "min_steps",
                   "eval_rollout"},
               "sweep config");
    SweepConfig cfg;
    cfg.budgets = j.at("budgets").get<std::vector<double>>();
    for (const Json& m : j.at("models")) cfg.models.push_back(model_config_from_json(m));
    if (j.contains("train")) cfg.train = train_config_from_json(j.at("train"));
    cfg.min_steps = j.value("min_steps", cfg.min_steps);
    cfg.eval_rollout = j.value("eval_rollout", cfg.eval_rollout);
    cfg.workers = workers;

    Dataset train_set = load_dataset_checked(j.at("data").get<std::string>());
    Dataset eval_set = j.contains("eval_data")
                           ? load_dataset_checked(j.at("eval_data").get<std::string>())
                           : train_set;
    for (const ModelConfig& m : cfg.models) check_widths(m, train_set.trajectories.front());

    SweepResult result = run_isoflop_sweep(cfg, train_set, eval_set);

    fs::create_directories(out);
    write_text(out / "config.json", j.dump(2) + "\n");
    write_text(out / "sweep.csv", sweep_csv(result));
    write_text(out / "fit.json", fit_json(result.minima, result.fit).dump(2) + "\n");
    std::printf("exponent %.4f, coefficient %.4e, r^2 %.4f\n", result.fit.exponent,
                result.fit.coefficient, result.fit.r_squared);
    return 0;
}

// --- augment-preview --------------------------------------------------------

void print_mask_row(const char* label, const SparseMask& m) {
    DegreeStats stats = degree_stats(m);
    std::printf("%-18s nnz %8zu  deg_max %5zu  deg_mean %8.3f\n", label, m.nnz(), stats.deg_max,
                stats.deg_mean);
}

int cmd_augment_preview(const fs::path& data, const fs::path& spec_path) {
    Dataset ds = load_dataset_checked(data);
    const Graph& g = ds.trajectories.front().graph;
    AugmentSpec spec = spec_path.empty() ? AugmentSpec{}
                                         : augment_spec_from_json(load_json_file(spec_path));
    std::printf("graph: %zu nodes, %zu undirected edges\n", g.num_nodes,
                g.num_undirected_edges());

    SparseMask base = adjacency_mask(g);
    print_mask_row("adjacency", base);
    if (spec.dilation_plan == DilationPlan::Dilation2 ||
        spec.dilation_plan == DilationPlan::Dilation2_3) {
        print_mask_row("dilate k=2", dilate(base, 2));
    }
    if (spec.dilation_plan == DilationPlan::Dilation3 ||
        spec.dilation_plan == DilationPlan::Dilation2_3) {
        print_mask_row("dilate k=3", dilate(base, 3));
    }
    SparseMask stage = base;
    if (spec.random_edge_fraction > 0.0) {
        stage = add_random_edges(stage, random_edge_count(stage, spec.random_edge_fraction), 0);
        print_mask_row("+ random edges", stage);
    }
    if (spec.global_fraction > 0.0) {
        stage = add_global_nodes(stage, sample_global_nodes(g, spec, 0));
        print_mask_row("+ global nodes", stage);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"mesh graph-transformer pipeline"};
    app.require_subcommand(1);

    // gen-data
    auto* gen = app.add_subcommand("gen-data", "generate a synthetic heat-diffusion dataset");
    std::string gen_out;
    std::size_t gen_trajs = 20, gen_nodes = 200, gen_steps = 30, gen_k = 6;
    std::uint64_t gen_seed = 0;
    double gen_kappa = 1.0;
    gen->add_option("--out", gen_out, "output dataset directory")->required();
    gen->add_option("--trajectories", gen_trajs, "trajectory count");
    gen->add_option("--nodes", gen_nodes, "points per trajectory");
    gen->add_option("--steps", gen_steps, "frames per trajectory");
    gen->add_option("--seed", gen_seed, "base seed");
    gen->add_option("--kappa", gen_kappa, "diffusivity");
    gen->add_option("--k-neighbors", gen_k, "kNN connectivity");

    // train
    auto* train = app.add_subcommand("train", "train a model from a JSON run config");
    std::string train_config, train_out;
    train->add_option("--config", train_config, "run config JSON")->required();
    train->add_option("--out", train_out, "output directory")->required();

    // pretrain
    auto* pretrain = app.add_subcommand("pretrain", "masked-feature pretraining");
    std::string pre_config, pre_out;
    double pre_fraction = 0.0;
    pretrain->add_option("--config", pre_config, "pretrain config JSON")->required();
    pretrain->add_option("--mask-fraction", pre_fraction, "override mask fraction");
    pretrain->add_option("--out", pre_out, "output directory")->required();

    // rollout
    auto* roll = app.add_subcommand("rollout", "autoregressive rollout to predicted MGF");
    std::string roll_ckpt, roll_data, roll_out;
    std::size_t roll_steps = 0;
    roll->add_option("--checkpoint", roll_ckpt, "checkpoint directory")->required();
    roll->add_option("--data", roll_data, "dataset directory")->required();
    roll->add_option("--steps", roll_steps, "transitions to roll (0 = full trajectory)");
    roll->add_option("--out", roll_out, "output directory")->required();

    // eval
    auto* eval = app.add_subcommand("eval", "one-step and all-rollout metrics");
    std::string eval_ckpt, eval_data, eval_out;
    eval->add_option("--checkpoint", eval_ckpt, "checkpoint directory")->required();
    eval->add_option("--data", eval_data, "dataset directory")->required();
    eval->add_option("--out", eval_out, "optional output directory for metrics.json");

    // flops
    auto* flops = app.add_subcommand("flops", "per-node FLOPs accounting");
    std::string flops_config, flops_preset;
    flops->add_option("--config", flops_config, "model or run config JSON");
    flops->add_option("--preset", flops_preset, "preset name (S, M, L, XL)");

    // scaling-fit
    auto* sfit = app.add_subcommand("scaling-fit", "fit a power law to isoFLOP runs");
    std::string sfit_runs, sfit_out;
    sfit->add_option("--runs", sfit_runs, "CSV of budget,param_count,loss")->required();
    sfit->add_option("--out", sfit_out, "optional output directory");

    // scaling-sweep
    auto* sweep = app.add_subcommand("scaling-sweep", "train an isoFLOP grid and fit");
    std::string sweep_config, sweep_out;
    std::size_t sweep_workers = 1;
    sweep->add_option("--config", sweep_config, "sweep config JSON")->required();
    sweep->add_option("--out", sweep_out, "output directory")->required();
    sweep->add_option("--workers", sweep_workers, "parallel training runs");

    // augment-preview
    auto* preview = app.add_subcommand("augment-preview", "mask statistics per stage");
    std::string preview_data, preview_spec;
    preview->add_option("--data", preview_data, "dataset directory")->required();
    preview->add_option("--spec", preview_spec, "augment spec JSON");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (gen->parsed()) {
            return cmd_gen_data(gen_out, gen_trajs, gen_nodes, gen_steps, gen_seed, gen_kappa,
                                gen_k);
        }
        if (train->parsed()) return cmd_train(train_config, train_out);
        if (pretrain->parsed()) return cmd_pretrain(pre_config, pre_fraction, pre_out);
        if (roll->parsed()) return cmd_rollout(roll_ckpt, roll_data, roll_steps, roll_out);
        if (eval->parsed()) return cmd_eval(eval_ckpt, eval_data, eval_out);
        if (flops->parsed()) return cmd_flops(flops_config, flops_preset);
        if (sfit->parsed()) return cmd_scaling_fit(sfit_runs, sfit_out);
        if (sweep->parsed()) return cmd_scaling_sweep(sweep_config, sweep_out, sweep_workers);
        if (preview->parsed()) return cmd_augment_preview(preview_data, preview_spec);
    } catch (const Error& e) {
        const Json err{{"error", error_code_name(e.code())}, {"message", e.what()}};
        std::cerr << err.dump() << "\n";
        return 1;
    } catch (const std::exception& e) {
        const Json err{{"error", "Unhandled"}, {"message", e.what()}};
        std::cerr << err.dump() << "\n";
        return 1;
    }
    return 2;
}
