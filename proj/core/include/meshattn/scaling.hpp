#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "meshattn/model.hpp"
#include "meshattn/train.hpp"

namespace meshattn {

struct IsoFlopPoint {
    double param_count = 0.0;
    double loss = 0.0;
};

/// Runs sharing one compute budget C, varying model size.
struct IsoFlopGroup {
    double budget = 0.0;  // C
    std::vector<IsoFlopPoint> points;
};

struct IsoFlopMinimum {
    double budget = 0.0;
    double param_count = 0.0;  // N_opt(C)
    double loss = 0.0;
};

/// Loss-minimizing model size within one budget group. With `refine` a
/// parabola through the three lowest-loss points (in log param space) moves
/// the argmin off the grid; the vertex is kept only inside the bracket.
IsoFlopMinimum isoflop_minimum(const IsoFlopGroup& group, bool refine = true);

/// N_opt = coefficient * C^exponent.
struct PowerLawFit {
    double exponent = 0.0;
    double coefficient = 0.0;
    double r_squared = 0.0;
};

/// Ordinary least squares in log-log space over (budget, param_count) pairs.
PowerLawFit fit_power_law(const std::vector<IsoFlopMinimum>& minima);

struct SweepRun {
    double budget = 0.0;
    ModelConfig model;
    RunRecord record;
};

struct SweepConfig {
    std::vector<double> budgets;        // FLOPs per group
    std::vector<ModelConfig> models;    // sizes swept inside each group
    TrainConfig train;                  // steps/total_iters set per run
    std::size_t min_steps = 50;
    bool eval_rollout = true;           // fill final_all_rollout_metric
    std::size_t workers = 1;            // parallel (budget, model) cells
};

struct SweepResult {
    std::vector<SweepRun> runs;
    std::vector<IsoFlopGroup> groups;
    std::vector<IsoFlopMinimum> minima;
    PowerLawFit fit;
};

/// Trains every (budget, model) cell: step count = C / (6 P nodes_per_step)
/// so each run lands on its budget, with the cosine cycle matched to that
/// length. Budgets yielding fewer than min_steps steps raise BudgetTooSmall.
SweepResult run_isoflop_sweep(const SweepConfig& cfg, const Dataset& train_set,
                              const Dataset& eval_set);

std::string sweep_csv(const SweepResult& result);

}  // namespace meshattn
