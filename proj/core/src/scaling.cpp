#include "meshattn/scaling.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <sstream>
#include <thread>

namespace meshattn {

IsoFlopMinimum isoflop_minimum(const IsoFlopGroup& group, bool refine) {
    if (group.points.size() < 2) {
        raise(ErrorCode::TooFewRuns, "isoflop_minimum: need at least two runs");
    }
    for (const IsoFlopPoint& p : group.points) {
        if (p.param_count <= 0.0) {
            raise(ErrorCode::NonPositiveInput, "isoflop_minimum: param_count must be positive");
        }
        if (!std::isfinite(p.loss)) {
            raise(ErrorCode::NonFiniteValue, "isoflop_minimum: non-finite loss");
        }
    }
    std::vector<IsoFlopPoint> pts = group.points;
    std::sort(pts.begin(), pts.end(),
              [](const IsoFlopPoint& a, const IsoFlopPoint& b) { return a.loss < b.loss; });

    IsoFlopMinimum result;
    result.budget = group.budget;
    result.param_count = pts[0].param_count;
    result.loss = pts[0].loss;

    if (refine && pts.size() >= 3) {
        // Parabola through the three lowest losses in x = log P.
        double x[3], y[3];
        for (int i = 0; i < 3; ++i) {
            x[i] = std::log(pts[i].param_count);
            y[i] = pts[i].loss;
        }
        const double d01 = x[0] - x[1];
        const double d02 = x[0] - x[2];
        const double d12 = x[1] - x[2];
        if (std::abs(d01) > 1e-12 && std::abs(d02) > 1e-12 && std::abs(d12) > 1e-12) {
            const double a =
                y[0] / (d01 * d02) - y[1] / (d01 * d12) + y[2] / (d02 * d12);
            if (a > 0.0) {
                const double b = -(y[0] * (x[1] + x[2]) / (d01 * d02) -
                                   y[1] * (x[0] + x[2]) / (d01 * d12) +
                                   y[2] * (x[0] + x[1]) / (d02 * d12));
                const double vertex = -b / (2.0 * a);
                const double lo = std::min({x[0], x[1], x[2]});
                const double hi = std::max({x[0], x[1], x[2]});
                if (vertex >= lo && vertex <= hi) {
                    result.param_count = std::exp(vertex);
                    result.loss = a * vertex * vertex + b * vertex +
                                  (y[0] - a * x[0] * x[0] - b * x[0]);
                }
            }
        }
    }
    return result;
}

PowerLawFit fit_power_law(const std::vector<IsoFlopMinimum>& minima) {
    if (minima.size() < 2) {
        raise(ErrorCode::TooFewRuns, "fit_power_law needs at least two budgets");
    }
    const std::size_t n = minima.size();
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (const IsoFlopMinimum& m : minima) {
        if (m.budget <= 0.0 || m.param_count <= 0.0) {
            raise(ErrorCode::NonPositiveInput, "fit_power_law: inputs must be positive");
        }
        const double x = std::log(m.budget);
        const double y = std::log(m.param_count);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        syy += y * y;
    }
    const double denom = n * sxx - sx * sx;
    if (std::abs(denom) < 1e-12) {
        raise(ErrorCode::TooFewRuns, "fit_power_law: budgets are degenerate");
    }
    PowerLawFit fit;
    fit.exponent = (n * sxy - sx * sy) / denom;
    fit.coefficient = std::exp((sy - fit.exponent * sx) / n);
    const double ss_tot = syy - sy * sy / n;
    double ss_res = 0.0;
    for (const IsoFlopMinimum& m : minima) {
        const double pred = std::log(fit.coefficient) + fit.exponent * std::log(m.budget);
        const double r = std::log(m.param_count) - pred;
        ss_res += r * r;
    }
    fit.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
    return fit;
}

SweepResult run_isoflop_sweep(const SweepConfig& cfg, const Dataset& train_set,
                              const Dataset& eval_set) {
    if (cfg.budgets.empty() || cfg.models.empty()) {
        raise(ErrorCode::InvalidConfig, "sweep needs at least one budget and one model");
    }
    if (train_set.trajectories.empty()) {
        raise(ErrorCode::InvalidConfig, "sweep needs training trajectories");
    }
    double nodes_per_step = 0.0;
    for (const Trajectory& t : train_set.trajectories) {
        nodes_per_step += static_cast<double>(t.graph.num_nodes);
    }
    nodes_per_step /= static_cast<double>(train_set.trajectories.size());

    // Validate and lay out every (budget, model) cell before any training so
    // a bad budget fails fast.
    struct Cell {
        double budget;
        const ModelConfig* model;
        std::size_t steps;
    };
    std::vector<Cell> cells;
    for (double budget : cfg.budgets) {
        for (const ModelConfig& model : cfg.models) {
            const double p = static_cast<double>(param_count(model));
            const auto steps = static_cast<std::size_t>(budget / (6.0 * p * nodes_per_step));
            if (steps < cfg.min_steps) {
                raise(ErrorCode::BudgetTooSmall,
                      "budget " + std::to_string(budget) + " gives only " +
                          std::to_string(steps) + " steps at P = " + std::to_string(p));
            }
            cells.push_back({budget, &model, steps});
        }
    }

    std::vector<SweepRun> runs(cells.size());
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i = next.fetch_add(1); i < cells.size(); i = next.fetch_add(1)) {
            const Cell& cell = cells[i];
            TrainConfig tc = cfg.train;
            tc.steps = cell.steps;
            tc.schedule.total_iters = cell.steps;
            tc.schedule.warmup_iters = std::min(tc.schedule.warmup_iters, cell.steps / 10);

            Weights w = init_weights(*cell.model, tc.seed);
            TrainResult trained = train_steps(*cell.model, std::move(w), train_set, tc);

            if (cfg.eval_rollout && !eval_set.trajectories.empty()) {
                Predictor pred =
                    model_predictor(*cell.model, trained.weights, tc.target_kind, tc.seed);
                double metric = 0.0;
                for (const Trajectory& t : eval_set.trajectories) {
                    metric += all_rollout_metric(pred, t);
                }
                trained.record.final_all_rollout_metric =
                    metric / static_cast<double>(eval_set.trajectories.size());
            }
            runs[i].budget = cell.budget;
            runs[i].model = *cell.model;
            runs[i].record = trained.record;
        }
    };
    const std::size_t workers = std::max<std::size_t>(1, cfg.workers);
    if (workers == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
        for (std::thread& t : pool) t.join();
    }

    SweepResult result;
    result.runs = std::move(runs);
    std::size_t idx = 0;
    for (double budget : cfg.budgets) {
        IsoFlopGroup group;
        group.budget = budget;
        for (std::size_t m = 0; m < cfg.models.size(); ++m, ++idx) {
            group.points.push_back(
                {result.runs[idx].record.param_count, result.runs[idx].record.final_loss});
        }
        result.groups.push_back(group);
        result.minima.push_back(isoflop_minimum(group));
    }
    result.fit = fit_power_law(result.minima);
    return result;
}

std::string sweep_csv(const SweepResult& result) {
    std::ostringstream out;
    out << "budget,param_count,final_loss,all_rollout_metric\n";
    for (const SweepRun& run : result.runs) {
        out << run.budget << ',' << run.record.param_count << ',' << run.record.final_loss << ','
            << run.record.final_all_rollout_metric << '\n';
    }
    return out.str();
}

}  // namespace meshattn
