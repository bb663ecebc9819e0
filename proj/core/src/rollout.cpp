#include "meshattn/rollout.hpp"

#include <cmath>

namespace meshattn {

Tensor Trajectory::frame(std::size_t t) const {
    Tensor out = Tensor::matrix(graph.num_nodes, num_fields);
    const std::size_t n = graph.num_nodes * num_fields;
    std::copy(fields.begin() + t * n, fields.begin() + (t + 1) * n, out.data.begin());
    return out;
}

std::size_t Trajectory::num_dynamic() const {
    std::size_t n = 0;
    for (bool d : dynamic_mask) n += d ? 1 : 0;
    return n;
}

void Trajectory::validate() const {
    if (field_names.size() != num_fields || dynamic_mask.size() != num_fields) {
        raise(ErrorCode::ShapeMismatch, "trajectory field metadata mismatch");
    }
    if (fields.size() != num_frames * graph.num_nodes * num_fields) {
        raise(ErrorCode::ShapeMismatch, "trajectory field array size mismatch");
    }
    if (history_depth != 0 && history_depth != 1) {
        raise(ErrorCode::InvalidConfig, "history_depth must be 0 or 1");
    }
    for (double v : fields) {
        if (!std::isfinite(v)) raise(ErrorCode::NonFiniteValue, "non-finite trajectory field");
    }
}

TargetKind target_kind_from_name(const std::string& name) {
    if (name == "absolute") return TargetKind::Absolute;
    if (name == "delta") return TargetKind::Delta;
    raise(ErrorCode::InvalidConfig, "unknown target kind: " + name);
}

std::string target_kind_name(TargetKind kind) {
    return kind == TargetKind::Absolute ? "absolute" : "delta";
}

namespace {

// Copies ground-truth values into the non-dynamic columns of a predicted frame.
void teacher_force(const Trajectory& traj, std::size_t t, Tensor& frame) {
    for (std::size_t f = 0; f < traj.num_fields; ++f) {
        if (traj.dynamic_mask[f]) continue;
        for (std::size_t i = 0; i < traj.graph.num_nodes; ++i) {
            frame.at(i, f) = traj.field(t, i, f);
        }
    }
}

}  // namespace

std::vector<Tensor> rollout(const Predictor& predict, const Trajectory& traj, std::size_t start_t,
                            std::size_t steps) {
    if (start_t >= traj.num_frames || start_t + steps > traj.num_frames - 1) {
        raise(ErrorCode::HorizonExceeded, "rollout exceeds trajectory horizon");
    }
    std::vector<Tensor> frames;
    frames.reserve(steps + 1);
    frames.push_back(traj.frame(start_t));
    Tensor prev;  // previous *predicted* frame, for history features
    bool have_prev = false;
    if (traj.history_depth == 1 && start_t > 0) {
        prev = traj.frame(start_t - 1);
        have_prev = true;
    }
    for (std::size_t s = 0; s < steps; ++s) {
        const std::size_t t = start_t + s;
        Tensor next = predict(traj, frames.back(), have_prev ? &prev : nullptr, t);
        if (next.rows() != traj.graph.num_nodes || next.cols() != traj.num_fields) {
            raise(ErrorCode::ShapeMismatch, "predictor returned wrong field shape");
        }
        teacher_force(traj, t + 1, next);
        if (traj.history_depth == 1) {
            prev = frames.back();
            have_prev = true;
        }
        frames.push_back(std::move(next));
    }
    return frames;
}

namespace {

double squared_dynamic_error(const Trajectory& traj, std::size_t t, const Tensor& predicted) {
    double total = 0.0;
    for (std::size_t i = 0; i < traj.graph.num_nodes; ++i) {
        for (std::size_t f = 0; f < traj.num_fields; ++f) {
            if (!traj.dynamic_mask[f]) continue;
            const double d = traj.field(t, i, f) - predicted.at(i, f);
            total += d * d;
        }
    }
    return total;
}

}  // namespace

double one_step_metric(const Predictor& predict, const Trajectory& traj, bool take_sqrt) {
    if (traj.num_frames < 2) raise(ErrorCode::TooShort, "one_step_metric needs T >= 2");
    const std::size_t transitions = traj.num_frames - 1;
    double total = 0.0;
    Tensor prev;
    for (std::size_t t = 1; t <= transitions; ++t) {
        Tensor cur = traj.frame(t - 1);
        const Tensor* prev_ptr = nullptr;
        if (traj.history_depth == 1 && t >= 2) {
            prev = traj.frame(t - 2);
            prev_ptr = &prev;
        }
        Tensor pred = predict(traj, cur, prev_ptr, t - 1);
        total += squared_dynamic_error(traj, t, pred);
    }
    const double value =
        total / (static_cast<double>(transitions) * static_cast<double>(traj.graph.num_nodes));
    return take_sqrt ? std::sqrt(value) : value;
}

double all_rollout_metric(const Predictor& predict, const Trajectory& traj, bool take_sqrt) {
    if (traj.num_frames < 2) raise(ErrorCode::TooShort, "all_rollout_metric needs T >= 2");
    const std::size_t transitions = traj.num_frames - 1;
    const std::vector<Tensor> frames = rollout(predict, traj, 0, transitions);
    double total = 0.0;
    for (std::size_t t = 1; t <= transitions; ++t) {
        total += squared_dynamic_error(traj, t, frames[t]);
    }
    const double value =
        total / (static_cast<double>(transitions) * static_cast<double>(traj.graph.num_nodes));
    return take_sqrt ? std::sqrt(value) : value;
}

Predictor persistence_predictor() {
    return [](const Trajectory&, const Tensor& fields, const Tensor*, std::size_t) {
        return fields;
    };
}

Predictor oracle_predictor() {
    return [](const Trajectory& traj, const Tensor&, const Tensor*, std::size_t t) {
        return traj.frame(t + 1);
    };
}

}  // namespace meshattn
