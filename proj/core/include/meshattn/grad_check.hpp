#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "meshattn/tensor.hpp"

namespace meshattn {

struct GradCheckResult {
    double max_rel_err = 0.0;
    std::size_t coords_checked = 0;
};

/// Scalar function under test. Reads the current contents of the parameter
/// tensors it captured; when grads is non-null it must also fill one gradient
/// tensor per parameter (same order and shapes as `params`).
using GradFn = std::function<double(std::vector<Tensor>* grads)>;

/// Central-difference check of analytic gradients over a random sample of at
/// least `sample_coords` coordinates (all coordinates when fewer exist).
/// `params` are the tensors the checker perturbs in place; `f` must observe
/// those perturbations.
GradCheckResult finite_diff_check(const GradFn& f, const std::vector<Tensor*>& params,
                                  double h = 1e-5, std::size_t sample_coords = 200,
                                  std::uint64_t seed = 1234);

}  // namespace meshattn
