#include "meshattn/grad_check.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace meshattn {

GradCheckResult finite_diff_check(const GradFn& f, const std::vector<Tensor*>& params, double h,
                                  std::size_t sample_coords, std::uint64_t seed) {
    std::vector<Tensor> grads;
    f(&grads);
    if (grads.size() != params.size()) {
        raise(ErrorCode::ShapeMismatch, "finite_diff_check: gradient count mismatch");
    }

    // Flat index space over all parameter coordinates.
    std::vector<std::size_t> offsets{0};
    for (const Tensor* p : params) offsets.push_back(offsets.back() + p->size());
    const std::size_t total = offsets.back();

    std::vector<std::size_t> picks(total);
    std::iota(picks.begin(), picks.end(), 0);
    if (total > sample_coords) {
        std::mt19937_64 rng(seed);
        std::shuffle(picks.begin(), picks.end(), rng);
        picks.resize(sample_coords);
    }

    GradCheckResult result;
    result.coords_checked = picks.size();
    for (std::size_t flat : picks) {
        const std::size_t pi =
            static_cast<std::size_t>(std::upper_bound(offsets.begin(), offsets.end(), flat) -
                                     offsets.begin()) -
            1;
        const std::size_t ci = flat - offsets[pi];
        double& coord = params[pi]->data[ci];
        const double saved = coord;

        coord = saved + h;
        const double f_plus = f(nullptr);
        coord = saved - h;
        const double f_minus = f(nullptr);
        coord = saved;

        const double fd = (f_plus - f_minus) / (2.0 * h);
        const double ad = grads[pi].data[ci];
        const double denom = std::max({std::abs(fd), std::abs(ad), 1e-8});
        result.max_rel_err = std::max(result.max_rel_err, std::abs(fd - ad) / denom);
    }
    return result;
}

}  // namespace meshattn
