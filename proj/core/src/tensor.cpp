#include "meshattn/tensor.hpp"

#include <cmath>

namespace meshattn {

bool Tensor::all_finite() const {
    for (double v : data) {
        if (!std::isfinite(v)) return false;
    }
    return true;
}

void matmul_acc(const double* a, const double* b, double* c, std::size_t r, std::size_t k,
                std::size_t n) {
    for (std::size_t i = 0; i < r; ++i) {
        const double* arow = a + i * k;
        double* crow = c + i * n;
        for (std::size_t l = 0; l < k; ++l) {
            const double av = arow[l];
            if (av == 0.0) continue;
            const double* brow = b + l * n;
            for (std::size_t j = 0; j < n; ++j) crow[j] += av * brow[j];
        }
    }
}

void matmul_tn_acc(const double* a, const double* b, double* c, std::size_t r, std::size_t k,
                   std::size_t n) {
    // c[i][j] += sum_l a[l][i] * b[l][j]; a is stored k x r.
    for (std::size_t l = 0; l < k; ++l) {
        const double* arow = a + l * r;
        const double* brow = b + l * n;
        for (std::size_t i = 0; i < r; ++i) {
            const double av = arow[i];
            if (av == 0.0) continue;
            double* crow = c + i * n;
            for (std::size_t j = 0; j < n; ++j) crow[j] += av * brow[j];
        }
    }
}

void matmul_nt_acc(const double* a, const double* b, double* c, std::size_t r, std::size_t k,
                   std::size_t n) {
    // c[i][j] += sum_l a[i][l] * b[j][l]; b is stored n x k.
    for (std::size_t i = 0; i < r; ++i) {
        const double* arow = a + i * k;
        double* crow = c + i * n;
        for (std::size_t j = 0; j < n; ++j) {
            const double* brow = b + j * k;
            double acc = 0.0;
            for (std::size_t l = 0; l < k; ++l) acc += arow[l] * brow[l];
            crow[j] += acc;
        }
    }
}

}  // namespace meshattn
