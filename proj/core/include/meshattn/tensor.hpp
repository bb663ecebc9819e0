#pragma once

#include <cstddef>
#include <vector>

#include "meshattn/errors.hpp"

namespace meshattn {

/// Dense row-major real tensor. The autodiff engine runs in 64-bit precision
/// throughout; 32-bit is only used at the storage boundary (checkpoints and
/// trajectory blobs).
struct Tensor {
    std::vector<std::size_t> shape;
    std::vector<double> data;

    Tensor() = default;
    Tensor(std::vector<std::size_t> s, double fill = 0.0)
        : shape(std::move(s)), data(count(shape), fill) {}

    static std::size_t count(const std::vector<std::size_t>& s) {
        std::size_t n = 1;
        for (std::size_t d : s) n *= d;
        return s.empty() ? 0 : n;
    }

    std::size_t size() const { return data.size(); }
    std::size_t rows() const { return shape.empty() ? 0 : shape[0]; }
    std::size_t cols() const { return shape.size() < 2 ? (shape.empty() ? 0 : 1) : shape[1]; }

    double& at(std::size_t i, std::size_t j) { return data[i * cols() + j]; }
    double at(std::size_t i, std::size_t j) const { return data[i * cols() + j]; }

    bool same_shape(const Tensor& other) const { return shape == other.shape; }
    bool all_finite() const;

    static Tensor zeros_like(const Tensor& t) { return Tensor(t.shape); }
    static Tensor matrix(std::size_t r, std::size_t c, double fill = 0.0) {
        return Tensor({r, c}, fill);
    }
    static Tensor vec(std::size_t n, double fill = 0.0) { return Tensor({n}, fill); }
};

// Row-major matrix products used by the tape's backward rules.
// c (r x n) = a (r x k) * b (k x n), accumulated into c.
void matmul_acc(const double* a, const double* b, double* c, std::size_t r, std::size_t k,
                std::size_t n);
// c (r x n) += a^T (r x k stored k x r) * b (k x n)
void matmul_tn_acc(const double* a, const double* b, double* c, std::size_t r, std::size_t k,
                   std::size_t n);
// c (r x n) += a (r x k) * b^T (k x n stored n x k)
void matmul_nt_acc(const double* a, const double* b, double* c, std::size_t r, std::size_t k,
                   std::size_t n);

}  // namespace meshattn
