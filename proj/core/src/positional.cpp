#include "meshattn/positional.hpp"

#include <Eigen/Dense>

#include <cmath>

namespace meshattn {

std::size_t pe_width(const PeSpec& spec, std::size_t coord_dim) {
    switch (spec.mode) {
        case PeMode::None: return 0;
        case PeMode::Coords: return coord_dim;
        case PeMode::LaplacianEig:
        case PeMode::RandomWalk: return spec.num_components;
    }
    return 0;
}

namespace {

std::vector<double> laplacian_eig_pe(const Graph& g, std::size_t m, PeInfo* info) {
    const std::size_t n = g.num_nodes;
    if (m >= n) raise(ErrorCode::InvalidConfig, "LaplacianEig needs m < N");

    std::vector<double> degree(n, 0.0);
    for (const auto& [s, r] : g.edges) degree[s] += 1.0;

    Eigen::MatrixXd lap = Eigen::MatrixXd::Zero(n, n);
    for (std::size_t i = 0; i < n; ++i) lap(i, i) = degree[i] > 0.0 ? 1.0 : 0.0;
    for (const auto& [s, r] : g.edges) {
        lap(s, r) = -1.0 / std::sqrt(degree[s] * degree[r]);
    }

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(lap);
    if (solver.info() != Eigen::Success) {
        raise(ErrorCode::EigenFailure, "Laplacian eigendecomposition did not converge");
    }

    const double zero_tol = 1e-8;
    std::size_t num_zero = 0;
    for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i) {
        if (solver.eigenvalues()(i) < zero_tol) ++num_zero;
    }
    if (info) info->disconnected = num_zero > 1;

    if (num_zero + m > n) {
        raise(ErrorCode::InvalidConfig, "not enough nonzero Laplacian eigenvalues");
    }

    std::vector<double> pe(n * m, 0.0);
    for (std::size_t c = 0; c < m; ++c) {
        Eigen::VectorXd vec = solver.eigenvectors().col(static_cast<Eigen::Index>(num_zero + c));
        Eigen::Index argmax = 0;
        vec.cwiseAbs().maxCoeff(&argmax);
        if (vec(argmax) < 0.0) vec = -vec;  // largest-magnitude entry positive
        for (std::size_t i = 0; i < n; ++i) pe[i * m + c] = vec(static_cast<Eigen::Index>(i));
    }
    return pe;
}

std::vector<double> random_walk_pe(const Graph& g, std::size_t m) {
    const std::size_t n = g.num_nodes;
    const SparseMask adj = adjacency_mask(g, /*self_loops=*/false);
    std::vector<double> inv_degree(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t d = adj.row_nnz(i);
        if (d > 0) inv_degree[i] = 1.0 / static_cast<double>(d);
    }

    std::vector<double> pe(n * m, 0.0);
    std::vector<double> cur(n), next(n);
    for (std::size_t start = 0; start < n; ++start) {
        std::fill(cur.begin(), cur.end(), 0.0);
        cur[start] = 1.0;
        for (std::size_t step = 1; step <= m; ++step) {
            std::fill(next.begin(), next.end(), 0.0);
            for (std::size_t i = 0; i < n; ++i) {
                if (cur[i] == 0.0) continue;
                const double w = cur[i] * inv_degree[i];
                for (const std::uint32_t* j = adj.row_begin(i); j != adj.row_end(i); ++j) {
                    next[*j] += w;
                }
            }
            cur.swap(next);
            pe[start * m + (step - 1)] = cur[start];
        }
    }
    return pe;
}

}  // namespace

std::vector<double> positional_encoding(const Graph& g, const PeSpec& spec, PeInfo* info) {
    if (info) *info = PeInfo{};
    switch (spec.mode) {
        case PeMode::None:
            return {};
        case PeMode::Coords:
            return g.coords;
        case PeMode::LaplacianEig:
            return laplacian_eig_pe(g, spec.num_components, info);
        case PeMode::RandomWalk:
            return random_walk_pe(g, spec.num_components);
    }
    return {};
}

}  // namespace meshattn
