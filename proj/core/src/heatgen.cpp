#include "meshattn/heatgen.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <random>

namespace meshattn {

namespace {

std::vector<std::pair<std::uint32_t, std::uint32_t>> knn_edges(const std::vector<double>& pts,
                                                               std::size_t n, std::size_t k) {
    std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
    std::vector<std::pair<double, std::uint32_t>> dist(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const double dx = pts[2 * i] - pts[2 * j];
            const double dy = pts[2 * i + 1] - pts[2 * j + 1];
            dist[j] = {dx * dx + dy * dy, static_cast<std::uint32_t>(j)};
        }
        const std::size_t take = std::min(k + 1, n);  // self sorts first
        std::partial_sort(dist.begin(), dist.begin() + take, dist.end());
        for (std::size_t j = 0; j < take; ++j) {
            if (dist[j].second == i) continue;
            edges.emplace_back(static_cast<std::uint32_t>(i), dist[j].second);
        }
    }
    return edges;
}

double cross(const double* o, const double* a, const double* b) {
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
}

// Andrew monotone chain; returns the indices on the hull boundary.
std::vector<std::uint32_t> convex_hull(const std::vector<double>& pts, std::size_t n) {
    std::vector<std::uint32_t> idx(n);
    for (std::uint32_t i = 0; i < n; ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&pts](std::uint32_t a, std::uint32_t b) {
        return std::pair(pts[2 * a], pts[2 * a + 1]) < std::pair(pts[2 * b], pts[2 * b + 1]);
    });
    std::vector<std::uint32_t> hull;
    auto build = [&](auto begin, auto end) {
        const std::size_t base = hull.size();
        for (auto it = begin; it != end; ++it) {
            while (hull.size() >= base + 2 &&
                   cross(&pts[2 * hull[hull.size() - 2]], &pts[2 * hull.back()],
                         &pts[2 * *it]) <= 0.0) {
                hull.pop_back();
            }
            hull.push_back(*it);
        }
        hull.pop_back();
    };
    build(idx.begin(), idx.end());
    build(idx.rbegin(), idx.rend());
    return hull;
}

bool connected(const Graph& g) {
    if (g.num_nodes == 0) return false;
    std::vector<std::vector<std::uint32_t>> adj(g.num_nodes);
    for (const auto& [a, b] : g.edges) adj[a].push_back(b);
    std::vector<char> seen(g.num_nodes, 0);
    std::deque<std::uint32_t> queue{0};
    seen[0] = 1;
    std::size_t reached = 1;
    while (!queue.empty()) {
        const std::uint32_t u = queue.front();
        queue.pop_front();
        for (std::uint32_t v : adj[u]) {
            if (!seen[v]) {
                seen[v] = 1;
                ++reached;
                queue.push_back(v);
            }
        }
    }
    return reached == g.num_nodes;
}

}  // namespace

Trajectory gen_heat_trajectory(const HeatGenConfig& cfg) {
    if (cfg.num_points < 3 || cfg.num_frames < 1 || cfg.k_neighbors < 1) {
        raise(ErrorCode::InvalidConfig, "heat generator needs >=3 points, >=1 frame, k >= 1");
    }

    Graph graph;
    std::uint64_t seed = cfg.seed;
    bool ok = false;
    for (std::size_t attempt = 0; attempt <= cfg.max_retries; ++attempt) {
        std::mt19937_64 rng(seed + attempt);
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        std::vector<double> pts(cfg.num_points * 2);
        for (double& v : pts) v = unit(rng);

        const auto edges = knn_edges(pts, cfg.num_points, cfg.k_neighbors);
        std::vector<NodeType> types(cfg.num_points, NodeType::Normal);
        for (std::uint32_t h : convex_hull(pts, cfg.num_points)) types[h] = NodeType::Wall;

        graph = build_graph(pts, 2, types, edges);
        if (connected(graph)) {
            ok = true;
            seed += attempt;  // keep the accepted sample's seed for the field draw
            break;
        }
    }
    if (!ok) {
        raise(ErrorCode::DegenerateGeometry,
              "no connected k-NN sample within the retry budget");
    }

    const std::size_t n = graph.num_nodes;
    std::vector<std::vector<std::uint32_t>> adj(n);
    for (const auto& [a, b] : graph.edges) adj[a].push_back(b);
    std::size_t deg_max = 0;
    for (const auto& nbrs : adj) deg_max = std::max(deg_max, nbrs.size());

    const double denom = cfg.kappa * static_cast<double>(deg_max);
    const double dt = denom > 0.0 ? 0.4 / denom : 1.0;

    // Initial condition: a few smooth Gaussian bumps, values bounded in [0, ~3].
    std::mt19937_64 field_rng(seed ^ 0x5eedf1e1dULL);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<double> u(n, 0.0);
    const int bumps = 3;
    for (int b = 0; b < bumps; ++b) {
        const double cx = unit(field_rng);
        const double cy = unit(field_rng);
        const double amp = 0.5 + unit(field_rng);
        const double width = 0.05 + 0.1 * unit(field_rng);
        for (std::size_t i = 0; i < n; ++i) {
            const double dx = graph.coord(i, 0) - cx;
            const double dy = graph.coord(i, 1) - cy;
            u[i] += amp * std::exp(-(dx * dx + dy * dy) / (2.0 * width * width));
        }
    }

    Trajectory traj;
    traj.graph = graph;
    traj.num_frames = cfg.num_frames;
    traj.num_fields = 1;
    traj.fields.resize(cfg.num_frames * n);
    traj.dt = dt;
    traj.field_names = {"u"};
    traj.dynamic_mask = {true};
    traj.history_depth = 0;

    for (std::size_t t = 0; t < cfg.num_frames; ++t) {
        std::copy(u.begin(), u.end(), traj.fields.begin() + t * n);
        if (t + 1 == cfg.num_frames) break;
        std::vector<double> next(n);
        for (std::size_t i = 0; i < n; ++i) {
            double lap = static_cast<double>(adj[i].size()) * u[i];
            for (std::uint32_t j : adj[i]) lap -= u[j];
            next[i] = u[i] - dt * cfg.kappa * lap;
        }
        u = std::move(next);
    }
    return traj;
}

std::vector<Trajectory> gen_heat_dataset(const HeatGenConfig& cfg, std::size_t count) {
    std::vector<Trajectory> trajs;
    trajs.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        HeatGenConfig one = cfg;
        one.seed = cfg.seed * 1000003ULL + 17ULL * i + i;
        trajs.push_back(gen_heat_trajectory(one));
    }
    return trajs;
}

}  // namespace meshattn
