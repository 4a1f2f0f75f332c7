#pragma once

// Independent reference computations used only by the tests.

#include <cmath>
#include <functional>
#include <tuple>
#include <vector>

#include <Eigen/Dense>

#include "anmdisc/graph.hpp"

namespace oracle {

using anmdisc::Dag;
using anmdisc::Node;
using anmdisc::NodeSet;

/// d-separation by enumerating every simple path of the skeleton.
inline bool d_separated_by_paths(const Dag& g, NodeSet a, NodeSet b, NodeSet s) {
    const int d = g.num_nodes();
    std::vector<Node> path;
    std::vector<bool> on_path(static_cast<std::size_t>(d), false);

    auto blocked = [&](const std::vector<Node>& p) {
        for (std::size_t k = 1; k + 1 < p.size(); ++k) {
            const Node prev = p[k - 1], v = p[k], next = p[k + 1];
            const bool collider = g.has_edge(prev, v) && g.has_edge(next, v);
            if (collider) {
                if ((g.descendants(v) & s).empty()) return true;
            } else if (s.contains(v)) {
                return true;
            }
        }
        return false;
    };

    bool open_path_found = false;
    std::function<void(Node)> walk = [&](Node v) {
        if (open_path_found) return;
        if (b.contains(v) && path.size() > 1) {
            if (!blocked(path)) open_path_found = true;
            return;
        }
        for (Node w = 0; w < d; ++w) {
            if (on_path[static_cast<std::size_t>(w)] || !g.adjacent(v, w)) continue;
            path.push_back(w);
            on_path[static_cast<std::size_t>(w)] = true;
            walk(w);
            on_path[static_cast<std::size_t>(w)] = false;
            path.pop_back();
        }
    };
    for (Node start : a.to_vector()) {
        path = {start};
        std::fill(on_path.begin(), on_path.end(), false);
        on_path[static_cast<std::size_t>(start)] = true;
        walk(start);
        if (open_path_found) return false;
    }
    return true;
}

/// All (A, B, S) with A, B nonempty and the three sets pairwise disjoint.
inline std::vector<std::tuple<NodeSet, NodeSet, NodeSet>> disjoint_triples(int d) {
    std::vector<std::tuple<NodeSet, NodeSet, NodeSet>> out;
    int total = 1;
    for (int k = 0; k < d; ++k) total *= 4;  // each node: none, A, B, S
    for (int code = 0; code < total; ++code) {
        NodeSet a, b, s;
        int c = code;
        for (Node v = 0; v < d; ++v) {
            switch (c % 4) {
                case 1: a.insert(v); break;
                case 2: b.insert(v); break;
                case 3: s.insert(v); break;
                default: break;
            }
            c /= 4;
        }
        if (!a.empty() && !b.empty()) out.emplace_back(a, b, s);
    }
    return out;
}

/// The graph's full d-separation relation, as a bit vector over disjoint_triples.
inline std::vector<bool> separation_signature(const Dag& g) {
    std::vector<bool> sig;
    for (const auto& [a, b, s] : disjoint_triples(g.num_nodes())) sig.push_back(d_separated_by_paths(g, a, b, s));
    return sig;
}

/// trace(K H L H) / n^2 by explicit sums over indices.
inline double hsic_by_summation(const std::vector<double>& x, const std::vector<double>& y, double sx, double sy) {
    const std::size_t n = x.size();
    auto k = [&](std::size_t i, std::size_t j) { return std::exp(-(x[i] - x[j]) * (x[i] - x[j]) / (2 * sx * sx)); };
    auto l = [&](std::size_t i, std::size_t j) { return std::exp(-(y[i] - y[j]) * (y[i] - y[j]) / (2 * sy * sy)); };
    auto h = [&](std::size_t i, std::size_t j) { return (i == j ? 1.0 : 0.0) - 1.0 / static_cast<double>(n); };
    double total = 0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t p = 0; p < n; ++p)
                for (std::size_t q = 0; q < n; ++q) total += k(i, j) * h(j, p) * l(p, q) * h(q, i);
    return total / static_cast<double>(n * n);
}

/// Least-squares line by exhaustive grid search over (slope, intercept).
inline std::pair<double, double> grid_search_line(const std::vector<double>& x, const std::vector<double>& y,
                                                  double lo, double hi, double step) {
    double best = INFINITY, best_slope = 0, best_icpt = 0;
    const int steps = static_cast<int>(std::round((hi - lo) / step));
    for (int a = 0; a <= steps; ++a)
        for (int b = 0; b <= steps; ++b) {
            const double slope = lo + a * step, icpt = lo + b * step;
            double rss = 0;
            for (std::size_t i = 0; i < x.size(); ++i) rss += std::pow(y[i] - slope * x[i] - icpt, 2);
            if (rss < best) {
                best = rss;
                best_slope = slope;
                best_icpt = icpt;
            }
        }
    return {best_slope, best_icpt};
}

/// Covariance of a linear Gaussian SEM x = B x + diag(scale) N, with B[child][parent].
inline Eigen::MatrixXd linear_sem_covariance(const Eigen::MatrixXd& b, const Eigen::VectorXd& noise_sd) {
    const Eigen::Index d = b.rows();
    const Eigen::MatrixXd a = (Eigen::MatrixXd::Identity(d, d) - b).inverse();
    return a * noise_sd.array().square().matrix().asDiagonal() * a.transpose();
}

/// Partial correlation of i and j given `given` from a covariance matrix (precision route).
inline double partial_correlation_from_cov(const Eigen::MatrixXd& cov, int i, int j, const std::vector<int>& given) {
    std::vector<int> idx = {i, j};
    idx.insert(idx.end(), given.begin(), given.end());
    Eigen::MatrixXd sub(idx.size(), idx.size());
    for (std::size_t r = 0; r < idx.size(); ++r)
        for (std::size_t c = 0; c < idx.size(); ++c) sub(r, c) = cov(idx[r], idx[c]);
    const Eigen::MatrixXd p = sub.inverse();
    return -p(0, 1) / std::sqrt(p(0, 0) * p(1, 1));
}

}  // namespace oracle
