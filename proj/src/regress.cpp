#include "anmdisc/regress.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

namespace anmdisc {

std::string to_string(RegressorKind kind) {
    return kind == RegressorKind::Linear ? "linear" : "gp";
}

RegressorKind parse_regressor_kind(const std::string& text) {
    if (text == "linear") return RegressorKind::Linear;
    if (text == "gp") return RegressorKind::GaussianProcess;
    throw std::invalid_argument("unknown regressor '" + text + "' (expected linear or gp)");
}

FitResult fit_linear(const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
    const Eigen::Index n = y.size();
    const Eigen::Index k = x.cols();
    if (x.rows() != n) throw RegressionError("fit_linear: X and y have different row counts");
    if (n < k + 2) throw RegressionError("fit_linear: need n >= k + 2 observations");
    if (!x.allFinite() || !y.allFinite()) throw RegressionError("fit_linear: non-finite input");

    FitResult fit;
    if (k == 0) {
        fit.residuals = y.array() - y.mean();
    } else {
        // Centering absorbs the intercept and keeps the QR well conditioned.
        const Eigen::RowVectorXd x_mean = x.colwise().mean();
        const Eigen::MatrixXd xc = x.rowwise() - x_mean;
        const Eigen::VectorXd yc = y.array() - y.mean();
        Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(xc);
        qr.setThreshold(1e-10);
        if (qr.rank() < k) throw RegressionError("fit_linear: design matrix is rank deficient");
        const Eigen::VectorXd beta = qr.solve(yc);
        fit.residuals = yc - xc * beta;
    }
    fit.diagnostics.rss = fit.residuals.squaredNorm();
    return fit;
}

namespace {

constexpr double kJitterStart = 1e-8;
constexpr double kJitterMax = 1e-2;

// Box for the log-hyperparameters (log length-scale, log signal var, log noise var)
// on the standardized scale.
constexpr std::array<double, 3> kLower = {-4.6, -9.2, -13.8};  // 0.01, 1e-4, 1e-6
constexpr std::array<double, 3> kUpper = {4.6, 4.6, 2.3};      // 100, 100, 10

using Params = Eigen::Vector3d;

Params clamp_box(Params p) {
    for (int j = 0; j < 3; ++j) p[j] = std::clamp(p[j], kLower[j], kUpper[j]);
    return p;
}

class GpObjective {
public:
    GpObjective(Eigen::MatrixXd sq_dist, Eigen::VectorXd y) : d2_(std::move(sq_dist)), y_(std::move(y)) {}

    struct Eval {
        bool ok = false;
        double value = -std::numeric_limits<double>::infinity();
        Params grad = Params::Zero();
        Eigen::VectorXd alpha;
    };

    Eval evaluate(const Params& p, bool want_grad) const {
        const double ell = std::exp(p[0]);
        const double sf2 = std::exp(p[1]);
        const double sn2 = std::exp(p[2]);
        const Eigen::Index n = y_.size();

        Eigen::MatrixXd kf = (d2_.array() * (-0.5 / (ell * ell))).exp() * sf2;
        Eval out;
        Eigen::LLT<Eigen::MatrixXd> llt;
        double jitter = kJitterStart;
        while (true) {
            Eigen::MatrixXd k = kf;
            k.diagonal().array() += sn2 + jitter * sf2;
            llt.compute(k);
            if (llt.info() == Eigen::Success) break;
            jitter *= 2.0;
            if (jitter > kJitterMax) return out;
        }
        out.alpha = llt.solve(y_);
        const Eigen::MatrixXd& l = llt.matrixLLT();
        const double log_det_half = l.diagonal().array().log().sum();
        out.value = -0.5 * y_.dot(out.alpha) - log_det_half - 0.5 * static_cast<double>(n) * std::log(2.0 * std::numbers::pi);
        if (!std::isfinite(out.value)) return out;
        out.ok = true;
        if (want_grad) {
            Eigen::MatrixXd q = -llt.solve(Eigen::MatrixXd::Identity(n, n));
            q.noalias() += out.alpha * out.alpha.transpose();
            const double g_signal = 0.5 * (q.array() * kf.array()).sum();
            const double g_length = 0.5 * (q.array() * kf.array() * d2_.array()).sum() / (ell * ell);
            const double g_noise = 0.5 * sn2 * q.trace();
            out.grad = Params(g_length, g_signal, g_noise);
        }
        return out;
    }

    Eigen::VectorXd posterior_mean(const Params& p, const Eigen::VectorXd& alpha) const {
        const double ell = std::exp(p[0]);
        const double sf2 = std::exp(p[1]);
        const Eigen::MatrixXd kf = (d2_.array() * (-0.5 / (ell * ell))).exp() * sf2;
        return kf * alpha;
    }

private:
    Eigen::MatrixXd d2_;
    Eigen::VectorXd y_;
};

struct OptimumResult {
    bool ok = false;
    Params params = Params::Zero();
    double value = -std::numeric_limits<double>::infinity();
    Eigen::VectorXd alpha;
};

// Projected BFGS ascent with Armijo backtracking.
OptimumResult maximize(const GpObjective& objective, Params start, int max_iter) {
    OptimumResult best;
    Params p = clamp_box(start);
    auto cur = objective.evaluate(p, true);
    if (!cur.ok) return best;
    Eigen::Matrix3d h_inv = Eigen::Matrix3d::Identity();

    for (int iter = 0; iter < max_iter; ++iter) {
        Params dir = h_inv * cur.grad;
        if (dir.dot(cur.grad) <= 0.0) {
            h_inv.setIdentity();
            dir = cur.grad;
        }
        const double max_step = dir.cwiseAbs().maxCoeff();
        if (max_step > 2.0) dir *= 2.0 / max_step;

        double step = 1.0;
        GpObjective::Eval next;
        Params p_next;
        bool accepted = false;
        for (int ls = 0; ls < 10; ++ls) {
            p_next = clamp_box(p + step * dir);
            next = objective.evaluate(p_next, false);
            if (next.ok && next.value >= cur.value + 1e-4 * cur.grad.dot(p_next - p)) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) break;
        next = objective.evaluate(p_next, true);
        if (!next.ok) break;

        const Params s = p_next - p;
        const Params yk = cur.grad - next.grad;  // gradient of the negated objective
        const double improvement = next.value - cur.value;
        const double sy = s.dot(yk);
        if (sy > 1e-12) {
            const double rho = 1.0 / sy;
            const Eigen::Matrix3d id = Eigen::Matrix3d::Identity();
            h_inv = (id - rho * s * yk.transpose()) * h_inv * (id - rho * yk * s.transpose()) + rho * s * s.transpose();
        }
        p = p_next;
        cur = std::move(next);

        // Gradient components pinned against the box do not count toward convergence.
        Params free_grad = cur.grad;
        for (int j = 0; j < 3; ++j) {
            if ((p[j] <= kLower[j] && free_grad[j] < 0) || (p[j] >= kUpper[j] && free_grad[j] > 0)) free_grad[j] = 0;
        }
        if (free_grad.norm() < 1e-4 || improvement < 1e-7 * (1.0 + std::abs(cur.value))) break;
    }
    best.ok = true;
    best.params = p;
    best.value = cur.value;
    best.alpha = cur.alpha;
    return best;
}

double median_of(std::vector<double> v) {
    if (v.empty()) return 0.0;
    const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
    std::nth_element(v.begin(), mid, v.end());
    double m = *mid;
    if (v.size() % 2 == 0) m = 0.5 * (m + *std::max_element(v.begin(), mid));
    return m;
}

}  // namespace

FitResult fit_gp(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const GpConfig& config) {
    const Eigen::Index n = y.size();
    if (x.rows() != n) throw RegressionError("fit_gp: X and y have different row counts");
    if (n < 20) throw RegressionError("fit_gp: need at least 20 observations");
    if (x.cols() < 1) throw RegressionError("fit_gp: need at least one input column");
    if (!x.allFinite() || !y.allFinite()) throw RegressionError("fit_gp: non-finite input");
    if (config.starts < 1 || config.max_iter < 1) throw RegressionError("fit_gp: starts and max_iter must be positive");

    const double y_mean = y.mean();
    const double y_sd = std::sqrt((y.array() - y_mean).square().sum() / static_cast<double>(n - 1));
    FitResult fit;
    if (!(y_sd > 1e-12 * (1.0 + std::abs(y_mean)))) {
        fit.residuals = y.array() - y_mean;
        fit.diagnostics.rss = fit.residuals.squaredNorm();
        return fit;
    }
    const Eigen::VectorXd ys = (y.array() - y_mean) / y_sd;

    Eigen::MatrixXd xs = x.rowwise() - x.colwise().mean();
    for (Eigen::Index c = 0; c < xs.cols(); ++c) {
        const double sd = std::sqrt(xs.col(c).squaredNorm() / static_cast<double>(n - 1));
        if (sd > 0) xs.col(c) /= sd;
    }

    Eigen::MatrixXd d2(n, n);
    std::vector<double> dists;
    dists.reserve(static_cast<std::size_t>(n * (n - 1) / 2));
    for (Eigen::Index i = 0; i < n; ++i) {
        d2(i, i) = 0.0;
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const double v = (xs.row(i) - xs.row(j)).squaredNorm();
            d2(i, j) = d2(j, i) = v;
            if (v > 0) dists.push_back(std::sqrt(v));
        }
    }
    double median_dist = median_of(std::move(dists));
    if (!(median_dist > 0)) median_dist = 1.0;

    static constexpr std::array<std::array<double, 2>, 5> kStartGrid = {{
        {1.0, 0.1}, {0.5, 0.01}, {2.0, 0.5}, {0.25, 0.05}, {4.0, 0.2},
    }};

    const GpObjective objective(std::move(d2), ys);
    OptimumResult best;
    int successes = 0;
    for (int s = 0; s < config.starts; ++s) {
        const auto& g = kStartGrid[static_cast<std::size_t>(s) % kStartGrid.size()];
        const double spread = std::pow(3.0, static_cast<double>(s / static_cast<int>(kStartGrid.size())));
        const Params start(std::log(g[0] * median_dist * spread), 0.0, std::log(g[1]));
        OptimumResult r = maximize(objective, start, config.max_iter);
        if (!r.ok) continue;
        ++successes;
        if (!best.ok || r.value > best.value) best = std::move(r);
    }
    if (!best.ok)
        throw RegressionError("fit_gp: marginal likelihood optimization failed from all " +
                              std::to_string(config.starts) + " starts (kernel matrix not factorizable)");

    const Eigen::VectorXd mean = objective.posterior_mean(best.params, best.alpha);
    fit.residuals = (ys - mean) * y_sd;
    fit.diagnostics.rss = fit.residuals.squaredNorm();
    fit.diagnostics.log_marginal_likelihood = best.value;
    fit.diagnostics.hyperparameters =
        GpHyperparameters{std::exp(best.params[0]), std::exp(best.params[1]), std::exp(best.params[2])};
    fit.diagnostics.successful_starts = successes;
    return fit;
}

FitResult fitted_noise_values(const Dataset& data, NodeSet s, Node i, RegressorKind kind, const GpConfig& gp) {
    if (i < 0 || i >= data.num_cols()) throw std::out_of_range("fitted_noise_values: node out of range");
    if (s.contains(i)) throw std::invalid_argument("fitted_noise_values: target is in the regressor set");
    const Eigen::VectorXd y = data.column(i);
    if (s.empty()) return fit_linear(Eigen::MatrixXd(y.size(), 0), y);
    const Eigen::MatrixXd x = data.columns(s);
    return kind == RegressorKind::Linear ? fit_linear(x, y) : fit_gp(x, y, gp);
}

}  // namespace anmdisc
