#include "anmdisc/indep.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

#include <boost/math/special_functions/gamma.hpp>

#include "anmdisc/regress.hpp"
#include "anmdisc/rng.hpp"

namespace anmdisc {

std::string to_string(IndependenceMethod method) {
    switch (method) {
        case IndependenceMethod::HsicGamma: return "hsic-gamma";
        case IndependenceMethod::HsicPermutation: return "hsic-permutation";
        case IndependenceMethod::FisherZ: return "fisher-z";
    }
    return "unknown";
}

IndependenceMethod parse_hsic_method(const std::string& text) {
    if (text == "gamma") return IndependenceMethod::HsicGamma;
    if (text == "permutation") return IndependenceMethod::HsicPermutation;
    throw std::invalid_argument("unknown HSIC method '" + text + "' (expected gamma or permutation)");
}

void TestConfig::validate() const {
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0, 1)");
    if (hsic_method == IndependenceMethod::FisherZ)
        throw std::invalid_argument("residual tests must use an HSIC method");
    if (hsic_method == IndependenceMethod::HsicPermutation && permutations < 100)
        throw std::invalid_argument("permutation test needs at least 100 permutations");
    if (bandwidth.kind == BandwidthRule::Kind::Fixed && !(bandwidth.value > 0.0))
        throw std::invalid_argument("fixed bandwidth must be positive");
}

double median_bandwidth(const Eigen::MatrixXd& x) {
    const Eigen::Index n = x.rows();
    std::vector<double> d;
    d.reserve(static_cast<std::size_t>(n * (n - 1) / 2));
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const double v = (x.row(i) - x.row(j)).norm();
            if (v > 0) d.push_back(v);
        }
    if (d.empty()) return 0.0;
    const auto mid = d.begin() + static_cast<std::ptrdiff_t>(d.size() / 2);
    std::nth_element(d.begin(), mid, d.end());
    double m = *mid;
    if (d.size() % 2 == 0) m = 0.5 * (m + *std::max_element(d.begin(), mid));
    return m;
}

Eigen::MatrixXd gaussian_kernel(const Eigen::MatrixXd& x, double sigma) {
    if (!(sigma > 0)) throw std::invalid_argument("gaussian_kernel: bandwidth must be positive");
    const Eigen::Index n = x.rows();
    const double scale = -1.0 / (2.0 * sigma * sigma);
    Eigen::MatrixXd k(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        k(i, i) = 1.0;
        for (Eigen::Index j = i + 1; j < n; ++j) k(i, j) = k(j, i) = std::exp(scale * (x.row(i) - x.row(j)).squaredNorm());
    }
    return k;
}

Eigen::MatrixXd double_center(const Eigen::MatrixXd& k) {
    const Eigen::VectorXd row_mean = k.rowwise().mean();
    const Eigen::RowVectorXd col_mean = k.colwise().mean();
    const double grand = row_mean.mean();
    Eigen::MatrixXd c = k;
    c.colwise() -= row_mean;
    c.rowwise() -= col_mean;
    c.array() += grand;
    return c;
}

namespace {

void check_pair(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, Eigen::Index min_n) {
    if (x.rows() != y.rows()) throw std::invalid_argument("HSIC: x and y have different sample sizes");
    if (x.rows() < min_n)
        throw std::invalid_argument("HSIC: need at least " + std::to_string(min_n) + " observations");
    if (x.cols() < 1 || y.cols() < 1) throw std::invalid_argument("HSIC: empty block");
}

IndependenceResult degenerate(IndependenceMethod method, Eigen::Index n) {
    IndependenceResult r;
    r.method = method;
    r.sample_size = static_cast<int>(n);
    return r;
}

}  // namespace

double hsic_statistic(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, double bw_x, double bw_y) {
    check_pair(x, y, 3);
    const double n = static_cast<double>(x.rows());
    const Eigen::MatrixXd kc = double_center(gaussian_kernel(x, bw_x));
    const Eigen::MatrixXd l = gaussian_kernel(y, bw_y);
    // trace(K H L H) = sum((HKH) .* L) since H is symmetric and idempotent.
    return std::max(0.0, (kc.array() * l.array()).sum() / (n * n));
}

IndependenceResult hsic_pvalue_gamma(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, double bw_x, double bw_y) {
    check_pair(x, y, 20);
    const Eigen::Index n = x.rows();
    const double m = static_cast<double>(n);
    Eigen::MatrixXd k = gaussian_kernel(x, bw_x);
    Eigen::MatrixXd l = gaussian_kernel(y, bw_y);
    const Eigen::MatrixXd kc = double_center(k);
    const Eigen::MatrixXd lc = double_center(l);

    IndependenceResult r = degenerate(IndependenceMethod::HsicGamma, n);
    const double test_stat = (kc.array() * lc.array()).sum() / m;  // n * HSIC_b
    r.statistic = std::max(0.0, test_stat / m);

    Eigen::MatrixXd v = ((kc.array() * lc.array()) / 6.0).square();
    double var = (v.sum() - v.trace()) / m / (m - 1.0);
    var *= 72.0 * (m - 4.0) * (m - 5.0) / m / (m - 1.0) / (m - 2.0) / (m - 3.0);

    k.diagonal().setZero();
    l.diagonal().setZero();
    const double mu_x = k.sum() / m / (m - 1.0);
    const double mu_y = l.sum() / m / (m - 1.0);
    const double mean = (1.0 + mu_x * mu_y - mu_x - mu_y) / m;

    if (!(var > 0.0) || !(mean > 0.0) || !(test_stat > 0.0)) {
        r.statistic = 0.0;
        r.p_value = 1.0;
        return r;
    }
    const double shape = mean * mean / var;
    const double scale = var * m / mean;
    r.p_value = std::clamp(boost::math::gamma_q(shape, test_stat / scale), 0.0, 1.0);
    return r;
}

IndependenceResult hsic_pvalue_permutation(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, double bw_x,
                                           double bw_y, int permutations, std::uint64_t seed) {
    check_pair(x, y, 3);
    if (permutations < 100) throw std::invalid_argument("HSIC permutation test: need at least 100 permutations");
    const Eigen::Index n = x.rows();
    const double m = static_cast<double>(n);
    const Eigen::MatrixXd kc = double_center(gaussian_kernel(x, bw_x));
    const Eigen::MatrixXd lc = double_center(gaussian_kernel(y, bw_y));

    IndependenceResult r = degenerate(IndependenceMethod::HsicPermutation, n);
    const double observed = (kc.array() * lc.array()).sum();
    r.statistic = std::max(0.0, observed / (m * m));

    // Permuting the rows of y maps HLH to P(HLH)P', so only the pairing changes.
    const double tol = 1e-12 * std::abs(observed);
    int exceed = 0;
    std::vector<Eigen::Index> perm(static_cast<std::size_t>(n));
    for (int b = 0; b < permutations; ++b) {
        std::iota(perm.begin(), perm.end(), Eigen::Index{0});
        Rng rng(derive_seed(seed, static_cast<std::uint64_t>(b)));
        for (std::size_t i = perm.size() - 1; i > 0; --i) std::swap(perm[i], perm[rng.below(i + 1)]);
        double s = 0.0;
        for (Eigen::Index j = 0; j < n; ++j) {
            const Eigen::Index pj = perm[static_cast<std::size_t>(j)];
            for (Eigen::Index i = 0; i < n; ++i) s += kc(i, j) * lc(perm[static_cast<std::size_t>(i)], pj);
        }
        if (s >= observed - tol) ++exceed;
    }
    r.p_value = (1.0 + exceed) / (1.0 + permutations);
    return r;
}

IndependenceResult hsic_test(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, const TestConfig& config) {
    const double med_x = median_bandwidth(x);
    const double med_y = median_bandwidth(y);
    double bw_x = config.bandwidth.value;
    double bw_y = config.bandwidth.value;
    if (config.bandwidth.kind == BandwidthRule::Kind::MedianHeuristic) {
        bw_x = med_x;
        bw_y = med_y;
    }
    if (med_x == 0.0 || med_y == 0.0) {
        check_pair(x, y, 3);
        return degenerate(config.hsic_method, x.rows());
    }
    if (config.hsic_method == IndependenceMethod::HsicPermutation)
        return hsic_pvalue_permutation(x, y, bw_x, bw_y, config.permutations, config.permutation_seed);
    return hsic_pvalue_gamma(x, y, bw_x, bw_y);
}

IndependenceResult test_independence(const Dataset& data, NodeSet s, const Eigen::VectorXd& residuals,
                                     const TestConfig& config) {
    if (residuals.size() != data.num_rows())
        throw std::invalid_argument("test_independence: residual length differs from sample size");
    if (s.empty()) return degenerate(config.hsic_method, data.num_rows());
    return hsic_test(data.columns(s), residuals, config);
}

bool joint_residual_independence(const Eigen::MatrixXd& residuals, const TestConfig& config) {
    const Eigen::Index d = residuals.cols();
    if (d < 2) throw std::invalid_argument("joint_residual_independence: need at least two columns");
    const double pairs = static_cast<double>(d * (d - 1) / 2);
    const double level = config.alpha / pairs;
    for (Eigen::Index a = 0; a < d; ++a)
        for (Eigen::Index b = a + 1; b < d; ++b) {
            const Eigen::MatrixXd xa = residuals.col(a);
            const Eigen::MatrixXd xb = residuals.col(b);
            if (hsic_test(xa, xb, config).p_value < level) return false;
        }
    return true;
}

IndependenceResult fisher_z_partial_correlation(const Dataset& data, Node i, Node j, NodeSet s) {
    if (i == j) throw std::invalid_argument("fisher_z: i and j must differ");
    if (s.contains(i) || s.contains(j)) throw std::invalid_argument("fisher_z: i and j must not be in S");
    const int n = data.num_rows();
    const int k = s.size();
    if (n <= k + 3) throw std::invalid_argument("fisher_z: need n > |S| + 3");

    const Eigen::MatrixXd z = data.columns(s);
    const Eigen::VectorXd ri = fit_linear(z, data.column(i)).residuals;
    const Eigen::VectorXd rj = fit_linear(z, data.column(j)).residuals;
    const double denom = std::sqrt(ri.squaredNorm() * rj.squaredNorm());

    IndependenceResult r;
    r.method = IndependenceMethod::FisherZ;
    r.sample_size = n;
    const double corr = denom > 0.0 ? std::clamp(ri.dot(rj) / denom, -1.0, 1.0) : 0.0;
    r.partial_correlation = corr;
    if (std::abs(corr) >= 1.0 - 1e-15) {
        r.infinite_statistic = true;
        r.statistic = std::numeric_limits<double>::infinity();
        r.p_value = 0.0;
        return r;
    }
    r.statistic = std::abs(std::atanh(corr)) * std::sqrt(static_cast<double>(n - k - 3));
    r.p_value = std::erfc(r.statistic / std::sqrt(2.0));
    return r;
}

}  // namespace anmdisc
