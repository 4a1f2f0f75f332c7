#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include <Eigen/Dense>

#include "anmdisc/dataset.hpp"
#include "anmdisc/graph.hpp"

namespace anmdisc {

enum class IndependenceMethod { HsicGamma, HsicPermutation, FisherZ };

std::string to_string(IndependenceMethod method);
/// Accepts "gamma" or "permutation".
IndependenceMethod parse_hsic_method(const std::string& text);

struct IndependenceResult {
    double statistic = 0.0;
    double p_value = 1.0;
    IndependenceMethod method = IndependenceMethod::HsicGamma;
    int sample_size = 0;
    bool infinite_statistic = false;           // Fisher-z with |r| = 1
    std::optional<double> partial_correlation;  // Fisher-z only

    bool rejects(double alpha) const { return p_value < alpha; }
};

struct BandwidthRule {
    enum class Kind { MedianHeuristic, Fixed };
    Kind kind = Kind::MedianHeuristic;
    double value = 1.0;  // used when kind == Fixed

    static BandwidthRule median() { return {}; }
    static BandwidthRule fixed(double sigma) { return {Kind::Fixed, sigma}; }
};

struct TestConfig {
    double alpha = 0.05;
    IndependenceMethod hsic_method = IndependenceMethod::HsicGamma;
    int permutations = 1000;
    BandwidthRule bandwidth;
    std::uint64_t permutation_seed = 0;

    void validate() const;
};

/// Median of the nonzero pairwise Euclidean distances between rows; 0 when all rows coincide.
double median_bandwidth(const Eigen::MatrixXd& x);

/// K(a, b) = exp(-|a - b|^2 / (2 sigma^2)).
Eigen::MatrixXd gaussian_kernel(const Eigen::MatrixXd& x, double sigma);

/// H K H with H = I - 11'/n.
Eigen::MatrixXd double_center(const Eigen::MatrixXd& k);

/// Biased HSIC: trace(K H L H) / n^2.
double hsic_statistic(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, double bw_x, double bw_y);

/// p-value from the moment-matched gamma approximation of the null law of n * HSIC.
IndependenceResult hsic_pvalue_gamma(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, double bw_x, double bw_y);

/// Monte Carlo p-value (1 + #{perm stat >= observed}) / (B + 1). Permutation b is
/// drawn from a stream derived from (seed, b), so the result depends only on the seed.
IndependenceResult hsic_pvalue_permutation(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, double bw_x,
                                           double bw_y, int permutations, std::uint64_t seed);

/// HSIC test with bandwidths and null approximation taken from `config`.
/// A constant block (all pairwise distances zero) gives statistic 0 and p = 1.
IndependenceResult hsic_test(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, const TestConfig& config);

/// Residual vs. the regressor block S. Empty S passes with p = 1.
IndependenceResult test_independence(const Dataset& data, NodeSet s, const Eigen::VectorXd& residuals,
                                     const TestConfig& config);

/// Pairwise HSIC on all column pairs at Bonferroni level alpha / #pairs.
/// True iff no pair rejects.
bool joint_residual_independence(const Eigen::MatrixXd& residuals, const TestConfig& config);

/// Fisher-z test of the partial correlation of columns i and j given S.
IndependenceResult fisher_z_partial_correlation(const Dataset& data, Node i, Node j, NodeSet s);

}  // namespace anmdisc
