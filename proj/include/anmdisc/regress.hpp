#pragma once

#include <optional>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

#include "anmdisc/dataset.hpp"
#include "anmdisc/graph.hpp"

namespace anmdisc {

enum class RegressorKind { Linear, GaussianProcess };

std::string to_string(RegressorKind kind);
RegressorKind parse_regressor_kind(const std::string& text);

struct GpConfig {
    int starts = 5;
    int max_iter = 200;
};

/// Kernel hyperparameters on the standardized scale the GP is fitted on.
struct GpHyperparameters {
    double length_scale = 1.0;
    double signal_variance = 1.0;
    double noise_variance = 0.1;
};

struct FitDiagnostics {
    double rss = 0.0;
    std::optional<double> log_marginal_likelihood;  // GP only
    std::optional<GpHyperparameters> hyperparameters;  // GP only
    int successful_starts = 0;  // GP only
};

struct FitResult {
    Eigen::VectorXd residuals;
    FitDiagnostics diagnostics;
};

class RegressionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Least squares with intercept. k = 0 gives y - mean(y).
FitResult fit_linear(const Eigen::MatrixXd& x, const Eigen::VectorXd& y);

/// GP regression with a squared-exponential kernel (one shared length-scale),
/// signal and noise variance chosen by maximizing the log marginal likelihood
/// from `config.starts` deterministic starting points. Inputs and response are
/// standardized internally; residuals are on the original response scale.
FitResult fit_gp(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const GpConfig& config = {});

/// Residuals of column i regressed on the columns in s (i must not be in s).
FitResult fitted_noise_values(const Dataset& data, NodeSet s, Node i, RegressorKind kind,
                              const GpConfig& gp = {});

}  // namespace anmdisc
