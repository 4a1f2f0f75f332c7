#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "anmdisc/dataset.hpp"
#include "anmdisc/graph.hpp"

namespace anmdisc {

/// g(x) applied to a single parent inside a mechanism term.
enum class TermKind {
    Linear,         // x
    ShiftedSquare,  // (x + 1)^2
    GaussBump,      // exp(-2 x^2)
    Cube,           // x^3
    Tanh,           // tanh(x)
};

struct Term {
    Node input;
    TermKind kind = TermKind::Linear;
    double coefficient = 1.0;
};

enum class NoiseCombination {
    Additive,        // x = f(pa) + scale * N
    Multiplicative,  // x = f(pa) * scale * N
};

/// f(pa) = offset + sum of coefficient * g(input).
struct Mechanism {
    std::vector<Term> terms;
    double offset = 0.0;
    NoiseCombination combination = NoiseCombination::Additive;

    double evaluate(const Eigen::Ref<const Eigen::RowVectorXd>& row) const;
};

struct NoiseSpec {
    enum class Kind { Gaussian, Uniform };
    Kind kind = Kind::Gaussian;
    double a = 0.0;  // mean, or lower bound
    double b = 1.0;  // standard deviation, or upper bound
    double scale = 1.0;

    static NoiseSpec gaussian(double mean, double sd, double scale = 1.0) { return {Kind::Gaussian, mean, sd, scale}; }
    static NoiseSpec uniform(double lo, double hi, double scale = 1.0) { return {Kind::Uniform, lo, hi, scale}; }
};

/// Structural equation model: X_i = f_i(PA_i, N_i) with jointly independent N_i.
struct SemSpec {
    std::vector<std::string> names;
    std::vector<Mechanism> mechanisms;
    std::vector<NoiseSpec> noise;

    int num_nodes() const { return static_cast<int>(names.size()); }
    /// Graph induced by the term inputs. Throws on cycles.
    Dag dag() const;
    /// Checks sizes, noise parameters, term inputs and acyclicity.
    void validate() const;
};

struct Simulation {
    Dataset data;
    Eigen::MatrixXd noise;  // raw N draws (before scale), n x d
};

/// Ancestral sampling. Node i draws its noise from a stream derived from (seed, i).
Simulation simulate_with_noise(const SemSpec& spec, int n, std::uint64_t seed);
Dataset simulate(const SemSpec& spec, int n, std::uint64_t seed);

using CoefficientRecord = std::vector<std::pair<std::string, double>>;

struct NamedInstance {
    std::string name;
    SemSpec spec;
    Dag truth{1};
    CoefficientRecord coefficients;
    Simulation sample;
};

inline constexpr int kDefaultSampleSize = 400;

/// Gaussian diamond X1 -> {X2, X3} -> X4 with alpha ~ U(-5, 5), beta ~ U(0, 0.5).
NamedInstance dataset1(int n, std::uint64_t seed);
/// Fixed-coefficient diamond, for covariance checks.
SemSpec dataset1_spec(double a12, double a13, double a24, double a34, const std::vector<double>& beta);

enum class Dataset2Variant { Lin1, Nonlin1, Lin2, Nonlin2 };
std::string to_string(Dataset2Variant v);
Dataset2Variant parse_dataset2_variant(const std::string& text);
NamedInstance dataset2(Dataset2Variant variant, std::uint64_t seed, int n = kDefaultSampleSize);

/// X3 = X2 - X1 + N3 cancels the X1 path, so X1 is independent of X3.
NamedInstance dataset3(std::uint64_t seed, int n = kDefaultSampleSize);
NamedInstance dataset4(std::uint64_t seed, int n = kDefaultSampleSize);
NamedInstance dataset5(std::uint64_t seed, int n = kDefaultSampleSize);

/// Random nonlinear additive-noise model on d nodes with uniform noise.
NamedInstance random_nonlinear_anm(int d, std::uint64_t seed, int n);

/// X ~ N(0, 1), Y = a X + N(0, 1) with a ~ U([-2, -1] u [1, 2]): not identifiable.
NamedInstance gaussian_pair(std::uint64_t seed, int n);
/// X ~ U(-1.5, 1.5), Y = X^3 + U(-0.5, 0.5).
NamedInstance cubic_pair(std::uint64_t seed, int n);

/// Builtins by name: dataset1, dataset2:<variant>, dataset3, dataset4, dataset5,
/// gaussian-pair, cubic-pair, random-anm (2 to 4 nodes, size drawn from the seed).
NamedInstance builtin_instance(const std::string& name, int n, std::uint64_t seed);

/// Line-oriented text form of a SemSpec; see README for the grammar.
std::string write_sem_text(const SemSpec& spec);
SemSpec parse_sem_text(std::istream& in);
SemSpec parse_sem_text(const std::string& text);

}  // namespace anmdisc
