#include <doctest.h>

#include <cmath>
#include <set>

#include "anmdisc/datagen.hpp"
#include "anmdisc/indep.hpp"
#include "oracles.hpp"

using namespace anmdisc;

namespace {

double sample_corr(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    const Eigen::VectorXd ac = a.array() - a.mean();
    const Eigen::VectorXd bc = b.array() - b.mean();
    return ac.dot(bc) / std::sqrt(ac.squaredNorm() * bc.squaredNorm());
}

double sample_var(const Eigen::VectorXd& a) {
    return (a.array() - a.mean()).square().sum() / static_cast<double>(a.size() - 1);
}

double coefficient(const NamedInstance& inst, const std::string& name) {
    for (const auto& [k, v] : inst.coefficients)
        if (k == name) return v;
    FAIL("missing coefficient " << name);
    return 0;
}

}  // namespace

TEST_CASE("single uniform root: sample mean") {
    SemSpec s;
    s.names = {"X"};
    s.mechanisms.resize(1);
    s.noise = {NoiseSpec::uniform(0, 1)};
    const Dataset d = simulate(s, 10000, 1);
    CHECK(d.column(0).mean() >= 0.48);
    CHECK(d.column(0).mean() <= 0.52);
    CHECK(d.column(0).minCoeff() >= 0.0);
    CHECK(d.column(0).maxCoeff() < 1.0);
}

TEST_CASE("simulate: determinism and seed sensitivity") {
    const SemSpec spec = dataset4(0).spec;
    const Dataset a = simulate(spec, 50, 9);
    CHECK(a.values() == simulate(spec, 50, 9).values());
    CHECK(a.values() != simulate(spec, 50, 10).values());
    CHECK_THROWS(simulate(spec, 0, 1));
}

TEST_CASE("dataset1: structure, coefficient ranges, determinism") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto inst = dataset1(100, seed);
        CHECK(inst.truth == Dag(4, {{0, 1}, {0, 2}, {1, 3}, {2, 3}}));
        CHECK(inst.truth.edges().size() == 4);
        for (const auto& [k, v] : inst.coefficients) {
            if (k.rfind("alpha", 0) == 0) {
                CHECK(std::abs(v) <= 5.0);
            } else {
                CHECK(v >= 0.0);
                CHECK(v <= 0.5);
            }
        }
    }
    CHECK(dataset1(100, 3).sample.data.values() == dataset1(100, 3).sample.data.values());
    CHECK(dataset1(100, 3).coefficients != dataset1(100, 4).coefficients);
}

TEST_CASE("dataset1: fixed coefficients give a vanishing partial correlation") {
    Eigen::MatrixXd b = Eigen::MatrixXd::Zero(4, 4);
    b(1, 0) = b(2, 0) = b(3, 1) = b(3, 2) = 1.0;
    const Eigen::MatrixXd cov = oracle::linear_sem_covariance(b, Eigen::VectorXd::Constant(4, 0.3));
    CHECK(std::abs(oracle::partial_correlation_from_cov(cov, 1, 2, {0})) < 1e-12);

    // Large-sample check that the simulator realizes the same covariance.
    const Dataset d = simulate(dataset1_spec(1, 1, 1, 1, {0.3, 0.3, 0.3, 0.3}), 200000, 2);
    const Eigen::MatrixXd centered = d.values().rowwise() - d.values().colwise().mean();
    const Eigen::MatrixXd emp = centered.transpose() * centered / (d.num_rows() - 1.0);
    CHECK((emp - cov).cwiseAbs().maxCoeff() < 0.01);
}

TEST_CASE("dataset2: coefficient bands and structures") {
    for (auto v : {Dataset2Variant::Lin1, Dataset2Variant::Nonlin1, Dataset2Variant::Lin2, Dataset2Variant::Nonlin2}) {
        for (std::uint64_t seed = 0; seed < 25; ++seed) {
            const auto inst = dataset2(v, seed);
            CHECK(inst.sample.data.num_rows() == 400);
            for (const auto& [k, c] : inst.coefficients) {
                CHECK(std::abs(c) >= 1.0);
                CHECK(std::abs(c) <= 2.0);
            }
            const Eigen::MatrixXd& noise = inst.sample.noise;
            CHECK(noise.minCoeff() >= -0.5);
            CHECK(noise.maxCoeff() < 0.5);
        }
    }
    const Dag s1(4, {{0, 2}, {0, 3}, {1, 3}, {2, 3}});
    const Dag s2(4, {{0, 1}, {0, 2}, {1, 2}, {1, 3}, {2, 3}});
    CHECK(dataset2(Dataset2Variant::Lin1, 1).truth == s1);
    CHECK(dataset2(Dataset2Variant::Nonlin1, 1).truth == s1);
    CHECK(dataset2(Dataset2Variant::Lin2, 1).truth == s2);
    CHECK(dataset2(Dataset2Variant::Nonlin2, 1).truth == s2);
    // X1 and X4 are only independent given X2 and X3 in structure 2.
    CHECK(d_separated(s2, {0}, {3}, {1, 2}));
    CHECK_FALSE(d_separated(s2, {0}, {3}, {1}));
    CHECK_FALSE(d_separated(s2, {0}, {3}, {2}));
    CHECK_FALSE(d_separated(s2, {0}, {3}, {}));
    CHECK_THROWS(parse_dataset2_variant("lin3"));
}

TEST_CASE("dataset2: nonlinear mechanisms") {
    const auto n1 = dataset2(Dataset2Variant::Nonlin1, 4);
    Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(4);
    CHECK(n1.spec.mechanisms[2].evaluate(row) == doctest::Approx(coefficient(n1, "a3") - 1.0));
    row << 0.7, 0, 0, 0;
    CHECK(n1.spec.mechanisms[2].evaluate(row) ==
          doctest::Approx(coefficient(n1, "a3") * std::exp(-2 * 0.49) - 1.0));

    const auto n2 = dataset2(Dataset2Variant::Nonlin2, 4);
    row << 0.1, -0.4, 0.9, 0;
    const double expected = coefficient(n2, "b42") * std::pow(-0.4 + 1, 2) + coefficient(n2, "b43") * 0.9;
    CHECK(n2.spec.mechanisms[3].evaluate(row) == doctest::Approx(expected));

    // The data follow the mechanisms with additive noise.
    const auto& x = n2.sample.data.values();
    for (int r = 0; r < 10; ++r)
        CHECK(x(r, 3) == doctest::Approx(n2.spec.mechanisms[3].evaluate(x.row(r)) + n2.sample.noise(r, 3)));
}

TEST_CASE("dataset3: designed unfaithfulness") {
    const auto inst = dataset3(5, 10000);
    CHECK(inst.truth == Dag(3, {{0, 1}, {0, 2}, {1, 2}}));
    CHECK_FALSE(d_separated(inst.truth, {0}, {2}, {}));
    CHECK(std::abs(sample_corr(inst.sample.data.column(0), inst.sample.data.column(2))) <= 0.03);
    const Eigen::VectorXd n2n3 = inst.sample.noise.col(1) + inst.sample.noise.col(2);
    CHECK((inst.sample.data.column(2) - n2n3).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(inst.sample.noise.minCoeff() >= 0.0);
    CHECK(inst.sample.noise.maxCoeff() < 0.5);

    int rejects = 0;
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        const auto d = dataset3(seed);
        rejects += hsic_test(d.sample.data.columns({0}), d.sample.data.columns({2}), TestConfig{}).rejects(0.05);
    }
    MESSAGE("X1 vs X3 HSIC rejection rate: " << rejects / 200.0);
    CHECK(rejects / 200.0 <= 0.08);
}

TEST_CASE("dataset4: variances and Gaussianity") {
    const auto inst = dataset4(1, 100000);
    CHECK(inst.truth == Dag(4, {{0, 2}, {0, 3}, {1, 3}, {2, 3}}));
    const double v = sample_var(inst.sample.data.column(0));
    CHECK(v >= 0.24);
    CHECK(v <= 0.26);

    // Jarque-Bera on each column at n = 10^4, alpha = 0.01 (chi-square 2 dof critical value 9.21).
    const auto small = dataset4(2, 10000);
    for (int c = 0; c < 4; ++c) {
        const Eigen::VectorXd x = small.sample.data.column(c).array() - small.sample.data.column(c).mean();
        const double m2 = x.array().square().mean();
        const double skew = x.array().cube().mean() / std::pow(m2, 1.5);
        const double kurt = x.array().pow(4).mean() / (m2 * m2) - 3.0;
        const double jb = 10000.0 / 6.0 * (skew * skew + kurt * kurt / 4.0);
        CHECK_MESSAGE(jb < 9.21, "column " << c << " JB = " << jb);
    }
}

TEST_CASE("dataset5: multiplicative noise identity") {
    const auto inst = dataset5(3);
    CHECK(inst.truth == Dag(3, {{0, 1}, {0, 2}, {1, 2}}));
    const auto& x = inst.sample.data.values();
    const auto& n = inst.sample.noise;
    for (int r = 0; r < x.rows(); ++r) CHECK(x(r, 2) == doctest::Approx((x(r, 0) - x(r, 1)) * 0.5 * n(r, 2)));
}

TEST_CASE("markov property of simulated linear data") {
    // Fisher-z on every d-separation of the Data Set 4 graph.
    const Dag truth = dataset4(0).truth;
    for (const auto& q : std::vector<std::tuple<Node, Node, NodeSet>>{{0, 1, {}}, {1, 2, {}}, {1, 2, {0}}}) {
        const auto [i, j, s] = q;
        REQUIRE(d_separated(truth, {i}, {j}, s));
        int rejects = 0;
        for (std::uint64_t seed = 0; seed < 200; ++seed)
            rejects += fisher_z_partial_correlation(dataset4(seed).sample.data, i, j, s).rejects(0.05);
        CHECK_MESSAGE(rejects / 200.0 <= 0.08, "pair " << i << "," << j << " rate " << rejects / 200.0);
    }
}

TEST_CASE("random nonlinear ANM instances") {
    std::set<int> sizes;
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        const auto inst = builtin_instance("random-anm", 50, seed);
        sizes.insert(inst.truth.num_nodes());
        CHECK(inst.truth.num_nodes() <= 4);
        CHECK(inst.truth == inst.spec.dag());
        for (const auto& m : inst.spec.mechanisms)
            for (const auto& t : m.terms) CHECK(t.kind != TermKind::Linear);
        for (const auto& ns : inst.spec.noise) CHECK(ns.kind == NoiseSpec::Kind::Uniform);
    }
    CHECK(sizes.size() == 3);
    CHECK(builtin_instance("random-anm", 50, 8).sample.data.values() ==
          builtin_instance("random-anm", 50, 8).sample.data.values());
    CHECK_THROWS(builtin_instance("dataset9", 50, 1));
}

TEST_CASE("sem text: round trip") {
    for (const auto& inst : {dataset2(Dataset2Variant::Nonlin2, 3), dataset5(1), dataset4(1), random_nonlinear_anm(4, 7, 10)}) {
        const std::string text = write_sem_text(inst.spec);
        const SemSpec back = parse_sem_text(text);
        CHECK(write_sem_text(back) == text);
        CHECK(simulate(back, 30, 4).values() == simulate(inst.spec, 30, 4).values());
    }
}

TEST_CASE("sem text: parsing and errors") {
    const SemSpec s = parse_sem_text(
        "# two nodes\n"
        "node A noise=uniform(-1,1)\n"
        "\n"
        "node B terms=cube(A)*2;tanh(A)*-1 offset=0.5 noise=gaussian(0,2) scale=0.25  # trailing\n");
    REQUIRE(s.num_nodes() == 2);
    CHECK(s.dag() == Dag(2, {{0, 1}}));
    CHECK(s.mechanisms[1].terms.size() == 2);
    CHECK(s.mechanisms[1].offset == 0.5);
    CHECK(s.noise[1].kind == NoiseSpec::Kind::Gaussian);
    CHECK(s.noise[1].b == 2.0);
    CHECK(s.noise[1].scale == 0.25);

    CHECK_THROWS(parse_sem_text("node A terms=linear(B)*1 noise=uniform(0,1)\nnode B terms=linear(A)*1 noise=uniform(0,1)\n"));
    CHECK_THROWS(parse_sem_text("node A terms=linear(Z)*1 noise=uniform(0,1)\n"));
    CHECK_THROWS(parse_sem_text("node A noise=uniform(1,0)\n"));
    CHECK_THROWS(parse_sem_text("node A noise=gaussian(0,0)\n"));
    CHECK_THROWS(parse_sem_text("node A noise=cauchy(0,1)\n"));
    CHECK_THROWS(parse_sem_text("node A terms=sine(A)*1 noise=uniform(0,1)\n"));
    CHECK_THROWS(parse_sem_text("node A scale=abc\n"));
    CHECK_THROWS(parse_sem_text("edge A B\n"));
    CHECK_THROWS(parse_sem_text(""));
    CHECK_THROWS(parse_sem_text("node A noise=uniform(0,1)\nnode A noise=uniform(0,1)\n"));
}
