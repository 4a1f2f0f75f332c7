#include "anmdisc/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "anmdisc/rng.hpp"

namespace anmdisc {

namespace {

double apply(TermKind kind, double x) {
    switch (kind) {
        case TermKind::Linear: return x;
        case TermKind::ShiftedSquare: return (x + 1.0) * (x + 1.0);
        case TermKind::GaussBump: return std::exp(-2.0 * x * x);
        case TermKind::Cube: return x * x * x;
        case TermKind::Tanh: return std::tanh(x);
    }
    return x;
}

double draw(const NoiseSpec& noise, Rng& rng) {
    return noise.kind == NoiseSpec::Kind::Gaussian ? rng.normal(noise.a, noise.b) : rng.uniform(noise.a, noise.b);
}

Mechanism linear(std::vector<std::pair<Node, double>> coefficients) {
    Mechanism m;
    for (auto [input, c] : coefficients) m.terms.push_back({input, TermKind::Linear, c});
    return m;
}

}  // namespace

double Mechanism::evaluate(const Eigen::Ref<const Eigen::RowVectorXd>& row) const {
    double v = offset;
    for (const auto& t : terms) v += t.coefficient * apply(t.kind, row(t.input));
    return v;
}

Dag SemSpec::dag() const {
    std::vector<Edge> edges;
    for (int i = 0; i < num_nodes(); ++i) {
        NodeSet inputs;
        for (const auto& t : mechanisms[static_cast<std::size_t>(i)].terms) inputs.insert(t.input);
        for (Node p : inputs.to_vector()) edges.push_back({p, i});
    }
    return Dag(num_nodes(), std::move(edges));
}

void SemSpec::validate() const {
    const int d = num_nodes();
    if (d < 1) throw std::invalid_argument("SemSpec: no nodes");
    if (static_cast<int>(mechanisms.size()) != d || static_cast<int>(noise.size()) != d)
        throw std::invalid_argument("SemSpec: names, mechanisms and noise differ in length");
    for (int i = 0; i < d; ++i) {
        for (const auto& t : mechanisms[static_cast<std::size_t>(i)].terms)
            if (t.input < 0 || t.input >= d || t.input == i)
                throw std::invalid_argument("SemSpec: node " + names[static_cast<std::size_t>(i)] + " has an invalid input");
        const NoiseSpec& ns = noise[static_cast<std::size_t>(i)];
        if (ns.kind == NoiseSpec::Kind::Gaussian && !(ns.b > 0))
            throw std::invalid_argument("SemSpec: Gaussian noise needs sd > 0");
        if (ns.kind == NoiseSpec::Kind::Uniform && !(ns.a < ns.b))
            throw std::invalid_argument("SemSpec: uniform noise needs a < b");
        if (!std::isfinite(ns.scale)) throw std::invalid_argument("SemSpec: noise scale must be finite");
    }
    (void)dag();  // throws on cycles
}

Simulation simulate_with_noise(const SemSpec& spec, int n, std::uint64_t seed) {
    spec.validate();
    if (n < 1) throw std::invalid_argument("simulate: n must be positive");
    const int d = spec.num_nodes();
    const Dag g = spec.dag();

    Eigen::MatrixXd noise(n, d);
    for (int i = 0; i < d; ++i) {
        Rng rng(derive_seed(seed, static_cast<std::uint64_t>(i)));
        for (int r = 0; r < n; ++r) noise(r, i) = draw(spec.noise[static_cast<std::size_t>(i)], rng);
    }
    Eigen::MatrixXd x = Eigen::MatrixXd::Zero(n, d);
    for (Node i : g.topological_order()) {
        const Mechanism& m = spec.mechanisms[static_cast<std::size_t>(i)];
        const double scale = spec.noise[static_cast<std::size_t>(i)].scale;
        for (int r = 0; r < n; ++r) {
            const double f = m.evaluate(x.row(r));
            const double e = scale * noise(r, i);
            x(r, i) = m.combination == NoiseCombination::Additive ? f + e : f * e;
        }
    }
    return {Dataset(std::move(x), spec.names), std::move(noise)};
}

Dataset simulate(const SemSpec& spec, int n, std::uint64_t seed) {
    return simulate_with_noise(spec, n, seed).data;
}

namespace {

NamedInstance finish(std::string name, SemSpec spec, CoefficientRecord coefficients, int n, std::uint64_t seed) {
    NamedInstance inst;
    inst.name = std::move(name);
    inst.truth = spec.dag();
    inst.sample = simulate_with_noise(spec, n, derive_seed(seed, "data"));
    inst.spec = std::move(spec);
    inst.coefficients = std::move(coefficients);
    return inst;
}

SemSpec blank(int d, NoiseSpec noise) {
    SemSpec s;
    s.names = default_names(d);
    s.mechanisms.resize(static_cast<std::size_t>(d));
    s.noise.assign(static_cast<std::size_t>(d), noise);
    return s;
}

}  // namespace

SemSpec dataset1_spec(double a12, double a13, double a24, double a34, const std::vector<double>& beta) {
    if (beta.size() != 4) throw std::invalid_argument("dataset1_spec: need four beta values");
    SemSpec s = blank(4, NoiseSpec::gaussian(0.0, 1.0));
    s.mechanisms[1] = linear({{0, a12}});
    s.mechanisms[2] = linear({{0, a13}});
    s.mechanisms[3] = linear({{1, a24}, {2, a34}});
    for (std::size_t i = 0; i < 4; ++i) s.noise[i].scale = beta[i];
    return s;
}

NamedInstance dataset1(int n, std::uint64_t seed) {
    Rng coef(derive_seed(seed, "coefficients"));
    const double a12 = coef.uniform(-5, 5), a13 = coef.uniform(-5, 5);
    const double a24 = coef.uniform(-5, 5), a34 = coef.uniform(-5, 5);
    std::vector<double> beta(4);
    for (auto& b : beta) b = coef.uniform(0.0, 0.5);
    CoefficientRecord rec = {{"alpha12", a12}, {"alpha13", a13}, {"alpha24", a24}, {"alpha34", a34},
                             {"beta1", beta[0]}, {"beta2", beta[1]}, {"beta3", beta[2]}, {"beta4", beta[3]}};
    return finish("dataset1", dataset1_spec(a12, a13, a24, a34, beta), std::move(rec), n, seed);
}

std::string to_string(Dataset2Variant v) {
    switch (v) {
        case Dataset2Variant::Lin1: return "lin1";
        case Dataset2Variant::Nonlin1: return "nonlin1";
        case Dataset2Variant::Lin2: return "lin2";
        case Dataset2Variant::Nonlin2: return "nonlin2";
    }
    return "unknown";
}

Dataset2Variant parse_dataset2_variant(const std::string& text) {
    for (auto v : {Dataset2Variant::Lin1, Dataset2Variant::Nonlin1, Dataset2Variant::Lin2, Dataset2Variant::Nonlin2})
        if (to_string(v) == text) return v;
    throw std::invalid_argument("unknown dataset2 variant '" + text + "' (expected lin1, nonlin1, lin2, nonlin2)");
}

NamedInstance dataset2(Dataset2Variant variant, std::uint64_t seed, int n) {
    Rng coef(derive_seed(seed, "coefficients"));
    auto draw_coef = [&coef] { return coef.symmetric_band(1.0, 2.0); };
    SemSpec s = blank(4, NoiseSpec::uniform(-0.5, 0.5));
    CoefficientRecord rec;
    auto named = [&rec, &draw_coef](const std::string& name) {
        const double v = draw_coef();
        rec.emplace_back(name, v);
        return v;
    };

    switch (variant) {
        case Dataset2Variant::Lin1: {
            const double a3 = named("a3"), a41 = named("a41"), a42 = named("a42"), a43 = named("a43");
            s.mechanisms[2] = linear({{0, a3}});
            s.mechanisms[3] = linear({{0, a41}, {1, a42}, {2, a43}});
            break;
        }
        case Dataset2Variant::Nonlin1: {
            const double a3 = named("a3"), a41 = named("a41"), a42 = named("a42"), a43 = named("a43");
            s.mechanisms[2].terms = {{0, TermKind::GaussBump, a3}};
            s.mechanisms[2].offset = -1.0;
            s.mechanisms[3].terms = {{0, TermKind::ShiftedSquare, a41}, {1, TermKind::Linear, a42},
                                     {2, TermKind::Linear, a43}};
            break;
        }
        case Dataset2Variant::Lin2: {
            const double b2 = named("b2"), b31 = named("b31"), b32 = named("b32"), b42 = named("b42"),
                         b43 = named("b43");
            s.mechanisms[1] = linear({{0, b2}});
            s.mechanisms[2] = linear({{0, b31}, {1, b32}});
            s.mechanisms[3] = linear({{1, b42}, {2, b43}});
            break;
        }
        case Dataset2Variant::Nonlin2: {
            const double b2 = named("b2"), b31 = named("b31"), b32 = named("b32"), b42 = named("b42"),
                         b43 = named("b43");
            s.mechanisms[1] = linear({{0, b2}});
            s.mechanisms[2].terms = {{0, TermKind::GaussBump, b31}, {1, TermKind::Linear, b32}};
            s.mechanisms[3].terms = {{1, TermKind::ShiftedSquare, b42}, {2, TermKind::Linear, b43}};
            break;
        }
    }
    return finish("dataset2:" + to_string(variant), std::move(s), std::move(rec), n, seed);
}

NamedInstance dataset3(std::uint64_t seed, int n) {
    SemSpec s = blank(3, NoiseSpec::uniform(0.0, 0.5));
    s.mechanisms[1] = linear({{0, 1.0}});
    s.mechanisms[2] = linear({{0, -1.0}, {1, 1.0}});
    return finish("dataset3", std::move(s), {}, n, seed);
}

NamedInstance dataset4(std::uint64_t seed, int n) {
    SemSpec s = blank(4, NoiseSpec::gaussian(0.0, 1.0));
    s.noise[0].scale = 0.5;
    s.noise[1].scale = 0.5;
    s.mechanisms[2] = linear({{0, -1.0}});
    s.noise[2].scale = 0.1;
    s.mechanisms[3] = linear({{0, 1.5}, {1, -2.0}, {2, 1.0}});
    return finish("dataset4", std::move(s), {}, n, seed);
}

NamedInstance dataset5(std::uint64_t seed, int n) {
    SemSpec s = blank(3, NoiseSpec::uniform(-0.5, 0.5));
    s.mechanisms[1] = linear({{0, 1.0}});
    s.noise[1].scale = 0.5;
    s.mechanisms[2] = linear({{0, 1.0}, {1, -1.0}});
    s.mechanisms[2].combination = NoiseCombination::Multiplicative;
    s.noise[2].scale = 0.5;
    return finish("dataset5", std::move(s), {}, n, seed);
}

NamedInstance random_nonlinear_anm(int d, std::uint64_t seed, int n) {
    if (d < 1 || d > kMaxNodes) throw std::invalid_argument("random_nonlinear_anm: bad node count");
    Rng rng(derive_seed(seed, "structure"));
    std::vector<Node> order(static_cast<std::size_t>(d));
    std::iota(order.begin(), order.end(), 0);
    for (std::size_t i = order.size() - 1; i > 0; --i) std::swap(order[i], order[rng.below(i + 1)]);

    static constexpr TermKind kKinds[] = {TermKind::GaussBump, TermKind::Cube, TermKind::Tanh};
    SemSpec s = blank(d, NoiseSpec::uniform(-1.0, 1.0));
    CoefficientRecord rec;
    for (std::size_t pos = 1; pos < order.size(); ++pos) {
        const Node child = order[pos];
        for (std::size_t q = 0; q < pos; ++q) {
            if (rng.uniform() >= 0.5) continue;
            const Node parent = order[q];
            const TermKind kind = kKinds[rng.below(std::size(kKinds))];
            const double c = rng.symmetric_band(1.0, 2.0);
            s.mechanisms[static_cast<std::size_t>(child)].terms.push_back({parent, kind, c});
            rec.emplace_back(s.names[static_cast<std::size_t>(parent)] + "->" + s.names[static_cast<std::size_t>(child)], c);
        }
    }
    return finish("random-anm", std::move(s), std::move(rec), n, seed);
}

NamedInstance gaussian_pair(std::uint64_t seed, int n) {
    Rng coef(derive_seed(seed, "coefficients"));
    const double a = coef.symmetric_band(1.0, 2.0);
    SemSpec s = blank(2, NoiseSpec::gaussian(0.0, 1.0));
    s.mechanisms[1] = linear({{0, a}});
    return finish("gaussian-pair", std::move(s), {{"a", a}}, n, seed);
}

NamedInstance cubic_pair(std::uint64_t seed, int n) {
    SemSpec s = blank(2, NoiseSpec::uniform(-0.5, 0.5));
    s.noise[0] = NoiseSpec::uniform(-1.5, 1.5);
    s.mechanisms[1].terms = {{0, TermKind::Cube, 1.0}};
    return finish("cubic-pair", std::move(s), {}, n, seed);
}

NamedInstance builtin_instance(const std::string& name, int n, std::uint64_t seed) {
    if (name == "gaussian-pair") return gaussian_pair(seed, n);
    if (name == "cubic-pair") return cubic_pair(seed, n);
    if (name == "random-anm") {
        const int d = 2 + static_cast<int>(derive_seed(seed, "size") % 3);
        NamedInstance inst = random_nonlinear_anm(d, seed, n);
        return inst;
    }
    if (name == "dataset1") return dataset1(n, seed);
    if (name == "dataset3") return dataset3(seed, n);
    if (name == "dataset4") return dataset4(seed, n);
    if (name == "dataset5") return dataset5(seed, n);
    if (name.rfind("dataset2:", 0) == 0) return dataset2(parse_dataset2_variant(name.substr(9)), seed, n);
    throw std::invalid_argument("unknown builtin '" + name +
                                "' (expected dataset1, dataset2:<lin1|nonlin1|lin2|nonlin2>, dataset3, dataset4, dataset5, gaussian-pair, cubic-pair, random-anm)");
}

}  // namespace anmdisc
