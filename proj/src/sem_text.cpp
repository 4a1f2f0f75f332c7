// Text form of SemSpec:
//
//   # comment
//   node X1 noise=uniform(-0.5,0.5)
//   node X2 terms=linear(X1)*1.5;gauss_bump(X1)*-2 offset=-1 noise=gaussian(0,1) scale=0.5
//   node X3 terms=linear(X1)*1;linear(X2)*-1 combine=multiplicative noise=uniform(-0.5,0.5)
//
// Node order in the file is the column order. Parents are the term inputs.

#include <algorithm>
#include <charconv>
#include <iomanip>
#include <map>
#include <sstream>
#include <stdexcept>

#include "anmdisc/datagen.hpp"

namespace anmdisc {

namespace {

const std::map<TermKind, std::string>& term_names() {
    static const std::map<TermKind, std::string> names = {
        {TermKind::Linear, "linear"}, {TermKind::ShiftedSquare, "shifted_square"},
        {TermKind::GaussBump, "gauss_bump"}, {TermKind::Cube, "cube"}, {TermKind::Tanh, "tanh"},
    };
    return names;
}

[[noreturn]] void fail(int line, const std::string& msg) {
    throw std::invalid_argument("SEM line " + std::to_string(line) + ": " + msg);
}

double parse_number(const std::string& s, int line) {
    double v = 0;
    const char* first = s.data();
    const char* last = first + s.size();
    if (first != last && *first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (s.empty() || ec != std::errc() || ptr != last) fail(line, "bad number '" + s + "'");
    return v;
}

// "name(arg1,arg2)" -> name, args
std::pair<std::string, std::vector<std::string>> parse_call(const std::string& s, int line) {
    const auto open = s.find('(');
    if (open == std::string::npos || s.back() != ')') fail(line, "expected name(...) in '" + s + "'");
    std::vector<std::string> args;
    std::istringstream in(s.substr(open + 1, s.size() - open - 2));
    std::string a;
    while (std::getline(in, a, ',')) args.push_back(a);
    return {s.substr(0, open), args};
}

std::string format_double(double v) {
    std::ostringstream out;
    out << std::setprecision(17) << v;
    return out.str();
}

}  // namespace

std::string write_sem_text(const SemSpec& spec) {
    spec.validate();
    std::ostringstream out;
    for (int i = 0; i < spec.num_nodes(); ++i) {
        const auto& m = spec.mechanisms[static_cast<std::size_t>(i)];
        const auto& ns = spec.noise[static_cast<std::size_t>(i)];
        out << "node " << spec.names[static_cast<std::size_t>(i)];
        if (!m.terms.empty()) {
            out << " terms=";
            for (std::size_t t = 0; t < m.terms.size(); ++t) {
                const auto& term = m.terms[t];
                out << (t ? ";" : "") << term_names().at(term.kind) << '('
                    << spec.names[static_cast<std::size_t>(term.input)] << ")*" << format_double(term.coefficient);
            }
        }
        if (m.offset != 0.0) out << " offset=" << format_double(m.offset);
        if (m.combination == NoiseCombination::Multiplicative) out << " combine=multiplicative";
        out << " noise=" << (ns.kind == NoiseSpec::Kind::Gaussian ? "gaussian(" : "uniform(") << format_double(ns.a)
            << ',' << format_double(ns.b) << ')';
        if (ns.scale != 1.0) out << " scale=" << format_double(ns.scale);
        out << '\n';
    }
    return out.str();
}

SemSpec parse_sem_text(std::istream& in) {
    struct RawNode {
        int line;
        std::string name;
        std::vector<std::pair<std::string, std::string>> fields;
    };
    std::vector<RawNode> raw;
    std::string text;
    int line_no = 0;
    while (std::getline(in, text)) {
        ++line_no;
        if (const auto hash = text.find('#'); hash != std::string::npos) text.erase(hash);
        std::istringstream tokens(text);
        std::string keyword;
        if (!(tokens >> keyword)) continue;
        if (keyword != "node") fail(line_no, "expected 'node', got '" + keyword + "'");
        RawNode node{line_no, {}, {}};
        if (!(tokens >> node.name)) fail(line_no, "missing node name");
        std::string tok;
        while (tokens >> tok) {
            const auto eq = tok.find('=');
            if (eq == std::string::npos) fail(line_no, "expected key=value, got '" + tok + "'");
            node.fields.emplace_back(tok.substr(0, eq), tok.substr(eq + 1));
        }
        raw.push_back(std::move(node));
    }
    if (raw.empty()) throw std::invalid_argument("SEM: no nodes declared");

    SemSpec spec;
    for (const auto& r : raw) {
        if (std::find(spec.names.begin(), spec.names.end(), r.name) != spec.names.end())
            fail(r.line, "duplicate node '" + r.name + "'");
        spec.names.push_back(r.name);
    }
    auto index_of = [&spec](const std::string& name, int line) {
        auto it = std::find(spec.names.begin(), spec.names.end(), name);
        if (it == spec.names.end()) fail(line, "unknown node '" + name + "'");
        return static_cast<Node>(it - spec.names.begin());
    };

    for (const auto& r : raw) {
        Mechanism m;
        NoiseSpec noise = NoiseSpec::gaussian(0.0, 1.0);
        bool has_noise = false;
        for (const auto& [key, value] : r.fields) {
            if (key == "terms") {
                std::istringstream list(value);
                std::string item;
                while (std::getline(list, item, ';')) {
                    const auto star = item.rfind(")*");
                    if (star == std::string::npos) fail(r.line, "term must look like kind(NODE)*coef");
                    auto [kind_name, args] = parse_call(item.substr(0, star + 1), r.line);
                    if (args.size() != 1) fail(r.line, "term takes exactly one input");
                    auto kind_it = std::find_if(term_names().begin(), term_names().end(),
                                                [&](const auto& kv) { return kv.second == kind_name; });
                    if (kind_it == term_names().end()) fail(r.line, "unknown term kind '" + kind_name + "'");
                    m.terms.push_back({index_of(args[0], r.line), kind_it->first,
                                       parse_number(item.substr(star + 2), r.line)});
                }
            } else if (key == "offset") {
                m.offset = parse_number(value, r.line);
            } else if (key == "combine") {
                if (value == "additive") m.combination = NoiseCombination::Additive;
                else if (value == "multiplicative") m.combination = NoiseCombination::Multiplicative;
                else fail(r.line, "combine must be additive or multiplicative");
            } else if (key == "noise") {
                auto [kind, args] = parse_call(value, r.line);
                if (args.size() != 2) fail(r.line, "noise takes two parameters");
                const double a = parse_number(args[0], r.line);
                const double b = parse_number(args[1], r.line);
                if (kind == "gaussian") noise = NoiseSpec::gaussian(a, b, noise.scale);
                else if (kind == "uniform") noise = NoiseSpec::uniform(a, b, noise.scale);
                else fail(r.line, "unknown noise '" + kind + "'");
                has_noise = true;
            } else if (key == "scale") {
                noise.scale = parse_number(value, r.line);
            } else {
                fail(r.line, "unknown key '" + key + "'");
            }
        }
        if (!has_noise) fail(r.line, "missing noise=...");
        spec.mechanisms.push_back(std::move(m));
        spec.noise.push_back(noise);
    }
    spec.validate();
    return spec;
}

SemSpec parse_sem_text(const std::string& text) {
    std::istringstream in(text);
    return parse_sem_text(in);
}

}  // namespace anmdisc
