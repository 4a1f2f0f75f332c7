#include "anmdisc/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <exception>
#include <iomanip>
#include <mutex>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "anmdisc/datagen.hpp"
#include "anmdisc/indep.hpp"
#include "anmdisc/rng.hpp"

namespace anmdisc {

int default_thread_count() {
    return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(int count, int threads, const std::function<void(int)>& body) {
    threads = std::clamp(threads, 1, std::max(1, count));
    if (threads == 1) {
        for (int k = 0; k < count; ++k) body(k);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::jthread> workers;
    for (int t = 0; t < threads; ++t) {
        workers.emplace_back([&] {
            for (int k = next++; k < count; k = next++) {
                try {
                    body(k);
                } catch (...) {
                    std::lock_guard lock(error_mutex);
                    if (!error) error = std::current_exception();
                }
            }
        });
    }
    workers.clear();
    if (error) std::rethrow_exception(error);
}

std::uint64_t replicate_seed(std::uint64_t seed, const std::string& experiment, int replicate) {
    return derive_seed(derive_seed(seed, experiment), static_cast<std::uint64_t>(replicate));
}

namespace {

std::string fmt(double v, int precision = 4) {
    std::ostringstream out;
    out << std::fixed << std::setprecision(precision) << v;
    return out.str();
}

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

void write_report_csv(std::ostream& out, const ExperimentReport& report) {
    for (std::size_t c = 0; c < report.header.size(); ++c) out << (c ? "," : "") << report.header[c];
    out << '\n';
    for (const auto& row : report.rows) {
        for (std::size_t c = 0; c < row.size(); ++c) out << (c ? "," : "") << row[c];
        out << '\n';
    }
}

void write_report_markdown(std::ostream& out, const ExperimentReport& report) {
    out << "## " << report.name << "\n\n";
    out << "|";
    for (const auto& h : report.header) out << ' ' << h << " |";
    out << "\n|";
    for (std::size_t c = 0; c < report.header.size(); ++c) out << "---|";
    out << '\n';
    for (const auto& row : report.rows) {
        out << "|";
        for (const auto& cell : row) out << ' ' << cell << " |";
        out << '\n';
    }
    out << "\nreplicates: " << report.replicates << ", wall time: " << fmt(report.wall_seconds, 1) << " s\n";
    for (const auto& [k, v] : report.config) out << "- " << k << ": " << v << '\n';
}

std::vector<PartialCorrelationQuery> partial_correlation_queries(const Dag& truth) {
    const int d = truth.num_nodes();
    std::vector<PartialCorrelationQuery> out;
    for (Node i = 0; i < d; ++i)
        for (Node j = i + 1; j < d; ++j) {
            const NodeSet rest = NodeSet::range(d).without(i).without(j);
            // Subsets of `rest`, enumerated by mask.
            for (std::uint64_t sub = 0;; sub = (sub - rest.mask()) & rest.mask()) {
                const NodeSet given = NodeSet::from_mask(sub);
                out.push_back({i, j, given, d_separated(truth, {i}, {j}, given)});
                if (sub == rest.mask()) break;
            }
        }
    return out;
}

ExperimentReport FaithfulnessMissResult::report() const {
    ExperimentReport r;
    r.name = "dataset1: proportion of replicates with a missed nonzero partial correlation";
    r.header = {"sample_size", "replicates", "misses", "proportion"};
    for (const auto& row : rows) {
        r.rows.push_back({std::to_string(row.sample_size), std::to_string(row.replicates), std::to_string(row.misses),
                          fmt(row.proportion())});
        r.replicates = row.replicates;
    }
    r.config = {{"alpha", fmt(alpha, 3)}, {"seed", std::to_string(seed)}, {"test", "fisher-z"}};
    r.wall_seconds = wall_seconds;
    return r;
}

FaithfulnessMissResult run_faithfulness_miss(const std::vector<int>& sample_sizes, int reps, double alpha,
                                             std::uint64_t seed, int threads) {
    if (reps < 1) throw std::invalid_argument("run_faithfulness_miss: reps must be at least 1");
    if (sample_sizes.empty()) throw std::invalid_argument("run_faithfulness_miss: no sample sizes");
    if (!(alpha > 0 && alpha < 1)) throw std::invalid_argument("run_faithfulness_miss: alpha must lie in (0, 1)");
    const auto start = std::chrono::steady_clock::now();

    FaithfulnessMissResult result;
    result.alpha = alpha;
    result.seed = seed;
    for (int n : sample_sizes) {
        if (n < 8) throw std::invalid_argument("run_faithfulness_miss: sample sizes must be at least 8");
        std::vector<char> missed(static_cast<std::size_t>(reps), 0);
        parallel_for(reps, threads, [&](int r) {
            const NamedInstance inst = dataset1(n, replicate_seed(seed, "dataset1:n=" + std::to_string(n), r));
            for (const auto& q : partial_correlation_queries(inst.truth)) {
                if (q.truly_zero) continue;
                if (!fisher_z_partial_correlation(inst.sample.data, q.i, q.j, q.given).rejects(alpha)) {
                    missed[static_cast<std::size_t>(r)] = 1;
                    break;
                }
            }
        });
        MissRow row;
        row.sample_size = n;
        row.replicates = reps;
        row.misses = static_cast<int>(std::count(missed.begin(), missed.end(), 1));
        result.rows.push_back(row);
    }
    result.wall_seconds = seconds_since(start);
    return result;
}

Outcome classify(const DiscoveryResult& result, const Dag& truth, bool faithful_mode) {
    if (result.truncated) return Outcome::Truncated;
    if (result.verdict == Verdict::NoModel) return Outcome::Undecided;
    if (faithful_mode) {
        std::vector<Dag> reported = result.verdict == Verdict::Unique ? result.dags : *result.minimal_edge_estimate;
        std::sort(reported.begin(), reported.end());
        return reported == markov_equivalence_class(truth) ? Outcome::Correct : Outcome::Wrong;
    }
    if (result.verdict == Verdict::Multiple) return Outcome::Undecided;
    return result.dags.front() == truth ? Outcome::Correct : Outcome::Wrong;
}

ExperimentReport DiscoveryStudyResult::report() const {
    ExperimentReport r;
    r.name = dataset + ": correct/wrong/undecided (out of " + std::to_string(replicates) + ")";
    r.header = {"method", "dataset", "correct", "wrong", "undecided", "truncated", "correct/wrong/undecided"};
    const std::string method = std::string("IFMOC_") + (config.regressor == RegressorKind::Linear ? "lin" : "GP") +
                               (config.faithful_mode ? " (min-edge)" : "");
    r.rows.push_back({method, dataset, std::to_string(tally.correct), std::to_string(tally.wrong),
                      std::to_string(tally.undecided), std::to_string(tally.truncated),
                      std::to_string(tally.correct) + "/" + std::to_string(tally.wrong) + "/" +
                          std::to_string(tally.undecided)});
    r.replicates = replicates;
    r.config = {{"regressor", to_string(config.regressor)},
                {"alpha", fmt(config.test.alpha, 3)},
                {"hsic_method", to_string(config.test.hsic_method)},
                {"faithful_mode", config.faithful_mode ? "on" : "off"},
                {"max_branches", std::to_string(config.max_branches)},
                {"seed", std::to_string(seed)}};
    r.wall_seconds = wall_seconds;
    return r;
}

DiscoveryStudyResult run_discovery_study(const std::string& dataset, const DiscoveryConfig& config, int reps,
                                         std::uint64_t seed, int threads, int n) {
    if (reps < 1) throw std::invalid_argument("run_discovery_study: reps must be at least 1");
    config.validate();
    (void)builtin_instance(dataset, 8, seed);  // rejects unknown names before the run
    const auto start = std::chrono::steady_clock::now();

    DiscoveryStudyResult study;
    study.dataset = dataset;
    study.config = config;
    study.replicates = reps;
    study.seed = seed;
    study.outcomes.assign(static_cast<std::size_t>(reps), Outcome::Undecided);
    parallel_for(reps, threads, [&](int r) {
        const NamedInstance inst = builtin_instance(dataset, n, replicate_seed(seed, dataset, r));
        const DiscoveryResult res = discover(inst.sample.data, config);
        study.outcomes[static_cast<std::size_t>(r)] = classify(res, inst.truth, config.faithful_mode);
    });
    for (Outcome o : study.outcomes) {
        switch (o) {
            case Outcome::Correct: ++study.tally.correct; break;
            case Outcome::Wrong: ++study.tally.wrong; break;
            case Outcome::Undecided: ++study.tally.undecided; break;
            case Outcome::Truncated: ++study.tally.truncated; break;
        }
    }
    study.wall_seconds = seconds_since(start);
    return study;
}

}  // namespace anmdisc
