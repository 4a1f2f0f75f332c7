#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "anmdisc/discover.hpp"
#include "anmdisc/graph.hpp"

namespace anmdisc {

/// Runs body(0..count-1) on up to `threads` workers. Each index runs exactly once;
/// callers write results into per-index slots, so output does not depend on scheduling.
void parallel_for(int count, int threads, const std::function<void(int)>& body);
int default_thread_count();

/// Tabular result shared by all studies.
struct ExperimentReport {
    std::string name;
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    int replicates = 0;
    std::vector<std::pair<std::string, std::string>> config;
    double wall_seconds = 0.0;
};

void write_report_csv(std::ostream& out, const ExperimentReport& report);
void write_report_markdown(std::ostream& out, const ExperimentReport& report);

/// One (pair, conditioning set) partial-correlation test and whether the
/// ground-truth graph makes it zero.
struct PartialCorrelationQuery {
    Node i;
    Node j;
    NodeSet given;
    bool truly_zero;
};

/// All pairs i < j and all conditioning sets from the remaining nodes.
std::vector<PartialCorrelationQuery> partial_correlation_queries(const Dag& truth);

struct MissRow {
    int sample_size = 0;
    int replicates = 0;
    int misses = 0;
    double proportion() const { return replicates ? static_cast<double>(misses) / replicates : 0.0; }
};

struct FaithfulnessMissResult {
    std::vector<MissRow> rows;
    double alpha = 0.05;
    std::uint64_t seed = 0;
    double wall_seconds = 0.0;

    ExperimentReport report() const;
};

/// Data Set 1 study: proportion of replicates where some truly nonzero
/// (partial) correlation is not rejected by the Fisher-z test.
FaithfulnessMissResult run_faithfulness_miss(const std::vector<int>& sample_sizes, int reps, double alpha,
                                             std::uint64_t seed, int threads = 1);

struct Tally {
    int correct = 0;
    int wrong = 0;
    int undecided = 0;
    int truncated = 0;
    int total() const { return correct + wrong + undecided + truncated; }
};

enum class Outcome { Correct, Wrong, Undecided, Truncated };

/// Scores one discovery run. In faithful mode the reported DAG set (the unique
/// DAG, or the minimal-edge subset) must equal the Markov class of the truth.
Outcome classify(const DiscoveryResult& result, const Dag& truth, bool faithful_mode);

struct DiscoveryStudyResult {
    std::string dataset;
    DiscoveryConfig config;
    int replicates = 0;
    std::uint64_t seed = 0;
    Tally tally;
    std::vector<Outcome> outcomes;  // per replicate
    double wall_seconds = 0.0;

    ExperimentReport report() const;
};

/// Simulates `reps` instances of a builtin dataset and tallies discovery outcomes.
/// Replicate r uses seed derive_seed(derive_seed(seed, dataset), r).
DiscoveryStudyResult run_discovery_study(const std::string& dataset, const DiscoveryConfig& config, int reps,
                                         std::uint64_t seed, int threads = 1, int n = 400);

std::uint64_t replicate_seed(std::uint64_t seed, const std::string& experiment, int replicate);

}  // namespace anmdisc
