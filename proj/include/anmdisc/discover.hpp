#pragma once

#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include <Eigen/Dense>

#include "anmdisc/dataset.hpp"
#include "anmdisc/graph.hpp"
#include "anmdisc/indep.hpp"
#include "anmdisc/regress.hpp"

namespace anmdisc {

/// Which block the residual is tested against when pruning a candidate parent.
enum class PruneTestSet {
    CurrentParents,   // current parent set, still including the candidate
    AllPredecessors,  // every node before the target in the causal order
};

struct DiscoveryConfig {
    RegressorKind regressor = RegressorKind::Linear;
    GpConfig gp;
    TestConfig test;
    bool faithful_mode = false;
    int max_branches = 256;
    PruneTestSet prune_test = PruneTestSet::CurrentParents;

    void validate() const;
};

/// One pending branch of the sink search.
struct BranchState {
    NodeSet remaining;
    int resume_position = 0;       // number of sinks still to place
    std::vector<Node> sinks;       // sinks found so far, first-found first
};

/// A causal order lists roots first: order[0] has no predecessors.
using CausalOrder = std::vector<Node>;

struct OrderSearchResult {
    std::vector<CausalOrder> orders;
    int orders_explored = 0;  // branches processed, including dead ones
    bool truncated = false;
};

enum class Verdict { Unique, NoModel, Multiple };
std::string to_string(Verdict v);

struct DagTrace {
    std::vector<double> p_values;  // per node, residual vs. its parents
};

struct DiscoveryResult {
    std::vector<Dag> dags;           // distinct, sorted by edge set
    std::vector<DagTrace> traces;    // parallel to dags
    Verdict verdict = Verdict::NoModel;
    int orders_explored = 0;
    bool truncated = false;
    std::vector<CausalOrder> orders;
    std::vector<Dag> candidates;     // pruned DAGs before the final residual filter
    std::optional<std::vector<Dag>> minimal_edge_estimate;  // faithful mode with Multiple verdict
};

/// Memoizes residuals and p-values for one dataset so that repeated
/// (target, regressor set) fits across branches are computed once.
class FitCache {
public:
    FitCache(const Dataset& data, const DiscoveryConfig& config) : data_(data), config_(config) {}

    const Eigen::VectorXd& residuals(Node target, NodeSet regressors);
    /// p-value of residuals(target, fit_set) against the columns in test_set.
    double p_value(Node target, NodeSet fit_set, NodeSet test_set);

    const Dataset& data() const { return data_; }
    const DiscoveryConfig& config() const { return config_; }
    int fits_computed() const { return static_cast<int>(residuals_.size()); }

private:
    const Dataset& data_;
    const DiscoveryConfig& config_;
    std::map<std::pair<Node, std::uint64_t>, Eigen::VectorXd> residuals_;
    std::map<std::tuple<Node, std::uint64_t, std::uint64_t>, double> p_values_;
};

/// Depth-first enumeration of causal orders by repeatedly removing admissible sinks.
OrderSearchResult find_causal_orders(const Dataset& data, const DiscoveryConfig& config);
OrderSearchResult find_causal_orders(FitCache& cache);

/// Removes predecessors whose omission leaves the residual independent.
Dag prune_parents(const Dataset& data, const CausalOrder& order, const DiscoveryConfig& config);
Dag prune_parents(FitCache& cache, const CausalOrder& order);

/// Refits every node of `dag` on its parents; per-node p-values vs. the parent block.
DagTrace residual_trace(FitCache& cache, const Dag& dag, Eigen::MatrixXd* residual_matrix = nullptr);

DiscoveryResult discover(const Dataset& data, const DiscoveryConfig& config);

}  // namespace anmdisc
