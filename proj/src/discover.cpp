#include "anmdisc/discover.hpp"

#include <algorithm>
#include <deque>
#include <set>
#include <stdexcept>

#include "anmdisc/rng.hpp"

namespace anmdisc {

std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::Unique: return "unique";
        case Verdict::NoModel: return "no-model";
        case Verdict::Multiple: return "multiple";
    }
    return "unknown";
}

void DiscoveryConfig::validate() const {
    test.validate();
    if (max_branches < 1) throw std::invalid_argument("max_branches must be at least 1");
    if (gp.starts < 1 || gp.max_iter < 1) throw std::invalid_argument("GP starts and max_iter must be positive");
}

const Eigen::VectorXd& FitCache::residuals(Node target, NodeSet regressors) {
    const auto key = std::make_pair(target, regressors.mask());
    auto it = residuals_.find(key);
    if (it == residuals_.end()) {
        FitResult fit = fitted_noise_values(data_, regressors, target, config_.regressor, config_.gp);
        it = residuals_.emplace(key, std::move(fit.residuals)).first;
    }
    return it->second;
}

double FitCache::p_value(Node target, NodeSet fit_set, NodeSet test_set) {
    const auto key = std::make_tuple(target, fit_set.mask(), test_set.mask());
    auto it = p_values_.find(key);
    if (it != p_values_.end()) return it->second;
    TestConfig test = config_.test;
    // Tie the permutation stream to the call so cached and uncached runs agree.
    test.permutation_seed = derive_seed(derive_seed(test.permutation_seed, static_cast<std::uint64_t>(target)),
                                        derive_seed(fit_set.mask(), test_set.mask()));
    const double p = test_independence(data_, test_set, residuals(target, fit_set), test).p_value;
    p_values_.emplace(key, p);
    return p;
}

OrderSearchResult find_causal_orders(const Dataset& data, const DiscoveryConfig& config) {
    config.validate();
    FitCache cache(data, config);
    return find_causal_orders(cache);
}

OrderSearchResult find_causal_orders(FitCache& cache) {
    const DiscoveryConfig& config = cache.config();
    const int d = cache.data().num_cols();
    if (d < 1) throw std::invalid_argument("find_causal_orders: dataset has no columns");
    const double alpha = config.test.alpha;

    OrderSearchResult result;
    std::deque<BranchState> pending;
    pending.push_back({NodeSet::range(d), d, {}});

    while (!pending.empty()) {
        if (result.orders_explored >= config.max_branches) {
            result.truncated = true;
            break;
        }
        BranchState branch = std::move(pending.front());
        pending.pop_front();
        ++result.orders_explored;

        bool dead = false;
        while (!branch.remaining.empty()) {
            const auto candidates = branch.remaining.to_vector();
            std::vector<double> p(candidates.size());
            for (std::size_t c = 0; c < candidates.size(); ++c) {
                const NodeSet others = branch.remaining.without(candidates[c]);
                p[c] = cache.p_value(candidates[c], others, others);
            }
            // Ascending node order makes max_element pick the smallest index on ties.
            const std::size_t best = static_cast<std::size_t>(std::max_element(p.begin(), p.end()) - p.begin());
            if (p[best] < alpha) {
                dead = true;
                break;
            }
            for (std::size_t c = 0; c < candidates.size(); ++c) {
                if (c == best || p[c] < alpha) continue;
                BranchState alt{branch.remaining.without(candidates[c]), branch.resume_position - 1, branch.sinks};
                alt.sinks.push_back(candidates[c]);
                pending.push_back(std::move(alt));
            }
            branch.sinks.push_back(candidates[best]);
            branch.remaining.erase(candidates[best]);
            --branch.resume_position;
        }
        if (dead) continue;
        result.orders.emplace_back(branch.sinks.rbegin(), branch.sinks.rend());
    }
    return result;
}

Dag prune_parents(const Dataset& data, const CausalOrder& order, const DiscoveryConfig& config) {
    config.validate();
    FitCache cache(data, config);
    return prune_parents(cache, order);
}

Dag prune_parents(FitCache& cache, const CausalOrder& order) {
    const int d = cache.data().num_cols();
    {
        std::vector<Node> sorted = order;
        std::sort(sorted.begin(), sorted.end());
        for (int k = 0; k < d; ++k)
            if (static_cast<int>(sorted.size()) != d || sorted[static_cast<std::size_t>(k)] != k)
                throw std::invalid_argument("prune_parents: order is not a permutation of the nodes");
    }
    const double alpha = cache.config().test.alpha;
    std::vector<Edge> edges;
    NodeSet predecessors;
    for (Node target : order) {
        NodeSet parents = predecessors;
        for (Node candidate : order) {
            if (candidate == target) break;
            const NodeSet reduced = parents.without(candidate);
            const NodeSet test_set =
                cache.config().prune_test == PruneTestSet::CurrentParents ? parents : predecessors;
            if (cache.p_value(target, reduced, test_set) >= alpha) parents = reduced;
        }
        for (Node p : parents.to_vector()) edges.push_back({p, target});
        predecessors.insert(target);
    }
    return Dag(d, std::move(edges));
}

DagTrace residual_trace(FitCache& cache, const Dag& dag, Eigen::MatrixXd* residual_matrix) {
    const int d = dag.num_nodes();
    DagTrace trace;
    trace.p_values.resize(static_cast<std::size_t>(d));
    if (residual_matrix) residual_matrix->resize(cache.data().num_rows(), d);
    for (Node i = 0; i < d; ++i) {
        const NodeSet pa = dag.parents(i);
        trace.p_values[static_cast<std::size_t>(i)] = cache.p_value(i, pa, pa);
        if (residual_matrix) residual_matrix->col(i) = cache.residuals(i, pa);
    }
    return trace;
}

DiscoveryResult discover(const Dataset& data, const DiscoveryConfig& config) {
    config.validate();
    FitCache cache(data, config);
    DiscoveryResult result;

    OrderSearchResult search = find_causal_orders(cache);
    result.orders = search.orders;
    result.orders_explored = search.orders_explored;
    result.truncated = search.truncated;

    std::set<Dag> distinct;
    for (const auto& order : search.orders) distinct.insert(prune_parents(cache, order));
    result.candidates.assign(distinct.begin(), distinct.end());

    const double alpha = config.test.alpha;
    for (const Dag& dag : result.candidates) {
        Eigen::MatrixXd residuals;
        DagTrace trace = residual_trace(cache, dag, &residuals);
        const bool nodes_pass = std::all_of(trace.p_values.begin(), trace.p_values.end(),
                                            [alpha](double p) { return p >= alpha; });
        if (!nodes_pass) continue;
        if (dag.num_nodes() >= 2 && !joint_residual_independence(residuals, config.test)) continue;
        result.dags.push_back(dag);
        result.traces.push_back(std::move(trace));
    }

    if (result.dags.empty()) result.verdict = Verdict::NoModel;
    else if (result.dags.size() == 1) result.verdict = Verdict::Unique;
    else result.verdict = Verdict::Multiple;

    if (config.faithful_mode && result.verdict == Verdict::Multiple)
        result.minimal_edge_estimate = minimal_edge_dags(result.dags);
    return result;
}

}  // namespace anmdisc
