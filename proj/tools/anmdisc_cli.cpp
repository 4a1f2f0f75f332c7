// anmdisc: command-line front end for causal discovery with additive-noise models.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "anmdisc/datagen.hpp"
#include "anmdisc/dataset.hpp"
#include "anmdisc/discover.hpp"
#include "anmdisc/experiments.hpp"
#include "anmdisc/indep.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace anmdisc;

namespace {

enum ExitCode { kUnique = 0, kError = 1, kTruncated = 2, kMultiple = 3, kNoModel = 4 };

struct CommonOptions {
    double alpha = 0.05;
    std::string regressor = "linear";
    std::string hsic_method = "gamma";
    int permutations = 1000;
    bool faithful_mode = false;
    int max_branches = 256;
    int gp_starts = 5;
    int gp_max_iter = 200;
    std::string prune_test = "current";
    std::uint64_t seed = 0;
    int threads = default_thread_count();
};

void add_discovery_flags(CLI::App* cmd, CommonOptions& o) {
    cmd->add_option("--alpha", o.alpha, "Significance level")->check(CLI::Range(0.0, 1.0));
    cmd->add_option("--regressor", o.regressor, "linear or gp")->check(CLI::IsMember({"linear", "gp"}));
    cmd->add_option("--hsic-method", o.hsic_method, "gamma or permutation")->check(CLI::IsMember({"gamma", "permutation"}));
    cmd->add_option("--permutations", o.permutations, "Permutations for the permutation test")->check(CLI::Range(100, 1000000));
    cmd->add_flag("--faithful-mode", o.faithful_mode, "Also report the minimal-edge DAGs when several fit");
    cmd->add_option("--max-branches", o.max_branches, "Cap on explored search branches")->check(CLI::PositiveNumber);
    cmd->add_option("--gp-starts", o.gp_starts, "GP optimizer restarts")->check(CLI::PositiveNumber);
    cmd->add_option("--gp-max-iter", o.gp_max_iter, "GP optimizer iterations per start")->check(CLI::PositiveNumber);
    cmd->add_option("--prune-test", o.prune_test, "Block tested when pruning: current or predecessors")
        ->check(CLI::IsMember({"current", "predecessors"}));
    cmd->add_option("--seed", o.seed, "Seed for permutation streams and simulations");
    cmd->add_option("--threads", o.threads, "Worker threads")->check(CLI::PositiveNumber);
}

DiscoveryConfig make_config(const CommonOptions& o) {
    DiscoveryConfig c;
    c.regressor = parse_regressor_kind(o.regressor);
    c.test.alpha = o.alpha;
    c.test.hsic_method = parse_hsic_method(o.hsic_method);
    c.test.permutations = o.permutations;
    c.test.permutation_seed = o.seed;
    c.faithful_mode = o.faithful_mode;
    c.max_branches = o.max_branches;
    c.gp.starts = o.gp_starts;
    c.gp.max_iter = o.gp_max_iter;
    c.prune_test = o.prune_test == "current" ? PruneTestSet::CurrentParents : PruneTestSet::AllPredecessors;
    c.validate();
    return c;
}

json dag_json(const Dag& dag, const std::vector<std::string>& names) {
    json edges = json::array();
    for (const auto& e : dag.edges()) edges.push_back({names[static_cast<std::size_t>(e.parent)], names[static_cast<std::size_t>(e.child)]});
    return edges;
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream in(s);
    std::string item;
    while (std::getline(in, item, ','))
        if (!item.empty()) out.push_back(item);
    return out;
}

NodeSet node_set(const Dataset& data, const std::string& list) {
    NodeSet s;
    for (const auto& name : split_list(list)) s.insert(data.index_of(name));
    return s;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    out << text;
}

int run_discover(const std::string& csv_path, const CommonOptions& o, const std::string& out_dir) {
    const Dataset data = read_csv_file(csv_path);
    if (data.num_cols() < 2) throw std::runtime_error("CSV: need at least two numeric columns");
    if (data.num_rows() < 20) throw std::runtime_error("CSV: need at least 20 rows");
    const DiscoveryResult result = discover(data, make_config(o));
    const auto& names = data.names();

    json j;
    j["verdict"] = to_string(result.verdict);
    j["dags"] = json::array();
    j["p_value_traces"] = json::array();
    for (std::size_t k = 0; k < result.dags.size(); ++k) {
        j["dags"].push_back(dag_json(result.dags[k], names));
        json trace = json::object();
        for (std::size_t i = 0; i < names.size(); ++i) trace[names[i]] = result.traces[k].p_values[i];
        j["p_value_traces"].push_back(trace);
    }
    j["orders_explored"] = result.orders_explored;
    j["truncated"] = result.truncated;
    if (result.minimal_edge_estimate) {
        j["minimal_edge_dags"] = json::array();
        for (const auto& g : *result.minimal_edge_estimate) j["minimal_edge_dags"].push_back(dag_json(g, names));
    }

    fs::create_directories(out_dir);
    write_text(fs::path(out_dir) / "result.json", j.dump(2) + "\n");
    for (std::size_t k = 0; k < result.dags.size(); ++k)
        write_text(fs::path(out_dir) / ("dag_" + std::to_string(k + 1) + ".dot"), to_dot(result.dags[k], names));

    if (result.verdict == Verdict::Unique) {
        std::cout << "Unique DAG\n" << to_edge_list(result.dags.front(), names);
    } else {
        std::cout << "I do not know.\n";
        std::cout << "(" << result.dags.size() << " DAGs fit the data)\n";
        if (result.minimal_edge_estimate) {
            std::cout << "Minimal-edge DAGs:\n";
            for (const auto& g : *result.minimal_edge_estimate) std::cout << to_edge_list(g, names) << "--\n";
        }
    }
    if (result.truncated) {
        std::cerr << "warning: search truncated at " << o.max_branches << " branches\n";
        return kTruncated;
    }
    switch (result.verdict) {
        case Verdict::Unique: return kUnique;
        case Verdict::Multiple: return kMultiple;
        case Verdict::NoModel: return kNoModel;
    }
    return kError;
}

int run_simulate(const std::string& builtin, const std::string& spec_path, int n, std::uint64_t seed,
                 const std::string& out_path) {
    SemSpec spec;
    Dataset data;
    if (!spec_path.empty()) {
        std::ifstream in(spec_path);
        if (!in) throw std::runtime_error("cannot open '" + spec_path + "'");
        spec = parse_sem_text(in);
        data = simulate(spec, n, seed);
    } else {
        NamedInstance inst = builtin_instance(builtin, n, seed);
        spec = inst.spec;
        data = inst.sample.data;
    }
    if (out_path.empty()) {
        write_csv(std::cout, data);
        return 0;
    }
    write_csv_file(out_path, data);
    write_text(out_path + ".dag", to_edge_list(spec.dag(), spec.names));
    std::cerr << "wrote " << out_path << " (" << data.num_rows() << " rows) and " << out_path << ".dag\n";
    return 0;
}

int run_experiment(const std::string& name, CommonOptions o, int reps, const std::string& sizes, int n,
                   const std::string& out_prefix) {
    if (reps < 1) throw std::runtime_error("--reps must be at least 1");
    ExperimentReport report;
    if (name == "dataset1") {
        std::vector<int> parsed;
        for (const auto& s : split_list(sizes)) parsed.push_back(std::stoi(s));
        report = run_faithfulness_miss(parsed, reps, o.alpha, o.seed, o.threads).report();
    } else {
        report = run_discovery_study(name, make_config(o), reps, o.seed, o.threads, n).report();
    }
    write_report_markdown(std::cout, report);
    if (!out_prefix.empty()) {
        std::ofstream csv(out_prefix + ".csv");
        write_report_csv(csv, report);
        std::ofstream md(out_prefix + ".md");
        write_report_markdown(md, report);
    }
    return 0;
}

int run_hsic(const std::string& csv_path, const std::string& xs, const std::string& ys, const CommonOptions& o) {
    const Dataset data = read_csv_file(csv_path);
    TestConfig cfg;
    cfg.alpha = o.alpha;
    cfg.hsic_method = parse_hsic_method(o.hsic_method);
    cfg.permutations = o.permutations;
    cfg.permutation_seed = o.seed;
    cfg.validate();
    const auto r = hsic_test(data.columns(node_set(data, xs)), data.columns(node_set(data, ys)), cfg);
    json j{{"method", to_string(r.method)}, {"statistic", r.statistic}, {"p_value", r.p_value},
           {"sample_size", r.sample_size}, {"reject", r.rejects(o.alpha)}};
    std::cout << j.dump() << '\n';
    return 0;
}

int run_pcorr(const std::string& csv_path, const std::string& i, const std::string& j_name, const std::string& given,
              double alpha) {
    const Dataset data = read_csv_file(csv_path);
    const auto r = fisher_z_partial_correlation(data, data.index_of(i), data.index_of(j_name), node_set(data, given));
    json j{{"method", to_string(r.method)}, {"partial_correlation", *r.partial_correlation},
           {"statistic", r.infinite_statistic ? json("inf") : json(r.statistic)}, {"p_value", r.p_value},
           {"sample_size", r.sample_size}, {"reject", r.rejects(alpha)}};
    std::cout << j.dump() << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Causal discovery with additive-noise functional models"};
    app.require_subcommand(1);
    CommonOptions opts;

    std::string csv_path, out_dir = "anmdisc_out";
    auto* discover_cmd = app.add_subcommand("discover", "Enumerate all DAGs whose fitted residuals are independent");
    discover_cmd->add_option("csv", csv_path, "Input CSV with a header row")->required();
    discover_cmd->add_option("-o,--out", out_dir, "Directory for result.json and DOT files");
    add_discovery_flags(discover_cmd, opts);

    std::string builtin, spec_path, sim_out;
    int n = 400;
    auto* simulate_cmd = app.add_subcommand("simulate", "Simulate a builtin data set or a SEM spec file");
    simulate_cmd->add_option("builtin", builtin, "dataset1..dataset5, dataset2:<variant>, ...");
    simulate_cmd->add_option("--spec", spec_path, "SEM text file");
    simulate_cmd->add_option("-n", n, "Sample size")->check(CLI::PositiveNumber);
    simulate_cmd->add_option("--seed", opts.seed, "Seed");
    simulate_cmd->add_option("-o,--out", sim_out, "Output CSV (stdout when omitted)");

    std::string exp_name, sizes = "100,1000,10000", exp_out;
    int reps = -1;
    auto* experiment_cmd = app.add_subcommand("experiment", "Run a replicated study and write CSV/markdown reports");
    experiment_cmd->add_option("name", exp_name, "dataset1, dataset2:<variant>, dataset3, dataset4, dataset5")->required();
    experiment_cmd->add_option("--reps", reps, "Replicates (default 100; 20 with --regressor gp)");
    experiment_cmd->add_option("--sizes", sizes, "Sample sizes for dataset1, comma separated");
    experiment_cmd->add_option("-n", n, "Sample size per replicate for discovery studies")->check(CLI::PositiveNumber);
    experiment_cmd->add_option("-o,--out", exp_out, "Output prefix for .csv and .md");
    add_discovery_flags(experiment_cmd, opts);

    std::string hsic_x, hsic_y;
    auto* hsic_cmd = app.add_subcommand("hsic", "HSIC independence test between two column blocks");
    hsic_cmd->add_option("csv", csv_path)->required();
    hsic_cmd->add_option("--x", hsic_x, "Comma-separated columns")->required();
    hsic_cmd->add_option("--y", hsic_y, "Comma-separated columns")->required();
    hsic_cmd->add_option("--alpha", opts.alpha)->check(CLI::Range(0.0, 1.0));
    hsic_cmd->add_option("--hsic-method", opts.hsic_method)->check(CLI::IsMember({"gamma", "permutation"}));
    hsic_cmd->add_option("--permutations", opts.permutations)->check(CLI::Range(100, 1000000));
    hsic_cmd->add_option("--seed", opts.seed);

    std::string pc_i, pc_j, pc_given;
    auto* pcorr_cmd = app.add_subcommand("pcorr", "Fisher-z partial correlation test");
    pcorr_cmd->add_option("csv", csv_path)->required();
    pcorr_cmd->add_option("--i", pc_i)->required();
    pcorr_cmd->add_option("--j", pc_j)->required();
    pcorr_cmd->add_option("--given", pc_given, "Comma-separated conditioning columns");
    pcorr_cmd->add_option("--alpha", opts.alpha)->check(CLI::Range(0.0, 1.0));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kError;
    }

    try {
        if (*discover_cmd) return run_discover(csv_path, opts, out_dir);
        if (*simulate_cmd) {
            if (builtin.empty() == spec_path.empty())
                throw std::runtime_error("simulate: give exactly one of a builtin name or --spec");
            return run_simulate(builtin, spec_path, n, opts.seed, sim_out);
        }
        if (*experiment_cmd) {
            if (reps == -1) reps = opts.regressor == "gp" ? 20 : 100;
            return run_experiment(exp_name, opts, reps, sizes, n, exp_out);
        }
        if (*hsic_cmd) return run_hsic(csv_path, hsic_x, hsic_y, opts);
        if (*pcorr_cmd) return run_pcorr(csv_path, pc_i, pc_j, pc_given, opts.alpha);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kError;
    }
    return kError;
}
