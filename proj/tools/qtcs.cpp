// qtcs: command-line front end for the test case selection engine.
//
//   qtcs run    --bundle DIR | --synth n,m,density,fault_rate [flags] --out DIR
//   qtcs stats  --in DIR
//   qtcs synth  n,m,density,fault_rate --seed S --out DIR
//   qtcs qubo   --bundle DIR | --synth ... [--alpha A] [--out FILE]
//   qtcs cluster --bundle DIR | --synth ... [--k K] [--max-cluster M] [--seed S] [--out FILE]
//
// Exit codes: 0 success, 2 configuration or input error, 3 runtime failure.

#include "qtcs/decompose.hpp"
#include "qtcs/qubo.hpp"
#include "qtcs/runner.hpp"
#include "qtcs/suite.hpp"

#include "CLI11.hpp"

#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace {

constexpr int kConfigError = 2;
constexpr int kRuntimeError = 3;

qtcs::SynthParams parse_synth(const std::string& spec, std::uint64_t seed) {
    std::vector<std::string> parts;
    std::stringstream in(spec);
    std::string item;
    while (std::getline(in, item, ',')) parts.push_back(item);
    if (parts.size() != 4) throw std::invalid_argument("--synth expects n,m,density,fault_rate");
    try {
        return {std::stoul(parts[0]), std::stoul(parts[1]), std::stod(parts[2]), std::stod(parts[3]), seed};
    } catch (const std::logic_error&) {
        throw std::invalid_argument("--synth expects n,m,density,fault_rate, got '" + spec + "'");
    }
}

struct SourceOptions {
    std::string bundle;
    std::string synth;
    std::uint64_t synth_seed = 0;

    void attach(CLI::App* app) {
        auto* b = app->add_option("--bundle", bundle, "Suite bundle directory (coverage.mtx, costs.txt, faults.txt)");
        auto* s = app->add_option("--synth", synth, "Synthetic suite: n_tests,n_stmts,density,fault_rate");
        b->excludes(s);
        app->add_option("--synth-seed", synth_seed, "Seed for the synthetic suite generator");
    }

    void apply(qtcs::ExperimentConfig& config) const {
        if (bundle.empty() == synth.empty()) throw std::invalid_argument("exactly one of --bundle or --synth is required");
        if (!bundle.empty()) config.bundle = bundle;
        if (!synth.empty()) config.synth = parse_synth(synth, synth_seed);
    }
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Multi-objective test case selection with QAOA statevector simulation"};
    app.require_subcommand(1);

    qtcs::ExperimentConfig config;
    SourceOptions run_source;
    std::string out_dir;
    std::vector<std::string> imports;
    auto* run = app.add_subcommand("run", "Run QAOA-TCS and the baselines, then write reports");
    run_source.attach(run);
    run->add_option("--alpha", config.alpha, "Cost/fault weight in [0,1]")->capture_default_str();
    run->add_option("--k", config.k, "Cluster count (0: ceil(n/max)+1)")->capture_default_str();
    run->add_option("--max-cluster", config.max_cluster_size, "Largest cluster handed to QAOA")->capture_default_str();
    run->add_option("--p", config.layers, "QAOA layers")->capture_default_str();
    run->add_option("--restarts", config.restarts, "Random optimizer starts")->capture_default_str();
    run->add_option("--shots", config.shots, "Measurements per cluster")->capture_default_str();
    run->add_option("--evals-per-angle", config.evaluations_per_angle, "Optimizer evaluations per angle")
        ->capture_default_str();
    run->add_option("--sa-sweeps", config.sa_sweeps, "Simulated annealing sweeps")->capture_default_str();
    run->add_option("--reps", config.repetitions, "Repetitions per algorithm")->capture_default_str();
    run->add_option("--seed", config.seed, "Master seed; repetition r uses seed + r")->capture_default_str();
    run->add_option("--import-front", imports, "Front CSV produced elsewhere, merged into the reference front");
    run->add_flag("--trace", config.trace, "Write optimizer iterations to trace.jsonl");
    run->add_option("--out", out_dir, "Output directory")->required();

    std::string stats_dir;
    auto* stats = app.add_subcommand("stats", "Recompute statistics from stored per-run CSVs");
    stats->add_option("--in", stats_dir, "Directory written by `qtcs run`")->required();

    std::string synth_spec;
    std::uint64_t synth_seed = 0;
    std::string synth_out;
    auto* synth = app.add_subcommand("synth", "Write a synthetic suite bundle");
    synth->add_option("spec", synth_spec, "n_tests,n_stmts,density,fault_rate")->required();
    synth->add_option("--seed", synth_seed, "Generator seed");
    synth->add_option("--out", synth_out, "Bundle directory")->required();

    SourceOptions qubo_source;
    double qubo_alpha = 0.5;
    std::string qubo_out;
    auto* qubo = app.add_subcommand("qubo", "Export the suite QUBO as `i j value` triplets");
    qubo_source.attach(qubo);
    qubo->add_option("--alpha", qubo_alpha, "Cost/fault weight in [0,1]")->capture_default_str();
    qubo->add_option("--out", qubo_out, "Output file (default: stdout)");

    SourceOptions cluster_source;
    std::size_t cluster_k = 0;
    std::size_t cluster_max = 20;
    std::uint64_t cluster_seed = 0;
    std::string cluster_out;
    auto* cluster = app.add_subcommand("cluster", "Dump the capped K-Means clustering as CSV");
    cluster_source.attach(cluster);
    cluster->add_option("--k", cluster_k, "Cluster count (0: ceil(n/max)+1)");
    cluster->add_option("--max-cluster", cluster_max, "Largest cluster")->capture_default_str();
    cluster->add_option("--seed", cluster_seed, "Clustering seed");
    cluster->add_option("--out", cluster_out, "Output file (default: stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kConfigError;
    }

    auto suite_from = [](const SourceOptions& source) {
        qtcs::ExperimentConfig c;
        source.apply(c);
        return qtcs::make_suite(c);
    };
    auto with_output = [](const std::string& path, auto&& write) {
        if (path.empty()) {
            write(std::cout);
            return;
        }
        std::ofstream out(path);
        if (!out) throw std::runtime_error("cannot write " + path);
        write(out);
    };

    try {
        if (*run) {
            run_source.apply(config);
            config.output = out_dir;
            for (const auto& f : imports) config.imported_fronts.emplace_back(f);
            config.validate();
            const auto report = qtcs::run_experiment(config);
            std::cout << "wrote " << report.runs.size() << " runs to " << out_dir << '\n';
            if (!report.headline_holds) std::cout << "note: QAOA-TCS is not ahead on mean contributions (see summary.md)\n";
        } else if (*stats) {
            const auto report = qtcs::recompute_statistics(stats_dir);
            std::cout << "recomputed statistics for " << report.runs.size() << " runs in " << stats_dir << '\n';
        } else if (*synth) {
            const auto p = parse_synth(synth_spec, synth_seed);
            qtcs::save_suite(qtcs::synth_suite(p.tests, p.statements, p.density, p.fault_rate, p.seed), synth_out);
        } else if (*qubo) {
            const auto suite = suite_from(qubo_source);
            const auto model = qtcs::build_qubo(suite, qubo_alpha, qtcs::penalty_upper_bound(suite, qubo_alpha));
            with_output(qubo_out, [&](std::ostream& out) { qtcs::write_qubo_triplets(model, out); });
        } else if (*cluster) {
            const auto suite = suite_from(cluster_source);
            const auto features = qtcs::normalize_features(suite);
            const std::size_t k = cluster_k > 0 ? cluster_k : qtcs::default_cluster_count(suite.size(), cluster_max);
            const auto clustering = qtcs::cap_and_reassign(qtcs::kmeans(features, k, cluster_seed), features, cluster_max);
            with_output(cluster_out, [&](std::ostream& out) { qtcs::write_clustering_csv(clustering, out); });
        }
    } catch (const std::invalid_argument& e) {
        std::cerr << "qtcs: " << e.what() << '\n';
        return kConfigError;
    } catch (const qtcs::LoadError& e) {
        std::cerr << "qtcs: " << e.what() << '\n';
        return kConfigError;
    } catch (const std::exception& e) {
        std::cerr << "qtcs: " << e.what() << '\n';
        return kRuntimeError;
    }
    return 0;
}
