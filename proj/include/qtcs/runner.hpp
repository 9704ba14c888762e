#pragma once

#include "qtcs/pareto.hpp"
#include "qtcs/qaoa.hpp"
#include "qtcs/stats.hpp"
#include "qtcs/suite.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace qtcs {

inline constexpr const char* kQaoaTcs = "QAOA-TCS";
inline constexpr const char* kAnnealing = "SA(SelectQA-QUBO)";
inline constexpr const char* kGreedy = "AdditionalGreedy";

struct SynthParams {
    std::size_t tests = 0;
    std::size_t statements = 0;
    double density = 0.0;
    double fault_rate = 0.0;
    std::uint64_t seed = 0;
};

struct ExperimentConfig {
    std::optional<std::filesystem::path> bundle;
    std::optional<SynthParams> synth;
    double alpha = 0.5;
    /// 0 selects ceil(#tests / max_cluster_size) + 1.
    std::size_t k = 0;
    std::size_t max_cluster_size = 20;
    std::size_t layers = 3;
    std::size_t restarts = 5;
    std::uint64_t shots = 2048;
    std::size_t evaluations_per_angle = 200;
    std::size_t sa_sweeps = 1000;
    std::size_t repetitions = 10;
    std::uint64_t seed = 0;
    std::filesystem::path output;
    /// Fronts produced elsewhere (front CSV format) to include in the reference front.
    std::vector<std::filesystem::path> imported_fronts;
    bool trace = false;

    /// Throws std::invalid_argument naming the first violated constraint.
    void validate() const;
};

struct ClusterOutcome {
    std::vector<std::size_t> members;  // parent indices
    std::uint64_t bits = 0;
    double energy = 0.0;
    QaoaDiagnostics diagnostics;
};

struct AlgorithmRun {
    std::string algorithm;
    std::size_t run = 0;
    std::uint64_t seed = 0;
    Selection selection;
    Front front;
    double seconds = 0.0;
    std::vector<ClusterOutcome> clusters;  // QAOA-TCS only
};

/// Resolves the configured suite source.
TestSuite make_suite(const ExperimentConfig& config);

/// Decompose, solve one QUBO per cluster with QAOA, merge the selections,
/// and build the incremental front of the union.
AlgorithmRun run_qaoa_tcs(const TestSuite& suite, const ExperimentConfig& config, std::uint64_t run_seed,
                          std::size_t run = 0, std::ostream* trace = nullptr);
/// Simulated annealing on the whole-suite QUBO.
AlgorithmRun run_annealing(const TestSuite& suite, const ExperimentConfig& config, std::uint64_t run_seed,
                           std::size_t run = 0);
AlgorithmRun run_greedy(const TestSuite& suite, std::size_t run = 0, std::uint64_t run_seed = 0);

/// One row of runs.csv.
struct RunRecord {
    std::string algorithm;
    std::size_t run = 0;
    std::uint64_t seed = 0;
    std::size_t selected = 0;
    ObjectiveVector objectives;
    std::size_t front_size = 0;
    std::size_t contributions = 0;
};

/// One row of timing.csv.
struct TimingRecord {
    std::string algorithm;
    std::size_t run = 0;
    double seconds = 0.0;
};

struct MeanStd {
    double mean = 0.0;
    double stddev = 0.0;  // sample standard deviation, 0 for one value
};

MeanStd mean_std(const std::vector<double>& values);

struct AlgorithmSummary {
    std::string algorithm;
    std::size_t runs = 0;
    MeanStd front_size;
    MeanStd contributions;
    MeanStd seconds;
};

struct ExperimentReport {
    std::vector<RunRecord> runs;
    std::vector<TimingRecord> timings;
    Front reference;
    std::vector<AlgorithmSummary> summaries;
    std::vector<stats::StatReport> statistics;
    /// True when QAOA-TCS has the highest mean contribution among the
    /// built-in algorithms.
    bool headline_holds = false;
};

/// Summaries, statistics and the headline check from per-run records.
ExperimentReport summarize(std::vector<RunRecord> runs, std::vector<TimingRecord> timings);

/// Runs every algorithm `repetitions` times (seed = master seed + r) and
/// writes runs.csv, timing.csv, fronts.csv, reference.csv, summary.md,
/// stats.md, stats.csv and config.json into the output directory.
ExperimentReport run_experiment(const ExperimentConfig& config);

/// Recomputes summaries and statistics from runs.csv and timing.csv in
/// `dir`, rewriting summary.md, stats.md and stats.csv.
ExperimentReport recompute_statistics(const std::filesystem::path& dir);

std::vector<RunRecord> read_runs_csv(const std::filesystem::path& file);
std::vector<TimingRecord> read_timing_csv(const std::filesystem::path& file);

}  // namespace qtcs
