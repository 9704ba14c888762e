#include "qtcs/runner.hpp"

#include "qtcs/decompose.hpp"
#include "qtcs/qubo.hpp"
#include "qtcs/random.hpp"
#include "qtcs/selectors.hpp"

#include "json.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <memory>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace qtcs {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> fields;
    std::istringstream row(line);
    std::string field;
    while (std::getline(row, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    return fields;
}

std::vector<std::vector<std::string>> read_csv_rows(const std::filesystem::path& file, std::size_t columns) {
    std::ifstream in(file);
    if (!in) throw std::runtime_error("cannot open " + file.string());
    std::vector<std::vector<std::string>> rows;
    std::string line;
    std::size_t number = 0;
    while (std::getline(in, line)) {
        ++number;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (number == 1 || line.empty()) continue;  // header
        auto fields = split_csv(line);
        if (fields.size() != columns) {
            throw std::runtime_error(file.string() + ":" + std::to_string(number) + ": expected " +
                                     std::to_string(columns) + " fields");
        }
        rows.push_back(std::move(fields));
    }
    return rows;
}

std::string fmt_mean_std(const MeanStd& m, int digits) {
    std::ostringstream out;
    out << std::fixed << std::setprecision(digits) << m.mean << " ± " << m.stddev;
    return out.str();
}

void write_runs_csv(const std::vector<RunRecord>& runs, const std::filesystem::path& file) {
    std::ofstream out(file);
    out << "algorithm,run,seed,selected,cost,faults,stmts,front_size,contributions\n" << std::setprecision(17);
    for (const auto& r : runs) {
        out << r.algorithm << ',' << r.run << ',' << r.seed << ',' << r.selected << ',' << r.objectives.total_cost << ','
            << r.objectives.fault_hits << ',' << r.objectives.stmts_covered << ',' << r.front_size << ','
            << r.contributions << '\n';
    }
}

void write_summary(const ExperimentReport& report, const std::string& heading, const std::filesystem::path& file) {
    std::ofstream out(file);
    out << "# Test case selection experiment\n\n" << heading << "\n\n";
    out << "## Pareto fronts\n\n";
    out << "| Algorithm | Runs | Front size | Non-dominated in reference | Execution time (s) |\n";
    out << "|---|---|---|---|---|\n";
    for (const auto& s : report.summaries) {
        out << "| " << s.algorithm << " | " << s.runs << " | " << fmt_mean_std(s.front_size, 2) << " | "
            << fmt_mean_std(s.contributions, 2) << " | " << fmt_mean_std(s.seconds, 4) << " |\n";
    }
    out << "\nReference front size: " << report.reference.size() << "\n\n";
    out << "## Headline check\n\n";
    if (report.headline_holds) {
        out << "QAOA-TCS has the highest mean number of non-dominated solutions.\n";
    } else {
        out << "DEVIATION: QAOA-TCS does not have the highest mean number of non-dominated solutions.\n";
    }
}

void write_stats(const ExperimentReport& report, const std::filesystem::path& dir) {
    std::ofstream md(dir / "stats.md");
    md << "# Statistical comparison\n\n";
    for (const auto& r : report.statistics) stats::write_markdown(r, md);
    std::ofstream csv(dir / "stats.csv");
    stats::write_csv(report.statistics, csv);
}

nlohmann::json config_json(const ExperimentConfig& c) {
    nlohmann::json j;
    if (c.bundle) j["bundle"] = c.bundle->string();
    if (c.synth) {
        j["synth"] = {{"tests", c.synth->tests},
                      {"statements", c.synth->statements},
                      {"density", c.synth->density},
                      {"fault_rate", c.synth->fault_rate},
                      {"seed", c.synth->seed}};
    }
    j["alpha"] = c.alpha;
    j["k"] = c.k;
    j["max_cluster_size"] = c.max_cluster_size;
    j["qaoa"] = {{"p", c.layers}, {"restarts", c.restarts}, {"shots", c.shots},
                 {"evaluations_per_angle", c.evaluations_per_angle}};
    j["sa_sweeps"] = c.sa_sweeps;
    j["repetitions"] = c.repetitions;
    j["seed"] = c.seed;
    std::vector<std::string> imports;
    for (const auto& p : c.imported_fronts) imports.push_back(p.string());
    j["imported_fronts"] = imports;
    return j;
}

}  // namespace

void ExperimentConfig::validate() const {
    if (bundle.has_value() == synth.has_value()) throw std::invalid_argument("exactly one of bundle or synth is required");
    if (synth) {
        if (synth->tests < 1 || synth->statements < 1) throw std::invalid_argument("synth needs tests and statements >= 1");
        if (!(synth->density > 0.0 && synth->density <= 1.0)) throw std::invalid_argument("synth density must lie in (0, 1]");
        if (!(synth->fault_rate >= 0.0 && synth->fault_rate <= 1.0)) {
            throw std::invalid_argument("synth fault rate must lie in [0, 1]");
        }
    }
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw std::invalid_argument("alpha must lie in [0, 1]");
    if (max_cluster_size < 1 || max_cluster_size > kMaxQubits) {
        throw std::invalid_argument("max cluster size must lie in [1, " + std::to_string(kMaxQubits) + "]");
    }
    if (layers < 1) throw std::invalid_argument("p must be at least 1");
    if (restarts < 1) throw std::invalid_argument("restarts must be at least 1");
    if (shots < 1) throw std::invalid_argument("shots must be at least 1");
    if (evaluations_per_angle < 1) throw std::invalid_argument("optimizer budget must be positive");
    if (sa_sweeps < 1) throw std::invalid_argument("SA sweeps must be at least 1");
    if (repetitions < 1) throw std::invalid_argument("repetitions must be at least 1");
}

TestSuite make_suite(const ExperimentConfig& config) {
    if (config.bundle) return load_suite(*config.bundle);
    if (config.synth) {
        const auto& s = *config.synth;
        return synth_suite(s.tests, s.statements, s.density, s.fault_rate, s.seed);
    }
    throw std::invalid_argument("no suite source configured");
}

AlgorithmRun run_qaoa_tcs(const TestSuite& suite, const ExperimentConfig& config, std::uint64_t run_seed,
                          std::size_t run, std::ostream* trace) {
    const auto start = Clock::now();
    AlgorithmRun out{kQaoaTcs, run, run_seed, Selection(suite.size(), false), {}, 0.0, {}};
    const std::size_t k = config.k > 0 ? config.k : default_cluster_count(suite.size(), config.max_cluster_size);
    const auto parts = decompose(suite, k, config.max_cluster_size, derive_seed(run_seed, 1));

    for (std::size_t c = 0; c < parts.size(); ++c) {
        const auto& part = parts[c];
        const double penalty = penalty_upper_bound(part.suite, config.alpha);
        const QuboModel model = build_qubo(part.suite, config.alpha, penalty);
        QaoaConfig qc;
        qc.layers = config.layers;
        qc.restarts = config.restarts;
        qc.shots = config.shots;
        qc.seed = derive_seed(run_seed, 100 + c);
        qc.evaluations_per_angle = config.evaluations_per_angle;
        qc.trace = trace;
        const QaoaResult result = qaoa_select(model, qc);
        for (std::size_t r = 0; r < part.parent_index.size(); ++r) {
            if ((result.bits >> r) & 1U) out.selection[part.parent_index[r]] = true;
        }
        out.clusters.push_back({part.parent_index, result.bits, result.energy, result.diagnostics});
    }
    out.front = incremental_front(suite, out.selection, {kQaoaTcs, run});
    out.seconds = seconds_since(start);
    return out;
}

AlgorithmRun run_annealing(const TestSuite& suite, const ExperimentConfig& config, std::uint64_t run_seed,
                           std::size_t run) {
    const auto start = Clock::now();
    const QuboModel model = build_qubo(suite, config.alpha, penalty_upper_bound(suite, config.alpha));
    const AnnealResult result = simulated_annealing(model, config.sa_sweeps, derive_seed(run_seed, 2));
    AlgorithmRun out{kAnnealing, run, run_seed, result.selection, {}, 0.0, {}};
    out.front = incremental_front(suite, out.selection, {kAnnealing, run});
    out.seconds = seconds_since(start);
    return out;
}

AlgorithmRun run_greedy(const TestSuite& suite, std::size_t run, std::uint64_t run_seed) {
    const auto start = Clock::now();
    AlgorithmRun out{kGreedy, run, run_seed, Selection(suite.size(), false), {}, 0.0, {}};
    for (std::size_t t : additional_greedy(suite)) out.selection[t] = true;
    out.front = incremental_front(suite, out.selection, {kGreedy, run});
    out.seconds = seconds_since(start);
    return out;
}

MeanStd mean_std(const std::vector<double>& values) {
    MeanStd out;
    if (values.empty()) return out;
    out.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
    if (values.size() > 1) {
        double ss = 0.0;
        for (double v : values) ss += (v - out.mean) * (v - out.mean);
        out.stddev = std::sqrt(ss / static_cast<double>(values.size() - 1));
    }
    return out;
}

ExperimentReport summarize(std::vector<RunRecord> runs, std::vector<TimingRecord> timings) {
    ExperimentReport report;
    report.runs = std::move(runs);
    report.timings = std::move(timings);

    // Algorithms in order of first appearance.
    std::vector<std::string> algorithms;
    for (const auto& r : report.runs) {
        if (std::find(algorithms.begin(), algorithms.end(), r.algorithm) == algorithms.end()) {
            algorithms.push_back(r.algorithm);
        }
    }
    std::vector<stats::Sample> contributions;
    std::vector<stats::Sample> seconds;
    for (const auto& name : algorithms) {
        AlgorithmSummary s;
        s.algorithm = name;
        std::vector<double> sizes;
        std::vector<double> contrib;
        std::vector<double> secs;
        for (const auto& r : report.runs) {
            if (r.algorithm != name) continue;
            sizes.push_back(static_cast<double>(r.front_size));
            contrib.push_back(static_cast<double>(r.contributions));
        }
        for (const auto& t : report.timings) {
            if (t.algorithm == name) secs.push_back(t.seconds);
        }
        s.runs = sizes.size();
        s.front_size = mean_std(sizes);
        s.contributions = mean_std(contrib);
        s.seconds = mean_std(secs);
        report.summaries.push_back(s);
        contributions.push_back(std::move(contrib));
        seconds.push_back(std::move(secs));
    }

    const bool timed = std::all_of(seconds.begin(), seconds.end(), [](const auto& s) { return !s.empty(); });
    if (algorithms.size() >= 2) {
        report.statistics.push_back(stats::compare("Number of non-dominated solutions", algorithms, contributions));
        if (timed) report.statistics.push_back(stats::compare("Execution time", algorithms, seconds));
    }

    const auto find = [&](const std::string& name) {
        return std::find_if(report.summaries.begin(), report.summaries.end(),
                            [&](const AlgorithmSummary& s) { return s.algorithm == name; });
    };
    const auto qaoa = find(kQaoaTcs);
    report.headline_holds = qaoa != report.summaries.end();
    for (const char* other : {kAnnealing, kGreedy}) {
        const auto it = find(other);
        if (qaoa != report.summaries.end() && it != report.summaries.end()) {
            report.headline_holds = report.headline_holds && qaoa->contributions.mean >= it->contributions.mean;
        }
    }
    return report;
}

ExperimentReport run_experiment(const ExperimentConfig& config) {
    config.validate();
    const TestSuite suite = make_suite(config);
    std::filesystem::create_directories(config.output);

    {
        std::ofstream echo(config.output / "config.json");
        echo << config_json(config).dump(2) << '\n';
    }

    std::vector<Front> imported;
    for (const auto& path : config.imported_fronts) {
        std::ifstream in(path);
        if (!in) throw std::runtime_error("cannot open imported front " + path.string());
        Front f = read_front_csv(in, suite.size());
        // Objectives are recomputed against this suite.
        for (auto& p : f.points) p.objectives = objectives(suite, p.selection);
        imported.push_back(std::move(f));
    }

    std::ofstream fronts_out(config.output / "fronts.csv");
    fronts_out << "algorithm,run,selection_hex,cost,faults,stmts\n";
    std::ofstream timing_out(config.output / "timing.csv");
    timing_out << "algorithm,run,seconds\n" << std::setprecision(17);
    std::unique_ptr<std::ofstream> trace;
    if (config.trace) trace = std::make_unique<std::ofstream>(config.output / "trace.jsonl");

    std::vector<AlgorithmRun> runs;
    std::vector<TimingRecord> timings;
    auto record = [&](AlgorithmRun run) {
        write_front_csv(run.front, fronts_out, false);
        fronts_out.flush();
        timing_out << run.algorithm << ',' << run.run << ',' << run.seconds << '\n';
        timing_out.flush();
        timings.push_back({run.algorithm, run.run, run.seconds});
        runs.push_back(std::move(run));
    };

    auto finish = [&]() {
        std::vector<Front> fronts = imported;
        for (const auto& r : runs) fronts.push_back(r.front);
        const Front reference = reference_front(fronts);
        const auto by_run = count_contributions_by_run(reference);

        std::vector<RunRecord> records;
        for (const auto& r : runs) {
            const auto it = by_run.find(Origin{r.algorithm, r.run});
            records.push_back({r.algorithm, r.run, r.seed,
                               static_cast<std::size_t>(std::count(r.selection.begin(), r.selection.end(), true)),
                               objectives(suite, r.selection), r.front.size(), it == by_run.end() ? 0 : it->second});
        }
        for (const auto& f : imported) {
            std::map<Origin, std::size_t> sizes;
            for (const auto& p : f.points) ++sizes[p.origin];
            for (const auto& [origin, size] : sizes) {
                const auto it = by_run.find(origin);
                records.push_back({origin.algorithm, origin.run, 0, 0, {}, size, it == by_run.end() ? 0 : it->second});
            }
        }
        write_runs_csv(records, config.output / "runs.csv");
        {
            std::ofstream ref(config.output / "reference.csv");
            write_front_csv(reference, ref);
        }
        ExperimentReport report = summarize(std::move(records), timings);
        report.reference = reference;
        std::ostringstream heading;
        heading << "Suite `" << suite.name() << "`: " << suite.size() << " tests, " << suite.statements()
                << " statements. Repetitions: " << config.repetitions << ", master seed " << config.seed << ".";
        write_summary(report, heading.str(), config.output / "summary.md");
        write_stats(report, config.output);
        return report;
    };

    try {
        for (std::size_t r = 0; r < config.repetitions; ++r) {
            const std::uint64_t seed = config.seed + r;
            record(run_qaoa_tcs(suite, config, seed, r, trace.get()));
            record(run_annealing(suite, config, seed, r));
            record(run_greedy(suite, r, seed));
        }
    } catch (...) {
        // Flush whatever completed before surfacing the failure.
        if (!runs.empty()) finish();
        throw;
    }
    return finish();
}

std::vector<RunRecord> read_runs_csv(const std::filesystem::path& file) {
    std::vector<RunRecord> out;
    for (const auto& f : read_csv_rows(file, 9)) {
        RunRecord r;
        r.algorithm = f[0];
        r.run = std::stoul(f[1]);
        r.seed = std::stoull(f[2]);
        r.selected = std::stoul(f[3]);
        r.objectives = {std::stod(f[4]), std::stoll(f[5]), std::stoll(f[6])};
        r.front_size = std::stoul(f[7]);
        r.contributions = std::stoul(f[8]);
        out.push_back(std::move(r));
    }
    return out;
}

std::vector<TimingRecord> read_timing_csv(const std::filesystem::path& file) {
    std::vector<TimingRecord> out;
    for (const auto& f : read_csv_rows(file, 3)) out.push_back({f[0], std::stoul(f[1]), std::stod(f[2])});
    return out;
}

ExperimentReport recompute_statistics(const std::filesystem::path& dir) {
    auto runs = read_runs_csv(dir / "runs.csv");
    std::vector<TimingRecord> timings;
    if (std::filesystem::exists(dir / "timing.csv")) timings = read_timing_csv(dir / "timing.csv");
    ExperimentReport report = summarize(std::move(runs), std::move(timings));
    if (std::filesystem::exists(dir / "reference.csv")) {
        std::ifstream in(dir / "reference.csv");
        // Selection width is irrelevant for the summary; objectives come from the file.
        std::size_t width = 0;
        std::string line;
        std::getline(in, line);
        while (std::getline(in, line)) {
            const auto fields = split_csv(line);
            if (fields.size() == 6) width = std::max(width, 4 * fields[2].size());
        }
        in.clear();
        in.seekg(0);
        report.reference = read_front_csv(in, width);
    }
    write_summary(report, "Recomputed from `" + (dir / "runs.csv").string() + "`.", dir / "summary.md");
    write_stats(report, dir);
    return report;
}

}  // namespace qtcs
