#include "qtcs/suite.hpp"

#include "qtcs/random.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

namespace qtcs {

LoadError::LoadError(std::filesystem::path file, std::size_t line, const std::string& what)
    : std::runtime_error(file.string() + (line > 0 ? ":" + std::to_string(line) : std::string()) + ": " + what),
      file_(std::move(file)),
      line_(line) {}

CoverageMatrix::CoverageMatrix(std::size_t tests, std::size_t statements)
    : tests_(tests), statements_(statements), cells_(tests * statements, 0) {}

std::size_t CoverageMatrix::row_count(std::size_t test) const {
    const auto* row = cells_.data() + test * statements_;
    return static_cast<std::size_t>(std::count(row, row + statements_, std::uint8_t{1}));
}

std::vector<std::size_t> CoverageMatrix::covering_tests(std::size_t stmt) const {
    std::vector<std::size_t> out;
    for (std::size_t t = 0; t < tests_; ++t) {
        if (covers(t, stmt)) out.push_back(t);
    }
    return out;
}

TestSuite::TestSuite(std::string name, CoverageMatrix coverage, std::vector<double> costs, std::vector<bool> faults)
    : name_(std::move(name)), coverage_(std::move(coverage)), costs_(std::move(costs)), faults_(std::move(faults)) {
    if (costs_.empty()) throw std::invalid_argument("test suite must contain at least one test");
    if (coverage_.tests() != costs_.size() || faults_.size() != costs_.size()) {
        throw std::invalid_argument("dimension mismatch: coverage has " + std::to_string(coverage_.tests()) +
                                    " rows, costs " + std::to_string(costs_.size()) + ", faults " +
                                    std::to_string(faults_.size()));
    }
    bool any_positive = false;
    for (std::size_t i = 0; i < costs_.size(); ++i) {
        if (!(costs_[i] >= 0.0) || !std::isfinite(costs_[i])) {
            throw std::invalid_argument("test " + std::to_string(i) + " has invalid cost");
        }
        any_positive = any_positive || costs_[i] > 0.0;
    }
    if (!any_positive) throw std::invalid_argument("at least one test cost must be positive");
    for (std::size_t k = 0; k < coverage_.statements(); ++k) {
        bool covered = false;
        for (std::size_t t = 0; t < coverage_.tests() && !covered; ++t) covered = coverage_.covers(t, k);
        if (!covered) throw std::invalid_argument("statement " + std::to_string(k) + " is not covered by any test");
    }
}

TestSuite TestSuite::restrict_to(const std::vector<std::size_t>& members, std::string name) const {
    std::vector<std::size_t> kept;
    for (std::size_t k = 0; k < statements(); ++k) {
        if (std::any_of(members.begin(), members.end(), [&](std::size_t t) { return coverage_.covers(t, k); })) {
            kept.push_back(k);
        }
    }
    CoverageMatrix sub(members.size(), kept.size());
    std::vector<double> costs;
    std::vector<bool> faults;
    costs.reserve(members.size());
    faults.reserve(members.size());
    for (std::size_t r = 0; r < members.size(); ++r) {
        const std::size_t t = members[r];
        for (std::size_t c = 0; c < kept.size(); ++c) sub.set(r, c, coverage_.covers(t, kept[c]));
        costs.push_back(costs_[t]);
        faults.push_back(faults_[t]);
    }
    // All-zero costs break the positive-cost invariant; bump them to the
    // smallest positive double, which leaves every sum unchanged in practice.
    if (std::none_of(costs.begin(), costs.end(), [](double c) { return c > 0.0; }) && !costs.empty()) {
        std::fill(costs.begin(), costs.end(), std::numeric_limits<double>::min());
    }
    return TestSuite(std::move(name), std::move(sub), std::move(costs), std::move(faults));
}

namespace {

struct Line {
    std::size_t number;
    std::string text;
};

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return std::string(s.substr(first, last - first + 1));
}

std::vector<Line> read_lines(const std::filesystem::path& file, bool allow_comments) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw LoadError(file, 0, "cannot open file");
    std::vector<Line> lines;
    std::string raw;
    std::size_t number = 0;
    while (std::getline(in, raw)) {
        ++number;
        std::string text = trim(raw);
        if (text.empty()) continue;
        if (allow_comments && text.front() == '#') continue;
        lines.push_back({number, std::move(text)});
    }
    return lines;
}

bool parse_bit(std::string_view token, bool& out) {
    if (token == "0") {
        out = false;
        return true;
    }
    if (token == "1") {
        out = true;
        return true;
    }
    return false;
}

}  // namespace

TestSuite load_suite(const std::filesystem::path& bundle) {
    const auto cov_path = bundle / "coverage.mtx";
    const auto cost_path = bundle / "costs.txt";
    const auto fault_path = bundle / "faults.txt";

    const auto cov_lines = read_lines(cov_path, true);
    if (cov_lines.empty()) throw LoadError(cov_path, 0, "no coverage rows");

    std::vector<std::vector<bool>> rows;
    for (const auto& line : cov_lines) {
        std::istringstream tokens(line.text);
        std::vector<bool> row;
        std::string token;
        while (tokens >> token) {
            bool bit = false;
            if (!parse_bit(token, bit)) throw LoadError(cov_path, line.number, "expected 0 or 1, got '" + token + "'");
            row.push_back(bit);
        }
        if (!rows.empty() && row.size() != rows.front().size()) {
            throw LoadError(cov_path, line.number,
                            "row has " + std::to_string(row.size()) + " columns, expected " +
                                std::to_string(rows.front().size()));
        }
        rows.push_back(std::move(row));
    }

    const auto cost_lines = read_lines(cost_path, false);
    std::vector<double> costs;
    for (const auto& line : cost_lines) {
        double value = 0.0;
        const char* begin = line.text.data();
        const char* end = begin + line.text.size();
        const auto [ptr, ec] = std::from_chars(begin, end, value);
        if (ec != std::errc() || ptr != end) throw LoadError(cost_path, line.number, "invalid cost '" + line.text + "'");
        if (value < 0.0) throw LoadError(cost_path, line.number, "negative cost");
        costs.push_back(value);
    }

    const auto fault_lines = read_lines(fault_path, false);
    std::vector<bool> faults;
    for (const auto& line : fault_lines) {
        bool bit = false;
        if (!parse_bit(line.text, bit)) throw LoadError(fault_path, line.number, "expected 0 or 1");
        faults.push_back(bit);
    }

    auto check_length = [&](const std::filesystem::path& file, const std::vector<Line>& lines, std::size_t count) {
        if (count == rows.size()) return;
        // Point at the first surplus entry, or just past the last one when short.
        const std::size_t at = count > rows.size() ? lines[rows.size()].number
                                                   : (lines.empty() ? 0 : lines.back().number + 1);
        throw LoadError(file, at,
                        "dimension mismatch: " + std::to_string(count) + " entries for " +
                            std::to_string(rows.size()) + " coverage rows");
    };
    check_length(cost_path, cost_lines, costs.size());
    check_length(fault_path, fault_lines, faults.size());

    CoverageMatrix coverage(rows.size(), rows.front().size());
    for (std::size_t t = 0; t < rows.size(); ++t) {
        for (std::size_t k = 0; k < rows[t].size(); ++k) coverage.set(t, k, rows[t][k]);
    }
    for (std::size_t k = 0; k < coverage.statements(); ++k) {
        if (coverage.covering_tests(k).empty()) {
            throw LoadError(cov_path, cov_lines.front().number,
                            "statement column " + std::to_string(k + 1) + " is not covered by any test");
        }
    }
    if (std::none_of(costs.begin(), costs.end(), [](double c) { return c > 0.0; })) {
        throw LoadError(cost_path, cost_lines.front().number, "at least one cost must be positive");
    }

    return TestSuite(bundle.filename().string(), std::move(coverage), std::move(costs), std::move(faults));
}

void save_suite(const TestSuite& suite, const std::filesystem::path& bundle) {
    std::filesystem::create_directories(bundle);
    std::ofstream cov(bundle / "coverage.mtx");
    cov << "# " << suite.name() << ": " << suite.size() << " tests x " << suite.statements() << " statements\n";
    for (std::size_t t = 0; t < suite.size(); ++t) {
        for (std::size_t k = 0; k < suite.statements(); ++k) {
            cov << (k ? " " : "") << (suite.coverage().covers(t, k) ? '1' : '0');
        }
        cov << '\n';
    }
    std::ofstream costs(bundle / "costs.txt");
    costs << std::setprecision(17);
    for (double c : suite.costs()) costs << c << '\n';
    std::ofstream faults(bundle / "faults.txt");
    for (bool f : suite.faults()) faults << (f ? 1 : 0) << '\n';
}

ObjectiveVector objectives(const TestSuite& suite, const Selection& selection) {
    if (selection.size() != suite.size()) {
        throw std::invalid_argument("selection length " + std::to_string(selection.size()) + " does not match suite size " +
                                    std::to_string(suite.size()));
    }
    ObjectiveVector out;
    std::vector<bool> covered(suite.statements(), false);
    for (std::size_t t = 0; t < suite.size(); ++t) {
        if (!selection[t]) continue;
        out.total_cost += suite.costs()[t];
        out.fault_hits += suite.faults()[t] ? 1 : 0;
        for (std::size_t k = 0; k < suite.statements(); ++k) {
            if (suite.coverage().covers(t, k)) covered[k] = true;
        }
    }
    out.stmts_covered = std::count(covered.begin(), covered.end(), true);
    return out;
}

FeatureMatrix normalize_features(const FeatureMatrix& raw) {
    FeatureMatrix out = raw;
    for (std::size_t c = 0; c < FeatureMatrix::kColumns; ++c) {
        double lo = std::numeric_limits<double>::infinity();
        double hi = -lo;
        for (std::size_t r = 0; r < raw.rows(); ++r) {
            lo = std::min(lo, raw.at(r, c));
            hi = std::max(hi, raw.at(r, c));
        }
        const double span = hi - lo;
        for (std::size_t r = 0; r < raw.rows(); ++r) {
            out.at(r, c) = span > 0.0 ? (raw.at(r, c) - lo) / span : 0.0;
        }
    }
    return out;
}

FeatureMatrix normalize_features(const TestSuite& suite) {
    FeatureMatrix raw;
    raw.values.reserve(suite.size() * FeatureMatrix::kColumns);
    for (std::size_t t = 0; t < suite.size(); ++t) {
        raw.values.push_back(suite.costs()[t]);
        raw.values.push_back(suite.faults()[t] ? 1.0 : 0.0);
        raw.values.push_back(static_cast<double>(suite.coverage().row_count(t)));
    }
    return normalize_features(raw);
}

TestSuite synth_suite(std::size_t n_tests, std::size_t n_stmts, double density, double fault_rate, std::uint64_t seed) {
    if (n_tests < 1 || n_stmts < 1) throw std::invalid_argument("synth_suite needs at least one test and one statement");
    if (!(density > 0.0 && density <= 1.0)) throw std::invalid_argument("density must lie in (0, 1]");
    if (!(fault_rate >= 0.0 && fault_rate <= 1.0)) throw std::invalid_argument("fault_rate must lie in [0, 1]");

    Rng rng(seed);
    CoverageMatrix coverage(n_tests, n_stmts);
    for (std::size_t t = 0; t < n_tests; ++t) {
        for (std::size_t k = 0; k < n_stmts; ++k) coverage.set(t, k, density >= 1.0 || rng.bernoulli(density));
    }
    for (std::size_t k = 0; k < n_stmts; ++k) {
        if (coverage.covering_tests(k).empty()) coverage.set(rng.below(n_tests), k, true);
    }
    std::vector<double> costs(n_tests);
    // Basic-block execution counts: integral, positive, roughly proportional to coverage.
    for (std::size_t t = 0; t < n_tests; ++t) {
        costs[t] = static_cast<double>(coverage.row_count(t) + 1 + rng.below(4 * coverage.row_count(t) + 10));
    }
    std::vector<bool> faults(n_tests);
    for (std::size_t t = 0; t < n_tests; ++t) faults[t] = fault_rate > 0.0 && rng.bernoulli(fault_rate);

    std::ostringstream name;
    name << "synth-" << n_tests << "x" << n_stmts << "-s" << seed;
    return TestSuite(name.str(), std::move(coverage), std::move(costs), std::move(faults));
}

}  // namespace qtcs
