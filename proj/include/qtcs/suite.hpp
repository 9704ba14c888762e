#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace qtcs {

/// One flag per test case; element i selects test i.
using Selection = std::vector<bool>;

/// Raised when a bundle file is missing or malformed. Carries the offending
/// file and the 1-based line number (0 when the error is not line specific).
class LoadError : public std::runtime_error {
  public:
    LoadError(std::filesystem::path file, std::size_t line, const std::string& what);

    const std::filesystem::path& file() const noexcept { return file_; }
    std::size_t line() const noexcept { return line_; }

  private:
    std::filesystem::path file_;
    std::size_t line_;
};

/// Boolean coverage matrix stored row-major, one row per test case.
class CoverageMatrix {
  public:
    CoverageMatrix() = default;
    CoverageMatrix(std::size_t tests, std::size_t statements);

    std::size_t tests() const noexcept { return tests_; }
    std::size_t statements() const noexcept { return statements_; }

    bool covers(std::size_t test, std::size_t stmt) const { return cells_[test * statements_ + stmt] != 0; }
    void set(std::size_t test, std::size_t stmt, bool value) { cells_[test * statements_ + stmt] = value ? 1 : 0; }

    /// Number of statements covered by one test.
    std::size_t row_count(std::size_t test) const;
    /// Indices of the tests covering one statement.
    std::vector<std::size_t> covering_tests(std::size_t stmt) const;

    bool operator==(const CoverageMatrix&) const = default;

  private:
    std::size_t tests_ = 0;
    std::size_t statements_ = 0;
    std::vector<std::uint8_t> cells_;
};

/// A validated regression test suite. Construction enforces:
///  - at least one test, matching coverage/costs/faults lengths;
///  - every statement column covered by at least one test;
///  - costs nonnegative with at least one strictly positive.
class TestSuite {
  public:
    TestSuite(std::string name, CoverageMatrix coverage, std::vector<double> costs, std::vector<bool> faults);

    const std::string& name() const noexcept { return name_; }
    const CoverageMatrix& coverage() const noexcept { return coverage_; }
    const std::vector<double>& costs() const noexcept { return costs_; }
    const std::vector<bool>& faults() const noexcept { return faults_; }

    std::size_t size() const noexcept { return costs_.size(); }
    std::size_t statements() const noexcept { return coverage_.statements(); }

    /// Restricts the suite to `members` (parent indices, in the given order)
    /// and drops statement columns none of them cover.
    TestSuite restrict_to(const std::vector<std::size_t>& members, std::string name) const;

    bool operator==(const TestSuite&) const = default;

  private:
    std::string name_;
    CoverageMatrix coverage_;
    std::vector<double> costs_;
    std::vector<bool> faults_;
};

struct ObjectiveVector {
    double total_cost = 0.0;
    std::int64_t fault_hits = 0;
    std::int64_t stmts_covered = 0;

    bool operator==(const ObjectiveVector&) const = default;
};

/// Per-test features in [0,1]: cost, fault flag, statement-coverage count.
struct FeatureMatrix {
    static constexpr std::size_t kColumns = 3;
    std::vector<double> values;  // row-major, rows() x 3

    std::size_t rows() const noexcept { return values.size() / kColumns; }
    double at(std::size_t row, std::size_t col) const { return values[row * kColumns + col]; }
    double& at(std::size_t row, std::size_t col) { return values[row * kColumns + col]; }
};

/// Loads `coverage.mtx`, `costs.txt` and `faults.txt` from a bundle directory.
TestSuite load_suite(const std::filesystem::path& bundle);

/// Writes a suite in the bundle format read by load_suite.
void save_suite(const TestSuite& suite, const std::filesystem::path& bundle);

ObjectiveVector objectives(const TestSuite& suite, const Selection& selection);

/// Min-max normalization per column; constant columns map to 0.
FeatureMatrix normalize_features(const TestSuite& suite);
FeatureMatrix normalize_features(const FeatureMatrix& raw);

/// Seeded synthetic suite. Statements left uncovered by the Bernoulli draw
/// get a covering test assigned uniformly at random.
TestSuite synth_suite(std::size_t n_tests, std::size_t n_stmts, double density, double fault_rate,
                      std::uint64_t seed);

}  // namespace qtcs
