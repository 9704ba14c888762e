#pragma once

#include "qtcs/suite.hpp"

#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace qtcs::fixtures {

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
  public:
    explicit TempDir(const std::string& tag) {
        static int counter = 0;
        path_ = std::filesystem::temp_directory_path() /
                ("qtcs-" + tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }

  private:
    std::filesystem::path path_;
};

inline void write_file(const std::filesystem::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    out << text;
}

inline TestSuite make_suite(const std::vector<std::vector<int>>& rows, std::vector<double> costs,
                            std::vector<bool> faults) {
    CoverageMatrix m(rows.size(), rows.empty() ? 0 : rows.front().size());
    for (std::size_t t = 0; t < rows.size(); ++t)
        for (std::size_t k = 0; k < rows[t].size(); ++k) m.set(t, k, rows[t][k] != 0);
    return TestSuite("fixture", std::move(m), std::move(costs), std::move(faults));
}

/// Two tests: coverage [[1,0],[1,1]], costs [2,3], faults [1,0].
inline TestSuite two_test_suite() { return make_suite({{1, 0}, {1, 1}}, {2.0, 3.0}, {true, false}); }

/// Two tests sharing one statement: costs [2,3], faults [1,0].
inline TestSuite shared_statement_suite() { return make_suite({{1}, {1}}, {2.0, 3.0}, {true, false}); }

}  // namespace qtcs::fixtures
