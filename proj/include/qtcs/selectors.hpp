#pragma once

#include "qtcs/qubo.hpp"
#include "qtcs/suite.hpp"

#include <cstddef>
#include <cstdint>
#include <vector>

namespace qtcs {

/// Cost substituted for zero-cost tests in coverage-per-cost ratios.
inline constexpr double kZeroCostEpsilon = 1e-9;

/// Orders `candidates` by repeatedly taking the one with the most newly
/// covered statements per unit cost (ties: lower index). Once no candidate
/// adds coverage, either stops (`stop_when_saturated`) or appends the rest
/// in index order.
std::vector<std::size_t> greedy_order(const TestSuite& suite, const std::vector<std::size_t>& candidates,
                                      bool stop_when_saturated);

/// Additional Greedy over the whole suite; stops when nothing adds coverage.
std::vector<std::size_t> additional_greedy(const TestSuite& suite);

struct AnnealResult {
    Selection selection;
    double energy = 0.0;
};

/// Single-bit-flip Metropolis over `sweeps` full sweeps, temperature falling
/// geometrically from the largest single-flip |ΔE| at the start state to
/// 1e-3 of it. Returns the best state seen.
AnnealResult simulated_annealing(const QuboModel& model, std::size_t sweeps, std::uint64_t seed);

struct ExhaustiveResult {
    std::uint64_t bits = 0;
    double energy = 0.0;
};

inline constexpr std::size_t kMaxExhaustive = 20;

/// Global minimum by Gray-code enumeration; ties go to the smallest bitstring.
ExhaustiveResult exhaustive_min(const QuboModel& model);

}  // namespace qtcs
