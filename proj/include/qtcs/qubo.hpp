#pragma once

#include "qtcs/suite.hpp"

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <vector>

namespace qtcs {

/// Quadratic model E(x) = xᵀQx + offset over x ∈ {0,1}ⁿ, with the linear
/// terms on the diagonal of the symmetric matrix Q.
///
/// Models built from a suite carry offset 0: expanding the exactly-one
/// coverage penalty P(1 − Σ_{i∈T_k} x_i)² yields a constant +P per
/// statement, which is dropped. Energies are therefore shifted by
/// −P·#statements relative to the full penalty; minimizers are unaffected.
class QuboModel {
  public:
    /// Zero model over n variables.
    explicit QuboModel(std::size_t n, double alpha = 0.5, double penalty = 1.0);

    std::size_t size() const noexcept { return n_; }
    double alpha() const noexcept { return alpha_; }
    double penalty() const noexcept { return penalty_; }
    double offset() const noexcept { return offset_; }
    void set_offset(double offset) { offset_ = offset; }

    double at(std::size_t i, std::size_t j) const { return q_[i * n_ + j]; }
    /// Sets Q(i,j) and Q(j,i) to `value`.
    void set_symmetric(std::size_t i, std::size_t j, double value);
    void add_linear(std::size_t i, double value) { q_[i * n_ + i] += value; }
    /// Adds `pair_coefficient` to the energy of every x with x_i = x_j = 1,
    /// i ≠ j, by adding half of it to each of Q(i,j) and Q(j,i).
    void add_pair(std::size_t i, std::size_t j, double pair_coefficient);

    const std::vector<double>& matrix() const noexcept { return q_; }

  private:
    std::size_t n_;
    double alpha_;
    double penalty_;
    double offset_ = 0.0;
    std::vector<double> q_;
};

/// P = 1 + α·Σ cost, strictly above the largest value the linear part
/// α·Σ x_i cost_i − (1−α)·Σ e_i x_i can reach.
double penalty_upper_bound(const TestSuite& suite, double alpha);

QuboModel build_qubo(const TestSuite& suite, double alpha, double penalty);

double qubo_energy(const QuboModel& model, const Selection& selection);
/// Energy of the bitstring whose bit i (LSB = 0) is x_i. Requires n ≤ 64.
double qubo_energy(const QuboModel& model, std::uint64_t bits);

/// Number of statements not covered by exactly one selected test.
std::size_t penalty_violations(const TestSuite& suite, const Selection& selection);

/// Sparse triplet export: one `i j value` line per nonzero upper-triangle
/// entry; diagonal entries hold the linear terms and off-diagonal entries
/// hold the full pair coefficient Q(i,j) + Q(j,i).
void write_qubo_triplets(const QuboModel& model, std::ostream& out);

Selection selection_from_bits(std::uint64_t bits, std::size_t n);
std::uint64_t bits_from_selection(const Selection& selection);

}  // namespace qtcs
