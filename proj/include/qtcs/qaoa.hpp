#pragma once

#include "qtcs/qubo.hpp"

#include <complex>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <vector>

namespace qtcs {

/// Largest register the statevector engine accepts (2²⁴ amplitudes, 256 MiB).
inline constexpr std::size_t kMaxQubits = 24;

/// Diagonal of the cost Hamiltonian: energies[b] is the QUBO energy of the
/// bitstring whose bit i is x_i.
struct EnergyTable {
    std::size_t qubits = 0;
    std::vector<double> energies;
    /// Distinct energies and, per bitstring, its position in `levels`. Filled
    /// by index_levels when the table has few distinct values; apply_phase
    /// then evaluates one complex exponential per level.
    std::vector<double> levels;
    std::vector<std::uint32_t> level_of;
};

/// Populates levels/level_of when the number of distinct energies is at most
/// a quarter of the table size; clears them otherwise.
void index_levels(EnergyTable& table);

/// Copy of `table` with every energy divided by `divisor`.
EnergyTable rescaled(const EnergyTable& table, double divisor);

/// Dense register of 2ⁿ amplitudes, stored as interleaved re/im doubles.
class StateVector {
  public:
    using Amplitude = std::complex<double>;

    explicit StateVector(std::size_t qubits);

    /// Equal superposition, every amplitude 2^{-n/2}.
    static StateVector uniform(std::size_t qubits);
    static StateVector basis(std::size_t qubits, std::uint64_t index);

    std::size_t qubits() const noexcept { return qubits_; }
    std::size_t dimension() const noexcept { return amplitudes_.size(); }

    Amplitude& operator[](std::size_t index) { return amplitudes_[index]; }
    const Amplitude& operator[](std::size_t index) const { return amplitudes_[index]; }

    std::vector<Amplitude>& amplitudes() noexcept { return amplitudes_; }
    const std::vector<Amplitude>& amplitudes() const noexcept { return amplitudes_; }

    double norm_squared() const;

  private:
    std::size_t qubits_;
    std::vector<Amplitude> amplitudes_;
};

struct QaoaParams {
    std::vector<double> gammas;
    std::vector<double> betas;

    std::size_t layers() const noexcept { return gammas.size(); }
};

EnergyTable energy_table(const QuboModel& model, std::size_t max_qubits = kMaxQubits);

/// amplitude[b] *= exp(-i·gamma·energies[b]).
void apply_phase(StateVector& state, const EnergyTable& table, double gamma);

/// ∏_j exp(-i·beta·X_j).
void apply_mixer(StateVector& state, double beta);

/// Uniform superposition followed by p alternating phase/mixer layers.
StateVector run_circuit(const EnergyTable& table, const QaoaParams& params);
/// Same, reusing `state` (which must have table.qubits qubits) as the register.
void run_circuit(const EnergyTable& table, const QaoaParams& params, StateVector& state);

double expectation(const StateVector& state, const EnergyTable& table);

struct OptimizeOptions {
    std::size_t layers = 3;
    std::size_t restarts = 5;
    std::uint64_t seed = 0;
    /// Per-start budget is evaluations_per_angle · 2p.
    std::size_t evaluations_per_angle = 200;
    double tolerance = 1e-6;
    /// When set, receives one JSON line per optimizer iteration.
    std::ostream* trace = nullptr;
};

struct OptimizeResult {
    QaoaParams params;
    double value = 0.0;
    std::size_t evaluations = 0;
    std::size_t iterations = 0;
};

/// Nelder-Mead over the 2p angles from `restarts` random starts
/// (γ ~ U(0, π), β ~ U(0, π/2)) plus the all-zero start. Returns the best
/// result; ties go to the earlier start. Starts run concurrently.
OptimizeResult optimize_params(const EnergyTable& table, const OptimizeOptions& options);
OptimizeResult optimize_params(const EnergyTable& table, std::size_t layers, std::size_t restarts, std::uint64_t seed);

/// Seeded i.i.d. measurements in the computational basis.
std::map<std::uint64_t, std::uint64_t> sample(const StateVector& state, std::uint64_t shots, std::uint64_t seed);

struct QaoaConfig {
    std::size_t layers = 3;
    std::size_t restarts = 5;
    std::uint64_t shots = 2048;
    std::uint64_t seed = 0;
    std::size_t evaluations_per_angle = 200;
    std::ostream* trace = nullptr;
};

struct QaoaDiagnostics {
    /// Optimized ⟨H⟩ in the model's energy units.
    double optimizer_value = 0.0;
    /// Factor the energies were divided by before the angle search.
    double energy_scale = 1.0;
    std::size_t evaluations = 0;
    std::size_t iterations = 0;
    /// Shannon entropy (bits) of the empirical measurement distribution.
    double sample_entropy = 0.0;
    std::size_t distinct_samples = 0;
    QaoaParams params;
};

struct QaoaResult {
    std::uint64_t bits = 0;
    double energy = 0.0;
    QaoaDiagnostics diagnostics;
};

/// Optimizes angles on the energy table normalized to max |E| = 1, runs the
/// circuit at the optimum, samples it, and returns the lowest-energy sample
/// (ties: smallest bitstring).
QaoaResult qaoa_select(const QuboModel& model, const QaoaConfig& config);

}  // namespace qtcs
