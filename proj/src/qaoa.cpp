#include "qtcs/qaoa.hpp"

#include "qtcs/nelder_mead.hpp"
#include "qtcs/random.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <numbers>
#include <stdexcept>
#include <string>

namespace qtcs {

StateVector::StateVector(std::size_t qubits) : qubits_(qubits) {
    if (qubits > kMaxQubits) {
        throw std::invalid_argument(std::to_string(qubits) + " qubits exceed the engine cap of " +
                                    std::to_string(kMaxQubits));
    }
    amplitudes_.assign(std::size_t{1} << qubits, Amplitude{0.0, 0.0});
}

StateVector StateVector::uniform(std::size_t qubits) {
    StateVector state(qubits);
    const double amp = std::pow(2.0, -0.5 * static_cast<double>(qubits));
    std::fill(state.amplitudes_.begin(), state.amplitudes_.end(), Amplitude{amp, 0.0});
    return state;
}

StateVector StateVector::basis(std::size_t qubits, std::uint64_t index) {
    StateVector state(qubits);
    state.amplitudes_.at(index) = Amplitude{1.0, 0.0};
    return state;
}

double StateVector::norm_squared() const {
    double sum = 0.0;
    for (const auto& a : amplitudes_) sum += std::norm(a);
    return sum;
}

EnergyTable energy_table(const QuboModel& model, std::size_t max_qubits) {
    const std::size_t n = model.size();
    if (n > max_qubits || n > kMaxQubits) {
        throw std::invalid_argument("model has " + std::to_string(n) + " variables, above the cap of " +
                                    std::to_string(std::min(max_qubits, kMaxQubits)));
    }
    const std::size_t dim = std::size_t{1} << n;
    EnergyTable table;
    table.qubits = n;
    table.energies.assign(dim, 0.0);
    auto& raw = table.energies;
    // raw[b] = raw[b without its top bit h] + Q_hh + 2·Σ_{j<h, x_j=1} Q_hj,
    // the same summation order qubo_energy uses, so entries agree bit for bit.
    // The coupling sum for `low` extends the sum for `low` minus its highest
    // set bit, which keeps the ascending-j order.
    std::vector<double> coupling(dim / 2 + 1, 0.0);
    for (std::size_t h = 0; h < n; ++h) {
        const std::size_t top = std::size_t{1} << h;
        const double diagonal = model.at(h, h);
        raw[top] = raw[0] + (diagonal + 2.0 * 0.0);
        std::size_t high = 0;
        for (std::size_t low = 1; low < top; ++low) {
            if ((low >> (high + 1)) != 0) ++high;
            coupling[low] = coupling[low ^ (std::size_t{1} << high)] + model.at(h, high);
            raw[top | low] = raw[low] + (diagonal + 2.0 * coupling[low]);
        }
    }
    const double offset = model.offset();
    for (double& e : raw) e += offset;
    index_levels(table);
    return table;
}

void index_levels(EnergyTable& table) {
    table.levels.clear();
    table.level_of.clear();
    std::vector<double> sorted = table.energies;
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    if (sorted.size() > table.energies.size() / 4) return;
    table.level_of.resize(table.energies.size());
    for (std::size_t b = 0; b < table.energies.size(); ++b) {
        const auto it = std::lower_bound(sorted.begin(), sorted.end(), table.energies[b]);
        table.level_of[b] = static_cast<std::uint32_t>(it - sorted.begin());
    }
    table.levels = std::move(sorted);
}

EnergyTable rescaled(const EnergyTable& table, double divisor) {
    EnergyTable out = table;
    for (double& e : out.energies) e /= divisor;
    for (double& e : out.levels) e /= divisor;
    return out;
}

void apply_phase(StateVector& state, const EnergyTable& table, double gamma) {
    if (table.energies.size() != state.dimension()) throw std::invalid_argument("energy table and state differ in size");
    auto& amps = state.amplitudes();
    if (!table.levels.empty() && table.level_of.size() == amps.size()) {
        std::vector<StateVector::Amplitude> factors(table.levels.size());
        for (std::size_t k = 0; k < factors.size(); ++k) {
            const double angle = -gamma * table.levels[k];
            factors[k] = {std::cos(angle), std::sin(angle)};
        }
        for (std::size_t b = 0; b < amps.size(); ++b) amps[b] *= factors[table.level_of[b]];
        return;
    }
    for (std::size_t b = 0; b < amps.size(); ++b) {
        const double angle = -gamma * table.energies[b];
        amps[b] *= StateVector::Amplitude{std::cos(angle), std::sin(angle)};
    }
}

void apply_mixer(StateVector& state, double beta) {
    if (beta == 0.0) return;
    const double c = std::cos(beta);
    const double s = std::sin(beta);
    double* data = reinterpret_cast<double*>(state.amplitudes().data());
    const std::size_t dim = state.dimension();
    for (std::size_t q = 0; q < state.qubits(); ++q) {
        const std::size_t stride = std::size_t{1} << q;
        for (std::size_t base = 0; base < dim; base += 2 * stride) {
            double* __restrict a = data + 2 * base;
            double* __restrict b = data + 2 * (base + stride);
            // [a; b] <- [[c, -is], [-is, c]] [a; b]
            for (std::size_t k = 0; k < 2 * stride; k += 2) {
                const double ar = a[k], ai = a[k + 1], br = b[k], bi = b[k + 1];
                a[k] = c * ar + s * bi;
                a[k + 1] = c * ai - s * br;
                b[k] = c * br + s * ai;
                b[k + 1] = c * bi - s * ar;
            }
        }
    }
}

void run_circuit(const EnergyTable& table, const QaoaParams& params, StateVector& state) {
    if (params.gammas.size() != params.betas.size() || params.gammas.empty()) {
        throw std::invalid_argument("QAOA parameters need p >= 1 gammas and betas of equal length");
    }
    if (state.qubits() != table.qubits || state.dimension() != table.energies.size()) {
        throw std::invalid_argument("energy table size is not 2^qubits");
    }
    const double amp = std::pow(2.0, -0.5 * static_cast<double>(table.qubits));
    std::fill(state.amplitudes().begin(), state.amplitudes().end(), StateVector::Amplitude{amp, 0.0});
    for (std::size_t layer = 0; layer < params.layers(); ++layer) {
        apply_phase(state, table, params.gammas[layer]);
        apply_mixer(state, params.betas[layer]);
    }
}

StateVector run_circuit(const EnergyTable& table, const QaoaParams& params) {
    StateVector state(table.qubits);
    run_circuit(table, params, state);
    return state;
}

double expectation(const StateVector& state, const EnergyTable& table) {
    if (table.energies.size() != state.dimension()) throw std::invalid_argument("energy table and state differ in size");
    double sum = 0.0;
    for (std::size_t b = 0; b < state.dimension(); ++b) sum += std::norm(state[b]) * table.energies[b];
    return sum;
}

namespace {

QaoaParams unpack(const std::vector<double>& x) {
    const std::size_t p = x.size() / 2;
    return {std::vector<double>(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(p)),
            std::vector<double>(x.begin() + static_cast<std::ptrdiff_t>(p), x.end())};
}

struct StartOutcome {
    NelderMeadResult result;
    std::vector<std::string> trace;
};

}  // namespace

OptimizeResult optimize_params(const EnergyTable& table, const OptimizeOptions& options) {
    if (options.layers < 1) throw std::invalid_argument("QAOA needs at least one layer");
    if (options.restarts < 1) throw std::invalid_argument("restarts must be at least 1");
    const std::size_t dim = 2 * options.layers;

    std::vector<std::vector<double>> starts;
    starts.emplace_back(dim, 0.0);
    for (std::size_t r = 0; r < options.restarts; ++r) {
        Rng rng(derive_seed(options.seed, r));
        std::vector<double> x(dim);
        for (std::size_t l = 0; l < options.layers; ++l) x[l] = rng.uniform(0.0, std::numbers::pi);
        for (std::size_t l = 0; l < options.layers; ++l) x[options.layers + l] = rng.uniform(0.0, std::numbers::pi / 2);
        starts.push_back(std::move(x));
    }

    NelderMeadOptions nm;
    nm.max_evaluations = options.evaluations_per_angle * dim;
    nm.tolerance = options.tolerance;

    auto run_start = [&](std::size_t index) {
        StartOutcome outcome;
        StateVector state(table.qubits);
        auto objective = [&](const std::vector<double>& x) {
            run_circuit(table, unpack(x), state);
            return expectation(state, table);
        };
        NelderMeadObserver observer;
        if (options.trace != nullptr) {
            observer = [&](std::size_t iteration, const std::vector<double>& x, double value) {
                const auto params = unpack(x);
                nlohmann::json record{{"start", index},    {"iteration", iteration}, {"gammas", params.gammas},
                                      {"betas", params.betas}, {"expectation", value}};
                outcome.trace.push_back(record.dump());
            };
        }
        outcome.result = nelder_mead(objective, starts[index], nm, observer);
        return outcome;
    };

    std::vector<std::future<StartOutcome>> pending;
    pending.reserve(starts.size());
    for (std::size_t i = 0; i < starts.size(); ++i) pending.push_back(std::async(std::launch::async, run_start, i));

    OptimizeResult best;
    bool have = false;
    for (auto& f : pending) {
        StartOutcome outcome = f.get();
        if (options.trace != nullptr) {
            for (const auto& line : outcome.trace) *options.trace << line << '\n';
        }
        best.evaluations += outcome.result.evaluations;
        best.iterations += outcome.result.iterations;
        if (!have || outcome.result.value < best.value) {
            best.value = outcome.result.value;
            best.params = unpack(outcome.result.x);
            have = true;
        }
    }
    return best;
}

OptimizeResult optimize_params(const EnergyTable& table, std::size_t layers, std::size_t restarts, std::uint64_t seed) {
    OptimizeOptions options;
    options.layers = layers;
    options.restarts = restarts;
    options.seed = seed;
    return optimize_params(table, options);
}

std::map<std::uint64_t, std::uint64_t> sample(const StateVector& state, std::uint64_t shots, std::uint64_t seed) {
    if (shots < 1) throw std::invalid_argument("shots must be at least 1");
    std::vector<double> cumulative(state.dimension());
    double total = 0.0;
    for (std::size_t b = 0; b < state.dimension(); ++b) {
        total += std::norm(state[b]);
        cumulative[b] = total;
    }
    Rng rng(seed);
    std::map<std::uint64_t, std::uint64_t> counts;
    for (std::uint64_t s = 0; s < shots; ++s) {
        const double u = rng.uniform() * total;
        auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
        if (it == cumulative.end()) it = std::prev(it);
        ++counts[static_cast<std::uint64_t>(it - cumulative.begin())];
    }
    return counts;
}

QaoaResult qaoa_select(const QuboModel& model, const QaoaConfig& config) {
    const EnergyTable table = energy_table(model);

    double scale = 0.0;
    for (double e : table.energies) scale = std::max(scale, std::abs(e));
    if (scale == 0.0) scale = 1.0;
    const EnergyTable scaled = rescaled(table, scale);

    OptimizeOptions options;
    options.layers = config.layers;
    options.restarts = config.restarts;
    options.seed = derive_seed(config.seed, 0x0a0a);
    options.evaluations_per_angle = config.evaluations_per_angle;
    options.trace = config.trace;
    const OptimizeResult optimum = optimize_params(scaled, options);

    const StateVector state = run_circuit(scaled, optimum.params);
    const auto counts = sample(state, config.shots, derive_seed(config.seed, 0x5a5a));

    QaoaResult result;
    bool have = false;
    double entropy = 0.0;
    for (const auto& [bits, count] : counts) {
        const double freq = static_cast<double>(count) / static_cast<double>(config.shots);
        entropy -= freq * std::log2(freq);
        // std::map iterates in ascending bitstring order, so strict < keeps the smallest on ties.
        if (!have || table.energies[bits] < result.energy) {
            result.bits = bits;
            result.energy = table.energies[bits];
            have = true;
        }
    }
    result.diagnostics.optimizer_value = optimum.value * scale;
    result.diagnostics.energy_scale = scale;
    result.diagnostics.evaluations = optimum.evaluations;
    result.diagnostics.iterations = optimum.iterations;
    result.diagnostics.sample_entropy = entropy;
    result.diagnostics.distinct_samples = counts.size();
    result.diagnostics.params = optimum.params;
    return result;
}

}  // namespace qtcs
