#include "qtcs/selectors.hpp"

#include "qtcs/random.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace qtcs {

std::vector<std::size_t> greedy_order(const TestSuite& suite, const std::vector<std::size_t>& candidates,
                                      bool stop_when_saturated) {
    std::vector<std::size_t> remaining = candidates;
    std::sort(remaining.begin(), remaining.end());
    std::vector<bool> covered(suite.statements(), false);
    std::vector<std::size_t> order;
    order.reserve(remaining.size());

    while (!remaining.empty()) {
        std::size_t best_pos = remaining.size();
        double best_ratio = 0.0;
        for (std::size_t pos = 0; pos < remaining.size(); ++pos) {
            const std::size_t t = remaining[pos];
            std::size_t gain = 0;
            for (std::size_t k = 0; k < suite.statements(); ++k) {
                gain += (!covered[k] && suite.coverage().covers(t, k)) ? 1 : 0;
            }
            if (gain == 0) continue;
            const double cost = suite.costs()[t] > 0.0 ? suite.costs()[t] : kZeroCostEpsilon;
            const double ratio = static_cast<double>(gain) / cost;
            if (best_pos == remaining.size() || ratio > best_ratio) {
                best_pos = pos;
                best_ratio = ratio;
            }
        }
        if (best_pos == remaining.size()) break;
        const std::size_t pick = remaining[best_pos];
        remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(best_pos));
        for (std::size_t k = 0; k < suite.statements(); ++k) {
            if (suite.coverage().covers(pick, k)) covered[k] = true;
        }
        order.push_back(pick);
    }
    if (!stop_when_saturated) order.insert(order.end(), remaining.begin(), remaining.end());
    return order;
}

std::vector<std::size_t> additional_greedy(const TestSuite& suite) {
    std::vector<std::size_t> all(suite.size());
    std::iota(all.begin(), all.end(), std::size_t{0});
    return greedy_order(suite, all, true);
}

AnnealResult simulated_annealing(const QuboModel& model, std::size_t sweeps, std::uint64_t seed) {
    if (sweeps < 1) throw std::invalid_argument("simulated annealing needs at least one sweep");
    const std::size_t n = model.size();
    Rng rng(seed);

    Selection x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = rng.bernoulli(0.5);

    // field[i] = Σ_{j≠i} Q_ij x_j; flipping i changes the energy by
    // (1 − 2x_i)(Q_ii + 2·field[i]).
    std::vector<double> field(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (j != i && x[j]) field[i] += model.at(i, j);
        }
    }
    auto delta = [&](std::size_t i) { return (x[i] ? -1.0 : 1.0) * (model.at(i, i) + 2.0 * field[i]); };

    double t_start = 0.0;
    for (std::size_t i = 0; i < n; ++i) t_start = std::max(t_start, std::abs(delta(i)));
    if (t_start == 0.0) t_start = 1.0;
    const double t_end = 1e-3 * t_start;
    const double ratio = sweeps > 1 ? std::pow(t_end / t_start, 1.0 / static_cast<double>(sweeps - 1)) : 1.0;

    double energy = qubo_energy(model, x);
    AnnealResult best{x, energy};
    double temperature = t_start;
    for (std::size_t sweep = 0; sweep < sweeps; ++sweep) {
        for (std::size_t i = 0; i < n; ++i) {
            const double d = delta(i);
            if (d > 0.0 && rng.uniform() >= std::exp(-d / temperature)) continue;
            const double sign = x[i] ? -1.0 : 1.0;
            x[i] = !x[i];
            energy += d;
            for (std::size_t j = 0; j < n; ++j) {
                if (j != i) field[j] += sign * model.at(j, i);
            }
            if (energy < best.energy) {
                best.selection = x;
                best.energy = energy;
            }
        }
        temperature *= ratio;
    }
    // Report the exact energy of the best state, not the running sum.
    best.energy = qubo_energy(model, best.selection);
    return best;
}

ExhaustiveResult exhaustive_min(const QuboModel& model) {
    const std::size_t n = model.size();
    if (n > kMaxExhaustive) {
        throw std::invalid_argument("exhaustive search limited to " + std::to_string(kMaxExhaustive) + " variables, got " +
                                    std::to_string(n));
    }
    // energy[top | low] = energy[low] + contribution of the top bit; this is
    // the summation order of qubo_energy, so exact ties stay exact.
    std::vector<double> energy(std::size_t{1} << n, 0.0);
    for (std::size_t h = 0; h < n; ++h) {
        const std::size_t top = std::size_t{1} << h;
        for (std::size_t low = 0; low < top; ++low) {
            double coupling = 0.0;
            for (std::size_t j = 0; j < h; ++j) {
                if ((low >> j) & 1U) coupling += model.at(h, j);
            }
            energy[top | low] = energy[low] + (model.at(h, h) + 2.0 * coupling);
        }
    }
    ExhaustiveResult best{0, energy[0] + model.offset()};
    for (std::size_t b = 1; b < energy.size(); ++b) {
        const double e = energy[b] + model.offset();
        if (e < best.energy) best = {b, e};
    }
    return best;
}

}  // namespace qtcs
