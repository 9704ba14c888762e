#include "qtcs/qubo.hpp"

#include <iomanip>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <string>

namespace qtcs {

QuboModel::QuboModel(std::size_t n, double alpha, double penalty)
    : n_(n), alpha_(alpha), penalty_(penalty), q_(n * n, 0.0) {
    if (n == 0) throw std::invalid_argument("QUBO model needs at least one variable");
    if (!(penalty > 0.0)) throw std::invalid_argument("penalty must be positive");
}

void QuboModel::set_symmetric(std::size_t i, std::size_t j, double value) {
    q_[i * n_ + j] = value;
    q_[j * n_ + i] = value;
}

void QuboModel::add_pair(std::size_t i, std::size_t j, double pair_coefficient) {
    q_[i * n_ + j] += 0.5 * pair_coefficient;
    q_[j * n_ + i] += 0.5 * pair_coefficient;
}

double penalty_upper_bound(const TestSuite& suite, double alpha) {
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw std::invalid_argument("alpha must lie in [0, 1]");
    const double total = std::accumulate(suite.costs().begin(), suite.costs().end(), 0.0);
    return 1.0 + alpha * total;
}

QuboModel build_qubo(const TestSuite& suite, double alpha, double penalty) {
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw std::invalid_argument("alpha must lie in [0, 1]");
    QuboModel model(suite.size(), alpha, penalty);
    for (std::size_t i = 0; i < suite.size(); ++i) {
        model.add_linear(i, alpha * suite.costs()[i] - (1.0 - alpha) * (suite.faults()[i] ? 1.0 : 0.0));
    }
    // Each statement contributes −P·x_i per covering test and 2P·x_i·x_j per
    // unordered covering pair.
    for (std::size_t k = 0; k < suite.statements(); ++k) {
        const auto tests = suite.coverage().covering_tests(k);
        for (std::size_t a = 0; a < tests.size(); ++a) {
            model.add_linear(tests[a], -penalty);
            for (std::size_t b = a + 1; b < tests.size(); ++b) model.add_pair(tests[a], tests[b], 2.0 * penalty);
        }
    }
    return model;
}

double qubo_energy(const QuboModel& model, std::uint64_t bits) {
    const std::size_t n = model.size();
    // Σ_i x_i (Q_ii + 2 Σ_{j<i} Q_ij x_j), accumulated in ascending i. The
    // energy table reproduces this summation order exactly.
    double energy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (!((bits >> i) & 1U)) continue;
        double coupling = 0.0;
        for (std::size_t j = 0; j < i; ++j) {
            if ((bits >> j) & 1U) coupling += model.at(i, j);
        }
        energy += model.at(i, i) + 2.0 * coupling;
    }
    return energy + model.offset();
}

double qubo_energy(const QuboModel& model, const Selection& selection) {
    if (selection.size() != model.size()) {
        throw std::invalid_argument("bitstring length " + std::to_string(selection.size()) + " does not match model size " +
                                    std::to_string(model.size()));
    }
    const std::size_t n = model.size();
    double energy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (!selection[i]) continue;
        double coupling = 0.0;
        for (std::size_t j = 0; j < i; ++j) {
            if (selection[j]) coupling += model.at(i, j);
        }
        energy += model.at(i, i) + 2.0 * coupling;
    }
    return energy + model.offset();
}

std::size_t penalty_violations(const TestSuite& suite, const Selection& selection) {
    if (selection.size() != suite.size()) throw std::invalid_argument("selection length does not match suite size");
    std::size_t violations = 0;
    for (std::size_t k = 0; k < suite.statements(); ++k) {
        std::size_t hits = 0;
        for (std::size_t t = 0; t < suite.size(); ++t) hits += (selection[t] && suite.coverage().covers(t, k)) ? 1 : 0;
        violations += hits != 1 ? 1 : 0;
    }
    return violations;
}

void write_qubo_triplets(const QuboModel& model, std::ostream& out) {
    out << std::setprecision(17);
    for (std::size_t i = 0; i < model.size(); ++i) {
        for (std::size_t j = i; j < model.size(); ++j) {
            const double value = i == j ? model.at(i, i) : model.at(i, j) + model.at(j, i);
            if (value != 0.0) out << i << ' ' << j << ' ' << value << '\n';
        }
    }
}

Selection selection_from_bits(std::uint64_t bits, std::size_t n) {
    Selection out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = ((bits >> i) & 1U) != 0;
    return out;
}

std::uint64_t bits_from_selection(const Selection& selection) {
    if (selection.size() > 64) throw std::invalid_argument("selection wider than 64 bits");
    std::uint64_t bits = 0;
    for (std::size_t i = 0; i < selection.size(); ++i) {
        if (selection[i]) bits |= std::uint64_t{1} << i;
    }
    return bits;
}

}  // namespace qtcs
