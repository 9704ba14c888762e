#include "doctest.h"
#include "fixtures.hpp"
#include "oracles.hpp"

#include "qtcs/qaoa.hpp"
#include "qtcs/random.hpp"
#include "qtcs/selectors.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

using namespace qtcs;

namespace {

QuboModel two_test_model() { return build_qubo(fixtures::shared_statement_suite(), 0.5, 3.5); }

QuboModel random_model(std::size_t n, Rng& rng) {
    QuboModel m(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) m.set_symmetric(i, j, rng.uniform(-2, 2));
    return m;
}

StateVector random_state(std::size_t n, Rng& rng) {
    StateVector s(n);
    double norm = 0.0;
    for (std::size_t b = 0; b < s.dimension(); ++b) {
        s[b] = {rng.uniform(-1, 1), rng.uniform(-1, 1)};
        norm += std::norm(s[b]);
    }
    for (std::size_t b = 0; b < s.dimension(); ++b) s[b] /= std::sqrt(norm);
    return s;
}

}  // namespace

TEST_CASE("energy_table for the two-test model") {
    const auto table = energy_table(two_test_model());
    REQUIRE(table.energies.size() == 4);
    CHECK(table.energies[0] == 0.0);
    CHECK(table.energies[1] == doctest::Approx(-3.0));
    CHECK(table.energies[2] == doctest::Approx(-2.0));
    CHECK(table.energies[3] == doctest::Approx(2.0));

    const auto zero = energy_table(QuboModel(5));
    for (double e : zero.energies) CHECK(e == 0.0);
}

TEST_CASE("energy_table agrees with qubo_energy bit for bit") {
    Rng rng(10);
    auto model = random_model(10, rng);
    model.set_offset(0.75);
    const auto table = energy_table(model);
    for (std::uint64_t b = 0; b < table.energies.size(); ++b) {
        CHECK(table.energies[b] == qubo_energy(model, b));
        CHECK(table.energies[b] == doctest::Approx(oracle::dense_energy(model, b)).epsilon(1e-12));
    }
}

TEST_CASE("energy_table enforces the qubit cap") {
    CHECK_THROWS_AS(energy_table(QuboModel(25)), std::invalid_argument);
    CHECK_THROWS_AS(energy_table(QuboModel(6), 5), std::invalid_argument);
}

TEST_CASE("apply_phase is diagonal and matches the elementwise exponential") {
    Rng rng(2);
    const auto model = random_model(4, rng);
    const auto table = energy_table(model);
    auto state = random_state(4, rng);
    const auto before = state;

    apply_phase(state, table, 0.0);
    for (std::size_t b = 0; b < state.dimension(); ++b) CHECK(state[b] == before[b]);

    const double gamma = 0.37;
    apply_phase(state, table, gamma);
    for (std::size_t b = 0; b < state.dimension(); ++b) {
        const auto expected = before[b] * std::exp(std::complex<double>{0.0, -gamma * table.energies[b]});
        CHECK(std::abs(state[b] - expected) < 1e-15);
        CHECK(std::abs(std::norm(state[b]) - std::norm(before[b])) < 1e-15);
    }
    CHECK_THROWS_AS(apply_phase(state, energy_table(QuboModel(3)), 0.1), std::invalid_argument);
}

TEST_CASE("apply_mixer basics") {
    Rng rng(5);
    auto state = random_state(3, rng);
    const auto before = state;
    apply_mixer(state, 0.0);
    for (std::size_t b = 0; b < state.dimension(); ++b) CHECK(state[b] == before[b]);

    // beta = π/2 maps |00⟩ to (−i)²|11⟩ = −|11⟩.
    auto zero = StateVector::basis(2, 0);
    apply_mixer(zero, std::numbers::pi / 2);
    CHECK(std::abs(zero[3] - std::complex<double>{-1.0, 0.0}) < 1e-15);
    CHECK(std::abs(zero[0]) < 1e-15);
    CHECK(std::abs(zero[1]) < 1e-15);
    CHECK(std::abs(zero[2]) < 1e-15);
}

TEST_CASE("apply_mixer matches the dense Kronecker oracle") {
    Rng rng(6);
    for (int trial = 0; trial < 10; ++trial) {
        auto state = random_state(3, rng);
        const double beta = rng.uniform(-3, 3);
        const auto expected = oracle::apply(oracle::mixer_unitary(3, beta), state.amplitudes());
        apply_mixer(state, beta);
        for (std::size_t b = 0; b < 8; ++b) CHECK(std::abs(state[b] - expected[b]) < 1e-12);
        CHECK(std::abs(state.norm_squared() - 1.0) < 1e-12);
    }
}

TEST_CASE("run_circuit") {
    const auto model = two_test_model();
    const auto table = energy_table(model);

    const auto identity = run_circuit(table, {{0.0}, {0.0}});
    for (std::size_t b = 0; b < 4; ++b) CHECK(std::abs(identity[b] - std::complex<double>{0.5, 0.0}) < 1e-15);

    const auto state = run_circuit(table, {{0.3}, {0.7}});
    const auto expected = oracle::qaoa_state(model, {0.3}, {0.7});
    for (std::size_t b = 0; b < 4; ++b) CHECK(std::abs(state[b] - expected[b]) < 1e-12);
    CHECK(std::abs(state.norm_squared() - 1.0) < 1e-12);

    CHECK_THROWS_AS(run_circuit(table, {{0.1, 0.2}, {0.3}}), std::invalid_argument);
    CHECK_THROWS_AS(run_circuit(table, {{}, {}}), std::invalid_argument);
}

TEST_CASE("expectation") {
    const auto table = energy_table(two_test_model());
    CHECK(expectation(StateVector::uniform(2), table) == doctest::Approx(-0.75));
    for (std::uint64_t b = 0; b < 4; ++b) CHECK(expectation(StateVector::basis(2, b), table) == table.energies[b]);
    CHECK_THROWS_AS(expectation(StateVector::uniform(3), table), std::invalid_argument);
}

TEST_CASE("optimize_params") {
    const auto flat = energy_table(QuboModel(3));
    CHECK(optimize_params(flat, 2, 2, 1).value == doctest::Approx(0.0));

    const auto table = energy_table(two_test_model());
    const auto a = optimize_params(table, 2, 5, 3);
    CHECK(a.value <= -1.0);
    CHECK(a.params.layers() == 2);
    const auto b = optimize_params(table, 2, 5, 3);
    CHECK(a.value == b.value);
    CHECK(a.params.gammas == b.params.gammas);
    CHECK(a.params.betas == b.params.betas);
    CHECK_THROWS_AS(optimize_params(table, 2, 0, 3), std::invalid_argument);
}

TEST_CASE("optimize_params writes one JSON line per iteration") {
    const auto table = energy_table(two_test_model());
    std::ostringstream trace;
    OptimizeOptions options;
    options.layers = 1;
    options.restarts = 1;
    options.trace = &trace;
    const auto result = optimize_params(table, options);
    std::size_t lines = 0;
    std::string line;
    std::istringstream in(trace.str());
    while (std::getline(in, line)) {
        ++lines;
        CHECK(line.find("\"expectation\"") != std::string::npos);
    }
    CHECK(lines == result.iterations);
}

TEST_CASE("sample") {
    const auto point = sample(StateVector::basis(3, 5), 100, 1);
    REQUIRE(point.size() == 1);
    CHECK(point.at(5) == 100);

    const auto counts = sample(StateVector::uniform(1), 100000, 42);
    const double sigma = std::sqrt(100000 * 0.25);
    CHECK(std::abs(static_cast<double>(counts.at(0)) - 50000.0) < 5 * sigma);
    CHECK(std::abs(static_cast<double>(counts.at(1)) - 50000.0) < 5 * sigma);

    Rng rng(8);
    const auto state = random_state(4, rng);
    const auto x = sample(state, 500, 77);
    CHECK(x == sample(state, 500, 77));
    std::uint64_t total = 0;
    for (const auto& [bits, count] : x) total += count;
    CHECK(total == 500);
    CHECK_THROWS_AS(sample(state, 0, 1), std::invalid_argument);
}

TEST_CASE("qaoa_select") {
    const auto model = two_test_model();
    QaoaConfig config;
    config.seed = 1;
    const auto result = qaoa_select(model, config);
    CHECK(result.bits == 1);
    CHECK(result.energy == doctest::Approx(-3.0));
    CHECK(result.diagnostics.optimizer_value <= -0.75 + 1e-12);
    CHECK(result.diagnostics.evaluations > 0);

    config.shots = 1;
    const auto single = qaoa_select(model, config);
    CHECK(single.diagnostics.distinct_samples == 1);
    CHECK(single.energy == energy_table(model).energies[single.bits]);
    CHECK(single.diagnostics.sample_entropy == 0.0);
}

TEST_CASE("sampled minimum never beats the exhaustive minimum") {
    Rng rng(31);
    for (int trial = 0; trial < 10; ++trial) {
        const auto model = random_model(6, rng);
        QaoaConfig config;
        config.layers = 1;
        config.restarts = 1;
        config.shots = 64;
        config.seed = static_cast<std::uint64_t>(trial);
        const auto result = qaoa_select(model, config);
        CHECK(result.energy >= exhaustive_min(model).energy);
    }
}

TEST_CASE("StateVector rejects registers above the cap") {
    CHECK_THROWS_AS(StateVector(kMaxQubits + 1), std::invalid_argument);
}
