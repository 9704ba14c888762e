#include "doctest.h"
#include "fixtures.hpp"
#include "oracles.hpp"

#include "qtcs/qubo.hpp"
#include "qtcs/random.hpp"

#include <sstream>

using namespace qtcs;

TEST_CASE("penalty_upper_bound") {
    CHECK(penalty_upper_bound(fixtures::two_test_suite(), 0.5) == doctest::Approx(3.5));
    CHECK(penalty_upper_bound(fixtures::two_test_suite(), 0.0) == 1.0);
    CHECK(penalty_upper_bound(fixtures::make_suite({{1}}, {10.0}, {false}), 1.0) == 11.0);
    CHECK_THROWS_AS(penalty_upper_bound(fixtures::two_test_suite(), 1.2), std::invalid_argument);
    CHECK_THROWS_AS(penalty_upper_bound(fixtures::two_test_suite(), -0.1), std::invalid_argument);
}

TEST_CASE("build_qubo on two tests sharing one statement") {
    const auto suite = fixtures::shared_statement_suite();
    const auto model = build_qubo(suite, 0.5, 3.5);
    // diag_i = α·cost_i − (1−α)·e_i − P·|{k : i ∈ T_k}|
    CHECK(model.at(0, 0) == doctest::Approx(0.5 * 2 - 0.5 * 1 - 3.5));  // −3.0
    CHECK(model.at(1, 1) == doctest::Approx(0.5 * 3 - 3.5));            // −2.0
    CHECK(model.at(0, 1) + model.at(1, 0) == doctest::Approx(7.0));
    CHECK(model.at(0, 1) == model.at(1, 0));
    CHECK(model.offset() == 0.0);

    CHECK(qubo_energy(model, Selection{true, false}) == doctest::Approx(-3.0));
    CHECK(qubo_energy(model, Selection{false, false}) == 0.0);
    CHECK(qubo_energy(model, Selection{true, true}) == doctest::Approx(2.0));
    CHECK_THROWS_AS(qubo_energy(model, Selection{true}), std::invalid_argument);
}

TEST_CASE("build_qubo with disjoint coverage has no couplings") {
    const auto suite = fixtures::make_suite({{1, 0, 0}, {0, 1, 1}, {0, 0, 0}}, {4.0, 5.0, 6.0}, {false, false, true});
    // third row covers nothing, which is allowed for a test
    const double p = 2.25;
    const auto model = build_qubo(suite, 1.0, p);
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j)
            if (i != j) CHECK(model.at(i, j) == 0.0);
    CHECK(model.at(0, 0) == doctest::Approx(4.0 - p * 1));
    CHECK(model.at(1, 1) == doctest::Approx(5.0 - p * 2));
    CHECK(model.at(2, 2) == doctest::Approx(6.0));
}

TEST_CASE("penalty_violations counts statements not covered exactly once") {
    const auto shared = fixtures::shared_statement_suite();
    CHECK(penalty_violations(shared, {true, true}) == 1);
    CHECK(penalty_violations(shared, {true, false}) == 0);
    const auto three = fixtures::make_suite({{1, 1, 1}, {0, 1, 1}}, {1.0, 1.0}, {false, false});
    CHECK(penalty_violations(three, {false, false}) == 3);
    CHECK(penalty_violations(three, {true, false}) == 0);
}

TEST_CASE("exactly-once selections: energy equals the linear objective minus P per statement") {
    // Brute force over all subsets of small synthetic suites.
    for (std::uint64_t seed = 0; seed < 12; ++seed) {
        const auto suite = synth_suite(8 + seed % 5, 6, 0.25, 0.4, seed);
        const double alpha = 0.5;
        const double p = penalty_upper_bound(suite, alpha);
        const auto model = build_qubo(suite, alpha, p);
        std::size_t feasible = 0;
        for (std::uint64_t b = 0; b < (std::uint64_t{1} << suite.size()); ++b) {
            const auto sel = selection_from_bits(b, suite.size());
            if (penalty_violations(suite, sel) != 0) continue;
            ++feasible;
            const auto obj = objectives(suite, sel);
            const double expected = alpha * obj.total_cost - (1 - alpha) * static_cast<double>(obj.fault_hits) -
                                    p * static_cast<double>(suite.statements());
            CHECK(qubo_energy(model, sel) == doctest::Approx(expected).epsilon(1e-12));
        }
        (void)feasible;
    }
}

TEST_CASE("energy differences between feasible selections do not depend on P") {
    const auto suite = fixtures::make_suite({{1, 0, 0}, {0, 1, 1}, {1, 1, 0}, {0, 0, 1}}, {3, 4, 2, 1}, {1, 0, 0, 1});
    Rng rng(4);
    std::vector<Selection> feasible;
    for (std::uint64_t b = 0; b < 16; ++b) {
        const auto sel = selection_from_bits(b, 4);
        if (penalty_violations(suite, sel) == 0) feasible.push_back(sel);
    }
    REQUIRE(feasible.size() >= 2);
    for (int trial = 0; trial < 20; ++trial) {
        const double p1 = rng.uniform(0.1, 50.0);
        const double p2 = rng.uniform(0.1, 50.0);
        const auto m1 = build_qubo(suite, 0.3, p1);
        const auto m2 = build_qubo(suite, 0.3, p2);
        for (std::size_t a = 0; a < feasible.size(); ++a) {
            for (std::size_t b = a + 1; b < feasible.size(); ++b) {
                const double d1 = qubo_energy(m1, feasible[a]) - qubo_energy(m1, feasible[b]);
                const double d2 = qubo_energy(m2, feasible[a]) - qubo_energy(m2, feasible[b]);
                CHECK(d1 == doctest::Approx(d2).epsilon(1e-9));
            }
        }
    }
}

TEST_CASE("qubo_energy matches the full double-loop oracle on random models") {
    Rng rng(17);
    for (int trial = 0; trial < 30; ++trial) {
        const std::size_t n = 1 + rng.below(12);
        QuboModel model(n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i; j < n; ++j) model.set_symmetric(i, j, rng.uniform(-5, 5));
        model.set_offset(rng.uniform(-1, 1));
        for (int s = 0; s < 50; ++s) {
            const std::uint64_t bits = rng.below(std::uint64_t{1} << n);
            const double expected = oracle::dense_energy(model, bits);
            CHECK(qubo_energy(model, bits) == doctest::Approx(expected).epsilon(1e-12));
            CHECK(qubo_energy(model, selection_from_bits(bits, n)) == qubo_energy(model, bits));
        }
    }
}

TEST_CASE("QUBO triplet export lists the upper triangle") {
    const auto model = build_qubo(fixtures::shared_statement_suite(), 0.5, 3.5);
    std::ostringstream out;
    write_qubo_triplets(model, out);
    CHECK(out.str() == "0 0 -3\n0 1 7\n1 1 -2\n");
}

TEST_CASE("selection/bit conversions") {
    CHECK(bits_from_selection({true, false, true}) == 5);
    CHECK(selection_from_bits(6, 3) == Selection{false, true, true});
}
