#include <doctest.h>

#include <stdexcept>

#include <cmath>

#include "bdb/isotonic.hpp"
#include "bdb/rng.hpp"
#include "test_support.hpp"

using namespace bdb;

TEST_CASE("pava pools adjacent violators") {
    const auto fit = pava({{0.6, 0.4, 0.8}, {1, 1, 1}});
    REQUIRE(fit.size() == 3);
    CHECK(fit[0] == doctest::Approx(0.5));
    CHECK(fit[1] == doctest::Approx(0.5));
    CHECK(fit[2] == doctest::Approx(0.8));
}

TEST_CASE("pava keeps non-decreasing input unchanged") {
    const auto fit = pava({{0.1, 0.1, 0.4, 0.9}, {2, 1, 5, 1}});
    CHECK(fit == std::vector<double>{0.1, 0.1, 0.4, 0.9});
}

TEST_CASE("pava weighted pooling") {
    const auto fit = pava({{1.0, 0.0}, {3, 1}});
    CHECK(fit[0] == doctest::Approx(0.75));
    CHECK(fit[1] == doctest::Approx(0.75));
}

TEST_CASE("pava validates input") {
    CHECK_THROWS_AS(pava({{}, {}}), std::invalid_argument);
    CHECK_THROWS_AS(pava({{1.0}, {}}), std::invalid_argument);
    CHECK_THROWS_AS(pava({{1.0}, {0.0}}), std::invalid_argument);
}

TEST_CASE("pava equals the exhaustive minimizer on short sequences") {
    Rng rng(100, 0);
    for (int trial = 0; trial < 300; ++trial) {
        const int t_len = 1 + static_cast<int>(rng.uniform_below(8));
        WeightedSequence seq;
        for (int t = 0; t < t_len; ++t) {
            seq.values.push_back(rng.uniform() * 2.0 - 0.5);
            seq.weights.push_back(0.25 + 4.0 * rng.uniform());
        }
        const auto fit = pava(seq);
        const auto oracle = testsupport::isotonic_oracle(seq);
        REQUIRE(fit.size() == oracle.size());
        for (size_t t = 0; t < fit.size(); ++t)
            CHECK(fit[t] == doctest::Approx(oracle[t]).epsilon(1e-12));
    }
}

TEST_CASE("pava monotonicity, mean preservation, idempotence") {
    Rng rng(101, 0);
    for (int trial = 0; trial < 100; ++trial) {
        const int t_len = 1 + static_cast<int>(rng.uniform_below(400));
        WeightedSequence seq;
        double w_total = 0.0, wy_total = 0.0;
        for (int t = 0; t < t_len; ++t) {
            seq.values.push_back(rng.normal());
            seq.weights.push_back(0.1 + 9.9 * rng.uniform());
            w_total += seq.weights[t];
            wy_total += seq.weights[t] * seq.values[t];
        }
        const auto fit = pava(seq);
        double w_fit = 0.0;
        for (int t = 0; t < t_len; ++t) {
            if (t > 0) CHECK(fit[t] >= fit[t - 1]);
            w_fit += seq.weights[t] * fit[t];
        }
        CHECK(std::abs(w_fit - wy_total) <= 1e-12 * std::max(1.0, std::abs(wy_total)) * t_len);

        const auto twice = pava({fit, seq.weights});
        for (int t = 0; t < t_len; ++t)
            CHECK(twice[t] == doctest::Approx(fit[t]).epsilon(1e-12));
    }
}

TEST_CASE("calibrate_level fits positivity with count weights") {
    {
        const auto cal = calibrate_level({2, 9}, {10, 10});
        CHECK_FALSE(cal.all_empty);
        CHECK(cal.rates == std::vector<double>{0.2, 0.9});
    }
    {
        const auto cal = calibrate_level({9, 2}, {10, 10});
        CHECK(cal.rates[0] == doctest::Approx(0.55));
        CHECK(cal.rates[1] == doctest::Approx(0.55));
    }
}

TEST_CASE("calibrate_level fills empty bins from the nearest lower bin") {
    const auto cal = calibrate_level({3, 0, 8}, {10, 0, 10});
    CHECK(cal.rates[0] == doctest::Approx(0.3));
    CHECK(cal.rates[1] == doctest::Approx(0.3));
    CHECK(cal.rates[2] == doctest::Approx(0.8));

    // empty leading bin gets 0
    const auto lead = calibrate_level({0, 4}, {0, 10});
    CHECK(lead.rates[0] == 0.0);
    CHECK(lead.rates[1] == doctest::Approx(0.4));
}

TEST_CASE("calibrate_level flags an all-empty level") {
    const auto cal = calibrate_level({0, 0}, {0, 0});
    CHECK(cal.all_empty);
    CHECK(cal.rates == std::vector<double>{0.0, 0.0});
}
