#include <doctest.h>

#include <stdexcept>

#include <algorithm>
#include <cmath>

#include "bdb/boundary.hpp"
#include "bdb/isotonic.hpp"
#include "bdb/metrics.hpp"
#include "bdb/rng.hpp"
#include "test_support.hpp"

using namespace bdb;

TEST_CASE("test_eval on the fitting set reproduces the fit metrics") {
    Rng rng(70, 0);
    const Dataset d = testsupport::random_dataset(rng, 600);
    const BinGrid g = fit_equi_weight(d, 3, 5);
    const BoundarySolution sol = solve_ew_dpmt(g, 0.35).solution;
    REQUIRE(sol.feasible);

    const ConfusionResult res = test_eval({sol, g.partitioner}, d);
    CHECK(res.tp == sol.tp);
    CHECK(res.tp + res.fp == sol.selected_n);
    CHECK(res.precision == doctest::Approx(sol.precision_fit));
    CHECK(res.recall == doctest::Approx(sol.recall_fit));
    CHECK(res.tp + res.fn == d.positives());
}

TEST_CASE("test_eval flags an empty positive region") {
    Rng rng(71, 0);
    const Dataset d = testsupport::random_dataset(rng, 60);
    const BinGrid g = fit_equi_weight(d, 2, 3);
    BoundarySolution sol;
    sol.thresholds = {3, 3};
    const ConfusionResult res = test_eval({sol, g.partitioner}, d);
    CHECK(res.empty_region);
    CHECK(res.precision == 1.0);
    CHECK(res.recall == 0.0);
    CHECK(res.tp == 0);
}

TEST_CASE("test_eval with the whole grid positive has recall 1") {
    Rng rng(72, 0);
    const Dataset d = testsupport::random_dataset(rng, 80, 0.4);
    const BinGrid g = fit_equi_weight(d, 2, 2);
    BoundarySolution sol;
    sol.thresholds = {0, 0};
    const ConfusionResult res = test_eval({sol, g.partitioner}, d);
    CHECK(res.recall == doctest::Approx(1.0));
    CHECK(res.precision ==
          doctest::Approx(static_cast<double>(d.positives()) / static_cast<double>(d.size())));
}

TEST_CASE("ece_at_j basics") {
    // perfectly calibrated: zero error
    std::vector<CalSample> perfect;
    for (int t = 0; t < 10; ++t) perfect.push_back({1, 1, t < 5 ? 0.0 : 1.0, t < 5 ? 0 : 1});
    CHECK(ece_at_j(perfect, 1, 1) == doctest::Approx(0.0));

    // residuals cancel: ten samples at 0.7 with positivity 0.7
    std::vector<CalSample> cancel;
    for (int t = 0; t < 10; ++t) cancel.push_back({1, 1, 0.7, t < 7 ? 1 : 0});
    CHECK(ece_at_j(cancel, 1, 1) == doctest::Approx(0.0));

    // all-wrong bin: scores 0.9, labels 0
    std::vector<CalSample> wrong;
    for (int t = 0; t < 4; ++t) wrong.push_back({1, 1, 0.9, 0});
    CHECK(ece_at_j(wrong, 1, 1) == doctest::Approx(0.9));

    CHECK_THROWS_AS(ece_at_j(wrong, 1, 2), std::invalid_argument);  // empty column
}

TEST_CASE("ece skips empty levels and renormalizes") {
    std::vector<CalSample> samples;
    for (int t = 0; t < 5; ++t) samples.push_back({1, 1, 0.6, 0});  // CE 0.6
    for (int t = 0; t < 5; ++t) samples.push_back({3, 1, 0.2, 0});  // CE 0.2, level 2 empty
    CHECK(ece_at_j(samples, 3, 1) == doctest::Approx(0.4));
}

TEST_CASE("ece is invariant to sample order") {
    Rng rng(73, 0);
    std::vector<CalSample> samples;
    for (int t = 0; t < 200; ++t)
        samples.push_back({1 + static_cast<int>(rng.uniform_below(3)),
                           1 + static_cast<int>(rng.uniform_below(4)), rng.uniform(),
                           rng.bernoulli(0.3) ? 1 : 0});
    const double before = ece_at_j(samples, 3, 2);
    const double cum_before = cumulative_ece(samples, 3, 4, 1);
    for (int t = 199; t > 0; --t)
        std::swap(samples[t], samples[rng.uniform_below(t + 1)]);
    CHECK(ece_at_j(samples, 3, 2) == doctest::Approx(before).epsilon(1e-12));
    CHECK(cumulative_ece(samples, 3, 4, 1) == doctest::Approx(cum_before).epsilon(1e-12));
}

TEST_CASE("cumulative ece aggregates per-bin errors") {
    // two levels, two columns with known per-bin errors
    std::vector<CalSample> samples;
    auto add_bin = [&](int level, int j, double calibrated, int label, int copies) {
        for (int t = 0; t < copies; ++t) samples.push_back({level, j, calibrated, label});
    };
    add_bin(1, 1, 0.5, 0, 4);  // CE 0.5
    add_bin(2, 1, 0.1, 0, 4);  // CE 0.1
    add_bin(1, 2, 0.3, 0, 4);  // CE 0.3
    add_bin(2, 2, 0.7, 0, 4);  // CE 0.7

    // j=0: average of all four bins
    CHECK(cumulative_ece(samples, 2, 2, 0) == doctest::Approx((0.5 + 0.1 + 0.3 + 0.7) / 4.0));
    // j=L-1: only the top column remains
    CHECK(cumulative_ece(samples, 2, 2, 1) == doctest::Approx((0.3 + 0.7) / 2.0));
    // uniform per-bin error: cumulative is constant in j
    std::vector<CalSample> uniform;
    for (int j = 1; j <= 3; ++j)
        for (int i = 1; i <= 2; ++i)
            for (int t = 0; t < 3; ++t) uniform.push_back({i, j, 0.25, 0});
    CHECK(cumulative_ece(uniform, 2, 3, 0) == doctest::Approx(0.25));
    CHECK(cumulative_ece(uniform, 2, 3, 2) == doctest::Approx(0.25));

    // reconstruction from per-column components
    const double direct = cumulative_ece(samples, 2, 2, 0);
    const double recomputed = (ece_at_j(samples, 2, 1) + ece_at_j(samples, 2, 2)) / 2.0;
    CHECK(direct == doctest::Approx(recomputed).epsilon(1e-12));
}

TEST_CASE("ist baseline equals the per-level fit when K is 1") {
    Rng rng(74, 0);
    const Dataset d = testsupport::random_dataset(rng, 300);
    const BinGrid g = fit_equi_weight(d, 1, 6);
    const std::vector<double> ist = ist_baseline(g);
    const CalibratedLevel mist = calibrate_level(g.pos[0], g.tot[0]);
    REQUIRE(ist.size() == mist.rates.size());
    for (size_t j = 0; j < ist.size(); ++j) CHECK(ist[j] == mist.rates[j]);
}

TEST_CASE("ist baseline on monotone-perfect data returns the empirical rates") {
    // bin positivity already non-decreasing: the fit is the identity
    const BinGrid g = BinGrid::from_counts({{1, 4}, {1, 5}}, {{10, 10}, {10, 10}});
    const std::vector<double> ist = ist_baseline(g);
    CHECK(ist[0] == doctest::Approx(0.1));
    CHECK(ist[1] == doctest::Approx(0.45));
}

TEST_CASE("ist baseline rejects per-level score edges") {
    Rng rng(75, 0);
    const Dataset d = testsupport::random_dataset(rng, 300);
    const BinGrid g = fit_equi_weight(d, 3, 4);
    CHECK_THROWS_AS(ist_baseline(g), std::invalid_argument);
}

TEST_CASE("calibration report columns cover the test set") {
    Rng rng(76, 0);
    const Dataset hold = testsupport::random_dataset(rng, 800);
    const Dataset test = testsupport::random_dataset(rng, 500);
    const BinGrid grid = fit_equi_weight(hold, 3, 5);
    const BinGrid ist_grid = fit_equi_weight(hold, 1, 5);
    const CalibrationReport report = calibration_report(grid, ist_grid, test);
    REQUIRE(report.rows.size() == 5);
    long long total = 0;
    for (const CalibrationRow& row : report.rows) {
        CHECK(row.ece_mist >= 0.0);
        CHECK(row.ece_ist >= 0.0);
        total += row.count;
    }
    CHECK(total == test.size());
}
