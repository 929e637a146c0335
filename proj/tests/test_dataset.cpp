#include <doctest.h>

#include <stdexcept>

#include <algorithm>
#include <set>

#include "bdb/dataset.hpp"
#include "bdb/rng.hpp"
#include "test_support.hpp"

using namespace bdb;

TEST_CASE("parse_csv counts samples and positives") {
    const Dataset d = parse_csv("score,uncertainty,label\n0.9,0.1,1\n0.2,0.5,0\n");
    CHECK(d.size() == 2);
    CHECK(d.positives() == 1);
    CHECK(d[0].score == doctest::Approx(0.9));
    CHECK(d[1].uncertainty == doctest::Approx(0.5));
}

TEST_CASE("parse_csv accepts CRLF and negative uncertainty") {
    const Dataset d = parse_csv("score,uncertainty,label\r\n0.5,-1.25,1\r\n");
    CHECK(d.size() == 1);
    CHECK(d[0].uncertainty == doctest::Approx(-1.25));
}

TEST_CASE("parse_csv rejects bad input with line numbers") {
    CHECK_THROWS_WITH_AS(parse_csv("score,uncertainty,label\n"), "empty dataset",
                         std::runtime_error);
    CHECK_THROWS_WITH_AS(parse_csv("score,uncertainty,label\n0.9,0.1,1\n0.2,0.5,2\n"),
                         "line 3: label not in {0,1}", std::runtime_error);
    CHECK_THROWS_WITH_AS(parse_csv("score,uncertainty,label\n1.5,0.1,1\n"),
                         "line 2: score out of [0,1]", std::runtime_error);
    CHECK_THROWS_AS(parse_csv("score,uncertainty,label\n0.9,0.1\n"), std::runtime_error);
    CHECK_THROWS_AS(parse_csv("bad,header,row\n0.9,0.1,1\n"), std::runtime_error);
    CHECK_THROWS_AS(parse_csv(""), std::runtime_error);
}

TEST_CASE("scores 0 and 1 are accepted (closed interval)") {
    const Dataset d = parse_csv("score,uncertainty,label\n0,0,0\n1,0,1\n");
    CHECK(d.size() == 2);
}

TEST_CASE("csv round trip is identity on the sample list") {
    Rng rng(11, 0);
    const Dataset d = testsupport::random_dataset(rng, 500);
    const Dataset back = parse_csv(to_csv(d));
    REQUIRE(back.size() == d.size());
    for (long long i = 0; i < d.size(); ++i) {
        CHECK(back[i].score == d[i].score);
        CHECK(back[i].uncertainty == d[i].uncertainty);
        CHECK(back[i].label == d[i].label);
    }
}

TEST_CASE("split partitions disjointly and deterministically") {
    Rng rng(12, 0);
    std::vector<Sample> samples;
    for (int t = 0; t < 100; ++t)
        samples.push_back({t / 100.0, static_cast<double>(t), t % 3 == 0 ? 1 : 0});
    const Dataset d(std::move(samples));

    const auto [hold, test] = split(d, 0.5, 0.5, 7);
    CHECK(hold.size() == 50);
    CHECK(test.size() == 50);

    // uncertainty doubles as a unique id here
    std::set<double> hold_ids, test_ids;
    for (const Sample& s : hold.samples()) hold_ids.insert(s.uncertainty);
    for (const Sample& s : test.samples()) test_ids.insert(s.uncertainty);
    CHECK(hold_ids.size() == 50);
    CHECK(test_ids.size() == 50);
    std::vector<double> overlap;
    std::set_intersection(hold_ids.begin(), hold_ids.end(), test_ids.begin(), test_ids.end(),
                          std::back_inserter(overlap));
    CHECK(overlap.empty());

    const auto [hold2, test2] = split(d, 0.5, 0.5, 7);
    CHECK(to_csv(hold2) == to_csv(hold));
    CHECK(to_csv(test2) == to_csv(test));

    const auto [hold3, test3] = split(d, 0.5, 0.5, 8);
    CHECK(to_csv(hold3) != to_csv(hold));
}

TEST_CASE("split union preserves the multiset of samples") {
    Rng rng(13, 0);
    const Dataset d = testsupport::random_dataset(rng, 101);
    const auto [hold, test] = split(d, 0.3, 0.7, 3);
    CHECK(hold.size() + test.size() == d.size());
    auto key = [](const Sample& s) { return std::make_tuple(s.score, s.uncertainty, s.label); };
    std::multiset<std::tuple<double, double, int>> original, rebuilt;
    for (const Sample& s : d.samples()) original.insert(key(s));
    for (const Sample& s : hold.samples()) rebuilt.insert(key(s));
    for (const Sample& s : test.samples()) rebuilt.insert(key(s));
    CHECK(original == rebuilt);
}

TEST_CASE("split validates fractions") {
    Rng rng(14, 0);
    const Dataset d = testsupport::random_dataset(rng, 10);
    CHECK_THROWS_AS(split(d, 0.0, 1.0, 1), std::invalid_argument);
    CHECK_THROWS_AS(split(d, 0.4, 0.4, 1), std::invalid_argument);
}
