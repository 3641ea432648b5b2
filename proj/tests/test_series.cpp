#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "cadence/errors.hpp"
#include "cadence/rng.hpp"
#include "cadence/series.hpp"
#include "fixtures.hpp"

using namespace cadence;

TEST_CASE("make_series accepts well-formed input") {
    const TimeSeries s = make_series({0.0, 0.02, 0.04}, {1.0, 2.0, 3.0}, "g");
    CHECK(s.size() == 3);
    CHECK(s.unit_tag() == "g");
    CHECK(s.timestamps()[1] == 0.02);
}

TEST_CASE("make_series rejects duplicate and decreasing timestamps") {
    CHECK_THROWS_AS(make_series({0.0, 0.0}, {1.0, 2.0}, "g"), NonMonotonicTimestamps);
    CHECK_THROWS_AS(make_series({0.1, 0.0}, {1.0, 2.0}, "g"), NonMonotonicTimestamps);
}

TEST_CASE("make_series rejects non-finite values and ragged lengths") {
    CHECK_THROWS_AS(make_series({0.0, 1.0}, {1.0, NAN}, "g"), NonFiniteValue);
    CHECK_THROWS_AS(make_series({0.0, 1.0}, {1.0, INFINITY}, "g"), NonFiniteValue);
    CHECK_THROWS_AS(make_series({NAN, 1.0}, {1.0, 2.0}, "g"), NonFiniteValue);
    CHECK_THROWS_AS(make_series({0.0}, {1.0, 2.0}, "g"), LengthMismatch);
}

TEST_CASE("empty series is valid") {
    const TimeSeries s = make_series({}, {}, "g");
    CHECK(s.empty());
    CHECK(s.span() == 0.0);
    CHECK(s.median_spacing() == 0.0);
}

TEST_CASE("split_at produces the documented shapes") {
    const TimeSeries s = fixtures::sine_series(1.0, 1.0, 0.0, 0.0, 50.0, 12.0, 1);
    REQUIRE(s.size() == 600);
    auto [train, test] = split_at(s, 500);
    CHECK(train.size() == 500);
    CHECK(test.size() == 100);

    const TimeSeries tiny = make_series({0.0, 1.0, 2.0}, {1.0, 2.0, 3.0}, "g");
    auto [none, all] = split_at(tiny, 0);
    CHECK(none.empty());
    CHECK(all.size() == 3);
    auto [whole, rest] = split_at(tiny, 3);
    CHECK(whole.size() == 3);
    CHECK(rest.empty());

    CHECK_THROWS_AS(split_at(tiny, 4), OutOfRange);
}

TEST_CASE("property: split then concat reproduces the input for every k") {
    Xorshift64 rng(7);
    for (int trial = 0; trial < 20; ++trial) {
        const auto len = static_cast<std::size_t>(5 + 40.0 * rng.next_double());
        std::vector<double> t(len), v(len);
        double clock = 0.0;
        for (std::size_t i = 0; i < len; ++i) {
            clock += 0.01 + rng.next_double();  // irregular gaps
            t[i] = clock;
            v[i] = rng.next_gaussian();
        }
        const TimeSeries s = make_series(t, v, "u");
        for (std::size_t k = 0; k <= len; ++k) {
            auto [a, b] = split_at(s, k);
            const TimeSeries joined = concat(a, b);
            CHECK(joined.timestamps() == s.timestamps());
            CHECK(joined.values() == s.values());
        }
    }
}

TEST_CASE("estimate_period recovers a 1 s sinusoid at 50 Hz") {
    const TimeSeries s = fixtures::sine_series(1.0, 1.0, 0.0, 0.0, 50.0, 4.0, 1);
    const PeriodEstimate est = estimate_period(s, 0.2, 2.0);
    CHECK(est.period == doctest::Approx(1.0).epsilon(0.03));
    CHECK(est.confidence > 0.8);
}

TEST_CASE("estimate_period recovers a noisy 0.5 s sinusoid") {
    const TimeSeries s = fixtures::sine_series(0.5, 1.0, 0.0, 0.1, 50.0, 4.0, 3);
    const PeriodEstimate est = estimate_period(s, 0.2, 2.0);
    CHECK(std::abs(est.period - 0.5) < 0.03);
}

TEST_CASE("estimate_period rejects constant series") {
    std::vector<double> t(200), v(200, 4.2);
    for (std::size_t i = 0; i < t.size(); ++i) t[i] = 0.02 * static_cast<double>(i);
    CHECK_THROWS_AS(estimate_period(make_series(t, v, "g"), 0.2, 2.0), NoPeriodFound);
}

TEST_CASE("estimate_period rejects too-short series and bad ranges") {
    const TimeSeries s = fixtures::sine_series(1.0, 1.0, 0.0, 0.0, 50.0, 0.3, 1);
    CHECK_THROWS_AS(estimate_period(s, 0.2, 2.0), SeriesTooShort);
    const TimeSeries ok = fixtures::sine_series(1.0, 1.0, 0.0, 0.0, 50.0, 4.0, 1);
    CHECK_THROWS_AS(estimate_period(ok, -1.0, 2.0), OutOfRange);
    CHECK_THROWS_AS(estimate_period(ok, 2.0, 0.2), OutOfRange);
}

TEST_CASE("property: pure sinusoid period recovered within one lag") {
    for (double period : {0.4, 0.7, 1.0, 1.6}) {
        const TimeSeries s = fixtures::sine_series(period, 1.0, 0.0, 0.0, 50.0, 8.0, 5);
        const PeriodEstimate est = estimate_period(s, 0.2, 2.0);
        CHECK(std::abs(est.period - period) <= 0.02 + 1e-12);
    }
}

TEST_CASE("property: estimate_period is shift- and scale-invariant") {
    Xorshift64 rng(11);
    const TimeSeries base = fixtures::sine_series(0.7, 1.0, 0.0, 0.05, 50.0, 6.0, 9);
    const PeriodEstimate ref = estimate_period(base, 0.2, 2.0);
    for (int trial = 0; trial < 10; ++trial) {
        const double a = (rng.next_double() - 0.5) * 20.0;
        const double b = (rng.next_double() - 0.5) * 100.0;
        if (std::abs(a) < 1e-3) continue;
        std::vector<double> scaled(base.values());
        for (double& v : scaled) v = a * v + b;
        const PeriodEstimate est =
            estimate_period(make_series(base.timestamps(), scaled, "g"), 0.2, 2.0);
        CHECK(std::abs(est.period - ref.period) <= 0.02 + 1e-12);
    }
}

TEST_CASE("white Gaussian noise is rejected in at least 99% of 1000 trials") {
    int rejected = 0;
    const int trials = 1000;
    for (int trial = 0; trial < trials; ++trial) {
        Xorshift64 rng(static_cast<std::uint64_t>(trial) + 1);
        std::vector<double> t(1000), v(1000);
        for (std::size_t i = 0; i < t.size(); ++i) {
            t[i] = 0.02 * static_cast<double>(i);
            v[i] = rng.next_gaussian();
        }
        try {
            estimate_period(make_series(t, v, "g"), 0.2, 2.0);
        } catch (const NoPeriodFound&) {
            ++rejected;
        }
    }
    CHECK(rejected >= 990);
}

TEST_CASE("estimate_period copes with mildly irregular sampling") {
    Xorshift64 rng(21);
    std::vector<double> t, v;
    double clock = 0.0;
    while (clock < 6.0) {
        clock += 0.02 * (0.7 + 0.6 * rng.next_double());
        t.push_back(clock);
        v.push_back(std::sin(2.0 * fixtures::kPi * clock / 0.8));
    }
    const PeriodEstimate est = estimate_period(make_series(t, v, "g"), 0.2, 2.0);
    CHECK(std::abs(est.period - 0.8) < 0.05);
}
