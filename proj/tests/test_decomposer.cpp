#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "../core/src/ridge.hpp"
#include "cadence/errors.hpp"
#include "cadence/model.hpp"
#include "cadence/rng.hpp"
#include "fixtures.hpp"

using namespace cadence;
using fixtures::kPi;

namespace {

FitConfig exact_config(double period, int order) {
    FitConfig cfg;
    cfg.trend_kind = TrendKind::PiecewiseLinear;
    cfg.n_changepoints = 0;
    cfg.seasonality_ridge_lambda = 0.0;
    cfg.fourier_order = order;
    cfg.period = period;
    return cfg;
}

}  // namespace

TEST_CASE("constant series fits to a flat trend with empty seasonality") {
    std::vector<double> t(200), v(200, 5.0);
    for (std::size_t i = 0; i < t.size(); ++i) t[i] = 0.02 * static_cast<double>(i);
    FitConfig cfg;
    cfg.fourier_order = 1;
    cfg.period = 1.0;
    const AdditiveModel model = fit(make_series(t, v, "g"), cfg);

    const auto& trend = std::get<PiecewiseLinearTrend>(model.trend);
    CHECK(trend.intercept == doctest::Approx(5.0).epsilon(1e-9));
    CHECK(std::abs(trend.slope) < 1e-9);
    REQUIRE(model.seasonality.has_value());
    for (double c : model.seasonality->cos_coeffs) CHECK(std::abs(c) < 1e-6);
    for (double c : model.seasonality->sin_coeffs) CHECK(std::abs(c) < 1e-6);
    CHECK(model.residuals.sigma < 1e-9);
}

TEST_CASE("unregularized Fourier fit matches the DFT-at-harmonics oracle") {
    // 4 s at 50 Hz covers four whole 1 s periods, so the basis is orthogonal
    // and the least-squares coefficients must equal the direct projection.
    std::vector<double> t(200), v(200);
    for (std::size_t i = 0; i < t.size(); ++i) {
        t[i] = 0.02 * static_cast<double>(i);
        v[i] = 2.0 + std::sin(2.0 * kPi * t[i]);
    }
    const auto [a_ref, b_ref] = fixtures::dft_at_harmonics(t, v, 1.0, 3);

    const AdditiveModel model = fit(make_series(t, v, "g"), exact_config(1.0, 3));
    REQUIRE(model.seasonality.has_value());
    CHECK(model.seasonality->sin_coeffs[0] == doctest::Approx(1.0).epsilon(1e-6));
    for (int n = 0; n < 3; ++n) {
        CHECK(std::abs(model.seasonality->cos_coeffs[static_cast<std::size_t>(n)] -
                       a_ref[static_cast<std::size_t>(n)]) < 1e-8);
        CHECK(std::abs(model.seasonality->sin_coeffs[static_cast<std::size_t>(n)] -
                       b_ref[static_cast<std::size_t>(n)]) < 1e-8);
    }
    // everything except the fundamental sine is numerically zero
    CHECK(std::abs(model.seasonality->cos_coeffs[0]) < 1e-6);
    CHECK(std::abs(model.seasonality->cos_coeffs[1]) < 1e-6);
    CHECK(std::abs(model.seasonality->sin_coeffs[1]) < 1e-6);
    CHECK(std::abs(model.seasonality->sin_coeffs[2]) < 1e-6);
}

TEST_CASE("logistic trend parameters are recovered from generated data") {
    Xorshift64 rng(17);
    std::vector<double> t(200), v(200);
    for (std::size_t i = 0; i < t.size(); ++i) {
        t[i] = 0.05 * static_cast<double>(i);  // [0, 10)
        v[i] = 3.0 / (1.0 + std::exp(-2.0 * (t[i] - 5.0))) + 0.01 * rng.next_gaussian();
    }
    FitConfig cfg;
    cfg.trend_kind = TrendKind::Logistic;
    cfg.fourier_order = 0;
    const AdditiveModel model = fit(make_series(t, v, "g"), cfg);

    const auto& lt = std::get<LogisticTrend>(model.trend);
    CHECK(lt.capacity == doctest::Approx(3.0).epsilon(0.05));
    CHECK(lt.rate == doctest::Approx(2.0).epsilon(0.05));
    CHECK(lt.offset == doctest::Approx(5.0).epsilon(0.05));
}

TEST_CASE("logistic trend approaches its capacity far in the future") {
    Xorshift64 rng(23);
    std::vector<double> t(150), v(150);
    for (std::size_t i = 0; i < t.size(); ++i) {
        t[i] = 0.04 * static_cast<double>(i);
        v[i] = 2.0 / (1.0 + std::exp(-1.5 * (t[i] - 3.0))) + 0.005 * rng.next_gaussian();
    }
    FitConfig cfg;
    cfg.trend_kind = TrendKind::Logistic;
    cfg.fourier_order = 0;
    const AdditiveModel model = fit(make_series(t, v, "g"), cfg);
    const auto& lt = std::get<LogisticTrend>(model.trend);
    const double far_out = lt.offset + 100.0 / lt.rate;
    CHECK(std::abs(model.trend_at(far_out) - lt.capacity) < 1e-3 * std::abs(lt.capacity));
}

TEST_CASE("fit rejects too-short series and unresolvable periods") {
    CHECK_THROWS_AS(fit(fixtures::sine_series(1.0, 1.0, 0.0, 0.0, 50.0, 0.1, 1),
                        FitConfig{}),
                    SeriesTooShort);

    std::vector<double> t(60), v(60, 1.5);  // constant: no cycle to find
    for (std::size_t i = 0; i < t.size(); ++i) t[i] = 0.02 * static_cast<double>(i);
    FitConfig cfg;  // period auto
    CHECK_THROWS_AS(fit(make_series(t, v, "g"), cfg), PeriodUnresolved);
}

TEST_CASE("rank-deficient unregularized designs are reported as singular") {
    Eigen::MatrixXd A(6, 3);
    for (int i = 0; i < 6; ++i) {
        A(i, 0) = 1.0;
        A(i, 1) = static_cast<double>(i);
        A(i, 2) = 2.0 * static_cast<double>(i);  // exactly collinear
    }
    Eigen::VectorXd y(6);
    for (int i = 0; i < 6; ++i) y(i) = static_cast<double>(i * i);
    CHECK_THROWS_AS(detail::ridge_solve(A, y, Eigen::VectorXd::Zero(3)),
                    SingularDesign);
    // the same design solves fine once ridged
    CHECK_NOTHROW(detail::ridge_solve(A, y, Eigen::VectorXd::Constant(3, 1.0)));
}

TEST_CASE("evaluate_components matches closed forms") {
    AdditiveModel model;
    model.trend = LogisticTrend{3.0, 2.0, 5.0};
    FourierSeasonality season;
    season.period = 1.0;
    season.cos_coeffs = {0.0};
    season.sin_coeffs = {1.0};
    model.seasonality = season;
    model.events.times = {2.0};
    model.events.effects = {0.8};
    model.events.influence_halfwidth = 0.01;

    const Components c = evaluate_components(model, {0.25, 2.0, 3.0, 5.0});
    CHECK(c.trend[3] == doctest::Approx(1.5).epsilon(1e-12));  // C/2 at the midpoint
    CHECK(c.season[0] == doctest::Approx(1.0).epsilon(1e-12)); // sin(pi/2)
    CHECK(c.events[1] == doctest::Approx(0.8).epsilon(1e-12));
    CHECK(c.events[2] == 0.0);

    CHECK_THROWS_AS(evaluate_components(model, {1.0, 1.0}), NonMonotonicTimestamps);
}

TEST_CASE("noise-free sinusoid forecasts continue the generator") {
    std::vector<double> t(200), v(200);
    for (std::size_t i = 0; i < t.size(); ++i) {
        t[i] = 0.02 * static_cast<double>(i);
        v[i] = std::sin(2.0 * kPi * t[i]);
    }
    const AdditiveModel model = fit(make_series(t, v, "g"), exact_config(1.0, 3));
    const Forecast fc = predict(model, 100, 0.02, 0.8);
    REQUIRE(fc.yhat.size() == 100);
    CHECK(fc.timestamps.front() == doctest::Approx(t.back() + 0.02).epsilon(1e-12));
    double worst = 0.0;
    for (std::size_t i = 0; i < fc.yhat.size(); ++i) {
        const double truth = std::sin(2.0 * kPi * fc.timestamps[i]);
        worst = std::max(worst, std::abs(fc.yhat[i] - truth));
    }
    CHECK(worst < 1e-4);
}

TEST_CASE("forecast bands are valid, positive and monotone in level") {
    const TimeSeries s = fixtures::sine_series(1.0, 1.0, 2.0, 0.1, 50.0, 10.0, 31);
    FitConfig cfg;
    cfg.period = 1.0;
    const AdditiveModel model = fit(s, cfg);

    const Forecast narrow = predict(model, 100, 0.02, 0.5);
    const Forecast mid = predict(model, 100, 0.02, 0.8);
    const Forecast wide = predict(model, 100, 0.02, 0.99);
    for (std::size_t i = 0; i < mid.yhat.size(); ++i) {
        CHECK(mid.lower[i] <= mid.yhat[i]);
        CHECK(mid.yhat[i] <= mid.upper[i]);
        CHECK(mid.upper[i] - mid.lower[i] > 0.0);
        CHECK(mid.upper[i] - mid.lower[i] >= narrow.upper[i] - narrow.lower[i] - 1e-12);
        CHECK(wide.upper[i] - wide.lower[i] >= mid.upper[i] - mid.lower[i] - 1e-12);
    }

    CHECK_THROWS_AS(predict(model, 0, 0.02, 0.8), OutOfRange);
    CHECK_THROWS_AS(predict(model, 10, -0.1, 0.8), OutOfRange);
    CHECK_THROWS_AS(predict(model, 10, 0.02, 1.5), OutOfRange);
}

TEST_CASE("a 500-sample training series supports a 100-step forecast") {
    const TimeSeries s = fixtures::sine_series(1.0, 1.0, 0.0, 0.05, 50.0, 10.0, 37);
    REQUIRE(s.size() == 500);
    const AdditiveModel model = fit(s, FitConfig{});
    const Forecast fc = predict(model, 100, 0.02, 0.8);
    CHECK(fc.yhat.size() == 100);
    CHECK(fc.lower.size() == 100);
    CHECK(fc.upper.size() == 100);
}

TEST_CASE("flag_outliers hand-computed example") {
    const TimeSeries s = make_series({0, 1, 2, 3, 4, 5}, {0, 0, 0, 10, 0, 0}, "g");
    // median 0, MAD 0: any deviation is flagged
    const auto idx = flag_outliers(s, {0, 0, 0, 10, 0, 0}, 3.5);
    REQUIRE(idx.size() == 1);
    CHECK(idx[0] == 3);
}

TEST_CASE("flag_outliers flags nothing on all-equal input") {
    const TimeSeries s = make_series({0, 1, 2}, {1, 1, 1}, "g");
    CHECK(flag_outliers(s, {0.0, 0.0, 0.0}, 3.5).empty());
    CHECK_THROWS_AS(flag_outliers(s, {0.0, 0.0}, 3.5), LengthMismatch);
    CHECK_THROWS_AS(flag_outliers(s, {0.0, 0.0, 0.0}, 0.0), OutOfRange);
}

TEST_CASE("flag_outliers at threshold 8 almost never fires on N(0,1)") {
    int clean_trials = 0;
    const int trials = 1000;
    std::vector<double> t(200);
    for (std::size_t i = 0; i < t.size(); ++i) t[i] = static_cast<double>(i);
    for (int trial = 0; trial < trials; ++trial) {
        Xorshift64 rng(static_cast<std::uint64_t>(trial) + 101);
        std::vector<double> v(200);
        for (double& x : v) x = rng.next_gaussian();
        if (flag_outliers(make_series(t, v, "g"), v, 8.0).empty()) ++clean_trials;
    }
    CHECK(clean_trials >= 990);
}

TEST_CASE("fitting flags injected spikes and absorbs them as events") {
    TimeSeries base = fixtures::sine_series(1.0, 1.0, 0.0, 0.02, 50.0, 8.0, 41);
    std::vector<double> v(base.values());
    v[100] += 8.0;
    v[250] -= 8.0;
    const TimeSeries s = make_series(base.timestamps(), v, "g");

    FitConfig cfg;
    cfg.period = 1.0;
    cfg.outlier_mad_threshold = 4.5;
    const AdditiveModel model = fit(s, cfg);
    REQUIRE(model.events.times.size() == 2);
    CHECK(model.events.times[0] == doctest::Approx(s.timestamps()[100]));
    CHECK(model.events.times[1] == doctest::Approx(s.timestamps()[250]));
    CHECK(model.events.effects[0] > 6.0);
    CHECK(model.events.effects[1] < -6.0);
    // events must not leak into the seasonal amplitude
    REQUIRE(model.seasonality.has_value());
    CHECK(model.seasonality->sin_coeffs[0] == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("property: reconstruction identity holds on every training sample") {
    const std::vector<TimeSeries> fixtures_set = {
        fixtures::sine_series(1.0, 1.0, 0.0, 0.05, 50.0, 6.0, 51),
        fixtures::sine_series(0.7, 2.0, 5.0, 0.2, 50.0, 6.0, 52, 0.0, 0.3),
        fixtures::sine_series(1.6, 0.5, -2.0, 0.0, 25.0, 8.0, 53),
    };
    for (const TimeSeries& s : fixtures_set) {
        FitConfig cfg;
        const AdditiveModel model = fit(s, cfg);
        const Components c = evaluate_components(model, s.timestamps());
        for (std::size_t i = 0; i < s.size(); ++i) {
            const double resid =
                s.values()[i] - c.trend[i] - c.season[i] - c.events[i];
            const double rebuilt = c.trend[i] + c.season[i] + c.events[i] + resid;
            CHECK(std::abs(rebuilt - s.values()[i]) < 1e-9);
        }
    }
}

TEST_CASE("property: fitted seasonality is periodic with zero mean over a period") {
    const TimeSeries s = fixtures::sine_series(0.8, 1.3, 1.0, 0.1, 50.0, 8.0, 61);
    FitConfig cfg;
    cfg.period = 0.8;
    const AdditiveModel model = fit(s, cfg);
    REQUIRE(model.seasonality.has_value());
    const FourierSeasonality& season = *model.seasonality;

    for (double t : {0.0, 0.123, 1.9, 77.7}) {
        CHECK(std::abs(season(t) - season(t + season.period)) < 1e-9);
    }
    // trapezoid integration over exactly one period
    const int steps = 4000;
    double acc = 0.0;
    for (int i = 0; i < steps; ++i) {
        const double t = season.period * static_cast<double>(i) / steps;
        acc += season(t);
    }
    CHECK(std::abs(acc / steps) < 1e-9);
}

TEST_CASE("property: Fourier coefficient norm is nonincreasing in the ridge weight") {
    const TimeSeries s = fixtures::sine_series(1.0, 1.0, 0.0, 0.1, 50.0, 8.0, 71);
    double previous = std::numeric_limits<double>::infinity();
    for (double lambda : {0.0, 0.1, 1.0, 10.0, 100.0}) {
        FitConfig cfg;
        cfg.period = 1.0;
        cfg.seasonality_ridge_lambda = lambda;
        const AdditiveModel model = fit(s, cfg);
        REQUIRE(model.seasonality.has_value());
        double norm2 = 0.0;
        for (double c : model.seasonality->cos_coeffs) norm2 += c * c;
        for (double c : model.seasonality->sin_coeffs) norm2 += c * c;
        CHECK(norm2 <= previous + 1e-12);
        previous = norm2;
    }
}

TEST_CASE("band width grows with the forecast horizon on a noisy fit") {
    const TimeSeries s = fixtures::sine_series(1.0, 1.0, 0.0, 0.1, 50.0, 10.0, 81);
    FitConfig cfg;
    cfg.period = 1.0;
    const AdditiveModel model = fit(s, cfg);
    const Forecast fc = predict(model, 300, 0.02, 0.8);
    const std::size_t half = fc.yhat.size() / 2;
    double early = 0.0, late = 0.0;
    for (std::size_t i = 0; i < half; ++i) early += fc.upper[i] - fc.lower[i];
    for (std::size_t i = half; i < fc.yhat.size(); ++i) late += fc.upper[i] - fc.lower[i];
    CHECK(late / static_cast<double>(fc.yhat.size() - half) >=
          early / static_cast<double>(half));
}
