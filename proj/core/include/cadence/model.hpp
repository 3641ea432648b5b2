#pragma once

#include <cstddef>
#include <optional>
#include <variant>
#include <vector>

#include "cadence/series.hpp"

namespace cadence {

enum class TrendKind { PiecewiseLinear, Logistic };

/// Saturating growth curve g(t) = C / (1 + exp(-k (t - b))).
/// C is the capacity (asymptote for k > 0), k the rate, b the offset.
struct LogisticTrend {
    double capacity = 0.0;
    double rate = 0.0;
    double offset = 0.0;

    double operator()(double t) const;
};

/// Continuous piecewise-linear trend
///   intercept + slope * (t - origin) + sum_j delta_j * max(0, t - cp_j).
/// Changepoint times are strictly increasing and lie inside the training span.
struct PiecewiseLinearTrend {
    double origin = 0.0;  ///< training span start; centers the time axis
    double intercept = 0.0;
    double slope = 0.0;  ///< per second
    std::vector<double> changepoint_times;
    std::vector<double> slope_deltas;

    double operator()(double t) const;
};

/// Truncated real Fourier series
///   s(t) = sum_{n=1..N} a_n cos(2 pi n t / P) + b_n sin(2 pi n t / P).
/// P-periodic with zero mean over any whole period (there is no n = 0 term;
/// the constant lives in the trend).
struct FourierSeasonality {
    double period = 1.0;  ///< P, seconds, > 0
    std::vector<double> cos_coeffs;
    std::vector<double> sin_coeffs;

    int order() const { return static_cast<int>(cos_coeffs.size()); }
    double operator()(double t) const;
};

/// Localized additive corrections at anomalous sample times. Each recorded
/// effect applies to times within +/- influence_halfwidth of its own time and
/// contributes nothing elsewhere.
struct EventEffects {
    std::vector<double> times;  ///< strictly increasing
    std::vector<double> effects;
    double influence_halfwidth = 0.0;  ///< seconds, >= 0

    double operator()(double t) const;
};

/// Distribution summary of the non-outlier training residuals. Quantiles are
/// stored on a fixed level grid and interpolated linearly in between; both
/// sigma and the quantiles carry a finite-sample degrees-of-freedom
/// correction so bands do not shrink just because the design fit closely.
struct ResidualStats {
    double sigma = 0.0;
    std::vector<double> quantile_levels;  ///< ascending, in (0, 1)
    std::vector<double> quantile_values;  ///< monotone in level
    std::size_t sample_count = 0;

    double quantile(double level) const;
};

struct FitConfig {
    TrendKind trend_kind = TrendKind::PiecewiseLinear;
    /// Fourier order N; 0 disables the seasonal component.
    int fourier_order = 5;
    /// Seasonal period in seconds; nullopt means estimate it from the data.
    std::optional<double> period;
    int n_changepoints = 10;
    double changepoint_ridge_lambda = 10.0;
    double seasonality_ridge_lambda = 0.1;
    double outlier_mad_threshold = 3.5;
    double interval_level = 0.80;

    /// Throws OutOfRange when any field is outside its stated range.
    void validate() const;
};

/// Unit-sigma parameter covariance of the trend block, row-major. Multiply by
/// the residual variance to get the ridge-posterior covariance of
/// [intercept, slope, delta_1..delta_m] (piecewise) or [C, k, b] (logistic).
struct TrendUncertainty {
    int dim = 0;
    std::vector<double> unit_cov;
};

/// Pointwise forecast with a central band at the stated level.
struct Forecast {
    std::vector<double> timestamps;
    std::vector<double> yhat;
    std::vector<double> lower;
    std::vector<double> upper;
    double level = 0.8;
};

/// A fitted additive decomposition: trend + seasonality + event effects,
/// with residual statistics for the band construction. On every training
/// sample, trend + season + events + residual reconstructs the observed
/// value exactly; the residual is defined as the remainder.
struct AdditiveModel {
    std::variant<PiecewiseLinearTrend, LogisticTrend> trend;
    std::optional<FourierSeasonality> seasonality;
    EventEffects events;
    ResidualStats residuals;
    double train_start = 0.0;
    double train_end = 0.0;
    FitConfig fit_config;
    TrendUncertainty trend_uncertainty;
    /// Data the model was fitted on, kept so retraining can extend it.
    TimeSeries training;

    double trend_at(double t) const;
    double season_at(double t) const;
    /// Extrapolation standard error of the trend at t (sigma already applied).
    double trend_stddev_at(double t) const;
};

struct Components {
    std::vector<double> trend;
    std::vector<double> season;
    std::vector<double> events;
};

/// Fits the additive model. Pipeline: resolve the period (estimating it when
/// the config asks for that), flag outliers with the MAD rule on a detrended
/// pre-pass, jointly fit trend and seasonality on the surviving samples by
/// ridge-regularized least squares (logistic trends are seeded on a coarse
/// grid and refined by Gauss-Newton), record one event effect per flagged
/// sample, and summarize the remaining residuals.
///
/// Throws SeriesTooShort below max(10, 2N + 3) samples, PeriodUnresolved when
/// automatic period estimation fails, and SingularDesign when the normal
/// equations stay rank-deficient even after the ridge.
AdditiveModel fit(const TimeSeries& series, const FitConfig& config);

/// Componentwise evaluation at arbitrary strictly increasing times, inside or
/// outside the training span. Events contribute zero away from the recorded
/// anomaly times.
Components evaluate_components(const AdditiveModel& model,
                               const std::vector<double>& timestamps);

/// Forecast at caller-supplied strictly increasing timestamps. yhat is
/// trend + season (+ events, which vanish beyond the training span); the band
/// applies the residual quantiles at (1-level)/2 and 1-(1-level)/2, widened
/// by the trend extrapolation uncertainty so it grows with horizon.
Forecast forecast_at(const AdditiveModel& model,
                     std::vector<double> timestamps,
                     double level);

/// Forecast on a regular grid starting one step after the training span end.
Forecast predict(const AdditiveModel& model,
                 std::size_t horizon_steps,
                 double step,
                 double level);

/// Indices where |detrended - median| > mad_threshold * 1.4826 * MAD.
/// Deterministic; a series of all-equal detrended values flags nothing.
std::vector<std::size_t> flag_outliers(const TimeSeries& series,
                                       const std::vector<double>& detrended,
                                       double mad_threshold);

}  // namespace cadence
