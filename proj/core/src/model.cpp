#include "cadence/model.hpp"

#include <algorithm>
#include <cmath>

#include "cadence/errors.hpp"

namespace cadence {

namespace {
constexpr double kTwoPi = 2.0 * 3.14159265358979323846;

double logistic_sigmoid(double z) {
    if (z > 700.0) return 1.0;
    if (z < -700.0) return 0.0;
    return 1.0 / (1.0 + std::exp(-z));
}
}  // namespace

double LogisticTrend::operator()(double t) const {
    return capacity * logistic_sigmoid(rate * (t - offset));
}

double PiecewiseLinearTrend::operator()(double t) const {
    double v = intercept + slope * (t - origin);
    for (std::size_t j = 0; j < changepoint_times.size(); ++j) {
        const double h = t - changepoint_times[j];
        if (h > 0.0) v += slope_deltas[j] * h;
    }
    return v;
}

double FourierSeasonality::operator()(double t) const {
    const double w = kTwoPi * t / period;
    double v = 0.0;
    for (std::size_t n = 0; n < cos_coeffs.size(); ++n) {
        const double a = w * static_cast<double>(n + 1);
        v += cos_coeffs[n] * std::cos(a) + sin_coeffs[n] * std::sin(a);
    }
    return v;
}

double EventEffects::operator()(double t) const {
    if (times.empty()) return 0.0;
    auto lo = std::lower_bound(times.begin(), times.end(), t - influence_halfwidth);
    double v = 0.0;
    for (auto it = lo; it != times.end() && *it <= t + influence_halfwidth; ++it)
        v += effects[static_cast<std::size_t>(it - times.begin())];
    return v;
}

double ResidualStats::quantile(double level) const {
    if (quantile_levels.empty()) return 0.0;
    if (level <= quantile_levels.front()) return quantile_values.front();
    if (level >= quantile_levels.back()) return quantile_values.back();
    auto hi = std::upper_bound(quantile_levels.begin(), quantile_levels.end(), level);
    const std::size_t i = static_cast<std::size_t>(hi - quantile_levels.begin());
    const double l0 = quantile_levels[i - 1], l1 = quantile_levels[i];
    const double w = (level - l0) / (l1 - l0);
    return quantile_values[i - 1] + w * (quantile_values[i] - quantile_values[i - 1]);
}

void FitConfig::validate() const {
    if (fourier_order < 0) throw OutOfRange("fourier_order must be >= 0");
    if (period && !(*period > 0.0)) throw OutOfRange("period must be > 0");
    if (n_changepoints < 0) throw OutOfRange("n_changepoints must be >= 0");
    if (!(changepoint_ridge_lambda >= 0.0))
        throw OutOfRange("changepoint_ridge_lambda must be >= 0");
    if (!(seasonality_ridge_lambda >= 0.0))
        throw OutOfRange("seasonality_ridge_lambda must be >= 0");
    if (!(outlier_mad_threshold > 0.0))
        throw OutOfRange("outlier_mad_threshold must be > 0");
    if (!(interval_level > 0.0 && interval_level < 1.0))
        throw OutOfRange("interval_level must lie in (0, 1)");
}

double AdditiveModel::trend_at(double t) const {
    return std::visit([t](const auto& tr) { return tr(t); }, trend);
}

double AdditiveModel::season_at(double t) const {
    return seasonality ? (*seasonality)(t) : 0.0;
}

double AdditiveModel::trend_stddev_at(double t) const {
    const int d = trend_uncertainty.dim;
    if (d == 0) return 0.0;
    // Gradient of the trend value with respect to its parameters.
    std::vector<double> g(static_cast<std::size_t>(d), 0.0);
    if (const auto* pw = std::get_if<PiecewiseLinearTrend>(&trend)) {
        g[0] = 1.0;
        if (d > 1) g[1] = t - pw->origin;
        for (std::size_t j = 0; j < pw->changepoint_times.size() && j + 2 < g.size(); ++j)
            g[j + 2] = std::max(0.0, t - pw->changepoint_times[j]);
    } else {
        const auto& lt = std::get<LogisticTrend>(trend);
        const double s = logistic_sigmoid(lt.rate * (t - lt.offset));
        g[0] = s;
        if (d > 1) g[1] = lt.capacity * s * (1.0 - s) * (t - lt.offset);
        if (d > 2) g[2] = -lt.capacity * s * (1.0 - s) * lt.rate;
    }
    double q = 0.0;
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            q += g[static_cast<std::size_t>(i)] *
                 trend_uncertainty.unit_cov[static_cast<std::size_t>(i * d + j)] *
                 g[static_cast<std::size_t>(j)];
    return residuals.sigma * std::sqrt(std::max(0.0, q));
}

namespace {
void require_increasing(const std::vector<double>& ts) {
    for (std::size_t i = 0; i < ts.size(); ++i) {
        if (!std::isfinite(ts[i]))
            throw NonFiniteValue("non-finite timestamp at index " + std::to_string(i));
        if (i > 0 && !(ts[i] > ts[i - 1]))
            throw NonMonotonicTimestamps("timestamps not strictly increasing at index " +
                                         std::to_string(i));
    }
}
}  // namespace

Components evaluate_components(const AdditiveModel& model,
                               const std::vector<double>& timestamps) {
    require_increasing(timestamps);
    Components c;
    c.trend.reserve(timestamps.size());
    c.season.reserve(timestamps.size());
    c.events.reserve(timestamps.size());
    for (double t : timestamps) {
        c.trend.push_back(model.trend_at(t));
        c.season.push_back(model.season_at(t));
        c.events.push_back(model.events(t));
    }
    return c;
}

Forecast forecast_at(const AdditiveModel& model,
                     std::vector<double> timestamps,
                     double level) {
    if (!(level > 0.0 && level < 1.0))
        throw OutOfRange("forecast level must lie in (0, 1)");
    require_increasing(timestamps);

    const Components c = evaluate_components(model, timestamps);
    const double q_lo = model.residuals.quantile(0.5 * (1.0 - level));
    const double q_hi = model.residuals.quantile(1.0 - 0.5 * (1.0 - level));
    const double sigma = model.residuals.sigma;

    Forecast fc;
    fc.level = level;
    fc.timestamps = std::move(timestamps);
    fc.yhat.resize(fc.timestamps.size());
    fc.lower.resize(fc.timestamps.size());
    fc.upper.resize(fc.timestamps.size());
    for (std::size_t i = 0; i < fc.timestamps.size(); ++i) {
        const double t = fc.timestamps[i];
        const double y = c.trend[i] + c.season[i] + c.events[i];
        // Inflate the residual band by the relative growth of the predictive
        // spread when the trend extrapolation error is folded in.
        double infl = 1.0;
        if (sigma > 0.0) {
            const double se = model.trend_stddev_at(t);
            infl = std::sqrt(1.0 + (se / sigma) * (se / sigma));
        }
        fc.yhat[i] = y;
        fc.lower[i] = std::min(y, y + q_lo * infl);
        fc.upper[i] = std::max(y, y + q_hi * infl);
    }
    return fc;
}

Forecast predict(const AdditiveModel& model,
                 std::size_t horizon_steps,
                 double step,
                 double level) {
    if (horizon_steps < 1) throw OutOfRange("horizon_steps must be >= 1");
    if (!(step > 0.0)) throw OutOfRange("step must be > 0");
    std::vector<double> ts(horizon_steps);
    for (std::size_t i = 0; i < horizon_steps; ++i)
        ts[i] = model.train_end + static_cast<double>(i + 1) * step;
    return forecast_at(model, std::move(ts), level);
}

std::vector<std::size_t> flag_outliers(const TimeSeries& series,
                                       const std::vector<double>& detrended,
                                       double mad_threshold) {
    if (detrended.size() != series.size())
        throw LengthMismatch("detrended length " + std::to_string(detrended.size()) +
                             " does not match series length " +
                             std::to_string(series.size()));
    if (!(mad_threshold > 0.0)) throw OutOfRange("mad_threshold must be > 0");
    if (detrended.empty()) return {};

    auto median_of = [](std::vector<double> v) {
        const std::size_t mid = v.size() / 2;
        std::nth_element(v.begin(), v.begin() + mid, v.end());
        double hi = v[mid];
        if (v.size() % 2 == 0) {
            std::nth_element(v.begin(), v.begin() + mid - 1, v.begin() + mid);
            return 0.5 * (v[mid - 1] + hi);
        }
        return hi;
    };

    const double med = median_of(detrended);
    std::vector<double> dev(detrended.size());
    for (std::size_t i = 0; i < detrended.size(); ++i)
        dev[i] = std::abs(detrended[i] - med);
    const double mad = median_of(dev);

    const double cutoff = mad_threshold * 1.4826 * mad;
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < dev.size(); ++i)
        if (dev[i] > cutoff) idx.push_back(i);
    return idx;
}

}  // namespace cadence
