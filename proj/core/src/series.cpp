#include "cadence/series.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cadence/errors.hpp"

namespace cadence {

double TimeSeries::span() const {
    if (timestamps_.size() < 2) return 0.0;
    return timestamps_.back() - timestamps_.front();
}

double TimeSeries::median_spacing() const {
    if (timestamps_.size() < 2) return 0.0;
    std::vector<double> gaps(timestamps_.size() - 1);
    for (std::size_t i = 0; i + 1 < timestamps_.size(); ++i)
        gaps[i] = timestamps_[i + 1] - timestamps_[i];
    std::sort(gaps.begin(), gaps.end());
    const std::size_t m = gaps.size();
    return (m % 2 == 1) ? gaps[m / 2] : 0.5 * (gaps[m / 2 - 1] + gaps[m / 2]);
}

TimeSeries make_series(std::vector<double> timestamps,
                       std::vector<double> values,
                       std::string unit_tag) {
    if (timestamps.size() != values.size())
        throw LengthMismatch("timestamps (" + std::to_string(timestamps.size()) +
                             ") and values (" + std::to_string(values.size()) +
                             ") differ in length");
    for (std::size_t i = 0; i < timestamps.size(); ++i) {
        if (!std::isfinite(timestamps[i]))
            throw NonFiniteValue("non-finite timestamp at index " + std::to_string(i));
        if (!std::isfinite(values[i]))
            throw NonFiniteValue("non-finite value at index " + std::to_string(i));
        if (i > 0 && !(timestamps[i] > timestamps[i - 1]))
            throw NonMonotonicTimestamps("timestamps not strictly increasing at index " +
                                         std::to_string(i));
    }
    TimeSeries s;
    s.timestamps_ = std::move(timestamps);
    s.values_ = std::move(values);
    s.unit_tag_ = std::move(unit_tag);
    return s;
}

std::pair<TimeSeries, TimeSeries> split_at(const TimeSeries& series,
                                           std::size_t train_len) {
    if (train_len > series.size())
        throw OutOfRange("split point " + std::to_string(train_len) +
                         " exceeds series length " + std::to_string(series.size()));
    const auto& t = series.timestamps();
    const auto& v = series.values();
    TimeSeries head = make_series({t.begin(), t.begin() + train_len},
                                  {v.begin(), v.begin() + train_len},
                                  series.unit_tag());
    TimeSeries tail = make_series({t.begin() + train_len, t.end()},
                                  {v.begin() + train_len, v.end()},
                                  series.unit_tag());
    return {std::move(head), std::move(tail)};
}

TimeSeries concat(const TimeSeries& a, const TimeSeries& b) {
    if (a.empty()) return b;
    if (b.empty()) return a;
    std::vector<double> t(a.timestamps());
    std::vector<double> v(a.values());
    t.insert(t.end(), b.timestamps().begin(), b.timestamps().end());
    v.insert(v.end(), b.values().begin(), b.values().end());
    return make_series(std::move(t), std::move(v), a.unit_tag());
}

namespace {

// Linear interpolation of (t, v) onto a regular grid at spacing dt.
std::vector<double> to_regular_grid(const std::vector<double>& t,
                                    const std::vector<double>& v,
                                    double dt) {
    const double t0 = t.front();
    const double tn = t.back();
    const std::size_t m = static_cast<std::size_t>(std::floor((tn - t0) / dt)) + 1;
    std::vector<double> grid(m);
    std::size_t j = 0;
    for (std::size_t i = 0; i < m; ++i) {
        const double ti = t0 + static_cast<double>(i) * dt;
        while (j + 2 < t.size() && t[j + 1] < ti) ++j;
        const double w = (t[j + 1] > t[j]) ? (ti - t[j]) / (t[j + 1] - t[j]) : 0.0;
        grid[i] = v[j] + std::clamp(w, 0.0, 1.0) * (v[j + 1] - v[j]);
    }
    return grid;
}

}  // namespace

PeriodEstimate estimate_period(const TimeSeries& series,
                               double min_period,
                               double max_period) {
    if (!(min_period > 0.0) || !(max_period > min_period))
        throw OutOfRange("period search range must satisfy 0 < min < max");
    if (series.size() < 4 || series.span() < 2.0 * min_period)
        throw SeriesTooShort("period estimation needs >= 4 samples spanning >= 2 x min_period");

    const double dt = series.median_spacing();
    std::vector<double> x =
        to_regular_grid(series.timestamps(), series.values(), dt);
    const std::size_t m = x.size();
    if (m < 8) throw SeriesTooShort("too few grid samples for period estimation");

    double value_scale = 0.0;
    for (double xi : x) value_scale = std::max(value_scale, std::abs(xi));

    double mean = 0.0;
    for (double xi : x) mean += xi;
    mean /= static_cast<double>(m);
    for (double& xi : x) xi -= mean;

    double denom = 0.0;
    for (double xi : x) denom += xi * xi;
    denom /= static_cast<double>(m);
    // constant series leave only float rounding behind, whose autocorrelation
    // is meaningless
    if (!(std::sqrt(denom) > 1e-12 * value_scale))
        throw NoPeriodFound("series is constant; no cycle to estimate");

    const std::size_t k_min =
        std::max<std::size_t>(3, static_cast<std::size_t>(std::ceil(min_period / dt)));
    // Keep at least a quarter of the samples overlapping so the per-lag
    // normalization stays stable.
    const std::size_t overlap_floor = std::max<std::size_t>(4, m / 4);
    std::size_t k_max = m - overlap_floor;
    const auto k_cap = static_cast<std::size_t>(std::floor(max_period / dt));
    k_max = std::min(k_max, k_cap);
    if (k_max < k_min)
        throw SeriesTooShort("period search range is empty at this sampling");

    // r[k] for k in [k_min-1, k_hi]; one extra lag each side feeds the
    // local-max test and the parabolic refinement.
    const std::size_t k_lo = k_min - 1;
    const std::size_t k_hi = std::min(k_max + 1, m - 4);
    std::vector<double> r(k_hi + 1, 0.0);
    for (std::size_t k = k_lo; k <= k_hi; ++k) {
        double acc = 0.0;
        const std::size_t overlap = m - k;
        for (std::size_t i = 0; i < overlap; ++i) acc += x[i] * x[i + k];
        r[k] = (acc / static_cast<double>(overlap)) / denom;
    }

    double r_star = -std::numeric_limits<double>::infinity();
    std::size_t arg_star = k_min;
    for (std::size_t k = k_min; k <= k_max; ++k) {
        if (r[k] > r_star) {
            r_star = r[k];
            arg_star = k;
        }
    }

    // Prefer the smallest near-maximal local peak: every multiple of the true
    // period is itself a period, so ties resolve toward the fundamental.
    const double accept = r_star - 0.05 * std::abs(r_star);
    std::size_t k_pick = arg_star;
    for (std::size_t k = k_min; k <= k_max; ++k) {
        const double left = (k > k_lo) ? r[k - 1] : r[k];
        const double right = (k < k_hi) ? r[k + 1] : r[k];
        if (r[k] >= left && r[k] >= right && r[k] >= accept) {
            k_pick = k;
            break;
        }
    }

    const double confidence = std::clamp(r[k_pick], 0.0, 1.0);
    if (confidence < 0.2)
        throw NoPeriodFound("best autocorrelation peak " + std::to_string(confidence) +
                            " is below the 0.2 confidence threshold");

    double shift = 0.0;
    if (k_pick > k_lo && k_pick < k_hi) {
        const double a = r[k_pick - 1], b = r[k_pick], c = r[k_pick + 1];
        const double curv = a - 2.0 * b + c;
        if (curv < 0.0) shift = std::clamp(0.5 * (a - c) / curv, -0.5, 0.5);
    }

    PeriodEstimate est;
    est.period = std::clamp((static_cast<double>(k_pick) + shift) * dt,
                            min_period, max_period);
    est.confidence = confidence;
    return est;
}

}  // namespace cadence
