#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

namespace cadence {

/// Scalar signal sampled at strictly increasing times.
///
/// Timestamps are plain elapsed seconds; gaps may be irregular (missing data
/// is represented by absence, never by sentinel values). Values are finite
/// and dimensionless; the unit tag is free text carried along for the caller.
/// Instances are immutable after construction.
class TimeSeries {
public:
    TimeSeries() = default;

    const std::vector<double>& timestamps() const { return timestamps_; }
    const std::vector<double>& values() const { return values_; }
    const std::string& unit_tag() const { return unit_tag_; }

    std::size_t size() const { return values_.size(); }
    bool empty() const { return values_.empty(); }

    /// Last minus first timestamp; 0 for fewer than two samples.
    double span() const;

    /// Median gap between consecutive timestamps; 0 for fewer than two samples.
    double median_spacing() const;

    friend TimeSeries make_series(std::vector<double> timestamps,
                                  std::vector<double> values,
                                  std::string unit_tag);

private:
    std::vector<double> timestamps_;
    std::vector<double> values_;
    std::string unit_tag_;
};

/// Validates and assembles a TimeSeries. Rejects violations instead of
/// repairing them: NonMonotonicTimestamps on duplicate or decreasing times,
/// NonFiniteValue on NaN/inf anywhere, LengthMismatch on ragged inputs.
/// Empty inputs are a valid (empty) series.
TimeSeries make_series(std::vector<double> timestamps,
                       std::vector<double> values,
                       std::string unit_tag = "");

/// Splits into the first `train_len` samples and the remainder; their
/// concatenation reproduces the input exactly. Throws OutOfRange when
/// `train_len` exceeds the length.
std::pair<TimeSeries, TimeSeries> split_at(const TimeSeries& series,
                                           std::size_t train_len);

/// Joins two series in time order; `b` must start strictly after `a` ends.
/// The result carries `a`'s unit tag (or `b`'s when `a` is empty).
TimeSeries concat(const TimeSeries& a, const TimeSeries& b);

/// A dominant cycle length and how pronounced it is.
struct PeriodEstimate {
    double period = 0.0;      ///< seconds, > 2x the median sample spacing
    double confidence = 0.0;  ///< normalized autocorrelation peak in [0, 1]
};

/// Estimates the dominant period as the lag in [min_period, max_period] that
/// maximizes the normalized autocorrelation of the mean-removed signal,
/// linearly interpolated onto a regular grid at the median sample spacing.
///
/// When several near-equal peaks exist (a sinusoid is also periodic at every
/// multiple of its period) the smallest such lag wins, and a three-point
/// parabolic refinement sharpens the peak below one grid lag.
///
/// Throws SeriesTooShort for fewer than 4 samples or a span under
/// 2 x min_period, and NoPeriodFound when the best peak's confidence is
/// below 0.2 (constant and white-noise inputs land here).
PeriodEstimate estimate_period(const TimeSeries& series,
                               double min_period,
                               double max_period);

}  // namespace cadence
