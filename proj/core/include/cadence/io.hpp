#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cadence/model.hpp"
#include "cadence/series.hpp"

namespace cadence {

/// One labeled tri-axial accelerometer recording. The three axes share an
/// identical timestamp vector.
struct TriAxialRecording {
    std::string subject_id;
    std::string action;
    std::string recording_id;
    TimeSeries x;
    TimeSeries y;
    TimeSeries z;
    double sample_rate_hint = 0.0;  ///< Hz, derived from the median spacing

    const TimeSeries& axis(char which) const;
};

/// Validates axis alignment (throws AxisMisalignment on differing timestamp
/// vectors) and derives the sample-rate hint.
TriAxialRecording make_recording(std::string subject_id,
                                 std::string action,
                                 std::string recording_id,
                                 TimeSeries x,
                                 TimeSeries y,
                                 TimeSeries z);

/// Recipe for a synthetic tri-axial recording:
///   x = offset + trend_slope*t + amplitude*sin(2 pi t / period) + noise + outliers
///   y = same with sin -> cos, z = same as x with amplitude/2,
/// noise ~ N(0, noise_sigma^2), outliers Bernoulli(outlier_rate) adding
/// outlier_magnitude. Fully determined by rng_seed.
struct SynthSpec {
    double period = 1.0;       ///< seconds
    double amplitude = 1.0;
    double offset = 0.0;
    double noise_sigma = 0.0;  ///< >= 0
    double trend_slope = 0.0;  ///< per second
    double outlier_rate = 0.0;     ///< in [0, 1]
    double outlier_magnitude = 0.0;
    double duration = 10.0;  ///< seconds, > 0
    double rate = 50.0;      ///< Hz, > 0
    std::uint64_t rng_seed = 1;
    std::string subject_id = "synth";
    std::string action = "Synthetic";
    std::string recording_id = "0";

    void validate() const;
};

/// Generates the recording described by the spec on the grid t = i / rate,
/// i = 0 .. round(duration * rate) - 1.
///
/// Stream layout (one xorshift64 stream seeded with rng_seed): axes in the
/// order x, y, z; per sample one Gaussian draw (two uniforms) followed by one
/// uniform outlier draw, consumed whether or not noise or outliers are
/// enabled, so the pattern is stable across parameter changes.
TriAxialRecording synth(const SynthSpec& spec);

/// Same recipe with the time grid shifted to start at t_start; the sinusoid
/// phase follows absolute time, so a shifted window continues the process.
TriAxialRecording synth(const SynthSpec& spec, double t_start);

/// Reads recordings from a CSV file with header
///   subject_id,action,recording_id,t,ax,ay,az
/// (comma separators, '.' decimal point, LF line endings). One recording per
/// (subject, action, recording_id) group in first-appearance order; rows
/// within a group are sorted by timestamp. Malformed rows abort with
/// ParseError rather than being skipped.
std::vector<TriAxialRecording> load_recording(const std::string& path);

/// Fixture writer mirroring the load_recording format. Values are written
/// with 17 significant digits so a round trip is bit-exact.
void write_recording(const std::vector<TriAxialRecording>& recordings,
                     const std::string& path);

/// Writes `t,yhat,lower,upper[,actual]` CSV, one row per forecast timestamp,
/// full precision. When actuals are given their timestamps must match the
/// forecast's exactly.
void export_forecast(const Forecast& forecast,
                     const TimeSeries* actuals,
                     const std::string& path);

}  // namespace cadence
