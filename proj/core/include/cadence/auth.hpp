#pragma once

#include <cstddef>
#include <map>
#include <string>

#include "cadence/io.hpp"
#include "cadence/model.hpp"

namespace cadence {

/// Tolerable-error policy: how far a window may stray from the forecast band
/// before the user's legitimacy is questioned.
struct TePolicy {
    double interval_level = 0.80;
    /// Fraction of window samples allowed outside the band before escalation.
    double max_outside_fraction = 0.5;
    std::size_t min_window_samples = 10;

    void validate() const;
};

enum class Decision { Accept, Escalate };

struct Verdict {
    Decision decision = Decision::Accept;
    double outside_fraction = 0.0;
    std::size_t samples_checked = 0;
};

enum class GateMode { Idle, Observing, Escalated };

/// Sensor duty-cycle state. Mode transitions happen only through gate_step.
struct GateState {
    GateMode mode = GateMode::Observing;
    int consecutive_accepts = 0;
    int consecutive_stale_windows = 0;

    bool operator==(const GateState&) const = default;
};

enum class GateEvent { WindowAccepted, WindowEscalated, WindowStale, Timeout };

/// Deterministic, total transition function of the sensor gate:
///   - any state + WindowEscalated -> Escalated (counters reset)
///   - Observing + WindowAccepted -> accept streak + 1; Idle at 5
///   - Observing + WindowStale    -> stale streak + 1; Idle at 3
///   - Idle + Timeout -> Observing; Escalated + WindowAccepted -> Observing
///   - everything else keeps the current mode.
GateState gate_step(const GateState& state, GateEvent event);

/// Per-user collection of action behavior models plus judgment policy and
/// gate state. A value type: operations return updated copies.
struct AuthProfile {
    std::string user_id;
    std::map<std::string, AdditiveModel> action_models;
    TePolicy te_policy;
    GateState gate;
};

/// Fits a model for the action and stores it under that label, replacing any
/// previous one. The training data must span at least two of the action's
/// (estimated or configured) periods; otherwise InsufficientCycles.
AuthProfile register_action(AuthProfile profile,
                            const std::string& action,
                            const TimeSeries& training,
                            const FitConfig& config);

/// Forecasts the action's model over the window's timestamps at the policy's
/// interval level and counts samples falling outside the band. Accepts iff
/// the outside fraction stays within the policy. Deterministic.
Verdict judge(const AuthProfile& profile,
              const std::string& action,
              const TimeSeries& window);

/// Refits the action's model on its retained training data extended by the
/// accepted window (the caller is responsible for only feeding accepted
/// windows; timestamps are re-checked). Training history is capped at 50000
/// samples per action, oldest dropped first.
AuthProfile retrain(AuthProfile profile,
                    const std::string& action,
                    const TimeSeries& accepted_window,
                    const FitConfig& config);

/// Classifies one window into the gate event it generates: WindowStale when
/// the window variance collapses below 1e-6 x the model residual variance
/// (phone resting on a desk), otherwise the judge verdict.
GateEvent window_event(const AuthProfile& profile,
                       const std::string& action,
                       const TimeSeries& window);

// ---- tri-axial convenience ---------------------------------------------------
// The three axes are treated as separately fitted series registered under
// "<action>.x", "<action>.y", "<action>.z"; judgment escalates when any axis
// escalates.

AuthProfile register_recording(AuthProfile profile,
                               const TriAxialRecording& recording,
                               const FitConfig& config);

Verdict judge_recording(const AuthProfile& profile,
                        const std::string& action,
                        const TriAxialRecording& window);

GateEvent recording_event(const AuthProfile& profile,
                          const std::string& action,
                          const TriAxialRecording& window);

// ---- persistence ---------------------------------------------------------------
// Versioned, self-describing flat text file; every float is written with 17
// significant digits so save -> load -> judge is bit-identical in decisions.
// The exact field order is documented in the repository README.

void save_profile(const AuthProfile& profile, const std::string& path);
AuthProfile load_profile(const std::string& path);

}  // namespace cadence
