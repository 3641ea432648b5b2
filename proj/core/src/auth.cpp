#include "cadence/auth.hpp"

#include <algorithm>
#include <cmath>

#include "cadence/errors.hpp"

namespace cadence {

namespace {
constexpr std::size_t kMaxTrainingSamples = 50000;

const AdditiveModel& model_for(const AuthProfile& profile, const std::string& action) {
    auto it = profile.action_models.find(action);
    if (it == profile.action_models.end())
        throw UnknownAction("no model registered for action '" + action + "'");
    return it->second;
}

double window_variance(const TimeSeries& w) {
    if (w.size() < 2) return 0.0;
    double mean = 0.0;
    for (double v : w.values()) mean += v;
    mean /= static_cast<double>(w.size());
    double ss = 0.0;
    for (double v : w.values()) ss += (v - mean) * (v - mean);
    return ss / static_cast<double>(w.size() - 1);
}
}  // namespace

void TePolicy::validate() const {
    if (!(interval_level > 0.0 && interval_level < 1.0))
        throw OutOfRange("interval_level must lie in (0, 1)");
    if (!(max_outside_fraction >= 0.0 && max_outside_fraction <= 1.0))
        throw OutOfRange("max_outside_fraction must lie in [0, 1]");
}

GateState gate_step(const GateState& state, GateEvent event) {
    // Escalation wins from every state; an intruder signal is never more than
    // one window away from Escalated.
    if (event == GateEvent::WindowEscalated)
        return {GateMode::Escalated, 0, 0};

    switch (state.mode) {
        case GateMode::Idle:
            if (event == GateEvent::Timeout) return {GateMode::Observing, 0, 0};
            return state;  // sensors are off; window events are ignored
        case GateMode::Observing:
            if (event == GateEvent::WindowAccepted) {
                const int accepts = state.consecutive_accepts + 1;
                if (accepts >= 5) return {GateMode::Idle, 0, 0};
                return {GateMode::Observing, accepts, 0};
            }
            if (event == GateEvent::WindowStale) {
                const int stale = state.consecutive_stale_windows + 1;
                if (stale >= 3) return {GateMode::Idle, 0, 0};
                return {GateMode::Observing, 0, stale};
            }
            return state;  // Timeout is a no-op while already observing
        case GateMode::Escalated:
            if (event == GateEvent::WindowAccepted) return {GateMode::Observing, 0, 0};
            return state;  // stale windows and timeouts do not clear an escalation
    }
    return state;
}

AuthProfile register_action(AuthProfile profile,
                            const std::string& action,
                            const TimeSeries& training,
                            const FitConfig& config) {
    if (action.empty()) throw OutOfRange("action label must be nonempty");
    AdditiveModel model = fit(training, config);
    if (model.seasonality) {
        // 2% slack: an estimated period is itself only good to a few tenths
        // of a percent, and the gate must not reject genuine two-cycle data.
        const double period = model.seasonality->period;
        const double covered = training.span() + training.median_spacing();
        if (covered < 2.0 * period * 0.98)
            throw InsufficientCycles("training covers " +
                                     std::to_string(covered / period) +
                                     " cycles; at least 2 are required");
    }
    profile.action_models.insert_or_assign(action, std::move(model));
    return profile;
}

Verdict judge(const AuthProfile& profile,
              const std::string& action,
              const TimeSeries& window) {
    profile.te_policy.validate();
    const AdditiveModel& model = model_for(profile, action);
    if (window.size() < profile.te_policy.min_window_samples)
        throw WindowTooShort("window has " + std::to_string(window.size()) +
                             " samples; policy requires " +
                             std::to_string(profile.te_policy.min_window_samples));
    if (window.timestamps().front() <= model.train_end)
        throw WindowPrecedesTraining("window starts at " +
                                     std::to_string(window.timestamps().front()) +
                                     ", not after training end " +
                                     std::to_string(model.train_end));

    const Forecast fc =
        forecast_at(model, window.timestamps(), profile.te_policy.interval_level);
    std::size_t outside = 0;
    for (std::size_t i = 0; i < window.size(); ++i) {
        const double v = window.values()[i];
        if (v < fc.lower[i] || v > fc.upper[i]) ++outside;
    }

    Verdict verdict;
    verdict.samples_checked = window.size();
    verdict.outside_fraction =
        static_cast<double>(outside) / static_cast<double>(window.size());
    verdict.decision = verdict.outside_fraction <= profile.te_policy.max_outside_fraction
                           ? Decision::Accept
                           : Decision::Escalate;
    return verdict;
}

AuthProfile retrain(AuthProfile profile,
                    const std::string& action,
                    const TimeSeries& accepted_window,
                    const FitConfig& config) {
    const AdditiveModel& model = model_for(profile, action);
    if (accepted_window.empty() ||
        accepted_window.timestamps().front() <= model.train_end)
        throw WindowPrecedesTraining(
            "retraining window must start strictly after the training span end");

    TimeSeries combined = concat(model.training, accepted_window);
    if (combined.size() > kMaxTrainingSamples) {
        const std::size_t drop = combined.size() - kMaxTrainingSamples;
        combined = split_at(combined, drop).second;
    }
    AdditiveModel refit = fit(combined, config);
    profile.action_models.insert_or_assign(action, std::move(refit));
    return profile;
}

GateEvent window_event(const AuthProfile& profile,
                       const std::string& action,
                       const TimeSeries& window) {
    const AdditiveModel& model = model_for(profile, action);
    const double sigma2 = model.residuals.sigma * model.residuals.sigma;
    if (window_variance(window) < 1e-6 * sigma2) return GateEvent::WindowStale;
    return judge(profile, action, window).decision == Decision::Accept
               ? GateEvent::WindowAccepted
               : GateEvent::WindowEscalated;
}

AuthProfile register_recording(AuthProfile profile,
                               const TriAxialRecording& recording,
                               const FitConfig& config) {
    profile = register_action(std::move(profile), recording.action + ".x",
                              recording.x, config);
    profile = register_action(std::move(profile), recording.action + ".y",
                              recording.y, config);
    profile = register_action(std::move(profile), recording.action + ".z",
                              recording.z, config);
    return profile;
}

Verdict judge_recording(const AuthProfile& profile,
                        const std::string& action,
                        const TriAxialRecording& window) {
    const Verdict vx = judge(profile, action + ".x", window.x);
    const Verdict vy = judge(profile, action + ".y", window.y);
    const Verdict vz = judge(profile, action + ".z", window.z);

    Verdict combined;
    combined.samples_checked =
        vx.samples_checked + vy.samples_checked + vz.samples_checked;
    combined.outside_fraction = std::max({vx.outside_fraction, vy.outside_fraction,
                                          vz.outside_fraction});
    combined.decision =
        combined.outside_fraction <= profile.te_policy.max_outside_fraction
            ? Decision::Accept
            : Decision::Escalate;
    return combined;
}

GateEvent recording_event(const AuthProfile& profile,
                          const std::string& action,
                          const TriAxialRecording& window) {
    bool all_stale = true;
    for (char axis : {'x', 'y', 'z'}) {
        const AdditiveModel& model = model_for(profile, action + "." + axis);
        const double sigma2 = model.residuals.sigma * model.residuals.sigma;
        if (!(window_variance(window.axis(axis)) < 1e-6 * sigma2)) {
            all_stale = false;
            break;
        }
    }
    if (all_stale) return GateEvent::WindowStale;
    return judge_recording(profile, action, window).decision == Decision::Accept
               ? GateEvent::WindowAccepted
               : GateEvent::WindowEscalated;
}

}  // namespace cadence
