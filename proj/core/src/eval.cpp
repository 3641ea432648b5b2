#include "cadence/eval.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "cadence/errors.hpp"

namespace cadence {

CvReport cross_validate(const TimeSeries& series,
                        std::size_t initial_train,
                        std::size_t horizon,
                        std::size_t n_folds,
                        const FitConfig& config) {
    if (n_folds > 0 && series.size() < initial_train + n_folds * horizon)
        throw SeriesTooShort("cross-validation needs " +
                             std::to_string(initial_train + n_folds * horizon) +
                             " samples, got " + std::to_string(series.size()));

    CvReport report;
    report.config_echo = config;
    for (std::size_t i = 1; i <= n_folds; ++i) {
        const std::size_t train_len = initial_train + (i - 1) * horizon;
        try {
            auto [train, rest] = split_at(series, train_len);
            const TimeSeries test = split_at(rest, horizon).first;

            const AdditiveModel model = fit(train, config);
            const Forecast fc =
                forecast_at(model, test.timestamps(), config.interval_level);

            double abs_sum = 0.0, sq_sum = 0.0;
            for (std::size_t j = 0; j < test.size(); ++j) {
                const double e = test.values()[j] - fc.yhat[j];
                abs_sum += std::abs(e);
                sq_sum += e * e;
            }
            FoldResult fold;
            fold.fold_index = i;
            fold.train_len = train_len;
            fold.horizon = horizon;
            fold.mae = abs_sum / static_cast<double>(test.size());
            fold.rmse = std::sqrt(sq_sum / static_cast<double>(test.size()));
            fold.coverage = coverage_metric(fc, test);
            report.folds.push_back(fold);
        } catch (const Error& e) {
            throw Error("fold " + std::to_string(i) + ": " + e.what());
        }
    }
    return report;
}

double coverage_metric(const Forecast& forecast, const TimeSeries& actual) {
    if (forecast.timestamps != actual.timestamps())
        throw TimestampMismatch("actuals are not aligned with the forecast");
    if (actual.empty()) return 0.0;
    std::size_t inside = 0;
    for (std::size_t i = 0; i < actual.size(); ++i) {
        const double v = actual.values()[i];
        if (v >= forecast.lower[i] && v <= forecast.upper[i]) ++inside;
    }
    return static_cast<double>(inside) / static_cast<double>(actual.size());
}

AuthSimResult auth_simulate(const SynthSpec& owner_spec,
                            const SynthSpec& impostor_spec,
                            const TePolicy& te,
                            const FitConfig& config,
                            std::size_t n_windows) {
    if (n_windows < 1) throw OutOfRange("n_windows must be >= 1");
    owner_spec.validate();
    impostor_spec.validate();
    te.validate();

    // Enrollment: exactly two periods of the owner process.
    SynthSpec train_spec = owner_spec;
    train_spec.duration = 2.0 * owner_spec.period;
    const TriAxialRecording training = synth(train_spec);

    AuthProfile profile;
    profile.user_id = owner_spec.subject_id;
    profile.te_policy = te;
    profile.gate = GateState{GateMode::Observing, 0, 0};
    profile = register_recording(std::move(profile), training, config);

    const double window_duration = 2.0 * owner_spec.period;
    const double t0 =
        training.x.timestamps().back() + 1.0 / owner_spec.rate;

    auto window_at = [&](const SynthSpec& spec, std::uint64_t trial) {
        SynthSpec w = spec;
        w.duration = window_duration;
        w.rate = owner_spec.rate;
        w.rng_seed = spec.rng_seed + trial;
        return synth(w, t0);
    };

    AuthSimResult result;
    result.gate_trace.push_back(profile.gate);

    std::size_t owner_escalated = 0;
    std::size_t impostor_accepted = 0;
    std::vector<GateEvent> events;
    events.reserve(2 * n_windows);

    for (std::size_t i = 0; i < n_windows; ++i) {
        const TriAxialRecording w = window_at(owner_spec, i + 1);
        const Verdict v = judge_recording(profile, owner_spec.action, w);
        if (v.decision == Decision::Escalate) ++owner_escalated;
        events.push_back(recording_event(profile, owner_spec.action, w));
    }
    for (std::size_t i = 0; i < n_windows; ++i) {
        const TriAxialRecording w = window_at(impostor_spec, i + 1);
        const Verdict v = judge_recording(profile, owner_spec.action, w);
        if (v.decision == Decision::Accept) ++impostor_accepted;
        events.push_back(recording_event(profile, owner_spec.action, w));
    }

    GateState gate = profile.gate;
    for (GateEvent e : events) {
        gate = gate_step(gate, e);
        result.gate_trace.push_back(gate);
    }

    result.far = static_cast<double>(impostor_accepted) / static_cast<double>(n_windows);
    result.frr = static_cast<double>(owner_escalated) / static_cast<double>(n_windows);
    return result;
}

}  // namespace cadence
