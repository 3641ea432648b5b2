#pragma once

#include <cstddef>
#include <vector>

#include "cadence/auth.hpp"
#include "cadence/io.hpp"
#include "cadence/model.hpp"

namespace cadence {

struct FoldResult {
    std::size_t fold_index = 0;  ///< 1-based
    std::size_t train_len = 0;
    std::size_t horizon = 0;
    double mae = 0.0;
    double rmse = 0.0;
    double coverage = 0.0;  ///< band hit rate at the config's interval level
};

struct CvReport {
    std::vector<FoldResult> folds;
    FitConfig config_echo;
};

/// Rolling-origin cross-validation: fold i (1-based) trains on the first
/// initial_train + (i-1) * horizon samples and forecasts the next horizon
/// samples at their actual timestamps. A failing fold aborts with its index.
CvReport cross_validate(const TimeSeries& series,
                        std::size_t initial_train,
                        std::size_t horizon,
                        std::size_t n_folds,
                        const FitConfig& config);

/// Fraction of actual values inside [lower, upper]. Timestamps must match the
/// forecast's exactly.
double coverage_metric(const Forecast& forecast, const TimeSeries& actual);

struct AuthSimResult {
    double far = 0.0;  ///< impostor windows accepted / n
    double frr = 0.0;  ///< owner windows escalated / n
    std::vector<GateState> gate_trace;
};

/// Trains a profile on two owner periods, then judges n_windows fresh owner
/// windows and n_windows impostor windows (each two periods long, placed just
/// after the training span, with per-window noise seeds derived from the spec
/// seeds). The gate trace starts Observing and advances through the owner
/// events followed by the impostor events.
AuthSimResult auth_simulate(const SynthSpec& owner_spec,
                            const SynthSpec& impostor_spec,
                            const TePolicy& te,
                            const FitConfig& config,
                            std::size_t n_windows);

}  // namespace cadence
