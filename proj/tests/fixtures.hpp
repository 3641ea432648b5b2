#pragma once

#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

#include "cadence/rng.hpp"
#include "cadence/series.hpp"

namespace fixtures {

constexpr double kPi = 3.14159265358979323846;

/// offset + slope*t + amplitude*sin(2 pi t / period) + sigma * N(0,1)
inline cadence::TimeSeries sine_series(double period,
                                       double amplitude,
                                       double offset,
                                       double sigma,
                                       double rate,
                                       double duration,
                                       std::uint64_t seed,
                                       double t_start = 0.0,
                                       double slope = 0.0) {
    const auto n = static_cast<std::size_t>(std::llround(duration * rate));
    std::vector<double> t(n), v(n);
    cadence::Xorshift64 rng(seed);
    for (std::size_t i = 0; i < n; ++i) {
        t[i] = t_start + static_cast<double>(i) / rate;
        v[i] = offset + slope * t[i] +
               amplitude * std::sin(2.0 * kPi * t[i] / period) +
               sigma * rng.next_gaussian();
    }
    return cadence::make_series(std::move(t), std::move(v), "g");
}

/// Independent brute-force oracle: project y onto cos/sin at harmonics
/// n = 1..order of the given period. Exact for regular grids covering whole
/// periods, where the basis is orthogonal.
inline std::pair<std::vector<double>, std::vector<double>> dft_at_harmonics(
    const std::vector<double>& t,
    const std::vector<double>& y,
    double period,
    int order) {
    std::vector<double> a(static_cast<std::size_t>(order));
    std::vector<double> b(static_cast<std::size_t>(order));
    const auto m = static_cast<double>(y.size());
    for (int n = 1; n <= order; ++n) {
        double ca = 0.0, sb = 0.0;
        for (std::size_t i = 0; i < y.size(); ++i) {
            const double w = 2.0 * kPi * static_cast<double>(n) * t[i] / period;
            ca += y[i] * std::cos(w);
            sb += y[i] * std::sin(w);
        }
        a[static_cast<std::size_t>(n - 1)] = 2.0 * ca / m;
        b[static_cast<std::size_t>(n - 1)] = 2.0 * sb / m;
    }
    return {a, b};
}

}  // namespace fixtures
