#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

#include "cadence/errors.hpp"
#include "cadence/model.hpp"
#include "ridge.hpp"

namespace cadence {
namespace {

constexpr double kTwoPi = 2.0 * 3.14159265358979323846;

// Fixed grid of residual quantile levels, denser at the tails where the
// forecast bands live. Arbitrary levels interpolate between entries.
const std::vector<double>& quantile_grid() {
    static const std::vector<double> grid = {
        0.005, 0.01, 0.025, 0.05, 0.075, 0.10, 0.125, 0.15, 0.20, 0.25,
        0.30,  0.35, 0.40,  0.45, 0.50,  0.55, 0.60,  0.65, 0.70, 0.75,
        0.80,  0.85, 0.875, 0.90, 0.925, 0.95, 0.975, 0.99, 0.995};
    return grid;
}

// type-7 empirical quantile (linear interpolation between order statistics)
double empirical_quantile(const std::vector<double>& sorted, double p) {
    if (sorted.empty()) return 0.0;
    const double pos = p * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, sorted.size() - 1);
    const double w = pos - std::floor(pos);
    return sorted[lo] + w * (sorted[hi] - sorted[lo]);
}

double median_copy(std::vector<double> v) {
    if (v.empty()) return 0.0;
    const std::size_t mid = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + mid, v.end());
    double hi = v[mid];
    if (v.size() % 2 == 0) {
        std::nth_element(v.begin(), v.begin() + mid - 1, v.begin() + mid);
        return 0.5 * (v[mid - 1] + hi);
    }
    return hi;
}

void fill_fourier_cols(Eigen::MatrixXd& A, Eigen::Index row, Eigen::Index base,
                       double t, double period, int order) {
    for (int n = 1; n <= order; ++n) {
        const double a = kTwoPi * static_cast<double>(n) * t / period;
        A(row, base + n - 1) = std::cos(a);
        A(row, base + order + n - 1) = std::sin(a);
    }
}

double logistic_value(double capacity, double rate, double offset, double t) {
    const double z = rate * (t - offset);
    if (z > 700.0) return capacity;
    if (z < -700.0) return 0.0;
    return capacity / (1.0 + std::exp(-z));
}

// The autocorrelation peak locates the period only to about one grid lag,
// which is too coarse for phase-stable extrapolation from short training
// spans. Zoom a small grid around the seed, scoring each candidate by the
// ridge least-squares error of a light trend + seasonality fit.
double refine_period(const std::vector<double>& ts,
                     const std::vector<double>& ys,
                     int order,
                     double lambda,
                     double seed_period) {
    const auto n = static_cast<Eigen::Index>(ts.size());
    Eigen::VectorXd y(n);
    for (Eigen::Index i = 0; i < n; ++i) y(i) = ys[static_cast<std::size_t>(i)];

    auto sse_for = [&](double period) {
        const Eigen::Index p = 2 + 2 * order;
        Eigen::MatrixXd A(n, p);
        for (Eigen::Index i = 0; i < n; ++i) {
            const double t = ts[static_cast<std::size_t>(i)];
            A(i, 0) = 1.0;
            A(i, 1) = t - ts.front();
            fill_fourier_cols(A, i, 2, t, period, order);
        }
        Eigen::VectorXd d = Eigen::VectorXd::Zero(p);
        for (Eigen::Index j = 2; j < p; ++j) d(j) = std::max(lambda, 1e-8);
        try {
            const auto sol = detail::ridge_solve(A, y, d);
            return (y - A * sol.beta).squaredNorm();
        } catch (const SingularDesign&) {
            return std::numeric_limits<double>::infinity();
        }
    };

    double lo = 0.96 * seed_period, hi = 1.04 * seed_period, best = seed_period;
    for (int round = 0; round < 3; ++round) {
        double best_sse = std::numeric_limits<double>::infinity();
        for (int i = 0; i < 9; ++i) {
            const double cand = lo + (hi - lo) * static_cast<double>(i) / 8.0;
            const double sse = sse_for(cand);
            if (sse < best_sse) {
                best_sse = sse;
                best = cand;
            }
        }
        const double width = 0.25 * (hi - lo);
        lo = std::max(best - 0.5 * width, 1e-12);
        hi = best + 0.5 * width;
    }
    return best;
}

struct LogisticFitResult {
    double capacity = 0.0;
    double rate = 0.0;
    double offset = 0.0;
    Eigen::VectorXd seasonal;      // 2N coefficients, empty when N = 0
    Eigen::MatrixXd trend_unit_cov;  // 3x3
    double effective_dof = 3.0;
};

// Joint logistic-trend + seasonality fit by variable projection: the Fourier
// block is linear and re-solved (prefactored ridge) for every trend candidate,
// first over a coarse (C, k, b) grid and then under Gauss-Newton refinement.
LogisticFitResult fit_logistic(const Eigen::VectorXd& t,
                               const Eigen::VectorXd& y,
                               const Eigen::MatrixXd& fourier,
                               double seasonal_lambda) {
    const Eigen::Index n = t.size();
    const Eigen::Index q = fourier.cols();

    Eigen::LDLT<Eigen::MatrixXd> seasonal_ldlt;
    Eigen::MatrixXd ftf;
    if (q > 0) {
        ftf = fourier.transpose() * fourier;
        Eigen::MatrixXd M = ftf;
        M.diagonal().array() += std::max(seasonal_lambda, 1e-10);
        seasonal_ldlt.compute(M);
        if (seasonal_ldlt.info() != Eigen::Success)
            throw SingularDesign("seasonal normal equations failed to factor");
    }

    auto seasonal_solve = [&](const Eigen::VectorXd& r) -> Eigen::VectorXd {
        if (q == 0) return Eigen::VectorXd();
        return seasonal_ldlt.solve(fourier.transpose() * r);
    };
    auto sse_for = [&](double C, double k, double b, Eigen::VectorXd* coef_out) {
        Eigen::VectorXd g(n);
        for (Eigen::Index i = 0; i < n; ++i) g(i) = logistic_value(C, k, b, t(i));
        Eigen::VectorXd r = y - g;
        Eigen::VectorXd coef = seasonal_solve(r);
        if (q > 0) r -= fourier * coef;
        if (coef_out) *coef_out = coef;
        return r.squaredNorm();
    };

    const double span = std::max(t(n - 1) - t(0), 1e-12);
    const double ymax = y.maxCoeff();

    // coarse seeding grid: C over [max(y), 2 max(y)], k over +/-{.1,.5,1,2,5}/span,
    // b over five time quantiles
    std::vector<double> c_grid(5);
    for (int i = 0; i < 5; ++i)
        c_grid[static_cast<std::size_t>(i)] = ymax + 0.25 * static_cast<double>(i) * ymax;
    std::vector<double> k_grid;
    for (double k : {0.1, 0.5, 1.0, 2.0, 5.0}) {
        k_grid.push_back(k / span);
        k_grid.push_back(-k / span);
    }
    std::vector<double> sorted_t(t.data(), t.data() + n);
    std::vector<double> b_grid(5);
    for (int i = 0; i < 5; ++i)
        b_grid[static_cast<std::size_t>(i)] =
            empirical_quantile(sorted_t, 0.1 + 0.2 * static_cast<double>(i));

    double best_sse = std::numeric_limits<double>::infinity();
    double C = ymax, k = 1.0 / span, b = t(n / 2);
    for (double cc : c_grid)
        for (double kk : k_grid)
            for (double bb : b_grid) {
                const double sse = sse_for(cc, kk, bb, nullptr);
                if (sse < best_sse) {
                    best_sse = sse;
                    C = cc;
                    k = kk;
                    b = bb;
                }
            }

    // Gauss-Newton refinement with halving line search; the seasonal block is
    // re-solved inside every trial step.
    Eigen::MatrixXd jtj_final = Eigen::MatrixXd::Identity(3, 3);
    for (int iter = 0; iter < 50; ++iter) {
        Eigen::VectorXd coef;
        const double sse = sse_for(C, k, b, &coef);
        Eigen::VectorXd g(n);
        Eigen::MatrixXd J(n, 3);
        for (Eigen::Index i = 0; i < n; ++i) {
            const double z = k * (t(i) - b);
            const double s = 1.0 / (1.0 + std::exp(-std::clamp(z, -700.0, 700.0)));
            g(i) = C * s;
            J(i, 0) = s;
            J(i, 1) = C * s * (1.0 - s) * (t(i) - b);
            J(i, 2) = -C * s * (1.0 - s) * k;
        }
        Eigen::VectorXd r = y - g;
        if (coef.size() > 0) r -= fourier * coef;

        Eigen::MatrixXd jtj = J.transpose() * J;
        const double mu = 1e-10 * std::max(jtj.trace(), 1e-12);
        jtj.diagonal().array() += mu;
        jtj_final = jtj;
        const Eigen::Vector3d step = jtj.ldlt().solve(J.transpose() * r);
        if (!step.allFinite()) break;

        double alpha = 1.0;
        bool accepted = false;
        double new_sse = sse;
        for (int ls = 0; ls < 9; ++ls, alpha *= 0.5) {
            const double sse_try =
                sse_for(C + alpha * step(0), k + alpha * step(1), b + alpha * step(2), nullptr);
            if (sse_try < sse) {
                C += alpha * step(0);
                k += alpha * step(1);
                b += alpha * step(2);
                new_sse = sse_try;
                accepted = true;
                break;
            }
        }
        if (!accepted) break;
        if (sse - new_sse < 1e-10 * std::max(sse, 1e-300)) break;
    }

    LogisticFitResult out;
    out.capacity = C;
    out.rate = k;
    out.offset = b;
    Eigen::VectorXd g_final(n);
    for (Eigen::Index i = 0; i < n; ++i) g_final(i) = logistic_value(C, k, b, t(i));
    out.seasonal = seasonal_solve(y - g_final);
    out.trend_unit_cov = jtj_final.ldlt().solve(Eigen::MatrixXd::Identity(3, 3));
    if (!out.trend_unit_cov.allFinite())
        out.trend_unit_cov = Eigen::MatrixXd::Zero(3, 3);
    out.effective_dof = 3.0;
    if (q > 0) {
        const Eigen::MatrixXd minv =
            seasonal_ldlt.solve(Eigen::MatrixXd::Identity(q, q));
        out.effective_dof += (minv * ftf).trace();
    }
    return out;
}

}  // namespace

AdditiveModel fit(const TimeSeries& series, const FitConfig& config) {
    config.validate();
    const std::size_t n = series.size();
    const std::size_t min_len =
        std::max<std::size_t>(10, 2 * static_cast<std::size_t>(config.fourier_order) + 3);
    if (n < min_len)
        throw SeriesTooShort("fit needs at least " + std::to_string(min_len) +
                             " samples, got " + std::to_string(n));

    const auto& ts = series.timestamps();
    const auto& ys = series.values();
    const double t0 = ts.front();
    const double span = series.span();
    const double dt_med = series.median_spacing();
    const int order = config.fourier_order;

    // 1. resolve the seasonal period
    std::optional<double> period;
    if (order > 0) {
        if (config.period) {
            period = *config.period;
        } else {
            try {
                const double seed =
                    estimate_period(series, 4.0 * dt_med, 0.5 * (span + dt_med)).period;
                period = refine_period(ts, ys, order,
                                       config.seasonality_ridge_lambda, seed);
            } catch (const Error& e) {
                throw PeriodUnresolved(std::string("automatic period estimation failed: ") +
                                       e.what());
            }
        }
    }

    // 2. outlier pre-pass: intercept + slope + seasonal basis, lightly ridged
    std::vector<std::size_t> outlier_idx;
    {
        const Eigen::Index p = 2 + (period ? 2 * order : 0);
        Eigen::MatrixXd A(n, p);
        Eigen::VectorXd yv(n);
        for (std::size_t i = 0; i < n; ++i) {
            const auto r = static_cast<Eigen::Index>(i);
            A(r, 0) = 1.0;
            A(r, 1) = ts[i] - t0;
            if (period) fill_fourier_cols(A, r, 2, ts[i], *period, order);
            yv(r) = ys[i];
        }
        Eigen::VectorXd d = Eigen::VectorXd::Zero(p);
        for (Eigen::Index j = 2; j < p; ++j)
            d(j) = std::max(config.seasonality_ridge_lambda, 1e-8);
        const auto pre = detail::ridge_solve(A, yv, d);
        const Eigen::VectorXd resid = yv - A * pre.beta;
        const std::vector<double> detrended(resid.data(), resid.data() + n);

        outlier_idx = flag_outliers(series, detrended, config.outlier_mad_threshold);

        // When the pre-pass reproduces the data down to float noise the MAD
        // rule is flagging rounding error, not anomalies.
        if (!outlier_idx.empty()) {
            const double spread =
                *std::max_element(ys.begin(), ys.end()) -
                *std::min_element(ys.begin(), ys.end());
            const double med = median_copy(detrended);
            double max_dev = 0.0;
            for (double v : detrended) max_dev = std::max(max_dev, std::abs(v - med));
            if (max_dev <= 1e-9 * spread) outlier_idx.clear();
        }
    }

    std::vector<std::size_t> kept;
    kept.reserve(n - outlier_idx.size());
    {
        std::size_t next_flag = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if (next_flag < outlier_idx.size() && outlier_idx[next_flag] == i)
                ++next_flag;
            else
                kept.push_back(i);
        }
    }
    if (kept.size() < 3)
        throw SeriesTooShort("too few samples survive outlier flagging");

    const auto nk = static_cast<Eigen::Index>(kept.size());
    Eigen::VectorXd tk(nk), yk(nk);
    for (Eigen::Index i = 0; i < nk; ++i) {
        tk(i) = ts[kept[static_cast<std::size_t>(i)]];
        yk(i) = ys[kept[static_cast<std::size_t>(i)]];
    }
    Eigen::MatrixXd fourier(nk, period ? 2 * order : 0);
    for (Eigen::Index i = 0; i < nk && period; ++i)
        fill_fourier_cols(fourier, i, 0, tk(i), *period, order);

    // 3. joint trend + seasonality fit on the surviving samples
    AdditiveModel model;
    model.fit_config = config;
    model.train_start = ts.front();
    model.train_end = ts.back();
    model.training = series;
    double effective_dof = 0.0;

    if (config.trend_kind == TrendKind::PiecewiseLinear) {
        const int m = config.n_changepoints;
        std::vector<double> cp_times(static_cast<std::size_t>(m));
        for (int j = 1; j <= m; ++j)
            cp_times[static_cast<std::size_t>(j - 1)] =
                t0 + 0.8 * span * static_cast<double>(j) / static_cast<double>(m);

        const Eigen::Index p = 2 + m + (period ? 2 * order : 0);
        Eigen::MatrixXd A(nk, p);
        for (Eigen::Index i = 0; i < nk; ++i) {
            A(i, 0) = 1.0;
            A(i, 1) = tk(i) - t0;
            for (int j = 0; j < m; ++j)
                A(i, 2 + j) = std::max(0.0, tk(i) - cp_times[static_cast<std::size_t>(j)]);
            if (period) fill_fourier_cols(A, i, 2 + m, tk(i), *period, order);
        }
        Eigen::VectorXd d = Eigen::VectorXd::Zero(p);
        for (int j = 0; j < m; ++j) d(2 + j) = config.changepoint_ridge_lambda;
        for (Eigen::Index j = 2 + m; j < p; ++j) d(j) = config.seasonality_ridge_lambda;

        const auto sol = detail::ridge_solve(A, yk, d);
        effective_dof = sol.effective_dof;

        PiecewiseLinearTrend trend;
        trend.origin = t0;
        trend.intercept = sol.beta(0);
        trend.slope = sol.beta(1);
        trend.changepoint_times = cp_times;
        trend.slope_deltas.resize(static_cast<std::size_t>(m));
        for (int j = 0; j < m; ++j)
            trend.slope_deltas[static_cast<std::size_t>(j)] = sol.beta(2 + j);
        model.trend = trend;

        if (period) {
            FourierSeasonality season;
            season.period = *period;
            season.cos_coeffs.resize(static_cast<std::size_t>(order));
            season.sin_coeffs.resize(static_cast<std::size_t>(order));
            for (int nharm = 0; nharm < order; ++nharm) {
                season.cos_coeffs[static_cast<std::size_t>(nharm)] = sol.beta(2 + m + nharm);
                season.sin_coeffs[static_cast<std::size_t>(nharm)] =
                    sol.beta(2 + m + order + nharm);
            }
            model.seasonality = std::move(season);
        }

        const int dim = 2 + m;
        model.trend_uncertainty.dim = dim;
        model.trend_uncertainty.unit_cov.resize(static_cast<std::size_t>(dim * dim));
        for (int i = 0; i < dim; ++i)
            for (int j = 0; j < dim; ++j)
                model.trend_uncertainty.unit_cov[static_cast<std::size_t>(i * dim + j)] =
                    sol.unit_cov(i, j);
    } else {
        const auto lf = fit_logistic(tk, yk, fourier,
                                     config.seasonality_ridge_lambda);
        effective_dof = lf.effective_dof;
        model.trend = LogisticTrend{lf.capacity, lf.rate, lf.offset};
        if (period) {
            FourierSeasonality season;
            season.period = *period;
            season.cos_coeffs.resize(static_cast<std::size_t>(order));
            season.sin_coeffs.resize(static_cast<std::size_t>(order));
            for (int nharm = 0; nharm < order; ++nharm) {
                season.cos_coeffs[static_cast<std::size_t>(nharm)] = lf.seasonal(nharm);
                season.sin_coeffs[static_cast<std::size_t>(nharm)] = lf.seasonal(order + nharm);
            }
            model.seasonality = std::move(season);
        }
        model.trend_uncertainty.dim = 3;
        model.trend_uncertainty.unit_cov.resize(9);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                model.trend_uncertainty.unit_cov[static_cast<std::size_t>(i * 3 + j)] =
                    lf.trend_unit_cov(i, j);
    }

    // 4. one localized event effect per flagged sample
    if (!outlier_idx.empty()) {
        double min_gap = std::numeric_limits<double>::infinity();
        for (std::size_t idx : outlier_idx) {
            if (idx > 0) min_gap = std::min(min_gap, ts[idx] - ts[idx - 1]);
            if (idx + 1 < n) min_gap = std::min(min_gap, ts[idx + 1] - ts[idx]);
        }
        if (!std::isfinite(min_gap)) min_gap = dt_med > 0.0 ? dt_med : 1.0;
        double halfwidth = 0.49 * min_gap;
        if (period) halfwidth = std::min(halfwidth, 0.45 * *period);

        model.events.influence_halfwidth = halfwidth;
        for (std::size_t idx : outlier_idx) {
            model.events.times.push_back(ts[idx]);
            model.events.effects.push_back(ys[idx] - model.trend_at(ts[idx]) -
                                           model.season_at(ts[idx]));
        }
    }

    // 5. residual statistics from the surviving samples, inflated for the
    // degrees of freedom the fit consumed
    {
        std::vector<double> resid(kept.size());
        double ss = 0.0;
        for (std::size_t i = 0; i < kept.size(); ++i) {
            const double t = ts[kept[i]];
            resid[i] = ys[kept[i]] - model.trend_at(t) - model.season_at(t);
            ss += resid[i] * resid[i];
        }
        const double n_used = static_cast<double>(kept.size());
        const double denom = std::max(1.0, n_used - effective_dof);
        const double scale = std::sqrt(n_used / denom);

        ResidualStats stats;
        stats.sample_count = kept.size();
        stats.sigma = scale * std::sqrt(ss / n_used);
        std::sort(resid.begin(), resid.end());
        stats.quantile_levels = quantile_grid();
        stats.quantile_values.reserve(stats.quantile_levels.size());
        for (double level : stats.quantile_levels)
            stats.quantile_values.push_back(scale * empirical_quantile(resid, level));
        model.residuals = std::move(stats);
    }

    return model;
}

}  // namespace cadence
