#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "cadence/auth.hpp"
#include "cadence/errors.hpp"

// Profile files are line-oriented text, one keyword per line, version-tagged.
// Floats carry 17 significant digits so a save/load round trip preserves
// every judgment bit for bit. Field order is documented in the README.

namespace cadence {

namespace {

constexpr char kMagic[] = "cadence-profile v1";

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

const char* mode_word(GateMode m) {
    switch (m) {
        case GateMode::Idle: return "idle";
        case GateMode::Observing: return "observing";
        case GateMode::Escalated: return "escalated";
    }
    return "observing";
}

class LineReader {
public:
    explicit LineReader(std::istream& in) : in_(in) {}

    /// Next line, already split into a keyword-checked stream.
    std::istringstream expect(const std::string& keyword) {
        std::string line = next();
        if (line.rfind(keyword, 0) != 0 ||
            (line.size() > keyword.size() && line[keyword.size()] != ' '))
            throw ParseError(line_no_, "expected '" + keyword + "' record");
        return std::istringstream(
            line.size() > keyword.size() ? line.substr(keyword.size() + 1) : "");
    }

    std::string next() {
        std::string line;
        if (!std::getline(in_, line)) throw ParseError(line_no_ + 1, "unexpected end of file");
        ++line_no_;
        return line;
    }

    std::size_t line() const { return line_no_; }

    double num(std::istringstream& s, const char* what) {
        double v = 0.0;
        if (!(s >> v) || !std::isfinite(v))
            throw ParseError(line_no_, std::string("malformed ") + what);
        return v;
    }

    long long integer(std::istringstream& s, const char* what) {
        long long v = 0;
        if (!(s >> v) || v < 0)
            throw ParseError(line_no_, std::string("malformed ") + what);
        return v;
    }

private:
    std::istream& in_;
    std::size_t line_no_ = 0;
};

void write_model(std::ostream& out, const AdditiveModel& m) {
    const FitConfig& c = m.fit_config;
    out << "config "
        << (c.trend_kind == TrendKind::Logistic ? "logistic" : "piecewise") << ' '
        << c.fourier_order << ' ' << (c.period ? fmt(*c.period) : "auto") << ' '
        << c.n_changepoints << ' ' << fmt(c.changepoint_ridge_lambda) << ' '
        << fmt(c.seasonality_ridge_lambda) << ' ' << fmt(c.outlier_mad_threshold)
        << ' ' << fmt(c.interval_level) << '\n';
    out << "span " << fmt(m.train_start) << ' ' << fmt(m.train_end) << '\n';

    if (const auto* pw = std::get_if<PiecewiseLinearTrend>(&m.trend)) {
        out << "trend piecewise " << fmt(pw->origin) << ' ' << fmt(pw->intercept)
            << ' ' << fmt(pw->slope) << ' ' << pw->changepoint_times.size() << '\n';
        for (std::size_t j = 0; j < pw->changepoint_times.size(); ++j)
            out << "cp " << fmt(pw->changepoint_times[j]) << ' '
                << fmt(pw->slope_deltas[j]) << '\n';
    } else {
        const auto& lt = std::get<LogisticTrend>(m.trend);
        out << "trend logistic " << fmt(lt.capacity) << ' ' << fmt(lt.rate) << ' '
            << fmt(lt.offset) << '\n';
    }

    if (m.seasonality) {
        out << "season " << fmt(m.seasonality->period) << ' '
            << m.seasonality->order() << '\n';
        for (int n = 0; n < m.seasonality->order(); ++n)
            out << "harmonic "
                << fmt(m.seasonality->cos_coeffs[static_cast<std::size_t>(n)]) << ' '
                << fmt(m.seasonality->sin_coeffs[static_cast<std::size_t>(n)]) << '\n';
    } else {
        out << "season none\n";
    }

    out << "events " << m.events.times.size() << ' '
        << fmt(m.events.influence_halfwidth) << '\n';
    for (std::size_t j = 0; j < m.events.times.size(); ++j)
        out << "event " << fmt(m.events.times[j]) << ' ' << fmt(m.events.effects[j])
            << '\n';

    out << "residuals " << fmt(m.residuals.sigma) << ' ' << m.residuals.sample_count
        << ' ' << m.residuals.quantile_levels.size() << '\n';
    for (std::size_t j = 0; j < m.residuals.quantile_levels.size(); ++j)
        out << "q " << fmt(m.residuals.quantile_levels[j]) << ' '
            << fmt(m.residuals.quantile_values[j]) << '\n';

    out << "trendcov " << m.trend_uncertainty.dim << '\n';
    for (int i = 0; i < m.trend_uncertainty.dim; ++i) {
        out << "covrow";
        for (int j = 0; j < m.trend_uncertainty.dim; ++j)
            out << ' '
                << fmt(m.trend_uncertainty.unit_cov[static_cast<std::size_t>(
                       i * m.trend_uncertainty.dim + j)]);
        out << '\n';
    }

    out << "training " << m.training.size() << '\n';
    out << "unit " << m.training.unit_tag() << '\n';
    for (std::size_t i = 0; i < m.training.size(); ++i)
        out << "s " << fmt(m.training.timestamps()[i]) << ' '
            << fmt(m.training.values()[i]) << '\n';
}

AdditiveModel read_model(LineReader& rd) {
    AdditiveModel m;

    {
        auto s = rd.expect("config");
        std::string trend_word, period_word;
        if (!(s >> trend_word)) throw ParseError(rd.line(), "malformed config");
        if (trend_word == "logistic")
            m.fit_config.trend_kind = TrendKind::Logistic;
        else if (trend_word == "piecewise")
            m.fit_config.trend_kind = TrendKind::PiecewiseLinear;
        else
            throw ParseError(rd.line(), "unknown trend kind '" + trend_word + "'");
        m.fit_config.fourier_order = static_cast<int>(rd.integer(s, "fourier order"));
        if (!(s >> period_word)) throw ParseError(rd.line(), "malformed config period");
        if (period_word == "auto") {
            m.fit_config.period.reset();
        } else {
            std::istringstream ps(period_word);
            m.fit_config.period = rd.num(ps, "config period");
        }
        m.fit_config.n_changepoints = static_cast<int>(rd.integer(s, "n_changepoints"));
        m.fit_config.changepoint_ridge_lambda = rd.num(s, "changepoint lambda");
        m.fit_config.seasonality_ridge_lambda = rd.num(s, "seasonality lambda");
        m.fit_config.outlier_mad_threshold = rd.num(s, "outlier threshold");
        m.fit_config.interval_level = rd.num(s, "interval level");
    }
    {
        auto s = rd.expect("span");
        m.train_start = rd.num(s, "train start");
        m.train_end = rd.num(s, "train end");
    }
    {
        auto s = rd.expect("trend");
        std::string kind;
        if (!(s >> kind)) throw ParseError(rd.line(), "malformed trend record");
        if (kind == "piecewise") {
            PiecewiseLinearTrend pw;
            pw.origin = rd.num(s, "trend origin");
            pw.intercept = rd.num(s, "trend intercept");
            pw.slope = rd.num(s, "trend slope");
            const auto m_cp = static_cast<std::size_t>(rd.integer(s, "changepoint count"));
            for (std::size_t j = 0; j < m_cp; ++j) {
                auto cs = rd.expect("cp");
                pw.changepoint_times.push_back(rd.num(cs, "changepoint time"));
                pw.slope_deltas.push_back(rd.num(cs, "changepoint delta"));
            }
            m.trend = std::move(pw);
        } else if (kind == "logistic") {
            LogisticTrend lt;
            lt.capacity = rd.num(s, "capacity");
            lt.rate = rd.num(s, "rate");
            lt.offset = rd.num(s, "offset");
            m.trend = lt;
        } else {
            throw ParseError(rd.line(), "unknown trend kind '" + kind + "'");
        }
    }
    {
        auto s = rd.expect("season");
        std::string head;
        if (!(s >> head)) throw ParseError(rd.line(), "malformed season record");
        if (head != "none") {
            FourierSeasonality fs;
            std::istringstream ps(head);
            fs.period = rd.num(ps, "season period");
            const auto order = static_cast<std::size_t>(rd.integer(s, "season order"));
            for (std::size_t j = 0; j < order; ++j) {
                auto hs = rd.expect("harmonic");
                fs.cos_coeffs.push_back(rd.num(hs, "cos coefficient"));
                fs.sin_coeffs.push_back(rd.num(hs, "sin coefficient"));
            }
            m.seasonality = std::move(fs);
        }
    }
    {
        auto s = rd.expect("events");
        const auto count = static_cast<std::size_t>(rd.integer(s, "event count"));
        m.events.influence_halfwidth = rd.num(s, "event halfwidth");
        for (std::size_t j = 0; j < count; ++j) {
            auto es = rd.expect("event");
            m.events.times.push_back(rd.num(es, "event time"));
            m.events.effects.push_back(rd.num(es, "event effect"));
        }
    }
    {
        auto s = rd.expect("residuals");
        m.residuals.sigma = rd.num(s, "sigma");
        m.residuals.sample_count = static_cast<std::size_t>(rd.integer(s, "sample count"));
        const auto nq = static_cast<std::size_t>(rd.integer(s, "quantile count"));
        for (std::size_t j = 0; j < nq; ++j) {
            auto qs = rd.expect("q");
            m.residuals.quantile_levels.push_back(rd.num(qs, "quantile level"));
            m.residuals.quantile_values.push_back(rd.num(qs, "quantile value"));
        }
    }
    {
        auto s = rd.expect("trendcov");
        const int dim = static_cast<int>(rd.integer(s, "covariance dim"));
        m.trend_uncertainty.dim = dim;
        m.trend_uncertainty.unit_cov.resize(static_cast<std::size_t>(dim) *
                                            static_cast<std::size_t>(dim));
        for (int i = 0; i < dim; ++i) {
            auto cs = rd.expect("covrow");
            for (int j = 0; j < dim; ++j)
                m.trend_uncertainty.unit_cov[static_cast<std::size_t>(i * dim + j)] =
                    rd.num(cs, "covariance entry");
        }
    }
    {
        auto s = rd.expect("training");
        const auto count = static_cast<std::size_t>(rd.integer(s, "training count"));
        std::string unit_line = rd.next();
        if (unit_line.rfind("unit", 0) != 0)
            throw ParseError(rd.line(), "expected 'unit' record");
        const std::string tag = unit_line.size() > 5 ? unit_line.substr(5) : "";
        std::vector<double> t, v;
        t.reserve(count);
        v.reserve(count);
        for (std::size_t j = 0; j < count; ++j) {
            auto ss = rd.expect("s");
            t.push_back(rd.num(ss, "training timestamp"));
            v.push_back(rd.num(ss, "training value"));
        }
        m.training = make_series(std::move(t), std::move(v), tag);
    }
    return m;
}

}  // namespace

void save_profile(const AuthProfile& profile, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path + "' for writing");

    out << kMagic << '\n';
    out << "user " << profile.user_id << '\n';
    out << "policy " << fmt(profile.te_policy.interval_level) << ' '
        << fmt(profile.te_policy.max_outside_fraction) << ' '
        << profile.te_policy.min_window_samples << '\n';
    out << "gate " << mode_word(profile.gate.mode) << ' '
        << profile.gate.consecutive_accepts << ' '
        << profile.gate.consecutive_stale_windows << '\n';
    out << "actions " << profile.action_models.size() << '\n';
    for (const auto& [label, model] : profile.action_models) {
        out << "action\n" << label << '\n';
        write_model(out, model);
    }
    if (!out) throw IoError("write to '" + path + "' failed");
}

AuthProfile load_profile(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FileNotFound("cannot open '" + path + "'");
    LineReader rd(in);

    if (rd.next() != kMagic)
        throw ParseError(1, std::string("expected '") + kMagic + "' header");

    AuthProfile profile;
    {
        std::string user_line = rd.next();
        if (user_line.rfind("user", 0) != 0)
            throw ParseError(rd.line(), "expected 'user' record");
        profile.user_id = user_line.size() > 5 ? user_line.substr(5) : "";
    }
    {
        auto s = rd.expect("policy");
        profile.te_policy.interval_level = rd.num(s, "interval level");
        profile.te_policy.max_outside_fraction = rd.num(s, "max outside fraction");
        profile.te_policy.min_window_samples =
            static_cast<std::size_t>(rd.integer(s, "min window samples"));
    }
    {
        auto s = rd.expect("gate");
        std::string mode;
        if (!(s >> mode)) throw ParseError(rd.line(), "malformed gate record");
        if (mode == "idle")
            profile.gate.mode = GateMode::Idle;
        else if (mode == "observing")
            profile.gate.mode = GateMode::Observing;
        else if (mode == "escalated")
            profile.gate.mode = GateMode::Escalated;
        else
            throw ParseError(rd.line(), "unknown gate mode '" + mode + "'");
        profile.gate.consecutive_accepts = static_cast<int>(rd.integer(s, "accept count"));
        profile.gate.consecutive_stale_windows =
            static_cast<int>(rd.integer(s, "stale count"));
    }
    {
        auto s = rd.expect("actions");
        const auto count = static_cast<std::size_t>(rd.integer(s, "action count"));
        for (std::size_t i = 0; i < count; ++i) {
            rd.expect("action");
            const std::string label = rd.next();
            if (label.empty()) throw ParseError(rd.line(), "empty action label");
            profile.action_models.emplace(label, read_model(rd));
        }
    }
    return profile;
}

}  // namespace cadence
