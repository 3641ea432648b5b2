// Command-line front end: synthetic data generation, decomposition,
// forecasting, rolling-origin cross-validation and authentication simulation.

#include <CLI11.hpp>
#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "cadence/auth.hpp"
#include "cadence/errors.hpp"
#include "cadence/eval.hpp"
#include "cadence/io.hpp"
#include "cadence/model.hpp"
#include "cadence/series.hpp"

namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

// ---- model configuration flags -----------------------------------------------

struct ModelOpts {
    std::string config_file;
    std::string period = "auto";
    std::string trend = "piecewise";
    int fourier_order = 5;
    int n_changepoints = 10;
    double changepoint_ridge_lambda = 10.0;
    double seasonality_ridge_lambda = 0.1;
    double outlier_mad_threshold = 3.5;
    double interval_level = 0.8;

    CLI::Option* o_period = nullptr;
    CLI::Option* o_trend = nullptr;
    CLI::Option* o_fourier = nullptr;
    CLI::Option* o_ncp = nullptr;
    CLI::Option* o_cpl = nullptr;
    CLI::Option* o_sl = nullptr;
    CLI::Option* o_mad = nullptr;
    CLI::Option* o_level = nullptr;
};

void add_model_flags(CLI::App* sub, ModelOpts& m) {
    sub->add_option("--config", m.config_file,
                    "key=value config file overriding defaults");
    m.o_period = sub->add_option("--period", m.period,
                                 "seasonal period in seconds, or 'auto'");
    m.o_trend = sub->add_option("--trend", m.trend, "trend kind")
                    ->check(CLI::IsMember({"piecewise", "logistic"}));
    m.o_fourier =
        sub->add_option("--fourier-order", m.fourier_order, "Fourier order N");
    m.o_ncp = sub->add_option("--changepoints", m.n_changepoints,
                              "number of trend changepoints");
    m.o_cpl = sub->add_option("--changepoint-lambda", m.changepoint_ridge_lambda,
                              "ridge weight on changepoint slope deltas");
    m.o_sl = sub->add_option("--seasonality-lambda", m.seasonality_ridge_lambda,
                             "ridge weight on Fourier coefficients");
    m.o_mad = sub->add_option("--mad-threshold", m.outlier_mad_threshold,
                              "MAD multiple for outlier flagging");
    m.o_level =
        sub->add_option("--level", m.interval_level, "confidence band level");
}

std::optional<double> parse_period(const std::string& text) {
    if (text == "auto") return std::nullopt;
    try {
        std::size_t used = 0;
        const double v = std::stod(text, &used);
        if (used != text.size()) throw std::invalid_argument(text);
        return v;
    } catch (const std::exception&) {
        throw UsageError("--period expects a number or 'auto', got '" + text + "'");
    }
}

cadence::TrendKind parse_trend(const std::string& word) {
    if (word == "piecewise") return cadence::TrendKind::PiecewiseLinear;
    if (word == "logistic") return cadence::TrendKind::Logistic;
    throw UsageError("trend must be 'piecewise' or 'logistic', got '" + word + "'");
}

void apply_config_file(const std::string& path, cadence::FitConfig& cfg) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open config file '" + path + "'");
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw UsageError("config line " + std::to_string(line_no) +
                             ": expected key=value");
        const std::string key = line.substr(0, eq);
        const std::string value = line.substr(eq + 1);
        try {
            if (key == "trend")
                cfg.trend_kind = parse_trend(value);
            else if (key == "fourier_order")
                cfg.fourier_order = std::stoi(value);
            else if (key == "period")
                cfg.period = parse_period(value);
            else if (key == "n_changepoints")
                cfg.n_changepoints = std::stoi(value);
            else if (key == "changepoint_ridge_lambda")
                cfg.changepoint_ridge_lambda = std::stod(value);
            else if (key == "seasonality_ridge_lambda")
                cfg.seasonality_ridge_lambda = std::stod(value);
            else if (key == "outlier_mad_threshold")
                cfg.outlier_mad_threshold = std::stod(value);
            else if (key == "interval_level")
                cfg.interval_level = std::stod(value);
            else
                throw UsageError("config line " + std::to_string(line_no) +
                                 ": unknown key '" + key + "'");
        } catch (const UsageError&) {
            throw;
        } catch (const std::exception&) {
            throw UsageError("config line " + std::to_string(line_no) +
                             ": malformed value '" + value + "'");
        }
    }
}

cadence::FitConfig resolve_config(const ModelOpts& m) {
    cadence::FitConfig cfg;
    if (!m.config_file.empty()) apply_config_file(m.config_file, cfg);
    if (m.o_period->count() > 0) cfg.period = parse_period(m.period);
    if (m.o_trend->count() > 0) cfg.trend_kind = parse_trend(m.trend);
    if (m.o_fourier->count() > 0) cfg.fourier_order = m.fourier_order;
    if (m.o_ncp->count() > 0) cfg.n_changepoints = m.n_changepoints;
    if (m.o_cpl->count() > 0) cfg.changepoint_ridge_lambda = m.changepoint_ridge_lambda;
    if (m.o_sl->count() > 0) cfg.seasonality_ridge_lambda = m.seasonality_ridge_lambda;
    if (m.o_mad->count() > 0) cfg.outlier_mad_threshold = m.outlier_mad_threshold;
    if (m.o_level->count() > 0) cfg.interval_level = m.interval_level;
    return cfg;
}

// ---- input selection ---------------------------------------------------------

struct SelectOpts {
    std::string input;
    std::string subject;
    std::string action;
    std::string recording;
    std::string axis = "x";
};

void add_select_flags(CLI::App* sub, SelectOpts& s) {
    sub->add_option("--input", s.input, "input recording CSV")->required();
    sub->add_option("--subject", s.subject, "select by subject id");
    sub->add_option("--action", s.action, "select by action label");
    sub->add_option("--recording", s.recording, "select by recording id");
    sub->add_option("--axis", s.axis, "axis to analyse")
        ->check(CLI::IsMember({"x", "y", "z"}));
}

cadence::TimeSeries select_series(const SelectOpts& sel) {
    const auto recordings = cadence::load_recording(sel.input);
    for (const auto& rec : recordings) {
        if (!sel.subject.empty() && rec.subject_id != sel.subject) continue;
        if (!sel.action.empty() && rec.action != sel.action) continue;
        if (!sel.recording.empty() && rec.recording_id != sel.recording) continue;
        return rec.axis(sel.axis[0]);
    }
    throw UsageError("no recording in '" + sel.input + "' matches the selection");
}

// ---- subcommands ----------------------------------------------------------------

int run_synth(const cadence::SynthSpec& spec, const std::string& output) {
    cadence::write_recording({cadence::synth(spec)}, output);
    std::cout << "wrote " << output << " ("
              << static_cast<std::size_t>(spec.duration * spec.rate)
              << " samples per axis)\n";
    return 0;
}

int run_decompose(const SelectOpts& sel, const ModelOpts& mopts,
                  const std::string& output) {
    const cadence::TimeSeries series = select_series(sel);
    const cadence::FitConfig cfg = resolve_config(mopts);
    const cadence::AdditiveModel model = cadence::fit(series, cfg);
    const cadence::Components comp =
        cadence::evaluate_components(model, series.timestamps());

    std::ofstream out(output, std::ios::binary);
    if (!out) throw cadence::IoError("cannot open '" + output + "' for writing");
    out << "t,y,trend,season,events,residual\n";
    for (std::size_t i = 0; i < series.size(); ++i) {
        const double y = series.values()[i];
        const double resid = y - comp.trend[i] - comp.season[i] - comp.events[i];
        out << fmt(series.timestamps()[i]) << ',' << fmt(y) << ','
            << fmt(comp.trend[i]) << ',' << fmt(comp.season[i]) << ','
            << fmt(comp.events[i]) << ',' << fmt(resid) << '\n';
    }
    std::cout << "decomposed " << series.size() << " samples -> " << output
              << "\n";
    return 0;
}

int run_forecast(const SelectOpts& sel, const ModelOpts& mopts,
                 const std::string& output, std::size_t train_len,
                 std::size_t horizon) {
    const cadence::TimeSeries series = select_series(sel);
    const cadence::FitConfig cfg = resolve_config(mopts);

    std::size_t use_train = train_len == 0 ? series.size() : train_len;
    use_train = std::min(use_train, series.size());
    auto [train, rest] = cadence::split_at(series, use_train);
    const cadence::AdditiveModel model = cadence::fit(train, cfg);

    if (rest.size() >= horizon && horizon > 0) {
        // score against the held-out samples at their own timestamps
        const cadence::TimeSeries actual = cadence::split_at(rest, horizon).first;
        const cadence::Forecast fc =
            cadence::forecast_at(model, actual.timestamps(), cfg.interval_level);
        cadence::export_forecast(fc, &actual, output);
    } else {
        const double step =
            train.median_spacing() > 0.0 ? train.median_spacing() : 1.0;
        const cadence::Forecast fc =
            cadence::predict(model, horizon, step, cfg.interval_level);
        cadence::export_forecast(fc, nullptr, output);
    }
    std::cout << "forecast " << horizon << " steps from " << use_train
              << " training samples -> " << output << "\n";
    return 0;
}

int run_cv(const SelectOpts& sel, const ModelOpts& mopts,
           const std::string& output, std::size_t initial, std::size_t horizon,
           std::size_t folds) {
    const cadence::TimeSeries series = select_series(sel);
    const cadence::FitConfig cfg = resolve_config(mopts);
    const cadence::CvReport report =
        cadence::cross_validate(series, initial, horizon, folds, cfg);

    std::ostringstream csv;
    csv << "fold,train_len,horizon,mae,rmse,coverage\n";
    for (const auto& fold : report.folds)
        csv << fold.fold_index << ',' << fold.train_len << ',' << fold.horizon
            << ',' << fmt(fold.mae) << ',' << fmt(fold.rmse) << ','
            << fmt(fold.coverage) << '\n';

    if (!output.empty()) {
        std::ofstream out(output, std::ios::binary);
        if (!out) throw cadence::IoError("cannot open '" + output + "' for writing");
        out << csv.str();
    }

    std::cout << "fold train_len horizon mae rmse coverage\n";
    for (const auto& fold : report.folds) {
        char line[160];
        std::snprintf(line, sizeof(line), "%4zu %9zu %7zu %.6f %.6f %.4f\n",
                      fold.fold_index, fold.train_len, fold.horizon, fold.mae,
                      fold.rmse, fold.coverage);
        std::cout << line;
    }
    return 0;
}

char gate_letter(cadence::GateMode m) {
    switch (m) {
        case cadence::GateMode::Idle: return 'I';
        case cadence::GateMode::Observing: return 'O';
        case cadence::GateMode::Escalated: return 'E';
    }
    return '?';
}

int run_auth_sim(const cadence::SynthSpec& owner, const cadence::SynthSpec& impostor,
                 const ModelOpts& mopts, double max_outside,
                 std::size_t windows, const std::string& output) {
    const cadence::FitConfig cfg = resolve_config(mopts);
    cadence::TePolicy te;
    te.interval_level = cfg.interval_level;
    te.max_outside_fraction = max_outside;

    const cadence::AuthSimResult res =
        cadence::auth_simulate(owner, impostor, te, cfg, windows);

    std::string trace;
    trace.reserve(res.gate_trace.size());
    for (const auto& g : res.gate_trace) trace.push_back(gate_letter(g.mode));

    if (!output.empty()) {
        std::ofstream out(output, std::ios::binary);
        if (!out) throw cadence::IoError("cannot open '" + output + "' for writing");
        out << "metric,value\n"
            << "windows," << windows << '\n'
            << "far," << fmt(res.far) << '\n'
            << "frr," << fmt(res.frr) << '\n'
            << "gate_trace," << trace << '\n';
    }

    char line[128];
    std::snprintf(line, sizeof(line), "far=%.4f frr=%.4f over %zu windows each\n",
                  res.far, res.frr, windows);
    std::cout << line;
    std::cout << "gate trace: " << trace << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Additive behavior models over accelerometer streams: "
                 "decomposition, forecasting and continuous authentication"};
    app.require_subcommand(1);

    // synth ----------------------------------------------------------------
    auto* synth_cmd = app.add_subcommand("synth", "generate a synthetic recording CSV");
    cadence::SynthSpec spec;
    std::string synth_output;
    synth_cmd->add_option("--output", synth_output, "output CSV path")->required();
    synth_cmd->add_option("--period", spec.period, "cycle period in seconds");
    synth_cmd->add_option("--amplitude", spec.amplitude, "cycle amplitude");
    synth_cmd->add_option("--offset", spec.offset, "constant offset");
    synth_cmd->add_option("--noise-sigma", spec.noise_sigma, "Gaussian noise sigma");
    synth_cmd->add_option("--trend-slope", spec.trend_slope, "linear drift per second");
    synth_cmd->add_option("--outlier-rate", spec.outlier_rate,
                          "per-sample outlier probability");
    synth_cmd->add_option("--outlier-magnitude", spec.outlier_magnitude,
                          "outlier displacement");
    synth_cmd->add_option("--duration", spec.duration, "duration in seconds");
    synth_cmd->add_option("--rate", spec.rate, "sample rate in Hz");
    synth_cmd->add_option("--seed", spec.rng_seed, "generator seed");
    synth_cmd->add_option("--subject", spec.subject_id, "subject id column");
    synth_cmd->add_option("--action", spec.action, "action label column");
    synth_cmd->add_option("--recording-id", spec.recording_id, "recording id column");

    // decompose -------------------------------------------------------------
    auto* dec_cmd = app.add_subcommand("decompose",
                                       "fit a model and write component values");
    SelectOpts dec_sel;
    ModelOpts dec_model;
    std::string dec_output;
    add_select_flags(dec_cmd, dec_sel);
    add_model_flags(dec_cmd, dec_model);
    dec_cmd->add_option("--output", dec_output, "component CSV path")->required();

    // forecast -------------------------------------------------------------
    auto* fc_cmd = app.add_subcommand("forecast", "fit and forecast with bands");
    SelectOpts fc_sel;
    ModelOpts fc_model;
    std::string fc_output;
    std::size_t fc_train = 0;
    std::size_t fc_horizon = 300;
    add_select_flags(fc_cmd, fc_sel);
    add_model_flags(fc_cmd, fc_model);
    fc_cmd->add_option("--output", fc_output, "forecast CSV path")->required();
    fc_cmd->add_option("--train", fc_train,
                       "training prefix length (0 = whole series)");
    fc_cmd->add_option("--horizon", fc_horizon, "forecast steps");

    // cv ---------------------------------------------------------------------
    auto* cv_cmd = app.add_subcommand("cv", "rolling-origin cross-validation");
    SelectOpts cv_sel;
    ModelOpts cv_model;
    std::string cv_output;
    std::size_t cv_initial = 500, cv_horizon = 100, cv_folds = 5;
    add_select_flags(cv_cmd, cv_sel);
    add_model_flags(cv_cmd, cv_model);
    cv_cmd->add_option("--output", cv_output, "report CSV path");
    cv_cmd->add_option("--initial", cv_initial, "initial training length");
    cv_cmd->add_option("--horizon", cv_horizon, "forecast horizon per fold");
    cv_cmd->add_option("--folds", cv_folds, "number of folds");

    // auth-sim ----------------------------------------------------------------
    auto* as_cmd = app.add_subcommand("auth-sim",
                                      "owner/impostor authentication simulation");
    ModelOpts as_model;
    std::string as_output;
    std::size_t as_windows = 200;
    double as_max_outside = 0.5;
    cadence::SynthSpec owner;
    owner.noise_sigma = 0.05;
    owner.action = "Jumping";
    cadence::SynthSpec impostor = owner;
    impostor.period = 0.7;
    impostor.amplitude = 1.4;
    impostor.rng_seed = 1000001;
    add_model_flags(as_cmd, as_model);
    as_cmd->add_option("--owner-period", owner.period, "owner cycle period");
    as_cmd->add_option("--owner-amplitude", owner.amplitude, "owner amplitude");
    as_cmd->add_option("--impostor-period", impostor.period, "impostor cycle period");
    as_cmd->add_option("--impostor-amplitude", impostor.amplitude,
                       "impostor amplitude");
    as_cmd->add_option("--noise-sigma", owner.noise_sigma,
                       "noise sigma for both processes");
    as_cmd->add_option("--rate", owner.rate, "sample rate in Hz");
    as_cmd->add_option("--windows", as_windows, "windows per side");
    as_cmd->add_option("--seed", owner.rng_seed, "owner seed");
    as_cmd->add_option("--impostor-seed", impostor.rng_seed, "impostor seed");
    as_cmd->add_option("--max-outside", as_max_outside,
                       "tolerated fraction outside the band");
    as_cmd->add_option("--output", as_output, "report CSV path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n";
        return 1;
    }

    try {
        if (app.got_subcommand(synth_cmd)) return run_synth(spec, synth_output);
        if (app.got_subcommand(dec_cmd))
            return run_decompose(dec_sel, dec_model, dec_output);
        if (app.got_subcommand(fc_cmd))
            return run_forecast(fc_sel, fc_model, fc_output, fc_train, fc_horizon);
        if (app.got_subcommand(cv_cmd))
            return run_cv(cv_sel, cv_model, cv_output, cv_initial, cv_horizon,
                          cv_folds);
        if (app.got_subcommand(as_cmd)) {
            impostor.noise_sigma = owner.noise_sigma;
            impostor.rate = owner.rate;
            return run_auth_sim(owner, impostor, as_model, as_max_outside,
                                as_windows, as_output);
        }
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 1;
    } catch (const cadence::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
