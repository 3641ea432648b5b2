#include "cadence/io.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <string_view>

#include "cadence/errors.hpp"
#include "cadence/rng.hpp"

namespace cadence {

namespace {

constexpr char kHeader[] = "subject_id,action,recording_id,t,ax,ay,az";

std::string format_full(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

double parse_double(std::string_view field, std::size_t line, const char* what) {
    double out = 0.0;
    const char* first = field.data();
    const char* last = field.data() + field.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    if (ec != std::errc() || ptr != last)
        throw ParseError(line, std::string("malformed ") + what + " '" +
                                   std::string(field) + "'");
    if (!std::isfinite(out))
        throw ParseError(line, std::string("non-finite ") + what);
    return out;
}

void check_plain_field(const std::string& field, const char* what) {
    if (field.find_first_of(",\r\n") != std::string::npos)
        throw IoError(std::string(what) + " contains a separator character");
}

double rate_hint(const TimeSeries& s) {
    const double dt = s.median_spacing();
    return dt > 0.0 ? 1.0 / dt : 0.0;
}

}  // namespace

const TimeSeries& TriAxialRecording::axis(char which) const {
    switch (which) {
        case 'x': return x;
        case 'y': return y;
        case 'z': return z;
        default: throw OutOfRange(std::string("unknown axis '") + which + "'");
    }
}

TriAxialRecording make_recording(std::string subject_id,
                                 std::string action,
                                 std::string recording_id,
                                 TimeSeries x,
                                 TimeSeries y,
                                 TimeSeries z) {
    if (action.empty()) throw OutOfRange("action label must be nonempty");
    if (x.timestamps() != y.timestamps() || x.timestamps() != z.timestamps())
        throw AxisMisalignment("axes must share identical timestamp vectors");
    TriAxialRecording rec;
    rec.subject_id = std::move(subject_id);
    rec.action = std::move(action);
    rec.recording_id = std::move(recording_id);
    rec.sample_rate_hint = rate_hint(x);
    rec.x = std::move(x);
    rec.y = std::move(y);
    rec.z = std::move(z);
    return rec;
}

void SynthSpec::validate() const {
    if (!(duration > 0.0)) throw OutOfRange("duration must be > 0");
    if (!(rate > 0.0)) throw OutOfRange("rate must be > 0");
    if (!(period > 0.0)) throw OutOfRange("period must be > 0");
    if (!(noise_sigma >= 0.0)) throw OutOfRange("noise_sigma must be >= 0");
    if (!(outlier_rate >= 0.0 && outlier_rate <= 1.0))
        throw OutOfRange("outlier_rate must lie in [0, 1]");
    if (action.empty()) throw OutOfRange("action label must be nonempty");
}

TriAxialRecording synth(const SynthSpec& spec) { return synth(spec, 0.0); }

TriAxialRecording synth(const SynthSpec& spec, double t_start) {
    spec.validate();
    const auto n = static_cast<std::size_t>(std::llround(spec.duration * spec.rate));
    std::vector<double> t(n);
    for (std::size_t i = 0; i < n; ++i)
        t[i] = t_start + static_cast<double>(i) / spec.rate;

    Xorshift64 rng(spec.rng_seed);
    const double w = 2.0 * 3.14159265358979323846 / spec.period;

    auto gen_axis = [&](int axis) {
        std::vector<double> v(n);
        for (std::size_t i = 0; i < n; ++i) {
            double base = spec.offset + spec.trend_slope * t[i];
            if (axis == 0)
                base += spec.amplitude * std::sin(w * t[i]);
            else if (axis == 1)
                base += spec.amplitude * std::cos(w * t[i]);
            else
                base += 0.5 * spec.amplitude * std::sin(w * t[i]);
            const double g = rng.next_gaussian();
            const double u = rng.next_double();
            base += spec.noise_sigma * g;
            if (u < spec.outlier_rate) base += spec.outlier_magnitude;
            v[i] = base;
        }
        return v;
    };

    std::vector<double> vx = gen_axis(0);
    std::vector<double> vy = gen_axis(1);
    std::vector<double> vz = gen_axis(2);
    return make_recording(spec.subject_id, spec.action, spec.recording_id,
                          make_series(t, std::move(vx), "synth"),
                          make_series(t, std::move(vy), "synth"),
                          make_series(t, std::move(vz), "synth"));
}

std::vector<TriAxialRecording> load_recording(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FileNotFound("cannot open '" + path + "'");

    std::string line;
    std::size_t line_no = 0;

    if (!std::getline(in, line)) throw ParseError(1, "missing header");
    ++line_no;
    if (line != kHeader)
        throw ParseError(1, std::string("header must be exactly '") + kHeader + "'");

    struct Row {
        double t, ax, ay, az;
        std::size_t line;
    };
    std::vector<std::pair<std::array<std::string, 3>, std::vector<Row>>> groups;
    std::map<std::array<std::string, 3>, std::size_t> group_index;

    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() && in.eof()) break;

        std::array<std::string, 7> fields;
        std::size_t start = 0;
        for (int f = 0; f < 7; ++f) {
            const std::size_t comma = line.find(',', start);
            if (f < 6) {
                if (comma == std::string::npos)
                    throw ParseError(line_no, "expected 7 comma-separated fields");
                fields[static_cast<std::size_t>(f)] = line.substr(start, comma - start);
                start = comma + 1;
            } else {
                if (comma != std::string::npos)
                    throw ParseError(line_no, "expected 7 comma-separated fields");
                fields[6] = line.substr(start);
            }
        }
        if (fields[1].empty()) throw ParseError(line_no, "empty action label");

        Row row;
        row.t = parse_double(fields[3], line_no, "timestamp");
        row.ax = parse_double(fields[4], line_no, "acceleration ax");
        row.ay = parse_double(fields[5], line_no, "acceleration ay");
        row.az = parse_double(fields[6], line_no, "acceleration az");
        row.line = line_no;

        const std::array<std::string, 3> key = {fields[0], fields[1], fields[2]};
        auto it = group_index.find(key);
        if (it == group_index.end()) {
            it = group_index.emplace(key, groups.size()).first;
            groups.emplace_back(key, std::vector<Row>{});
        }
        groups[it->second].second.push_back(row);
    }

    std::vector<TriAxialRecording> out;
    out.reserve(groups.size());
    for (auto& [key, rows] : groups) {
        std::stable_sort(rows.begin(), rows.end(),
                         [](const Row& a, const Row& b) { return a.t < b.t; });
        for (std::size_t i = 1; i < rows.size(); ++i)
            if (!(rows[i].t > rows[i - 1].t))
                throw ParseError(rows[i].line,
                                 "duplicate timestamp within group " + key[0] + "/" +
                                     key[1] + "/" + key[2]);
        std::vector<double> t(rows.size()), ax(rows.size()), ay(rows.size()),
            az(rows.size());
        for (std::size_t i = 0; i < rows.size(); ++i) {
            t[i] = rows[i].t;
            ax[i] = rows[i].ax;
            ay[i] = rows[i].ay;
            az[i] = rows[i].az;
        }
        out.push_back(make_recording(key[0], key[1], key[2],
                                     make_series(t, std::move(ax), "g"),
                                     make_series(t, std::move(ay), "g"),
                                     make_series(t, std::move(az), "g")));
    }
    return out;
}

void write_recording(const std::vector<TriAxialRecording>& recordings,
                     const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << kHeader << '\n';
    for (const auto& rec : recordings) {
        check_plain_field(rec.subject_id, "subject_id");
        check_plain_field(rec.action, "action");
        check_plain_field(rec.recording_id, "recording_id");
        const auto& t = rec.x.timestamps();
        for (std::size_t i = 0; i < t.size(); ++i) {
            out << rec.subject_id << ',' << rec.action << ',' << rec.recording_id
                << ',' << format_full(t[i]) << ',' << format_full(rec.x.values()[i])
                << ',' << format_full(rec.y.values()[i]) << ','
                << format_full(rec.z.values()[i]) << '\n';
        }
    }
    if (!out) throw IoError("write to '" + path + "' failed");
}

void export_forecast(const Forecast& forecast,
                     const TimeSeries* actuals,
                     const std::string& path) {
    if (actuals && actuals->timestamps() != forecast.timestamps)
        throw TimestampMismatch("actuals timestamps do not match the forecast");

    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << (actuals ? "t,yhat,lower,upper,actual" : "t,yhat,lower,upper") << '\n';
    for (std::size_t i = 0; i < forecast.timestamps.size(); ++i) {
        out << format_full(forecast.timestamps[i]) << ','
            << format_full(forecast.yhat[i]) << ',' << format_full(forecast.lower[i])
            << ',' << format_full(forecast.upper[i]);
        if (actuals) out << ',' << format_full(actuals->values()[i]);
        out << '\n';
    }
    if (!out) throw IoError("write to '" + path + "' failed");
}

}  // namespace cadence
