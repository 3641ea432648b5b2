#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#ifndef CADENCE_CLI_PATH
#define CADENCE_CLI_PATH "cadence"
#endif

namespace fs = std::filesystem;

namespace {

fs::path work_dir() {
    static const fs::path dir = [] {
        const fs::path p = fs::temp_directory_path() / "cadence_cli_tests";
        fs::remove_all(p);
        fs::create_directories(p);
        return p;
    }();
    return dir;
}

int run(const std::string& args) {
    const std::string cmd = std::string("\"") + CADENCE_CLI_PATH + "\" " + args +
                            " > \"" + (work_dir() / "stdout.txt").string() +
                            "\" 2> \"" + (work_dir() / "stderr.txt").string() + "\"";
    const int rc = std::system(cmd.c_str());
    return WEXITSTATUS(rc);
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in),
                       std::istreambuf_iterator<char>());
}

std::string first_line(const fs::path& p) {
    std::ifstream in(p);
    std::string line;
    std::getline(in, line);
    return line;
}

const std::string& fixture_csv() {
    static const std::string path = [] {
        const std::string p = (work_dir() / "fixture.csv").string();
        REQUIRE(run("synth --output \"" + p + "\" --duration 12 --rate 50"
                    " --period 1 --noise-sigma 0.05 --seed 5 --action Jumping"
                    " --subject s1") == 0);
        return p;
    }();
    return path;
}

}  // namespace

TEST_CASE("usage errors exit with code 1") {
    CHECK(run("") == 1);
    CHECK(run("frobnicate") == 1);
    CHECK(run("cv") == 1);                      // --input is required
    CHECK(run("synth") == 1);                   // --output is required
    CHECK(run("cv --input x.csv --no-such-flag") == 1);
    CHECK(run("forecast --input x.csv --output y.csv --axis w") == 1);
}

TEST_CASE("data and fit errors exit with code 2") {
    CHECK(run("cv --input \"" + (work_dir() / "absent.csv").string() +
              "\" --output \"" + (work_dir() / "r.csv").string() + "\"") == 2);

    // malformed input file
    const fs::path bad = work_dir() / "bad.csv";
    std::ofstream(bad) << "subject_id,action,recording_id,t,ax,ay,az\n"
                       << "s1,Jumping,0,0.0,not-a-number,0,0\n";
    CHECK(run("decompose --input \"" + bad.string() + "\" --output \"" +
              (work_dir() / "d.csv").string() + "\"") == 2);

    // too little data to fit
    const fs::path tiny = work_dir() / "tiny.csv";
    REQUIRE(run("synth --output \"" + tiny.string() +
                "\" --duration 0.1 --rate 50") == 0);
    CHECK(run("decompose --input \"" + tiny.string() + "\" --output \"" +
              (work_dir() / "d2.csv").string() + "\" --period 1") == 2);
}

TEST_CASE("synth writes the documented recording format") {
    CHECK(first_line(fixture_csv()) == "subject_id,action,recording_id,t,ax,ay,az");
}

TEST_CASE("decompose writes one component row per sample") {
    const fs::path out = work_dir() / "components.csv";
    REQUIRE(run("decompose --input \"" + fixture_csv() + "\" --output \"" +
                out.string() + "\" --period 1") == 0);
    CHECK(first_line(out) == "t,y,trend,season,events,residual");
    const std::string text = slurp(out);
    CHECK(std::count(text.begin(), text.end(), '\n') == 601);
}

TEST_CASE("forecast attaches actuals when held-out data is available") {
    const fs::path out = work_dir() / "forecast.csv";
    REQUIRE(run("forecast --input \"" + fixture_csv() + "\" --train 500"
                " --horizon 100 --period 1 --output \"" + out.string() + "\"") == 0);
    CHECK(first_line(out) == "t,yhat,lower,upper,actual");
    const std::string body = slurp(out);
    CHECK(std::count(body.begin(), body.end(), '\n') == 101);

    // no held-out data: pure future grid, no actual column
    REQUIRE(run("forecast --input \"" + fixture_csv() + "\" --horizon 300"
                " --period 1 --output \"" + out.string() + "\"") == 0);
    CHECK(first_line(out) == "t,yhat,lower,upper");
    const std::string future = slurp(out);
    CHECK(std::count(future.begin(), future.end(), '\n') == 301);
}

TEST_CASE("cv writes the documented report header") {
    const fs::path out = work_dir() / "report.csv";
    REQUIRE(run("cv --input \"" + fixture_csv() + "\" --initial 300 --horizon 100"
                " --folds 3 --period 1 --output \"" + out.string() + "\"") == 0);
    CHECK(first_line(out) == "fold,train_len,horizon,mae,rmse,coverage");
    const std::string body = slurp(out);
    CHECK(std::count(body.begin(), body.end(), '\n') == 4);
    const std::string console = slurp(work_dir() / "stdout.txt");
    CHECK(console.find("fold") != std::string::npos);
    CHECK(console.find("coverage") != std::string::npos);
}

TEST_CASE("config files override defaults and flags override config files") {
    const fs::path cfg = work_dir() / "model.cfg";
    std::ofstream(cfg) << "# model settings\nfourier_order=2\nperiod=1.0\n"
                       << "interval_level=0.9\n";
    const fs::path out = work_dir() / "cfg_fc.csv";
    CHECK(run("forecast --input \"" + fixture_csv() + "\" --train 500 --horizon 50"
              " --config \"" + cfg.string() + "\" --output \"" + out.string() +
              "\"") == 0);

    // a flag given explicitly wins over the config file
    CHECK(run("forecast --input \"" + fixture_csv() + "\" --train 500 --horizon 50"
              " --config \"" + cfg.string() + "\" --period 1.0 --output \"" +
              out.string() + "\"") == 0);

    std::ofstream(work_dir() / "bad.cfg") << "no_such_knob=3\n";
    CHECK(run("forecast --input \"" + fixture_csv() + "\" --config \"" +
              (work_dir() / "bad.cfg").string() + "\" --output \"" + out.string() +
              "\"") == 1);
    CHECK(run("forecast --input \"" + fixture_csv() + "\" --period banana"
              " --output \"" + out.string() + "\"") == 1);
}

TEST_CASE("selection flags pick the recording and axis") {
    const fs::path multi = work_dir() / "multi.csv";
    REQUIRE(run("synth --output \"" + multi.string() + "\" --duration 6 --rate 50"
                " --period 1 --action Walking --subject s2 --seed 8") == 0);
    // append the Jumping fixture rows to the Walking file
    {
        std::ifstream in(fixture_csv());
        std::ofstream out(multi, std::ios::app);
        std::string line;
        std::getline(in, line);  // skip header
        while (std::getline(in, line)) out << line << '\n';
    }
    const fs::path out = work_dir() / "sel.csv";
    CHECK(run("decompose --input \"" + multi.string() + "\" --action Jumping"
              " --axis z --period 1 --output \"" + out.string() + "\"") == 0);
    const std::string body = slurp(out);
    CHECK(std::count(body.begin(), body.end(), '\n') == 601);

    CHECK(run("decompose --input \"" + multi.string() + "\" --action Running"
              " --period 1 --output \"" + out.string() + "\"") == 1);
}

TEST_CASE("auth-sim reports far, frr and the gate trace") {
    const fs::path out = work_dir() / "auth.csv";
    REQUIRE(run("auth-sim --windows 10 --seed 99 --output \"" + out.string() +
                "\"") == 0);
    const std::string text = slurp(out);
    CHECK(text.rfind("metric,value\n", 0) == 0);
    CHECK(text.find("\nfar,") != std::string::npos);
    CHECK(text.find("\nfrr,") != std::string::npos);
    CHECK(text.find("\ngate_trace,O") != std::string::npos);
}
