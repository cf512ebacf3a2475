#include <doctest.h>

#include "netobs/cli.hpp"
#include "netobs/io.hpp"
#include "netobs/scenarios.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>

using namespace netobs;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& tag) {
    fs::path dir = fs::temp_directory_path() / ("netobs_test_" + tag);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

} // namespace

TEST_SUITE("io") {

TEST_CASE("doubles survive the 17-digit format") {
    for (double v : {1.0 / 3.0, 1e-300, -2.7182818284590452, 0.1, 1e17 + 1.0}) {
        CHECK(std::strtod(io::format_double(v).c_str(), nullptr) == v);
    }
}

TEST_CASE("trace CSV round-trips exactly") {
    auto dir = fresh_dir("trace");
    TraceSeries trace;
    for (int k = 0; k < 50; ++k) {
        trace.times.push_back(0.01 * k);
        trace.plus.push_back(std::sin(0.1 * k) / 3.0);
        trace.minus.push_back(std::cos(0.1 * k) / 7.0);
    }
    io::write_trace_csv(dir / "t.csv", trace);
    auto back = io::read_trace_csv(dir / "t.csv");
    CHECK(back.times == trace.times);
    CHECK(back.plus == trace.plus);
    CHECK(back.minus == trace.minus);
}

TEST_CASE("l2 CSV round-trips exactly") {
    auto dir = fresh_dir("l2");
    std::vector<double> times{0.0, 0.1, 0.2}, l2{1.0, 1.0 / 3.0, 1e-17};
    io::write_l2_csv(dir / "l2.csv", times, l2);
    auto [t2, v2] = io::read_l2_csv(dir / "l2.csv");
    CHECK(t2 == times);
    CHECK(v2 == l2);
}

TEST_CASE("initial and boundary data files round-trip") {
    InitialData ic;
    ic.set(0, EdgeProfile::constant(1.0, -1.0));
    ic.set(1, EdgeProfile::from_samples({{0.0, 0.0, 0.5}, {1.0, 2.0, 0.25}}));
    ic.set(2, EdgeProfile::exp_ramp(6.0, 1.5));
    auto ic2 = io::parse_initial_data(io::serialize_initial_data(ic));
    for (double x : {0.0, 0.3, 0.9}) {
        for (EdgeId e : {0, 1, 2}) {
            CHECK(ic.eval(e, x) == ic2.eval(e, x));
        }
    }

    BoundaryData bc;
    bc.set(0, BoundarySignal::zero());
    bc.set(1, BoundarySignal::constant(0.4));
    bc.set(2, BoundarySignal::sine(1.0, 0.5));
    bc.set(3, BoundarySignal::table({0.0, 1.0}, {0.0, 2.0}));
    auto bc2 = io::parse_boundary_data(io::serialize_boundary_data(bc));
    for (double t : {0.0, 0.25, 0.9}) {
        for (NodeId n : {0, 1, 2, 3}) {
            CHECK(bc.eval(n, t) == bc2.eval(n, t));
        }
    }
}

TEST_CASE("manifest round-trips") {
    auto dir = fresh_dir("manifest");
    io::RunManifest manifest;
    manifest.version = "x.y.z";
    manifest.command = "simulate";
    manifest.config_json = R"({"dt":0.25,"label":"demo"})";
    manifest.seed = 7;
    manifest.wall_time_s = 1.5;
    manifest.files = {"l2.csv", "summary.json"};
    io::write_manifest(dir / "manifest.json", manifest);
    auto back = io::read_manifest(dir / "manifest.json");
    CHECK(back.version == manifest.version);
    CHECK(back.command == manifest.command);
    CHECK(back.seed == manifest.seed);
    CHECK(back.files == manifest.files);
}

TEST_CASE("cli scenario listing and export") {
    auto dir = fresh_dir("scen");
    CHECK(cli::run({"scenario", "--list"}) == 0);
    CHECK(cli::run({"scenario", "--export", "five-pipe", "--out", (dir / "fp").string()}) == 0);
    CHECK(fs::exists(dir / "fp" / "network.json"));
    CHECK(fs::exists(dir / "fp" / "ic.json"));
    auto g = parse_network(io::read_text_file(dir / "fp" / "network.json"));
    CHECK(g.edges().size() == 5);
}

TEST_CASE("cli simulate produces a reproducible run directory") {
    auto dir = fresh_dir("sim");
    auto run_once = [&](const std::string& sub) {
        auto out = (dir / sub).string();
        REQUIRE(cli::run({"simulate", "--scenario", "five-pipe", "--t-max", "4", "--dt", "0.05",
                          "--out", out}) == 0);
        return out;
    };
    auto a = run_once("a");
    auto b = run_once("b");
    for (const char* name : {"l2.csv", "final_state.csv", "summary.json"}) {
        CAPTURE(name);
        CHECK(io::read_text_file(fs::path(a) / name) == io::read_text_file(fs::path(b) / name));
    }
    auto manifest = io::read_manifest(fs::path(a) / "manifest.json");
    CHECK(manifest.command == "simulate");
    CHECK_FALSE(manifest.files.empty());
}

TEST_CASE("cli exit codes follow the contract") {
    auto dir = fresh_dir("exit");
    // incommensurable dt -> input error
    CHECK(cli::run({"simulate", "--scenario", "five-pipe", "--dt", "0.3", "--t-max", "1",
                    "--out", (dir / "x").string()}) == 2);
    // semilinear blow-up -> runtime error
    CHECK(cli::run({"simulate", "--scenario", "cycle", "--gamma", "1e8", "--t-max", "2",
                    "--out", (dir / "y").string()}) == 3);
    // unknown scenario -> input error
    CHECK(cli::run({"simulate", "--scenario", "nope", "--out", (dir / "z").string()}) == 2);
    // bad flags -> input error
    CHECK(cli::run({"simulate", "--no-such-flag"}) == 2);
    CHECK(cli::run({}) == 2);
}

TEST_CASE("cli analyze reproduces identical reports from stored CSV") {
    auto dir = fresh_dir("analyze");
    auto out = (dir / "run").string();
    REQUIRE(cli::run({"simulate", "--scenario", "five-pipe", "--t-max", "8", "--dt", "0.02",
                      "--out", out}) == 0);
    auto r1 = (dir / "report1.json").string();
    auto r2 = (dir / "report2.json").string();
    REQUIRE(cli::run({"analyze", "--run", out, "--t", "3", "--T", "2", "--out", r1}) == 0);
    REQUIRE(cli::run({"analyze", "--run", out, "--t", "3", "--T", "2", "--out", r2}) == 0);
    CHECK(io::read_text_file(r1) == io::read_text_file(r2));
    // horizon violation -> exit 2
    CHECK(cli::run({"analyze", "--run", out, "--t", "1", "--T", "2"}) == 2);
}

TEST_CASE("cli simulate reports the field-level rate of the friction cycle") {
    auto dir = fresh_dir("rate");
    auto out = (dir / "run").string();
    REQUIRE(cli::run({"simulate", "--scenario", "cycle", "--lambda", "0.5", "--dt", "0.01",
                      "--t-max", "10", "--out", out}) == 0);
    auto summary = nlohmann::json::parse(io::read_text_file(fs::path(out) / "summary.json"));
    double mu_field = summary.at("decay_fit").at("mu_field").get<double>();
    CHECK(mu_field == doctest::Approx(2.0 * 0.5).epsilon(0.02));
}

TEST_CASE("cli analyze defaults to the friction horizon b_N = 2N-1") {
    auto dir = fresh_dir("horizon");
    auto out = (dir / "run").string();
    REQUIRE(cli::run({"simulate", "--scenario", "five-pipe", "--lambda", "0.1", "--dt", "0.02",
                      "--t-max", "8", "--out", out}) == 0);
    auto report_file = (dir / "report.json").string();
    auto csv_file = (dir / "report.csv").string();
    REQUIRE(cli::run({"analyze", "--run", out, "--out", report_file, "--csv", csv_file}) == 0);
    auto report = nlohmann::json::parse(io::read_text_file(report_file));
    // five-pipe has N = 2 inner nodes: friction mode needs T = 3 lmax / c
    CHECK(report.at("T").get<double>() == doctest::Approx(3.0));
    CHECK(io::read_text_file(csv_file).find("t,T,lhs,rhs,ratio") != std::string::npos);
}

TEST_CASE("cli observe flags synchronization failure and recovery") {
    auto dir = fresh_dir("observe");
    REQUIRE(cli::run({"observe", "--scenario", "cycle", "--t-max", "10",
                      "--out", (dir / "plain").string()}) == 0);
    auto plain = io::read_text_file(dir / "plain" / "summary.json");
    CHECK(plain.find("FAILED") != std::string::npos);

    REQUIRE(cli::run({"observe", "--scenario", "cycle", "--auto-sensors", "--t-max", "60",
                      "--out", (dir / "cut").string()}) == 0);
    auto cut = io::read_text_file(dir / "cut" / "summary.json");
    CHECK(cut.find("exponential") != std::string::npos);

    REQUIRE(cli::run({"observe", "--scenario", "five-pipe", "--t-max", "30",
                      "--out", (dir / "tree").string()}) == 0);
    auto tree = io::read_text_file(dir / "tree" / "summary.json");
    CHECK(tree.find("exponential") != std::string::npos);
}

TEST_CASE("cli place-sensors counts basis cycles") {
    auto dir = fresh_dir("place");
    auto tree_report = (dir / "tree.json").string();
    REQUIRE(cli::run({"place-sensors", "--scenario", "five-pipe", "--out", tree_report}) == 0);
    CHECK(io::read_text_file(tree_report).find("\"cyclomatic_number\": 0") != std::string::npos);
    auto cycle_report = (dir / "cycle.json").string();
    REQUIRE(cli::run({"place-sensors", "--scenario", "cycle", "--out", cycle_report}) == 0);
    CHECK(io::read_text_file(cycle_report).find("\"cyclomatic_number\": 1") != std::string::npos);
}

TEST_CASE("cli simulate accepts exported scenario files") {
    auto dir = fresh_dir("files");
    REQUIRE(cli::run({"scenario", "--export", "cycle", "--out", (dir / "sc").string()}) == 0);
    REQUIRE(cli::run({"simulate", "--network", (dir / "sc" / "network.json").string(),
                      "--ic", (dir / "sc" / "ic.json").string(), "--dt", "0.1", "--t-max", "2",
                      "--out", (dir / "run").string()}) == 0);
    auto [times, l2] = io::read_l2_csv(dir / "run" / "l2.csv");
    CHECK(l2.front() == doctest::Approx(8.0)); // 2 a^2 * cycle length
    CHECK(l2.back() == doctest::Approx(8.0));  // constant solution
}

} // TEST_SUITE
