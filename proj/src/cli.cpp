#include "netobs/cli.hpp"

#include "netobs/analysis.hpp"
#include "netobs/io.hpp"
#include "netobs/scenarios.hpp"
#include "netobs/version.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>

namespace netobs::cli {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitRuntime = 3;

int thread_cap() {
    const char* env = std::getenv("NETOBS_THREADS");
    if (env == nullptr) {
        return 1;
    }
    char* end = nullptr;
    long v = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || v < 1) {
        std::cerr << "warning: ignoring invalid NETOBS_THREADS='" << env << "'\n";
        return 1;
    }
    return static_cast<int>(v);
}

struct ProblemSetup {
    std::string label;
    NetworkGraph graph;
    Physics physics;
    InitialData ic;
    BoundaryData bc;
    unsigned seed = 0;
    double dt = 0.05;
    double t_max = 40.0;
    double fit_decades = 8.0;
    SensorPlacement sensors;
};

// Shared input flags for simulate/observe.
struct ProblemFlags {
    std::string scenario;
    std::string network_file;
    std::string ic_file;
    std::string bc_file;
    std::vector<std::string> sensor_specs;
    bool auto_sensors = false;
    double dt = -1.0;
    double t_max = -1.0;
    double lambda = -1.0;
    double gamma = -1.0;
    double c = -1.0;
    std::string out_dir = "netobs-run";

    void attach(CLI::App* cmd, bool with_sensors) {
        cmd->add_option("--scenario", scenario, "built-in scenario name (see `scenario --list`)");
        cmd->add_option("--network", network_file, "network JSON file");
        cmd->add_option("--ic", ic_file, "initial-data JSON file");
        cmd->add_option("--bc", bc_file, "boundary-data JSON file");
        cmd->add_option("--dt", dt, "time step (s)");
        cmd->add_option("--t-max", t_max, "simulation horizon (s)");
        cmd->add_option("--lambda", lambda, "linear friction coefficient");
        cmd->add_option("--gamma", gamma, "semilinear friction coefficient");
        cmd->add_option("--c", c, "wave speed (m/s)");
        cmd->add_option("--out", out_dir, "output directory");
        if (with_sensors) {
            cmd->add_option("--sensor", sensor_specs,
                            "interior sensor as edge:position, repeatable");
            cmd->add_flag("--auto-sensors", auto_sensors,
                          "one sensor per basis cycle (midpoint of its smallest edge)");
        }
    }
};

Sensor parse_sensor_spec(const std::string& spec) {
    auto colon = spec.find(':');
    if (colon == std::string::npos) {
        throw Error(ErrorCode::BadInput, "sensor spec must be edge:position, got '" + spec + "'");
    }
    try {
        return Sensor{static_cast<EdgeId>(std::stol(spec.substr(0, colon))),
                      std::stod(spec.substr(colon + 1))};
    } catch (const std::exception&) {
        throw Error(ErrorCode::BadInput, "cannot parse sensor spec '" + spec + "'");
    }
}

ProblemSetup resolve_problem(const ProblemFlags& flags) {
    ProblemSetup setup;
    if (!flags.scenario.empty()) {
        scenarios::Scenario sc = scenarios::by_name(flags.scenario);
        setup.label = sc.name;
        setup.graph = sc.graph;
        setup.physics = sc.physics;
        setup.ic = sc.plant_ic;
        setup.bc = sc.bc;
        setup.dt = sc.dt;
        setup.t_max = sc.t_max;
        setup.fit_decades = sc.fit_decades;
        setup.sensors = sc.plan.interior;
        const std::string prefix = "random-tree-";
        if (sc.name.rfind(prefix, 0) == 0) {
            setup.seed = static_cast<unsigned>(std::stoul(sc.name.substr(prefix.size())));
        }
    } else if (!flags.network_file.empty()) {
        setup.label = flags.network_file;
        setup.graph = parse_network(io::read_text_file(flags.network_file));
        if (!flags.ic_file.empty()) {
            setup.ic = io::parse_initial_data(io::read_text_file(flags.ic_file));
        }
        if (!flags.bc_file.empty()) {
            setup.bc = io::parse_boundary_data(io::read_text_file(flags.bc_file));
        }
    } else {
        throw Error(ErrorCode::BadInput, "need either --scenario or --network");
    }

    auto report = setup.graph.validate();
    if (!report.ok()) {
        throw Error(report.violations.front().code, report.violations.front().message);
    }

    if (flags.c > 0.0) {
        setup.physics.c = flags.c;
    }
    if (flags.lambda >= 0.0) {
        setup.physics = Physics::linear_friction(flags.lambda, setup.physics.c);
        if (flags.lambda == 0.0) {
            setup.physics = Physics::frictionless(setup.physics.c);
        }
    }
    if (flags.gamma >= 0.0) {
        setup.physics = Physics::semilinear_friction(flags.gamma, setup.physics.c);
    }
    if (flags.dt > 0.0) {
        setup.dt = flags.dt;
    }
    if (flags.t_max >= 0.0) {
        setup.t_max = flags.t_max;
    }
    for (const std::string& spec : flags.sensor_specs) {
        setup.sensors.push_back(parse_sensor_spec(spec));
    }
    if (flags.auto_sensors) {
        for (const Sensor& s : auto_placement(setup.graph)) {
            setup.sensors.push_back(s);
        }
    }
    return setup;
}

ordered_json physics_json(const Physics& p) {
    ordered_json j;
    j["c"] = p.c;
    switch (p.friction) {
        case FrictionKind::None: j["friction"] = "none"; break;
        case FrictionKind::Linear:
            j["friction"] = "linear";
            j["lambda"] = p.lambda;
            break;
        case FrictionKind::Semilinear:
            j["friction"] = "semilinear";
            j["gamma"] = p.gamma;
            break;
    }
    return j;
}

ordered_json config_json(const std::string& command, const ProblemSetup& setup) {
    ordered_json cfg;
    cfg["command"] = command;
    cfg["label"] = setup.label;
    cfg["network"] = json::parse(serialize(setup.graph));
    cfg["initial_data"] = json::parse(io::serialize_initial_data(setup.ic));
    cfg["boundary_data"] = json::parse(io::serialize_boundary_data(setup.bc));
    cfg["physics"] = physics_json(setup.physics);
    cfg["dt"] = setup.dt;
    cfg["t_max"] = setup.t_max;
    cfg["fit_decades"] = setup.fit_decades;
    cfg["threads"] = thread_cap();
    auto sensors = ordered_json::array();
    for (const Sensor& s : setup.sensors) {
        sensors.push_back({{"edge", s.edge}, {"position", s.position}});
    }
    cfg["sensors"] = std::move(sensors);
    return cfg;
}

ordered_json fit_json(const DecayFit& fit) {
    ordered_json j;
    j["mu_l2"] = fit.mu_l2;
    j["mu_field"] = fit.mu_field;
    j["c1"] = fit.c1;
    j["r2"] = fit.r2;
    j["window"] = {fit.window_start, fit.window_end};
    j["n_samples"] = fit.n_samples;
    if (std::isfinite(fit.ctilde)) {
        j["ctilde"] = fit.ctilde;
    }
    return j;
}

// Decay fit over the head window; absent when the series has no decaying
// positive segment.
std::optional<DecayFit> try_head_fit(const std::vector<double>& times,
                                     const std::vector<double>& l2, double decades) {
    try {
        double t_end = head_fit_end(times, l2, decades);
        return fit_decay(times, l2, times.front(), t_end);
    } catch (const Error&) {
        return std::nullopt;
    }
}

void finish_run_dir(const fs::path& dir, const std::string& command, const ProblemSetup& setup,
                    std::vector<std::string> files, const ordered_json& summary,
                    double wall_time_s) {
    io::write_text_file(dir / "summary.json", summary.dump(2) + "\n");
    files.push_back("summary.json");
    io::RunManifest manifest;
    manifest.version = kVersion;
    manifest.command = command;
    manifest.config_json = config_json(command, setup).dump();
    manifest.seed = setup.seed;
    manifest.wall_time_s = wall_time_s;
    manifest.files = std::move(files);
    io::write_manifest(dir / "manifest.json", manifest);
}

int cmd_simulate(const ProblemFlags& flags) {
    auto t_begin = std::chrono::steady_clock::now();
    ProblemSetup setup = resolve_problem(flags);

    RunOptions options;
    options.dt = setup.dt;
    options.t_max = setup.t_max;
    options.sensors = setup.sensors;
    SimulationResult result = run(setup.graph, setup.physics, setup.ic, setup.bc, options);

    fs::path dir(flags.out_dir);
    std::vector<std::string> files = io::export_result(dir, result);

    ordered_json summary;
    summary["label"] = setup.label;
    summary["steps"] = result.times.size() - 1;
    summary["l2_initial"] = result.l2.front();
    summary["l2_final"] = result.l2.back();
    if (auto fit = try_head_fit(result.times, result.l2, setup.fit_decades)) {
        summary["decay_fit"] = fit_json(*fit);
        std::cout << "decay: mu_l2=" << fit->mu_l2 << " mu_field=" << fit->mu_field
                  << " r2=" << fit->r2 << "\n";
    }
    summary["warnings"] = result.warnings;

    double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t_begin).count();
    finish_run_dir(dir, "simulate", setup, std::move(files), summary, wall);
    std::cout << "simulate: " << setup.label << " -> " << dir.string() << " (L2 "
              << io::format_double(result.l2.front()) << " -> "
              << io::format_double(result.l2.back()) << ")\n";
    return kExitOk;
}

int cmd_observe(const ProblemFlags& flags) {
    auto t_begin = std::chrono::steady_clock::now();
    ProblemSetup setup = resolve_problem(flags);

    MeasurementPlan plan;
    plan.interior = setup.sensors;
    RunOptions options;
    options.dt = setup.dt;
    options.t_max = setup.t_max;

    ObserverRun obs = run_observer(setup.graph, setup.physics, setup.ic, InitialData{}, setup.bc,
                                   plan, options);

    fs::path dir(flags.out_dir);
    std::vector<std::string> files = io::export_result(dir, obs.plant, "plant_");
    for (auto& name : io::export_result(dir, obs.observer, "observer_")) {
        files.push_back(name);
    }
    io::write_l2_csv(dir / "diff_l2.csv", obs.times, obs.l2_diff);
    files.push_back("diff_l2.csv");
    for (const auto& [key, trace] : obs.diff_traces) {
        std::string name = "diff_trace_" + key.label() + ".csv";
        io::write_trace_csv(dir / name, trace);
        files.push_back(name);
    }

    ordered_json summary;
    summary["label"] = setup.label;
    summary["sensors"] = ordered_json::array();
    for (const Sensor& s : plan.interior) {
        summary["sensors"].push_back({{"edge", s.edge}, {"position", s.position}});
    }
    summary["l2_diff_initial"] = obs.l2_diff.front();
    summary["l2_diff_final"] = obs.l2_diff.back();

    std::string verdict;
    double l0 = obs.l2_diff.front();
    double l1 = obs.l2_diff.back();
    std::optional<DecayFit> fit = try_head_fit(obs.times, obs.l2_diff, setup.fit_decades);
    if (l0 == 0.0) {
        verdict = "exact (identical initial data)";
    } else if (l1 > 0.9 * l0) {
        verdict = "FAILED (L2 non-decaying)";
    } else if (fit && fit->mu_l2 > 0.0) {
        verdict = "exponential (mu_l2=" + io::format_double(fit->mu_l2) + ")";
    } else {
        verdict = "partial decay";
    }
    summary["synchronization"] = verdict;
    if (fit) {
        summary["decay_fit"] = fit_json(*fit);
    }
    summary["warnings"] = obs.plant.warnings;

    double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t_begin).count();
    finish_run_dir(dir, "observe", setup, std::move(files), summary, wall);
    std::cout << "observe: " << setup.label << " -> " << dir.string() << "\n"
              << "synchronization: " << verdict << "\n";
    return kExitOk;
}

// Rebuilds enough of a stored run to analyze it from its manifest.
struct StoredRun {
    io::RunManifest manifest;
    NetworkGraph graph;
    Physics physics;
    GridMap grids;
    std::vector<double> times;
    std::vector<double> l2;
    std::map<ProbeKey, TraceSeries> traces;
    double fit_decades = 8.0;
};

StoredRun load_run(const fs::path& dir) {
    StoredRun stored;
    stored.manifest = io::read_manifest(dir / "manifest.json");
    json cfg = json::parse(stored.manifest.config_json);
    stored.graph = parse_network(cfg.at("network").dump());
    json phys = cfg.at("physics");
    std::string friction = phys.at("friction").get<std::string>();
    if (friction == "linear") {
        stored.physics = Physics::linear_friction(phys.at("lambda").get<double>(),
                                                  phys.at("c").get<double>());
    } else if (friction == "semilinear") {
        stored.physics = Physics::semilinear_friction(phys.at("gamma").get<double>(),
                                                      phys.at("c").get<double>());
    } else {
        stored.physics = Physics::frictionless(phys.at("c").get<double>());
    }
    stored.grids = build_grids(stored.graph, stored.physics, cfg.at("dt").get<double>());
    stored.fit_decades = cfg.value("fit_decades", 8.0);

    const bool observe_run = stored.manifest.command == "observe";
    const std::string l2_file = observe_run ? "diff_l2.csv" : "l2.csv";
    std::tie(stored.times, stored.l2) = io::read_l2_csv(dir / l2_file);

    const std::string trace_prefix = observe_run ? "diff_trace_" : "trace_";
    for (const Edge& e : stored.graph.edges()) {
        for (Endpoint end : {Endpoint::Start, Endpoint::End}) {
            auto key = ProbeKey::node_side(stored.graph, e.id, end, stored.grids.at(e.id).n_cells);
            fs::path file = dir / (trace_prefix + key.label() + ".csv");
            if (fs::exists(file)) {
                TraceSeries trace = io::read_trace_csv(file);
                trace.probe = key;
                stored.traces[key] = std::move(trace);
            }
        }
    }
    return stored;
}

int cmd_analyze(const std::string& run_dir, double t_opt, double T_opt, const std::string& mode_opt,
                double decades_opt, const std::string& out_file, const std::string& csv_file) {
    StoredRun stored = load_run(run_dir);

    ObservabilityMode mode;
    if (mode_opt == "friction") {
        mode = ObservabilityMode::Friction;
    } else if (mode_opt == "nofriction") {
        mode = ObservabilityMode::NoFriction;
    } else if (mode_opt.empty()) {
        mode = stored.physics.friction == FrictionKind::None ? ObservabilityMode::NoFriction
                                                             : ObservabilityMode::Friction;
    } else {
        throw Error(ErrorCode::BadInput, "mode must be 'friction' or 'nofriction'");
    }

    const double t_end = stored.times.back();
    const double required = static_cast<double>(horizon_multiplier(
                                mode, std::max(1, stored.graph.inner_node_count()))) *
                            stored.graph.max_edge_length() / stored.physics.c;
    const double T = T_opt > 0.0 ? T_opt : required;
    const double t = t_opt > 0.0 ? t_opt : t_end / 2.0;

    ObservabilityReport report = check_observability(stored.graph, stored.grids, stored.times,
                                                     stored.l2, stored.traces, t, T, mode);

    ordered_json doc;
    doc["t"] = report.t;
    doc["T"] = report.T;
    doc["required_T"] = report.required_T;
    doc["lhs"] = report.lhs;
    doc["rhs"] = report.rhs;
    doc["ratio"] = std::isinf(report.ratio) ? json("inf") : json(report.ratio);
    doc["degenerate"] = report.degenerate;
    doc["snap_error"] = report.snap_error;
    double decades = decades_opt > 0.0 ? decades_opt : stored.fit_decades;
    if (auto fit = try_head_fit(stored.times, stored.l2, decades)) {
        doc["decay_fit"] = fit_json(*fit);
    }
    std::string text = doc.dump(2) + "\n";
    if (!out_file.empty()) {
        io::write_text_file(out_file, text);
    }
    if (!csv_file.empty()) {
        std::string csv = "t,T,lhs,rhs,ratio,degenerate\n";
        csv += io::format_double(report.t) + "," + io::format_double(report.T) + "," +
               io::format_double(report.lhs) + "," + io::format_double(report.rhs) + "," +
               io::format_double(report.ratio) + "," + (report.degenerate ? "1" : "0") + "\n";
        io::write_text_file(csv_file, csv);
    }
    std::cout << text;
    if (std::isinf(report.ratio)) {
        std::cout << "observability: FAILED (boundary traces carry no signal)\n";
    } else if (report.degenerate) {
        std::cout << "observability: degenerate (zero state)\n";
    } else {
        std::cout << "observability: ratio=" << report.ratio << " over T=" << T << "\n";
    }
    return kExitOk;
}

int cmd_place_sensors(const std::string& network_file, const std::string& scenario_name,
                      const std::string& out_file) {
    NetworkGraph g;
    if (!scenario_name.empty()) {
        g = scenarios::by_name(scenario_name).graph;
    } else if (!network_file.empty()) {
        g = parse_network(io::read_text_file(network_file));
    } else {
        throw Error(ErrorCode::BadInput, "need --network or --scenario");
    }
    g.require_valid();
    auto cycles = cycle_basis(g);
    auto placement = auto_placement(g);

    ordered_json doc;
    doc["edges"] = g.edges().size();
    doc["nodes"] = g.node_ids().size();
    doc["cyclomatic_number"] = cycles.size();
    doc["cycles"] = ordered_json::array();
    for (const auto& cycle : cycles) {
        doc["cycles"].push_back(cycle);
    }
    doc["sensors"] = ordered_json::array();
    for (const Sensor& s : placement) {
        doc["sensors"].push_back({{"edge", s.edge}, {"position", s.position}});
    }
    std::string text = doc.dump(2) + "\n";
    if (!out_file.empty()) {
        io::write_text_file(out_file, text);
    }
    std::cout << text;
    std::cout << placement.size() << " sensor" << (placement.size() == 1 ? "" : "s")
              << " required\n";
    return kExitOk;
}

int cmd_scenario(bool list, const std::string& export_name, const std::string& out_dir) {
    if (list) {
        for (const auto& name : scenarios::scenario_names()) {
            std::cout << name << "\n";
        }
        return kExitOk;
    }
    if (export_name.empty()) {
        throw Error(ErrorCode::BadInput, "need --list or --export NAME");
    }
    scenarios::Scenario sc = scenarios::by_name(export_name);
    fs::path dir(out_dir);
    fs::create_directories(dir);
    io::write_text_file(dir / "network.json", serialize(sc.graph));
    io::write_text_file(dir / "ic.json", io::serialize_initial_data(sc.plant_ic));
    io::write_text_file(dir / "bc.json", io::serialize_boundary_data(sc.bc));
    ordered_json meta;
    meta["name"] = sc.name;
    meta["description"] = sc.description;
    meta["physics"] = physics_json(sc.physics);
    meta["dt"] = sc.dt;
    meta["t_max"] = sc.t_max;
    meta["fit_decades"] = sc.fit_decades;
    auto sensors = ordered_json::array();
    for (const Sensor& s : sc.plan.interior) {
        sensors.push_back({{"edge", s.edge}, {"position", s.position}});
    }
    meta["sensors"] = std::move(sensors);
    io::write_text_file(dir / "scenario.json", meta.dump(2) + "\n");
    std::cout << "exported " << sc.name << " -> " << dir.string() << "\n";
    return kExitOk;
}

} // namespace

int run(const std::vector<std::string>& args) {
    CLI::App app{"observer-based state estimation for 2x2 hyperbolic systems on networks"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    ProblemFlags sim_flags;
    CLI::App* sim = app.add_subcommand("simulate", "run one simulation and export CSV results");
    sim_flags.attach(sim, true);

    ProblemFlags obs_flags;
    CLI::App* obs = app.add_subcommand("observe", "run the plant/observer pair");
    obs_flags.attach(obs, true);

    CLI::App* ana = app.add_subcommand("analyze", "observability and decay reports for a stored run");
    std::string ana_run, ana_mode, ana_out, ana_csv;
    double ana_t = -1.0, ana_T = -1.0, ana_decades = -1.0;
    ana->add_option("--run", ana_run, "run directory with manifest.json")->required();
    ana->add_option("--t", ana_t, "evaluation time (default: middle of the run)");
    ana->add_option("--T", ana_T, "observation half-window (default: required horizon)");
    ana->add_option("--mode", ana_mode, "friction | nofriction (default: from physics)");
    ana->add_option("--decades", ana_decades, "head-fit depth for the decay fit");
    ana->add_option("--out", ana_out, "write the report JSON here");
    ana->add_option("--csv", ana_csv, "write a flat one-row CSV of the report here");

    CLI::App* place = app.add_subcommand("place-sensors", "cycle basis and automatic placement");
    std::string place_network, place_scenario, place_out;
    place->add_option("--network", place_network, "network JSON file");
    place->add_option("--scenario", place_scenario, "built-in scenario name");
    place->add_option("--out", place_out, "write the report JSON here");

    CLI::App* scen = app.add_subcommand("scenario", "list or export built-in scenarios");
    bool scen_list = false;
    std::string scen_export, scen_out = "scenario-out";
    scen->add_flag("--list", scen_list, "list scenario names");
    scen->add_option("--export", scen_export, "write network/ic/bc files for a scenario");
    scen->add_option("--out", scen_out, "export directory");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kExitOk : kExitInput;
    }

    try {
        if (sim->parsed()) {
            return cmd_simulate(sim_flags);
        }
        if (obs->parsed()) {
            return cmd_observe(obs_flags);
        }
        if (ana->parsed()) {
            return cmd_analyze(ana_run, ana_t, ana_T, ana_mode, ana_decades, ana_out, ana_csv);
        }
        if (place->parsed()) {
            return cmd_place_sensors(place_network, place_scenario, place_out);
        }
        if (scen->parsed()) {
            return cmd_scenario(scen_list, scen_export, scen_out);
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.code() == ErrorCode::NonFiniteState ? kExitRuntime : kExitInput;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    }
    return kExitInput;
}

} // namespace netobs::cli
