#include <doctest.h>

#include "netobs/analysis.hpp"
#include "netobs/scenarios.hpp"

#include <cmath>

using namespace netobs;

namespace {

// Single pipe driven by a Gaussian pressure pulse at x=0.
SimulationResult pulse_pipe(double lambda, double dt = 0.01) {
    NetworkGraph g;
    g.add_node(0);
    g.add_node(1);
    g.add_edge(0, 0, 1, 1.0);
    std::vector<double> times, values;
    for (double t = 0.0; t <= 8.0; t += dt) {
        times.push_back(t);
        values.push_back(std::exp(-std::pow((t - 2.0) / 0.6, 2)));
    }
    BoundaryData bc;
    bc.set(0, BoundarySignal::table(times, values));
    RunOptions options;
    options.dt = dt;
    options.t_max = 8.0;
    options.record_states = true;
    Physics physics = lambda > 0.0 ? Physics::linear_friction(lambda) : Physics::frictionless();
    return run(g, physics, InitialData{}, bc, options);
}

TraceSeries constant_trace(double plus, double minus, double t_max, double dt) {
    TraceSeries trace;
    for (double t = 0.0; t <= t_max + dt / 2; t += dt) {
        trace.times.push_back(t);
        trace.plus.push_back(plus);
        trace.minus.push_back(minus);
    }
    return trace;
}

} // namespace

TEST_SUITE("analysis") {

TEST_CASE("network norm of simple states") {
    NetworkGraph g;
    g.add_node(0);
    g.add_node(1);
    g.add_edge(0, 0, 1, 1.0);
    auto grids = build_grids(g, Physics::frictionless(), 0.1);
    SystemState zero = sample_initial_state(g, grids, InitialData{});
    CHECK(l2_norm_squared(zero, grids) == 0.0);

    InitialData unit;
    unit.set(0, EdgeProfile::constant(1.0, 0.0));
    SystemState one = sample_initial_state(g, grids, unit);
    CHECK(l2_norm_squared(one, grids) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("cycle state norm matches the closed form") {
    const double a = 1.3, lambda = 0.5;
    auto sc = scenarios::cycle_counterexample(a, lambda);
    RunOptions options = sc.run_options();
    options.dt = 0.01;
    options.t_max = 2.0;
    auto result = run(sc.graph, sc.physics, sc.plant_ic, sc.bc, options);
    double cycle_length = 4.0;
    CHECK(result.l2.front() == doctest::Approx(2.0 * a * a * cycle_length).epsilon(1e-15));
    double expect = 2.0 * a * a * std::exp(-4.0 * lambda * 2.0) * cycle_length;
    CHECK(result.l2.back() == doctest::Approx(expect).epsilon(1e-5));
}

TEST_CASE("trace integrals of simple traces") {
    auto zero = constant_trace(0.0, 0.0, 4.0, 0.1);
    CHECK(trace_l2(zero, 0.0, 4.0) == 0.0);
    auto unit = constant_trace(1.0, 0.0, 4.0, 0.1);
    CHECK(trace_l2(unit, 1.0, 3.0) == doctest::Approx(2.0).epsilon(1e-13));
    CHECK_THROWS_AS(trace_l2(unit, -1.0, 3.0), Error);
    CHECK_THROWS_AS(trace_l2(unit, 1.0, 9.0), Error);
}

TEST_CASE("five-pipe boundary trace integral matches the geometric sum") {
    // plus = (-1/3)^{n+1}, minus = (-1/3)^n on [n, n+1): the integrand is
    // (10/9)(1/9)^n and the window [0,3] gives (10/9)(1 + 1/9 + 1/81).
    const double dt = 0.01;
    auto sc = scenarios::five_pipe_tree();
    RunOptions options = sc.run_options();
    options.dt = dt;
    options.t_max = 4.0;
    auto result = run(sc.graph, sc.physics, sc.plant_ic, sc.bc, options);
    double exact = (10.0 / 9.0) * (1.0 + 1.0 / 9.0 + 1.0 / 81.0);
    double got = trace_l2(result.node_trace(2, Endpoint::Start), 0.0, 3.0);
    // the trapezoid smears the two jumps by half a step each
    CHECK(std::abs(got - exact) < dt);
}

TEST_CASE("tree observability ratio is finite and stable under refinement") {
    auto sc = scenarios::five_pipe_tree();
    auto ratio_at = [&](double dt) {
        RunOptions options = sc.run_options();
        options.dt = dt;
        options.t_max = 8.0;
        auto result = run(sc.graph, sc.physics, sc.plant_ic, sc.bc, options);
        auto report = check_observability(result, 3.0, 2.0, ObservabilityMode::NoFriction);
        CHECK(report.lhs > 0.0);
        CHECK(report.rhs > 0.0);
        CHECK(std::isfinite(report.ratio));
        return report.ratio;
    };
    double coarse = ratio_at(0.02);
    double fine = ratio_at(0.01);
    CHECK(fine == doctest::Approx(coarse).epsilon(0.2));
}

TEST_CASE("uncut cycle has silent boundary traces and infinite ratio") {
    auto sc = scenarios::cycle_counterexample(1.0, 0.0);
    RunOptions options = sc.run_options();
    options.t_max = 15.0;
    auto result = run(sc.graph, sc.physics, sc.plant_ic, sc.bc, options);
    auto report = check_observability(result, 5.0, 4.0, ObservabilityMode::NoFriction);
    CHECK(report.rhs == 0.0);
    CHECK(report.lhs > 0.0);
    CHECK(std::isinf(report.ratio));
}

TEST_CASE("zero data makes the observability report degenerate") {
    auto sc = scenarios::five_pipe_tree();
    RunOptions options = sc.run_options();
    options.t_max = 8.0;
    auto result = run(sc.graph, sc.physics, InitialData{}, sc.bc, options);
    auto report = check_observability(result, 3.0, 2.0, ObservabilityMode::NoFriction);
    CHECK(report.degenerate);
}

TEST_CASE("observability horizons are enforced") {
    auto sc = scenarios::five_pipe_tree();
    RunOptions options = sc.run_options();
    options.t_max = 8.0;
    auto result = run(sc.graph, sc.physics, sc.plant_ic, sc.bc, options);
    // T below the required N*lmax/c = 2
    CHECK_THROWS_AS(check_observability(result, 3.0, 1.0, ObservabilityMode::NoFriction), Error);
    // t <= T
    CHECK_THROWS_AS(check_observability(result, 2.0, 2.0, ObservabilityMode::NoFriction), Error);
    // window leaves the recorded range
    CHECK_THROWS_AS(check_observability(result, 7.5, 2.0, ObservabilityMode::NoFriction), Error);
    // friction mode needs T >= (2N-1)*lmax/c = 3
    CHECK_THROWS_AS(check_observability(result, 4.0, 2.0, ObservabilityMode::Friction), Error);
    CHECK_NOTHROW(check_observability(result, 4.0, 3.0, ObservabilityMode::Friction));
}

TEST_CASE("horizon multipliers follow b_n = 2n - 1") {
    CHECK(horizon_multiplier(ObservabilityMode::NoFriction, 4) == 4);
    CHECK(horizon_multiplier(ObservabilityMode::Friction, 1) == 1);
    CHECK(horizon_multiplier(ObservabilityMode::Friction, 3) == 5);
    CHECK(horizon_multiplier(ObservabilityMode::Friction, 4) == 7);
}

TEST_CASE("single-pipe ratio stays below the proof constant") {
    for (double lambda : {0.0, 0.25, 1.0}) {
        auto result = pulse_pipe(lambda);
        auto report = check_single_pipe_observability(result, 0, 2.8);
        CHECK(report.proof_bound ==
              doctest::Approx(1.0 + 2.5 * lambda * std::exp(2.0 * lambda)));
        CHECK_FALSE(report.degenerate);
        CHECK(report.ratio <= report.proof_bound);
    }
}

TEST_CASE("reversed inequality holds with margin for pure transport") {
    auto result = pulse_pipe(0.0);
    auto report = check_reversed_pipe_inequality(result, 0, 3.0);
    CHECK(report.proof_bound == doctest::Approx(2.0));
    CHECK(report.ratio <= 1.0); // every wave at x=l already passed x=0
}

TEST_CASE("reversed inequality respects the friction bound") {
    for (double lambda : {0.25, 1.0}) {
        auto result = pulse_pipe(lambda);
        auto report = check_reversed_pipe_inequality(result, 0, 3.0);
        double c_single = 1.0 + 2.5 * lambda * std::exp(2.0 * lambda);
        double expect = 2.0 * c_single * (1.0 + 2.5 * lambda * std::exp(4.0 * lambda));
        CHECK(report.proof_bound == doctest::Approx(expect));
        CHECK(report.ratio <= report.proof_bound);
    }
}

TEST_CASE("pipe checks enforce their horizons") {
    auto result = pulse_pipe(0.0);
    CHECK_THROWS_AS(check_single_pipe_observability(result, 0, 0.5), Error);
    CHECK_THROWS_AS(check_reversed_pipe_inequality(result, 0, 2.0), Error);
}

TEST_CASE("zero run gives degenerate pipe reports") {
    NetworkGraph g;
    g.add_node(0);
    g.add_node(1);
    g.add_edge(0, 0, 1, 1.0);
    RunOptions options;
    options.dt = 0.02;
    options.t_max = 8.0;
    options.record_states = true;
    auto result = run(g, Physics::frictionless(), InitialData{}, BoundaryData{}, options);
    CHECK(check_single_pipe_observability(result, 0, 3.0).degenerate);
    CHECK(check_reversed_pipe_inequality(result, 0, 3.0).degenerate);
}

TEST_CASE("decay fit inverts a synthetic exponential") {
    std::vector<double> times, l2;
    for (double t = 0.0; t <= 10.0; t += 0.01) {
        times.push_back(t);
        l2.push_back(std::exp(-3.0 * t));
    }
    FitOptions options;
    options.two_window = 1.0;
    auto fit = fit_decay(times, l2, 0.0, 10.0, options);
    CHECK(fit.mu_l2 == doctest::Approx(3.0).epsilon(1e-7));
    CHECK(fit.mu_field == doctest::Approx(1.5).epsilon(1e-7));
    CHECK(fit.c1 == doctest::Approx(1.0).epsilon(1e-7));
    CHECK(fit.r2 > 0.999999);
    CHECK(fit.ctilde == doctest::Approx(std::exp(-6.0)).epsilon(1e-6));
}

TEST_CASE("decay fit rejects empty or zero series") {
    std::vector<double> times{0.0, 0.1, 0.2};
    std::vector<double> zeros{0.0, 0.0, 0.0};
    CHECK_THROWS_AS(fit_decay(times, zeros, 0.0, 1.0), Error);
}

TEST_CASE("cycle with friction fits both rate conventions") {
    auto sc = scenarios::cycle_counterexample(1.0, 0.5);
    RunOptions options = sc.run_options();
    options.dt = 0.01;
    options.t_max = 10.0;
    auto result = run(sc.graph, sc.physics, sc.plant_ic, sc.bc, options);
    auto fit = fit_decay(result, 0.0, 10.0);
    CHECK(fit.mu_l2 == doctest::Approx(4.0 * 0.5).epsilon(0.02));    // on the squared norm
    CHECK(fit.mu_field == doctest::Approx(2.0 * 0.5).epsilon(0.02)); // on the amplitude
}

TEST_CASE("degree-2 node energy residual vanishes identically") {
    CHECK(node_energy_residual({3.0, 4.0}) == 0.0);
}

TEST_CASE("head_fit_end finds the decade cutoff") {
    std::vector<double> times, l2;
    for (double t = 0.0; t <= 10.0; t += 0.1) {
        times.push_back(t);
        l2.push_back(std::exp(-2.0 * t));
    }
    // 10^-2 of L(0) is reached at t = ln(100)/2
    CHECK(head_fit_end(times, l2, 2.0) == doctest::Approx(std::log(100.0) / 2.0).epsilon(0.05));
    CHECK(head_fit_end(times, l2, 20.0) == times.back());
}

} // TEST_SUITE
