#include <doctest.h>

#include "netobs/scenarios.hpp"
#include "netobs/solver.hpp"

#include <cmath>
#include <random>

using namespace netobs;

namespace {

NetworkGraph chain(std::vector<double> lengths) {
    NetworkGraph g;
    g.add_node(0);
    for (std::size_t i = 0; i < lengths.size(); ++i) {
        g.add_node(static_cast<NodeId>(i + 1));
        g.add_edge(static_cast<EdgeId>(i), static_cast<NodeId>(i), static_cast<NodeId>(i + 1),
                   lengths[i]);
    }
    return g;
}

BoundaryFn zero_bc() {
    return [](const NodeSide&, double) { return 0.0; };
}

} // namespace

TEST_SUITE("solver") {

TEST_CASE("grids divide commensurable lengths exactly") {
    auto g = chain({1.0, 1.0, 2.0});
    auto grids = build_grids(g, Physics::frictionless(), 0.25);
    CHECK(grids.at(0).n_cells == 4);
    CHECK(grids.at(1).n_cells == 4);
    CHECK(grids.at(2).n_cells == 8);
}

TEST_CASE("incommensurable lengths fail with a suggested dt") {
    auto g = chain({1.0, 3.14159265358979323846});
    try {
        build_grids(g, Physics::frictionless(), 0.25);
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::IncommensurableLengths);
        CHECK(std::string(e.what()).find("suggested dt") != std::string::npos);
    }
}

TEST_CASE("grid cell count uses the wave speed") {
    auto g = chain({1.0, 1.0});
    auto grids = build_grids(g, Physics::frictionless(340.0), 1.0 / 680.0);
    CHECK(grids.at(0).n_cells == 2);
    CHECK(grids.at(1).n_cells == 2);
}

TEST_CASE("degree-2 coupling is a pass-through") {
    auto out = apply_coupling({3.0, 4.0});
    CHECK(out[0] == doctest::Approx(4.0));
    CHECK(out[1] == doctest::Approx(3.0));
}

TEST_CASE("degree-3 coupling reflects with weight 2/3") {
    auto out = apply_coupling({1.0, 0.0, 0.0});
    CHECK(out[0] == doctest::Approx(-1.0 / 3.0));
    CHECK(out[1] == doctest::Approx(2.0 / 3.0));
    CHECK(out[2] == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("opposite incomings cancel in the coupling sum") {
    double a = 0.7;
    auto out = apply_coupling({a, -a, 0.0});
    CHECK(out[0] == -a);
    CHECK(out[1] == a);
    CHECK(out[2] == 0.0);
}

TEST_CASE("coupling preserves the energy and the sum") {
    std::mt19937 gen(5);
    auto uniform = [&gen]() { return 2.0 * static_cast<double>(gen()) / 4294967296.0 - 1.0; };
    for (int trial = 0; trial < 10000; ++trial) {
        std::size_t deg = 2 + gen() % 7;
        std::vector<double> in(deg);
        double sum_in = 0.0, energy_in = 0.0;
        for (auto& v : in) {
            v = uniform();
            sum_in += v;
            energy_in += v * v;
        }
        auto out = apply_coupling(in);
        double sum_out = 0.0;
        for (double v : out) {
            sum_out += v;
        }
        CHECK(std::abs(sum_out - sum_in) <= 1e-12 * std::max(1.0, std::abs(sum_in)));
        CHECK(std::abs(node_energy_residual(in)) <= 1e-12 * std::max(1.0, energy_in));
    }
}

TEST_CASE("zero state with zero boundary stays zero") {
    auto g = chain({1.0, 1.0});
    auto grids = build_grids(g, Physics::frictionless(), 0.125);
    SystemState state = sample_initial_state(g, grids, InitialData{});
    for (int k = 0; k < 20; ++k) {
        state = step(state, g, grids, Physics::frictionless(), zero_bc());
    }
    CHECK(l2_norm_squared(state, grids) == 0.0);
}

TEST_CASE("transport empties a single pipe by t = l/c") {
    auto g = chain({1.0});
    InitialData ic;
    ic.set(0, EdgeProfile::constant(1.0, 0.0));
    RunOptions options;
    options.dt = 0.1;
    options.t_max = 1.0;
    auto result = run(g, Physics::frictionless(), ic, BoundaryData{}, options);
    CHECK(result.l2.back() == 0.0);
    CHECK(l2_norm_squared(result.final_state, result.grids) == 0.0);
}

TEST_CASE("frictionless transport matches hand-traced characteristics") {
    // Compatible ramps vanish at the outflow corners, so the exact solution
    // is plus(t,x) = ic_plus(x - ct) (else 0), minus(t,x) = ic_minus(x + ct).
    const double len = 2.0, c = 2.0, dt = 0.125;
    auto g = chain({len});
    auto ic_plus = [&](double x) { return x * (len - x); };
    auto ic_minus = [&](double x) { return 0.5 * x * x * (len - x); };
    InitialData ic;
    {
        std::vector<std::array<double, 3>> samples;
        int n = static_cast<int>(std::llround(len / (c * dt)));
        for (int j = 0; j <= n; ++j) {
            double x = c * dt * j;
            samples.push_back({x, ic_plus(x), ic_minus(x)});
        }
        ic.set(0, EdgeProfile::from_samples(samples));
    }
    auto grids = build_grids(g, Physics::frictionless(c), dt);
    SystemState state = sample_initial_state(g, grids, ic);
    enforce_node_conditions(state, g, grids, zero_bc());
    const int n = grids.at(0).n_cells;
    for (int k = 1; k <= 2 * n; ++k) {
        state = step(state, g, grids, Physics::frictionless(c), zero_bc());
        for (int j = 0; j <= n; ++j) {
            double expect_plus = j - k >= 0 ? ic_plus((j - k) * c * dt) : 0.0;
            double expect_minus = j + k <= n ? ic_minus((j + k) * c * dt) : 0.0;
            CHECK(state.fields.at(0).plus[j] == expect_plus);
            CHECK(state.fields.at(0).minus[j] == expect_minus);
        }
    }
}

TEST_CASE("a degree-2 node is transparent to transport") {
    // Two unit pipes in series behave exactly like one pipe of length 2.
    const double dt = 0.25;
    auto series = chain({1.0, 1.0});
    auto single = chain({2.0});
    auto profile = [](double x) { return x * (2.0 - x); };
    InitialData ic_series, ic_single;
    {
        std::vector<std::array<double, 3>> a, b, s;
        for (int j = 0; j <= 4; ++j) {
            double x = 0.25 * j;
            a.push_back({x, profile(x), 0.0});
            b.push_back({x, profile(1.0 + x), 0.0});
        }
        for (int j = 0; j <= 8; ++j) {
            double x = 0.25 * j;
            s.push_back({x, profile(x), 0.0});
        }
        ic_series.set(0, EdgeProfile::from_samples(a));
        ic_series.set(1, EdgeProfile::from_samples(b));
        ic_single.set(0, EdgeProfile::from_samples(s));
    }
    RunOptions options;
    options.dt = dt;
    options.t_max = 3.0;
    options.record_states = true;
    auto rs = run(series, Physics::frictionless(), ic_series, BoundaryData{}, options);
    auto r1 = run(single, Physics::frictionless(), ic_single, BoundaryData{}, options);
    for (std::size_t k = 0; k < rs.states.size(); ++k) {
        const auto& fs0 = rs.states[k].fields.at(0);
        const auto& fs1 = rs.states[k].fields.at(1);
        const auto& f = r1.states[k].fields.at(0);
        for (int j = 0; j <= 4; ++j) {
            CHECK(fs0.plus[j] == f.plus[j]);
            CHECK(fs1.plus[j] == f.plus[4 + j]);
            CHECK(fs0.minus[j] == f.minus[j]);
            CHECK(fs1.minus[j] == f.minus[4 + j]);
        }
    }
}

TEST_CASE("the cycle difference data is a discrete fixed point") {
    auto sc = scenarios::cycle_counterexample(1.0, 0.0);
    auto grids = build_grids(sc.graph, sc.physics, 0.25);
    SystemState state = sample_initial_state(sc.graph, grids, sc.plant_ic);
    enforce_node_conditions(state, sc.graph, grids, zero_bc());
    SystemState initial = state;
    for (int k = 0; k < 40; ++k) {
        state = step(state, sc.graph, grids, sc.physics, zero_bc());
    }
    for (const auto& [edge_id, f] : state.fields) {
        for (std::size_t j = 0; j < f.plus.size(); ++j) {
            CHECK(f.plus[j] == initial.fields.at(edge_id).plus[j]);
            CHECK(f.minus[j] == initial.fields.at(edge_id).minus[j]);
        }
    }
}

TEST_CASE("linear friction on a ring matches the exact relaxation") {
    // A self-loop is a periodic pipe. Spatially constant data stays constant
    // in x; plus+minus is conserved and plus-minus relaxes like e^{-2 lambda t}.
    const double lambda = 0.8, p0 = 1.5, m0 = 0.5, t_end = 2.0;
    auto run_ring = [&](double dt) {
        NetworkGraph g;
        g.add_node(0);
        g.add_edge(0, 0, 0, 1.0);
        InitialData ic;
        ic.set(0, EdgeProfile::constant(p0, m0));
        RunOptions options;
        options.dt = dt;
        options.t_max = t_end;
        auto result = run(g, Physics::linear_friction(lambda), ic, BoundaryData{}, options);
        const auto& f = result.final_state.fields.at(0);
        for (std::size_t j = 0; j < f.plus.size(); ++j) {
            CHECK(f.plus[j] == doctest::Approx(f.plus[0]).epsilon(1e-12));
            CHECK(f.plus[j] + f.minus[j] == doctest::Approx(p0 + m0).epsilon(1e-12));
        }
        double diff = f.plus[0] - f.minus[0];
        return std::abs(diff - (p0 - m0) * std::exp(-2.0 * lambda * t_end));
    };
    double err_coarse = run_ring(0.02);
    double err_fine = run_ring(0.01);
    CHECK(err_coarse < 1e-3);
    CHECK(err_coarse / err_fine > 3.5); // second order
}

TEST_CASE("energy is non-increasing with zero boundary data") {
    for (auto physics : {Physics::frictionless(), Physics::linear_friction(0.5),
                         Physics::semilinear_friction(0.7)}) {
        auto sc = scenarios::random_tree(3, 17);
        RunOptions options;
        options.dt = 0.05;
        options.t_max = 10.0;
        auto result = run(sc.graph, physics, sc.plant_ic, BoundaryData{}, options);
        for (std::size_t k = 1; k < result.l2.size(); ++k) {
            CHECK(result.l2[k] <= result.l2[k - 1] + 1e-10 * result.l2.front());
        }
    }
}

TEST_CASE("semilinear blow-up is caught") {
    auto g = chain({1.0});
    InitialData ic;
    ic.set(0, EdgeProfile::constant(2.0, 0.0));
    RunOptions options;
    options.dt = 0.1;
    options.t_max = 2.0;
    try {
        run(g, Physics::semilinear_friction(1e8), ic, BoundaryData{}, options);
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NonFiniteState);
    }
}

TEST_CASE("t_max of zero records only the initial snapshot") {
    auto sc = scenarios::five_pipe_tree();
    RunOptions options;
    options.dt = 0.1;
    options.t_max = 0.0;
    auto result = run(sc.graph, sc.physics, sc.plant_ic, sc.bc, options);
    CHECK(result.times.size() == 1);
    CHECK(result.l2.size() == 1);
}

TEST_CASE("five-pipe node trace steps through (-1/3)^(n+1)") {
    auto sc = scenarios::five_pipe_tree();
    RunOptions options;
    options.dt = 0.125;
    options.t_max = 4.0;
    auto result = run(sc.graph, sc.physics, sc.plant_ic, sc.bc, options);
    const auto& trace = result.node_trace(2, Endpoint::Start); // edge 2 at node 2
    for (std::size_t k = 0; k < trace.times.size(); ++k) {
        int interval = static_cast<int>(std::floor(trace.times[k] + 1e-9)); // l = c = 1
        CHECK(trace.plus[k] ==
              doctest::Approx(scenarios::five_pipe_trace_value(interval)).epsilon(1e-13));
    }
}

TEST_CASE("interior values replay the node trace along characteristics") {
    auto sc = scenarios::five_pipe_tree();
    RunOptions options;
    options.dt = 0.125;
    options.t_max = 4.0;
    options.record_states = true;
    auto result = run(sc.graph, sc.physics, sc.plant_ic, sc.bc, options);
    const auto& trace = result.node_trace(2, Endpoint::Start);
    const int n = result.grids.at(2).n_cells;
    for (std::size_t k = 0; k < result.states.size(); ++k) {
        for (int j = 0; j <= n && j <= static_cast<int>(k); ++j) {
            CHECK(result.states[k].fields.at(2).plus[j] == trace.plus[k - j]);
        }
    }
}

TEST_CASE("cycle with friction tracks the closed-form relaxation") {
    auto sc = scenarios::cycle_counterexample(1.0, 0.5);
    RunOptions options;
    options.dt = 0.01;
    options.t_max = 5.0;
    options.record_states = true;
    auto result = run(sc.graph, sc.physics, sc.plant_ic, sc.bc, options);
    double worst = 0.0;
    for (std::size_t k = 0; k < result.states.size(); ++k) {
        double expect = std::exp(-2.0 * 0.5 * result.times[k]);
        for (EdgeId e : sc.cycle_edges) {
            const auto& f = result.states[k].fields.at(e);
            for (std::size_t j = 0; j < f.plus.size(); ++j) {
                worst = std::max(worst, std::abs(f.plus[j] - expect));
                worst = std::max(worst, std::abs(f.minus[j] + expect));
            }
        }
    }
    CHECK(worst < 1e-4);
}

TEST_CASE("boundary signals evaluate as declared") {
    CHECK(BoundarySignal::zero().eval(3.0) == 0.0);
    CHECK(BoundarySignal::constant(2.5).eval(1.0) == 2.5);
    CHECK(BoundarySignal::sine(2.0, 0.25).eval(1.0) == doctest::Approx(2.0));
    auto table = BoundarySignal::table({0.0, 1.0, 2.0}, {0.0, 4.0, 0.0});
    CHECK(table.eval(0.5) == doctest::Approx(2.0));
    CHECK(table.eval(-1.0) == 0.0);
    CHECK(table.eval(5.0) == 0.0);
}

TEST_CASE("subtract_initial_data is pointwise on the grid") {
    auto g = chain({1.0});
    auto grids = build_grids(g, Physics::frictionless(), 0.25);
    InitialData a, b;
    a.set(0, EdgeProfile::constant(3.0, 1.0));
    b.set(0, EdgeProfile::linear(1.0, 0.5, 2.0, 1.5, 1.0));
    auto d = subtract_initial_data(a, b, g, grids);
    auto [p, m] = d.eval(0, 0.5);
    CHECK(p == doctest::Approx(3.0 - 1.5));
    CHECK(m == doctest::Approx(1.0 - 1.0));
}

} // TEST_SUITE
