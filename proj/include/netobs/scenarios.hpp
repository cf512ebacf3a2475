#ifndef NETOBS_SCENARIOS_HPP
#define NETOBS_SCENARIOS_HPP

#include "netobs/observer.hpp"

#include <optional>
#include <string>
#include <vector>

namespace netobs::scenarios {

/**
 * A ready-to-run configuration: network, physics, plant/observer initial
 * data, boundary data, measurement plan and solver parameters. Builders keep
 * everything commensurable with the default dt.
 */
struct Scenario {
    std::string name;
    std::string description;
    NetworkGraph graph;
    Physics physics;
    InitialData plant_ic;
    InitialData observer_ic; // defaults to zero everywhere
    BoundaryData bc;         // defaults to zero
    MeasurementPlan plan;
    double dt = 0.05;
    double t_max = 40.0;
    /// Head-fit window for decay-rate reports: fit log L down to
    /// 10^-fit_decades of L(0). Scenario-specific because finite-time
    /// synchronizers (stars) only expose a short exponential regime.
    double fit_decades = 8.0;

    /// Field-level decay rate of the closed-form solution, when one exists
    /// (the cycle construction: |delta| = a e^{-2 lambda t} on cycle edges).
    std::optional<double> expected_field_rate;
    std::vector<EdgeId> cycle_edges; // support of the cycle construction

    RunOptions run_options() const {
        RunOptions o;
        o.dt = dt;
        o.t_max = t_max;
        o.sensors = plan.interior;
        return o;
    }
};

/**
 * The 9-node network whose 4-edge cycle avoids the boundary, with the
 * stationary difference data: delta+ = a, delta- = -a on the cycle, zero on
 * the five tails. Constant in time for lambda = 0, decays like a e^{-2 lambda t}
 * for linear friction; boundary traces stay identically zero either way.
 */
Scenario cycle_counterexample(double a, double lambda);

/// cycle_counterexample plus one interior sensor per cycle (auto placement),
/// which restores exponential synchronization of the observer.
Scenario cycle_with_sensor(double a, double lambda);

/**
 * Five equal pipes, six nodes, two inner nodes; initial difference 1 on the
 * middle pipe. The node trace of delta+ on the middle pipe steps through
 * (-1/3)^{n+1}: exponential but never finite-time synchronization.
 */
Scenario five_pipe_tree(double lambda = 0.0);

/// Piecewise-constant trace value on [n l/c, (n+1) l/c) for five_pipe_tree.
double five_pipe_trace_value(int n);

/**
 * Star with `arms` edges around one inner node. The initial data puts an
 * exponential ramp (exp-ramp preset) on every edge, so the decay of L is
 * cleanly log-linear until the star empties at t = 2 lmax / c.
 */
Scenario star(int arms, std::vector<double> lengths = {}, double lambda = 0.0);

/**
 * Random tree with n_inner inner nodes, every inner node of degree >= 3,
 * unit edge lengths, and a random piecewise-linear initial difference that
 * satisfies the coupling conditions at t = 0 exactly (node traces are drawn
 * first, edge profiles interpolate them). Deterministic in the seed.
 */
Scenario random_tree(int n_inner, unsigned seed, double lambda = 0.0);

std::vector<std::string> scenario_names();

/// Lookup by CLI name: cycle, cycle-sensor, five-pipe, star3, random-tree-S
/// (S = seed). Throws BadInput for unknown names.
Scenario by_name(const std::string& name);

} // namespace netobs::scenarios

#endif
