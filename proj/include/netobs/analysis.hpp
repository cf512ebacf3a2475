#ifndef NETOBS_ANALYSIS_HPP
#define NETOBS_ANALYSIS_HPP

#include "netobs/observer.hpp"
#include "netobs/solver.hpp"

#include <limits>
#include <optional>

namespace netobs {

/// Trapezoid of |plus|^2 + |minus|^2 over one edge at a fixed time.
double edge_l2_norm_squared(const SystemState& state, const GridMap& grids, EdgeId edge);

/**
 * Time integral of |plus|^2 + |minus|^2 of a trace over [t0, t1] by the
 * trapezoidal rule. Window ends snap to the nearest recorded step; throws
 * WindowOutOfRange when the window leaves the recorded support.
 */
double trace_l2(const TraceSeries& trace, double t0, double t1);

struct DecayFit {
    double mu_l2 = 0.0;    // fitted decay rate of the squared-norm series
    double mu_field = 0.0; // mu_l2 / 2: the amplitude-level rate
    double c1 = 0.0;       // fitted prefactor exp(intercept)
    double r2 = 0.0;
    double window_start = 0.0;
    double window_end = 0.0;
    long n_samples = 0;
    // max L(t+T)/L(t-T) over admissible t, when a two-sided window T is given
    double ctilde = std::numeric_limits<double>::quiet_NaN();
};

struct FitOptions {
    double floor = 1e-24;                 // samples below this are excluded
    std::optional<double> two_window;     // T for the ctilde report
};

/**
 * Least-squares line on (t, log L(t)) over [t0, t1], restricted to samples
 * above the floor. Throws NonPositiveL when fewer than two samples qualify.
 */
DecayFit fit_decay(const std::vector<double>& times, const std::vector<double>& l2, double t0,
                   double t1, const FitOptions& options = {});

DecayFit fit_decay(const SimulationResult& run, double t0, double t1,
                   const FitOptions& options = {});

/// End of the head-fit window: the first time the series drops below
/// 10^-decades of its initial value (or below the absolute floor), else the
/// last recorded time. Pairs with fit_decay(times.front(), head_fit_end(...)).
double head_fit_end(const std::vector<double>& times, const std::vector<double>& l2,
                    double decades, double floor = 1e-24);

enum class ObservabilityMode { NoFriction, Friction };

/// Horizon multiplier b_N: N inner nodes need T >= b_N * lmax / c, with
/// b_N = N without friction and b_N = 2N - 1 with friction.
int horizon_multiplier(ObservabilityMode mode, int n_inner);

struct ObservabilityReport {
    double t = 0.0;
    double T = 0.0;
    double required_T = 0.0;
    double lhs = 0.0;   // squared L2(E) norm at time t
    double rhs = 0.0;   // boundary-trace energy over [t-T, t+T]
    double ratio = 0.0; // lhs / rhs; +inf flags an observability failure
    bool degenerate = false; // lhs == rhs == 0
    double snap_error = 0.0;
};

/**
 * Evaluates both sides of the network observability inequality on a recorded
 * difference evolution. Throws HorizonTooShort when T is below the required
 * horizon or [t-T, t+T] leaves the recorded range.
 */
ObservabilityReport check_observability(const NetworkGraph& g, const GridMap& grids,
                                        const std::vector<double>& times,
                                        const std::vector<double>& l2,
                                        const std::map<ProbeKey, TraceSeries>& traces, double t,
                                        double T, ObservabilityMode mode);

/// On a direct difference run (zero boundary data).
ObservabilityReport check_observability(const SimulationResult& run, double t, double T,
                                        ObservabilityMode mode);

/// On a plant/observer pair, using the recombined difference traces.
ObservabilityReport check_observability(const ObserverRun& run, double t, double T,
                                        ObservabilityMode mode);

struct PipeInequalityReport {
    double lhs = 0.0;
    double rhs = 0.0;
    double ratio = 0.0;
    double proof_bound = 0.0; // constant from the corresponding proof
    bool degenerate = false;
};

/// Proof constant of the single-pipe inequality: c + (5/2) lambda e^{2 lambda l / c}.
double single_pipe_bound(const Physics& physics, double length);

/// Proof constant of the reversed inequality:
/// 2 C (1/c + (5 lambda l)/(2 c^2) e^{4 lambda l / c}) with C the single-pipe bound.
double reversed_pipe_bound(const Physics& physics, double length);

/**
 * Single-pipe observability: interior energy of one edge at time t against
 * the x=0 boundary trace over [t - l/c, t + l/c]. Needs record_states.
 */
PipeInequalityReport check_single_pipe_observability(const SimulationResult& run, EdgeId edge,
                                                     double t);

/**
 * Reversed inequality: the x=l trace over [t - l/2c, t + l/2c] against the
 * x=0 trace over [t - 5l/2c, t + 5l/2c]. Requires t > (5/2) l/c.
 */
PipeInequalityReport check_reversed_pipe_inequality(const SimulationResult& run, EdgeId edge,
                                                    double t);

} // namespace netobs

#endif
