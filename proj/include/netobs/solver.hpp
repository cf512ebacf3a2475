#ifndef NETOBS_SOLVER_HPP
#define NETOBS_SOLVER_HPP

#include "netobs/network.hpp"

#include <array>
#include <functional>
#include <map>
#include <string>
#include <vector>

namespace netobs {

enum class FrictionKind { None, Linear, Semilinear };

/**
 * Wave speed and friction law for the 2x2 system
 *
 *   d/dt R+ + c d/dx R+ = -sigma(R+ - R-)
 *   d/dt R- - c d/dx R- = +sigma(R+ - R-)
 *
 * with sigma(d) = 0, lambda*d, or gamma*|d|*d.
 */
struct Physics {
    double c = 1.0;
    FrictionKind friction = FrictionKind::None;
    double lambda = 0.0;
    double gamma = 0.0;

    static Physics frictionless(double c = 1.0) { return Physics{c, FrictionKind::None, 0.0, 0.0}; }
    static Physics linear_friction(double lambda, double c = 1.0) {
        return Physics{c, FrictionKind::Linear, lambda, 0.0};
    }
    static Physics semilinear_friction(double gamma, double c = 1.0) {
        return Physics{c, FrictionKind::Semilinear, 0.0, gamma};
    }

    double source(double diff) const;
    void require_valid() const;
};

/// Uniform grid on one edge with dx = c*dt (unit CFL), grid points x_j = j*dx.
struct EdgeGrid {
    EdgeId edge = -1;
    int n_cells = 0;
    double dx = 0.0;
};

struct GridMap {
    double dt = 0.0;
    double c = 1.0;
    std::map<EdgeId, EdgeGrid> by_edge;

    const EdgeGrid& at(EdgeId id) const;
};

/**
 * Chooses n_cells = round(length / (c*dt)) per edge and requires the result
 * to reproduce every length to 1e-9 relative. On failure throws
 * IncommensurableLengths; the message carries a suggested dt derived from
 * the rational gcd of the travel times when one exists.
 */
GridMap build_grids(const NetworkGraph& g, const Physics& physics, double dt);

/// Returns a dt of the form (rational gcd of edge travel times) / k that is
/// <= dt_hint, or 0 when the lengths defeat rational approximation.
double suggest_dt(const NetworkGraph& g, double c, double dt_hint);

struct EdgeField {
    std::vector<double> plus;  // n_cells+1 values
    std::vector<double> minus;
};

struct SystemState {
    double time = 0.0;
    std::map<EdgeId, EdgeField> fields;
};

/// Per-edge initial profile; edges without one start at zero.
struct EdgeProfile {
    enum class Kind { Constant, Samples, ExpRamp };

    Kind kind = Kind::Constant;
    double plus = 0.0;
    double minus = 0.0;
    std::vector<std::array<double, 3>> samples; // (x, plus, minus), ascending x
    double beta = 0.0;   // ExpRamp decay rate
    double length = 0.0; // ExpRamp edge length

    static EdgeProfile constant(double plus, double minus);
    /// Linear profile from endpoint values.
    static EdgeProfile linear(double plus0, double minus0, double plus1, double minus1,
                              double length);
    static EdgeProfile from_samples(std::vector<std::array<double, 3>> samples);
    /// Named preset "exp-ramp": plus = e^{-beta (length-x)} - e^{-beta length},
    /// minus = 0. Vanishes at x=0, so it is coupling-compatible on any edge
    /// whose start side faces an inner node with like profiles.
    static EdgeProfile exp_ramp(double beta, double length);

    std::pair<double, double> eval(double x) const;
};

struct InitialData {
    std::map<EdgeId, EdgeProfile> edges;

    std::pair<double, double> eval(EdgeId edge, double x) const;
    void set(EdgeId edge, EdgeProfile profile) { edges[edge] = std::move(profile); }
};

/// Time signal prescribing the outgoing characteristic at a boundary node.
struct BoundarySignal {
    enum class Kind { Zero, Constant, Sine, Table };

    Kind kind = Kind::Zero;
    double value = 0.0;
    double amplitude = 0.0;
    double frequency = 0.0;                 // Hz; amplitude * sin(2*pi*f*t)
    std::vector<double> times;              // Table: ascending, linear interpolation
    std::vector<double> values;

    static BoundarySignal zero() { return {}; }
    static BoundarySignal constant(double v);
    static BoundarySignal sine(double amplitude, double frequency);
    static BoundarySignal table(std::vector<double> times, std::vector<double> values);

    double eval(double t) const;
};

/// Boundary data per boundary node; nodes without an entry read as zero.
struct BoundaryData {
    std::map<NodeId, BoundarySignal> by_node;

    void set(NodeId node, BoundarySignal signal) { by_node[node] = std::move(signal); }
    double eval(NodeId node, double t) const;
};

/// Callback form: outgoing value at a boundary node side at time t.
using BoundaryFn = std::function<double(const NodeSide&, double)>;

BoundaryFn as_boundary_fn(const BoundaryData& data);

/**
 * Junction map at an inner node: out_e = -in_e + (2/n) * sum_g in_g.
 * The map is an orthogonal reflection, so sum |out|^2 == sum |in|^2.
 */
std::vector<double> apply_coupling(const std::vector<double>& incoming);

/// Signed residual sum_e(|out_e|^2 - |in_e|^2) of one coupling application.
double node_energy_residual(const std::vector<double>& incoming);

/// Samples the initial data onto the grids (no node conditions applied yet).
SystemState sample_initial_state(const NetworkGraph& g, const GridMap& grids,
                                 const InitialData& ic);

/**
 * Overwrites the outgoing slots of `state` with the values forced by the
 * coupling conditions (inner nodes) and the boundary data at state.time.
 * run() applies this once at t=0 so that recorded traces are right-continuous
 * even for initial data that violate the node conditions.
 */
void enforce_node_conditions(SystemState& state, const NetworkGraph& g, const GridMap& grids,
                             const BoundaryFn& bc);

/**
 * Advances one time level dt on the unit-CFL characteristic grid.
 *
 * Friction None is the exact shift. Linear friction integrates the source
 * with the trapezoidal rule; at node points the incoming update and the
 * coupling condition are solved together (closed form). Semilinear friction
 * uses an explicit predictor at the characteristic foot followed by a
 * trapezoidal corrector with the source evaluated at the predictor.
 */
SystemState step(const SystemState& state, const NetworkGraph& g, const GridMap& grids,
                 const Physics& physics, const BoundaryFn& bc);

/// step() into a caller-owned buffer (resized on shape mismatch); every grid
/// point of `next` is overwritten, so buffers can ping-pong across steps.
void step_into(const SystemState& state, const NetworkGraph& g, const GridMap& grids,
               const Physics& physics, const BoundaryFn& bc, SystemState& next);

/// Composite trapezoid of |plus|^2 + |minus|^2 over all edges.
double l2_norm_squared(const SystemState& state, const GridMap& grids);

struct ProbeKey {
    enum class Kind { NodeSide, Sensor };

    Kind kind = Kind::NodeSide;
    EdgeId edge = -1;
    int cell = 0;       // grid index of the probe on that edge
    NodeId node = -1;   // only for node sides
    Endpoint end = Endpoint::Start;

    static ProbeKey node_side(const NetworkGraph& g, EdgeId edge, Endpoint end, int n_cells);
    static ProbeKey sensor(EdgeId edge, int cell);

    std::string label() const;
    auto operator<=>(const ProbeKey&) const = default;
};

/// Time series of (plus, minus) at a fixed spatial point, sampled every step.
struct TraceSeries {
    ProbeKey probe;
    std::vector<double> times;
    std::vector<double> plus;
    std::vector<double> minus;
};

struct RunOptions {
    double dt = 0.0;
    double t_max = 0.0;
    SensorPlacement sensors;    // extra interior probes, snapped to the grid
    bool record_states = false; // keep the full state history
};

struct SimulationResult {
    NetworkGraph graph;
    Physics physics;
    GridMap grids;
    RunOptions options;

    std::vector<double> times;
    std::vector<double> l2;                  // squared L2(E) norm per step
    std::map<ProbeKey, TraceSeries> traces;  // every node side + every sensor
    SystemState final_state;
    std::vector<SystemState> states;         // only when record_states
    std::vector<std::string> warnings;

    const TraceSeries& node_trace(EdgeId edge, Endpoint end) const;
    const TraceSeries& sensor_trace(EdgeId edge) const;
    long step_of(double t) const; // nearest recorded step index
};

/**
 * Full deterministic run: samples the initial data, enforces the node
 * conditions at t=0, then records traces at every node side and sensor and
 * the squared L2(E) norm at every step.
 */
SimulationResult run(const NetworkGraph& g, const Physics& physics, const InitialData& ic,
                     const BoundaryFn& bc, const RunOptions& options);

SimulationResult run(const NetworkGraph& g, const Physics& physics, const InitialData& ic,
                     const BoundaryData& bc, const RunOptions& options);

/// Builds an empty result with grids and probe slots set up (sensors snapped
/// to grid points). Custom stepping loops fill it with record_state().
SimulationResult prepare_result(const NetworkGraph& g, const Physics& physics,
                                const RunOptions& options);

/// Appends one time level to times, l2, traces and (optionally) states.
void record_state(SimulationResult& result, const SystemState& state);

/// Pointwise a - b sampled at the grid points of every edge.
InitialData subtract_initial_data(const InitialData& a, const InitialData& b,
                                  const NetworkGraph& g, const GridMap& grids);

} // namespace netobs

#endif
