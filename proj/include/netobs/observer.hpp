#ifndef NETOBS_OBSERVER_HPP
#define NETOBS_OBSERVER_HPP

#include "netobs/solver.hpp"

namespace netobs {

/// Where the observer reads the plant. Every boundary node is always
/// measured; interior sensors are optional (one per edge at most). The noise
/// slot is reserved; measurements are noiseless and delay-free.
struct MeasurementPlan {
    enum class Noise { None };

    SensorPlacement interior;
    Noise noise = Noise::None;
};

/**
 * Coupled plant/observer simulation.
 *
 * The plant runs on the original graph. The observer runs on the auxiliary
 * graph in which every sensed edge is cut at its (grid-snapped) sensor
 * position; at the two artificial boundary nodes the observer is driven by
 * the plant state at the cut point, at the true boundary nodes by the same
 * boundary data as the plant. The difference R - S is assembled back onto
 * the original edge partition each step.
 */
struct ObserverRun {
    SimulationResult plant;
    SimulationResult observer;          // on aux_graph
    NetworkGraph aux_graph;
    SensorMap sensor_map;

    std::vector<double> times;
    std::vector<double> l2_diff;        // squared L2(E) norm of R - S
    std::map<ProbeKey, TraceSeries> diff_traces; // at original node sides
    SystemState final_diff;
    std::vector<SystemState> diff_states;        // when record_states

    const TraceSeries& diff_node_trace(EdgeId edge, Endpoint end) const;
};

ObserverRun run_observer(const NetworkGraph& g, const Physics& physics,
                         const InitialData& plant_ic, const InitialData& observer_ic,
                         const BoundaryData& bc, const MeasurementPlan& plan,
                         const RunOptions& options);

/// Simulates the difference system directly: the given initial difference
/// with homogeneous boundary data on the original graph. For None/Linear
/// friction this matches run_observer's R - S by linearity.
SimulationResult run_difference_direct(const NetworkGraph& g, const Physics& physics,
                                       const InitialData& diff_ic, const RunOptions& options);

} // namespace netobs

#endif
