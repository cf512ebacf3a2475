#include "netobs/observer.hpp"

#include <algorithm>
#include <cmath>

namespace netobs {

namespace {

// Snaps every sensor of the plan to the nearest interior grid point; snaps
// beyond rounding noise are reported back as warnings.
SensorPlacement snap_to_grid(const NetworkGraph& g, const GridMap& grids,
                             const SensorPlacement& placement,
                             std::vector<std::string>& warnings) {
    SensorPlacement snapped;
    for (const Sensor& s : placement) {
        const EdgeGrid& grid = grids.at(s.edge);
        long cell = std::llround(s.position / grid.dx);
        double snap = std::abs(s.position - static_cast<double>(cell) * grid.dx);
        if (cell <= 0 || cell >= grid.n_cells || snap > grid.dx / 2.0 + 1e-15) {
            throw Error(ErrorCode::SensorOffGrid,
                        "sensor on edge " + std::to_string(s.edge) +
                            " cannot be snapped to an interior grid point");
        }
        if (snap > 1e-12 * g.edge(s.edge).length) {
            warnings.push_back("sensor on edge " + std::to_string(s.edge) + " snapped by " +
                               std::to_string(snap) + " m onto the grid");
        }
        snapped.push_back(Sensor{s.edge, static_cast<double>(cell) * grid.dx});
    }
    return snapped;
}

// Difference R - S on the original edge partition. Split edges recombine
// with the plant's grid indexing: the plus family at the cut point comes
// from the left half, the minus family from the right half.
SystemState diff_on_original(const SystemState& plant, const SystemState& obs,
                             const NetworkGraph& g, const GridMap& grids,
                             const SensorMap& cuts) {
    SystemState diff;
    diff.time = plant.time;
    for (const Edge& e : g.edges()) {
        const EdgeField& rp = plant.fields.at(e.id);
        const int n = grids.at(e.id).n_cells;
        EdgeField d;
        d.plus.resize(n + 1);
        d.minus.resize(n + 1);
        const EdgeCut* cut = cuts.find(e.id);
        if (cut == nullptr) {
            const EdgeField& s = obs.fields.at(e.id);
            for (int j = 0; j <= n; ++j) {
                d.plus[j] = rp.plus[j] - s.plus[j];
                d.minus[j] = rp.minus[j] - s.minus[j];
            }
        } else {
            const EdgeField& left = obs.fields.at(cut->left_edge);
            const EdgeField& right = obs.fields.at(cut->right_edge);
            const int cell = static_cast<int>(left.plus.size()) - 1;
            for (int j = 0; j <= n; ++j) {
                double sp = j <= cell ? left.plus[j] : right.plus[j - cell];
                double sm = j < cell ? left.minus[j] : right.minus[j - cell];
                d.plus[j] = rp.plus[j] - sp;
                d.minus[j] = rp.minus[j] - sm;
            }
        }
        diff.fields[e.id] = std::move(d);
    }
    return diff;
}

} // namespace

const TraceSeries& ObserverRun::diff_node_trace(EdgeId edge, Endpoint end) const {
    auto key = ProbeKey::node_side(plant.graph, edge, end, plant.grids.at(edge).n_cells);
    auto it = diff_traces.find(key);
    if (it == diff_traces.end()) {
        throw Error(ErrorCode::BadInput, "no difference trace at " + key.label());
    }
    return it->second;
}

ObserverRun run_observer(const NetworkGraph& g, const Physics& physics,
                         const InitialData& plant_ic, const InitialData& observer_ic,
                         const BoundaryData& bc, const MeasurementPlan& plan,
                         const RunOptions& options) {
    g.require_valid();
    GridMap plant_grids = build_grids(g, physics, options.dt);
    std::vector<std::string> snap_warnings;
    SensorPlacement snapped = snap_to_grid(g, plant_grids, plan.interior, snap_warnings);

    CutResult cut = snapped.empty() ? CutResult{g, {}} : cut_cycles(g, snapped);

    ObserverRun out;
    out.aux_graph = cut.graph;
    out.sensor_map = cut.sensors;

    RunOptions plant_options = options;
    plant_options.sensors = snapped;
    out.plant = prepare_result(g, physics, plant_options);
    for (auto& w : snap_warnings) {
        out.plant.warnings.push_back(std::move(w));
    }

    RunOptions obs_options = options;
    obs_options.sensors.clear();
    out.observer = prepare_result(cut.graph, physics, obs_options);
    const GridMap& obs_grids = out.observer.grids;

    // Observer initial data on the auxiliary graph: split edges take the
    // original profile restricted to their halves.
    InitialData obs_ic_aux;
    for (const Edge& e : g.edges()) {
        const EdgeCut* c = cut.sensors.find(e.id);
        auto it = observer_ic.edges.find(e.id);
        if (c == nullptr) {
            if (it != observer_ic.edges.end()) {
                obs_ic_aux.set(e.id, it->second);
            }
            continue;
        }
        auto sample_half = [&](EdgeId half_edge, double offset) {
            const EdgeGrid& grid = obs_grids.at(half_edge);
            std::vector<std::array<double, 3>> samples;
            samples.reserve(grid.n_cells + 1);
            for (int j = 0; j <= grid.n_cells; ++j) {
                double x = static_cast<double>(j) * grid.dx;
                auto [p, m] = observer_ic.eval(e.id, offset + x);
                samples.push_back({x, p, m});
            }
            obs_ic_aux.set(half_edge, EdgeProfile::from_samples(std::move(samples)));
        };
        sample_half(c->left_edge, 0.0);
        sample_half(c->right_edge, c->sensor.position);
    }

    // Boundary provider for the observer: plant boundary data at the true
    // boundary nodes, the plant state at the cut points at the artificial
    // nodes. The plant is always stepped first, so plant_state holds the
    // time level the observer is being advanced to.
    SystemState plant_state = sample_initial_state(g, plant_grids, plant_ic);
    BoundaryFn plant_bc = as_boundary_fn(bc);
    enforce_node_conditions(plant_state, g, plant_grids, plant_bc);

    struct Injection {
        EdgeId original_edge;
        int cell;
        bool plus_family;
    };
    std::map<NodeId, Injection> injections;
    for (const EdgeCut& c : cut.sensors.cuts) {
        int cell = static_cast<int>(std::llround(c.sensor.position / plant_grids.at(c.sensor.edge).dx));
        injections[c.left_node] = Injection{c.sensor.edge, cell, false};  // minus at cut
        injections[c.right_node] = Injection{c.sensor.edge, cell, true}; // plus at cut
    }
    BoundaryFn obs_bc = [&](const NodeSide& side, double t) {
        auto it = injections.find(side.node);
        if (it == injections.end()) {
            return bc.eval(side.node, t);
        }
        const EdgeField& f = plant_state.fields.at(it->second.original_edge);
        return it->second.plus_family ? f.plus[it->second.cell] : f.minus[it->second.cell];
    };

    SystemState obs_state = sample_initial_state(cut.graph, obs_grids, obs_ic_aux);
    enforce_node_conditions(obs_state, cut.graph, obs_grids, obs_bc);

    auto record_pair = [&]() {
        record_state(out.plant, plant_state);
        record_state(out.observer, obs_state);
        SystemState diff = diff_on_original(plant_state, obs_state, g, plant_grids, cut.sensors);
        out.times.push_back(diff.time);
        out.l2_diff.push_back(l2_norm_squared(diff, plant_grids));
        for (const Edge& e : g.edges()) {
            int n = plant_grids.at(e.id).n_cells;
            for (Endpoint end : {Endpoint::Start, Endpoint::End}) {
                auto key = ProbeKey::node_side(g, e.id, end, n);
                auto& series = out.diff_traces[key];
                series.probe = key;
                int cell = end == Endpoint::Start ? 0 : n;
                series.times.push_back(diff.time);
                series.plus.push_back(diff.fields.at(e.id).plus[cell]);
                series.minus.push_back(diff.fields.at(e.id).minus[cell]);
            }
        }
        if (options.record_states) {
            out.diff_states.push_back(diff);
        }
        out.final_diff = std::move(diff);
    };

    record_pair();
    const long n_steps =
        options.t_max <= 0.0 ? 0 : static_cast<long>(std::ceil(options.t_max / options.dt - 1e-9));
    SystemState plant_scratch, obs_scratch;
    for (long k = 0; k < n_steps; ++k) {
        // the plant advances first; the observer injection reads plant_state
        // at the level being written
        step_into(plant_state, g, plant_grids, physics, plant_bc, plant_scratch);
        std::swap(plant_state, plant_scratch);
        step_into(obs_state, cut.graph, obs_grids, physics, obs_bc, obs_scratch);
        std::swap(obs_state, obs_scratch);
        record_pair();
    }
    out.plant.final_state = std::move(plant_state);
    out.observer.final_state = std::move(obs_state);
    return out;
}

SimulationResult run_difference_direct(const NetworkGraph& g, const Physics& physics,
                                       const InitialData& diff_ic, const RunOptions& options) {
    return run(g, physics, diff_ic, BoundaryData{}, options);
}

} // namespace netobs
