#include "netobs/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

namespace netobs {

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

long snap_index(const std::vector<double>& times, double t, double dt, double* snap_error) {
    if (times.empty()) {
        throw Error(ErrorCode::WindowOutOfRange, "empty series");
    }
    long idx = std::lround((t - times.front()) / dt);
    if (idx < 0 || idx >= static_cast<long>(times.size())) {
        throw Error(ErrorCode::WindowOutOfRange,
                    "time " + fmt(t) + " outside recorded range [" + fmt(times.front()) + ", " +
                        fmt(times.back()) + "]");
    }
    if (snap_error != nullptr) {
        *snap_error = std::max(*snap_error, std::abs(times[idx] - t));
    }
    return idx;
}

} // namespace

double edge_l2_norm_squared(const SystemState& state, const GridMap& grids, EdgeId edge) {
    const EdgeField& f = state.fields.at(edge);
    const EdgeGrid& grid = grids.at(edge);
    const std::size_t last = f.plus.size() - 1;
    double acc = 0.5 * (f.plus[0] * f.plus[0] + f.minus[0] * f.minus[0] +
                        f.plus[last] * f.plus[last] + f.minus[last] * f.minus[last]);
    for (std::size_t j = 1; j < last; ++j) {
        acc += f.plus[j] * f.plus[j] + f.minus[j] * f.minus[j];
    }
    return acc * grid.dx;
}

double trace_l2(const TraceSeries& trace, double t0, double t1) {
    if (trace.times.size() < 2) {
        throw Error(ErrorCode::WindowOutOfRange, "trace too short to integrate");
    }
    const double dt = trace.times[1] - trace.times[0];
    if (t1 < t0) {
        throw Error(ErrorCode::WindowOutOfRange, "window end before window start");
    }
    double snap = 0.0;
    long i0 = snap_index(trace.times, t0, dt, &snap);
    long i1 = snap_index(trace.times, t1, dt, &snap);
    auto f = [&](long i) {
        return trace.plus[i] * trace.plus[i] + trace.minus[i] * trace.minus[i];
    };
    double acc = 0.0;
    for (long i = i0; i < i1; ++i) {
        acc += 0.5 * (f(i) + f(i + 1));
    }
    return acc * dt;
}

DecayFit fit_decay(const std::vector<double>& times, const std::vector<double>& l2, double t0,
                   double t1, const FitOptions& options) {
    DecayFit fit;
    fit.window_start = t0;
    fit.window_end = t1;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    long n = 0;
    std::vector<std::pair<double, double>> used;
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (times[i] < t0 || times[i] > t1 || !(l2[i] > options.floor)) {
            continue;
        }
        double y = std::log(l2[i]);
        used.emplace_back(times[i], y);
        sx += times[i];
        sy += y;
        sxx += times[i] * times[i];
        sxy += times[i] * y;
        ++n;
    }
    if (n < 2) {
        throw Error(ErrorCode::NonPositiveL,
                    "fewer than two samples above the floor in [" + fmt(t0) + ", " + fmt(t1) + "]");
    }
    const double denom = static_cast<double>(n) * sxx - sx * sx;
    if (denom == 0.0) {
        throw Error(ErrorCode::NonPositiveL, "degenerate time window");
    }
    const double slope = (static_cast<double>(n) * sxy - sx * sy) / denom;
    const double intercept = (sy - slope * sx) / static_cast<double>(n);
    fit.mu_l2 = slope == 0.0 ? 0.0 : -slope;
    fit.mu_field = fit.mu_l2 / 2.0;
    fit.c1 = std::exp(intercept);
    fit.n_samples = n;

    double ss_res = 0.0, ss_tot = 0.0;
    const double mean_y = sy / static_cast<double>(n);
    for (const auto& [x, y] : used) {
        const double pred = intercept + slope * x;
        ss_res += (y - pred) * (y - pred);
        ss_tot += (y - mean_y) * (y - mean_y);
    }
    fit.r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;

    if (options.two_window.has_value()) {
        const double T = *options.two_window;
        const double dt = times.size() > 1 ? times[1] - times[0] : 0.0;
        double worst = 0.0;
        bool any = false;
        if (dt > 0.0) {
            const long span = std::lround(T / dt);
            for (long i = 0; i + 2 * span < static_cast<long>(times.size()); ++i) {
                if (times[i + span] <= T) {
                    continue; // admissible t must exceed T
                }
                if (l2[i] > options.floor) {
                    worst = std::max(worst, l2[i + 2 * span] / l2[i]);
                    any = true;
                }
            }
        }
        if (any) {
            fit.ctilde = worst;
        }
    }
    return fit;
}

DecayFit fit_decay(const SimulationResult& run, double t0, double t1, const FitOptions& options) {
    return fit_decay(run.times, run.l2, t0, t1, options);
}

double head_fit_end(const std::vector<double>& times, const std::vector<double>& l2,
                    double decades, double floor) {
    if (times.empty() || l2.empty()) {
        throw Error(ErrorCode::NonPositiveL, "empty series");
    }
    const double cutoff = std::max(std::pow(10.0, -decades) * l2.front(), floor);
    for (std::size_t i = 0; i < l2.size(); ++i) {
        if (l2[i] < cutoff) {
            return times[i];
        }
    }
    return times.back();
}

int horizon_multiplier(ObservabilityMode mode, int n_inner) {
    return mode == ObservabilityMode::NoFriction ? n_inner : 2 * n_inner - 1;
}

ObservabilityReport check_observability(const NetworkGraph& g, const GridMap& grids,
                                        const std::vector<double>& times,
                                        const std::vector<double>& l2,
                                        const std::map<ProbeKey, TraceSeries>& traces, double t,
                                        double T, ObservabilityMode mode) {
    ObservabilityReport report;
    report.t = t;
    report.T = T;
    const int n_inner = g.inner_node_count();
    report.required_T =
        static_cast<double>(horizon_multiplier(mode, std::max(1, n_inner))) * g.max_edge_length() /
        grids.c;
    if (T < report.required_T - 1e-12) {
        throw Error(ErrorCode::HorizonTooShort,
                    "T=" + fmt(T) + " below the required horizon " + fmt(report.required_T));
    }
    if (!(t > T)) {
        throw Error(ErrorCode::HorizonTooShort, "need t > T");
    }
    if (t - T < times.front() - 1e-12 || t + T > times.back() + 1e-12) {
        throw Error(ErrorCode::HorizonTooShort,
                    "window [" + fmt(t - T) + ", " + fmt(t + T) + "] not fully recorded");
    }

    long idx = snap_index(times, t, grids.dt, &report.snap_error);
    report.lhs = l2[idx];

    double rhs = 0.0;
    for (NodeId node : g.boundary_nodes()) {
        const NodeSide side = g.sides_at(node).front();
        auto key = ProbeKey::node_side(g, side.edge, side.end, grids.at(side.edge).n_cells);
        auto it = traces.find(key);
        if (it == traces.end()) {
            throw Error(ErrorCode::BadInput, "missing boundary trace at " + key.label());
        }
        rhs += trace_l2(it->second, t - T, t + T);
    }
    report.rhs = rhs;
    if (rhs > 0.0) {
        report.ratio = report.lhs / rhs;
    } else if (report.lhs > 0.0) {
        report.ratio = std::numeric_limits<double>::infinity();
    } else {
        report.ratio = 0.0;
        report.degenerate = true;
    }
    return report;
}

ObservabilityReport check_observability(const SimulationResult& run, double t, double T,
                                        ObservabilityMode mode) {
    return check_observability(run.graph, run.grids, run.times, run.l2, run.traces, t, T, mode);
}

ObservabilityReport check_observability(const ObserverRun& run, double t, double T,
                                        ObservabilityMode mode) {
    return check_observability(run.plant.graph, run.plant.grids, run.times, run.l2_diff,
                               run.diff_traces, t, T, mode);
}

double single_pipe_bound(const Physics& physics, double length) {
    const double lambda = physics.friction == FrictionKind::Linear ? physics.lambda : 0.0;
    return physics.c + 2.5 * lambda * std::exp(2.0 * lambda * length / physics.c);
}

double reversed_pipe_bound(const Physics& physics, double length) {
    const double lambda = physics.friction == FrictionKind::Linear ? physics.lambda : 0.0;
    const double c = physics.c;
    return 2.0 * single_pipe_bound(physics, length) *
           (1.0 / c + 2.5 * lambda * length / (c * c) * std::exp(4.0 * lambda * length / c));
}

PipeInequalityReport check_single_pipe_observability(const SimulationResult& run, EdgeId edge,
                                                     double t) {
    const double len = run.graph.edge(edge).length;
    const double c = run.physics.c;
    if (!(t > len / c)) {
        throw Error(ErrorCode::HorizonTooShort, "need t > l/c = " + fmt(len / c));
    }
    if (run.states.empty()) {
        throw Error(ErrorCode::BadInput, "single-pipe check needs record_states");
    }
    PipeInequalityReport report;
    report.proof_bound = single_pipe_bound(run.physics, len);
    long idx = run.step_of(t);
    report.lhs = edge_l2_norm_squared(run.states.at(idx), run.grids, edge);
    report.rhs = trace_l2(run.node_trace(edge, Endpoint::Start), t - len / c, t + len / c);
    if (report.rhs > 0.0) {
        report.ratio = report.lhs / report.rhs;
    } else if (report.lhs > 0.0) {
        report.ratio = std::numeric_limits<double>::infinity();
    } else {
        report.degenerate = true;
    }
    return report;
}

PipeInequalityReport check_reversed_pipe_inequality(const SimulationResult& run, EdgeId edge,
                                                    double t) {
    const double len = run.graph.edge(edge).length;
    const double c = run.physics.c;
    if (!(t > 2.5 * len / c)) {
        throw Error(ErrorCode::HorizonTooShort, "need t > (5/2) l/c = " + fmt(2.5 * len / c));
    }
    PipeInequalityReport report;
    report.proof_bound = reversed_pipe_bound(run.physics, len);
    report.lhs =
        trace_l2(run.node_trace(edge, Endpoint::End), t - 0.5 * len / c, t + 0.5 * len / c);
    report.rhs =
        trace_l2(run.node_trace(edge, Endpoint::Start), t - 2.5 * len / c, t + 2.5 * len / c);
    if (report.rhs > 0.0) {
        report.ratio = report.lhs / report.rhs;
    } else if (report.lhs > 0.0) {
        report.ratio = std::numeric_limits<double>::infinity();
    } else {
        report.degenerate = true;
    }
    return report;
}

} // namespace netobs
