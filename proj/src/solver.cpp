#include "netobs/solver.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace netobs {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kLengthRelTol = 1e-9;

std::string fmt(double v) {
    std::ostringstream out;
    out.precision(17);
    out << v;
    return out.str();
}

} // namespace

double Physics::source(double diff) const {
    switch (friction) {
        case FrictionKind::None: return 0.0;
        case FrictionKind::Linear: return lambda * diff;
        case FrictionKind::Semilinear: return gamma * std::abs(diff) * diff;
    }
    return 0.0;
}

void Physics::require_valid() const {
    if (!(c > 0.0) || !std::isfinite(c)) {
        throw Error(ErrorCode::BadInput, "wave speed c must be positive, got " + fmt(c));
    }
    if (lambda < 0.0 || gamma < 0.0 || !std::isfinite(lambda) || !std::isfinite(gamma)) {
        throw Error(ErrorCode::BadInput, "friction parameters must be nonnegative");
    }
}

const EdgeGrid& GridMap::at(EdgeId id) const {
    auto it = by_edge.find(id);
    if (it == by_edge.end()) {
        throw Error(ErrorCode::BadInput, "no grid for edge " + std::to_string(id));
    }
    return it->second;
}

namespace {

// Best rational approximation of x with denominator <= max_den and relative
// error <= tol, by continued fractions. Used only to propose a commensurable
// dt in error messages.
bool approx_rational(double x, long long max_den, double tol, long long& num, long long& den) {
    if (!(x > 0.0) || !std::isfinite(x)) {
        return false;
    }
    long long p0 = 0, q0 = 1, p1 = 1, q1 = 0;
    double frac = x;
    for (int iter = 0; iter < 64; ++iter) {
        double integral = std::floor(frac);
        if (integral > 9e17) {
            return false;
        }
        long long a = static_cast<long long>(integral);
        long long p2 = a * p1 + p0;
        long long q2 = a * q1 + q0;
        if (q2 > max_den) {
            break;
        }
        p0 = p1; q0 = q1; p1 = p2; q1 = q2;
        if (std::abs(x - static_cast<double>(p1) / static_cast<double>(q1)) <= tol * x) {
            num = p1;
            den = q1;
            return true;
        }
        double rem = frac - integral;
        if (rem < 1e-15) {
            break;
        }
        frac = 1.0 / rem;
    }
    if (q1 >= 1 && std::abs(x - static_cast<double>(p1) / static_cast<double>(q1)) <= tol * x) {
        num = p1;
        den = q1;
        return true;
    }
    return false;
}

} // namespace

double suggest_dt(const NetworkGraph& g, double c, double dt_hint) {
    constexpr long long kMaxDen = 1000000;
    long long num = 0, den = 1; // running gcd as a fraction
    bool first = true;
    for (const Edge& e : g.edges()) {
        long long n = 0, d = 0;
        if (!approx_rational(e.length / c, kMaxDen, kLengthRelTol, n, d)) {
            return 0.0;
        }
        if (first) {
            num = n;
            den = d;
            first = false;
            continue;
        }
        // gcd(num/den, n/d) = gcd(num*d, n*den) / (den*d)
        if (den > 2000000000LL / d) {
            return 0.0; // denominator lattice too fine to be useful
        }
        long long a = num * d;
        long long b = n * den;
        long long gg = std::gcd(a, b);
        num = gg;
        den = den * d;
        long long r = std::gcd(num, den);
        num /= r;
        den /= r;
    }
    if (first || num == 0) {
        return 0.0;
    }
    double dt = static_cast<double>(num) / static_cast<double>(den);
    if (dt_hint > 0.0 && dt > dt_hint) {
        dt /= std::ceil(dt / dt_hint);
    }
    return dt;
}

GridMap build_grids(const NetworkGraph& g, const Physics& physics, double dt) {
    g.require_valid();
    physics.require_valid();
    if (!(dt > 0.0) || !std::isfinite(dt)) {
        throw Error(ErrorCode::BadInput, "dt must be positive, got " + fmt(dt));
    }
    GridMap grids;
    grids.dt = dt;
    grids.c = physics.c;
    double dx = physics.c * dt;
    for (const Edge& e : g.edges()) {
        long long n = std::llround(e.length / dx);
        if (n < 1 || std::abs(static_cast<double>(n) * dx - e.length) > kLengthRelTol * e.length) {
            double suggestion = suggest_dt(g, physics.c, dt);
            std::string msg = "edge " + std::to_string(e.id) + " (length " + fmt(e.length) +
                              ") is not an integer number of cells at dt=" + fmt(dt);
            if (suggestion > 0.0) {
                msg += "; suggested dt=" + fmt(suggestion);
            }
            throw Error(ErrorCode::IncommensurableLengths, msg);
        }
        grids.by_edge[e.id] = EdgeGrid{e.id, static_cast<int>(n), dx};
    }
    return grids;
}

EdgeProfile EdgeProfile::constant(double plus, double minus) {
    EdgeProfile p;
    p.kind = Kind::Constant;
    p.plus = plus;
    p.minus = minus;
    return p;
}

EdgeProfile EdgeProfile::linear(double plus0, double minus0, double plus1, double minus1,
                                double length) {
    return from_samples({{0.0, plus0, minus0}, {length, plus1, minus1}});
}

EdgeProfile EdgeProfile::from_samples(std::vector<std::array<double, 3>> samples) {
    if (samples.empty()) {
        throw Error(ErrorCode::BadInput, "sample profile needs at least one point");
    }
    if (!std::is_sorted(samples.begin(), samples.end(),
                        [](const auto& a, const auto& b) { return a[0] < b[0]; })) {
        throw Error(ErrorCode::BadInput, "sample profile must be sorted in x");
    }
    EdgeProfile p;
    p.kind = Kind::Samples;
    p.samples = std::move(samples);
    return p;
}

EdgeProfile EdgeProfile::exp_ramp(double beta, double length) {
    EdgeProfile p;
    p.kind = Kind::ExpRamp;
    p.beta = beta;
    p.length = length;
    return p;
}

std::pair<double, double> EdgeProfile::eval(double x) const {
    if (kind == Kind::Constant) {
        return {plus, minus};
    }
    if (kind == Kind::ExpRamp) {
        return {std::exp(-beta * (length - x)) - std::exp(-beta * length), 0.0};
    }
    if (x <= samples.front()[0]) {
        return {samples.front()[1], samples.front()[2]};
    }
    if (x >= samples.back()[0]) {
        return {samples.back()[1], samples.back()[2]};
    }
    auto it = std::lower_bound(samples.begin(), samples.end(), x,
                               [](const auto& s, double v) { return s[0] < v; });
    const auto& hi = *it;
    const auto& lo = *(it - 1);
    double w = (x - lo[0]) / (hi[0] - lo[0]);
    return {lo[1] + w * (hi[1] - lo[1]), lo[2] + w * (hi[2] - lo[2])};
}

std::pair<double, double> InitialData::eval(EdgeId edge, double x) const {
    auto it = edges.find(edge);
    if (it == edges.end()) {
        return {0.0, 0.0};
    }
    return it->second.eval(x);
}

BoundarySignal BoundarySignal::constant(double v) {
    BoundarySignal s;
    s.kind = Kind::Constant;
    s.value = v;
    return s;
}

BoundarySignal BoundarySignal::sine(double amplitude, double frequency) {
    BoundarySignal s;
    s.kind = Kind::Sine;
    s.amplitude = amplitude;
    s.frequency = frequency;
    return s;
}

BoundarySignal BoundarySignal::table(std::vector<double> times, std::vector<double> values) {
    if (times.size() != values.size() || times.empty()) {
        throw Error(ErrorCode::BadInput, "boundary table needs matching nonempty time/value arrays");
    }
    if (!std::is_sorted(times.begin(), times.end())) {
        throw Error(ErrorCode::BadInput, "boundary table times must be ascending");
    }
    BoundarySignal s;
    s.kind = Kind::Table;
    s.times = std::move(times);
    s.values = std::move(values);
    return s;
}

double BoundarySignal::eval(double t) const {
    switch (kind) {
        case Kind::Zero: return 0.0;
        case Kind::Constant: return value;
        case Kind::Sine: return amplitude * std::sin(2.0 * kPi * frequency * t);
        case Kind::Table: {
            if (t <= times.front()) {
                return values.front();
            }
            if (t >= times.back()) {
                return values.back();
            }
            auto it = std::lower_bound(times.begin(), times.end(), t);
            std::size_t hi = static_cast<std::size_t>(it - times.begin());
            std::size_t lo = hi - 1;
            double w = (t - times[lo]) / (times[hi] - times[lo]);
            return values[lo] + w * (values[hi] - values[lo]);
        }
    }
    return 0.0;
}

double BoundaryData::eval(NodeId node, double t) const {
    auto it = by_node.find(node);
    return it == by_node.end() ? 0.0 : it->second.eval(t);
}

BoundaryFn as_boundary_fn(const BoundaryData& data) {
    return [data](const NodeSide& side, double t) { return data.eval(side.node, t); };
}

std::vector<double> apply_coupling(const std::vector<double>& incoming) {
    const std::size_t n = incoming.size();
    if (n < 2) {
        throw Error(ErrorCode::BadInput, "coupling needs an inner node (degree >= 2)");
    }
    double sum = std::accumulate(incoming.begin(), incoming.end(), 0.0);
    std::vector<double> out(n);
    double mean2 = 2.0 * sum / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = -incoming[i] + mean2;
    }
    return out;
}

double node_energy_residual(const std::vector<double>& incoming) {
    auto out = apply_coupling(incoming);
    double in2 = 0.0, out2 = 0.0;
    for (double v : incoming) {
        in2 += v * v;
    }
    for (double v : out) {
        out2 += v * v;
    }
    return out2 - in2;
}

SystemState sample_initial_state(const NetworkGraph& g, const GridMap& grids,
                                 const InitialData& ic) {
    SystemState state;
    state.time = 0.0;
    for (const Edge& e : g.edges()) {
        const EdgeGrid& grid = grids.at(e.id);
        EdgeField f;
        f.plus.resize(grid.n_cells + 1);
        f.minus.resize(grid.n_cells + 1);
        for (int j = 0; j <= grid.n_cells; ++j) {
            auto [p, m] = ic.eval(e.id, static_cast<double>(j) * grid.dx);
            if (!std::isfinite(p) || !std::isfinite(m)) {
                throw Error(ErrorCode::BadInput,
                            "initial data not finite on edge " + std::to_string(e.id));
            }
            f.plus[j] = p;
            f.minus[j] = m;
        }
        state.fields[e.id] = std::move(f);
    }
    return state;
}

namespace {

// Access the incoming/outgoing slots of a field at a node side.
// At x=l the incoming family is plus and the outgoing family is minus;
// at x=0 the roles are swapped.
double& incoming_slot(EdgeField& f, Endpoint end) {
    return end == Endpoint::End ? f.plus.back() : f.minus.front();
}

double& outgoing_slot(EdgeField& f, Endpoint end) {
    return end == Endpoint::End ? f.minus.back() : f.plus.front();
}

double incoming_value(const EdgeField& f, Endpoint end) {
    return end == Endpoint::End ? f.plus.back() : f.minus.front();
}

// (plus - minus) at a node point, given incoming and outgoing values there.
double oriented_diff(Endpoint end, double in, double out) {
    return end == Endpoint::End ? in - out : out - in;
}

} // namespace

void enforce_node_conditions(SystemState& state, const NetworkGraph& g, const GridMap& grids,
                             const BoundaryFn& bc) {
    (void)grids;
    for (NodeId node : g.node_ids()) {
        const auto& sides = g.sides_at(node);
        if (sides.size() == 1) {
            const NodeSide& s = sides.front();
            outgoing_slot(state.fields.at(s.edge), s.end) = bc(s, state.time);
            continue;
        }
        std::vector<double> in(sides.size());
        for (std::size_t i = 0; i < sides.size(); ++i) {
            in[i] = incoming_value(state.fields.at(sides[i].edge), sides[i].end);
        }
        auto out = apply_coupling(in);
        for (std::size_t i = 0; i < sides.size(); ++i) {
            outgoing_slot(state.fields.at(sides[i].edge), sides[i].end) = out[i];
        }
    }
}

void step_into(const SystemState& state, const NetworkGraph& g, const GridMap& grids,
               const Physics& physics, const BoundaryFn& bc, SystemState& next) {
    const double dt = grids.dt;
    const double t_new = state.time + dt;
    const double alpha = physics.friction == FrictionKind::Linear ? physics.lambda * dt / 2.0 : 0.0;

    next.time = t_new;

    // Per node side: the constant part of the incoming update, i.e. the value
    // transported from the characteristic foot including its half of the
    // trapezoidal source. For the semilinear law also a predictor for the
    // incoming value and the foot source.
    std::map<NodeSide, double> shifted;
    std::map<NodeSide, double> foot_source;
    std::map<NodeSide, double> predictor_in;

    for (const Edge& e : g.edges()) {
        const EdgeGrid& grid = grids.at(e.id);
        const EdgeField& old = state.fields.at(e.id);
        const int n = grid.n_cells;
        EdgeField& fresh = next.fields[e.id];
        if (fresh.plus.size() != static_cast<std::size_t>(n + 1)) {
            fresh.plus.resize(n + 1);
            fresh.minus.resize(n + 1);
        }
        const double* p = old.plus.data();
        const double* m = old.minus.data();
        double* np = fresh.plus.data();
        double* nm = fresh.minus.data();

        switch (physics.friction) {
            case FrictionKind::None: {
                for (int j = 1; j <= n; ++j) {
                    np[j] = p[j - 1];
                }
                for (int j = 0; j < n; ++j) {
                    nm[j] = m[j + 1];
                }
                shifted[NodeSide{e.id, e.to, Endpoint::End}] = np[n];
                shifted[NodeSide{e.id, e.from, Endpoint::Start}] = nm[0];
                break;
            }
            case FrictionKind::Linear: {
                const double w_same = (1.0 + alpha) / (1.0 + 2.0 * alpha);
                const double w_cross = alpha / (1.0 + 2.0 * alpha);
                for (int j = 1; j < n; ++j) {
                    const double a = p[j - 1] - alpha * (p[j - 1] - m[j - 1]);
                    const double b = m[j + 1] + alpha * (p[j + 1] - m[j + 1]);
                    np[j] = w_same * a + w_cross * b;
                    nm[j] = w_cross * a + w_same * b;
                }
                shifted[NodeSide{e.id, e.to, Endpoint::End}] =
                    p[n - 1] - alpha * (p[n - 1] - m[n - 1]);
                shifted[NodeSide{e.id, e.from, Endpoint::Start}] = m[1] + alpha * (p[1] - m[1]);
                break;
            }
            case FrictionKind::Semilinear: {
                for (int j = 1; j < n; ++j) {
                    const double sp = physics.source(p[j - 1] - m[j - 1]);
                    const double sm = physics.source(p[j + 1] - m[j + 1]);
                    const double pred_p = p[j - 1] - dt * sp;
                    const double pred_m = m[j + 1] + dt * sm;
                    const double s_mid = physics.source(pred_p - pred_m);
                    np[j] = p[j - 1] - 0.5 * dt * (sp + s_mid);
                    nm[j] = m[j + 1] + 0.5 * dt * (sm + s_mid);
                }
                const NodeSide end_side{e.id, e.to, Endpoint::End};
                const NodeSide start_side{e.id, e.from, Endpoint::Start};
                const double s_end = physics.source(p[n - 1] - m[n - 1]);
                const double s_start = physics.source(p[1] - m[1]);
                shifted[end_side] = p[n - 1];
                foot_source[end_side] = s_end;
                predictor_in[end_side] = p[n - 1] - dt * s_end;
                shifted[start_side] = m[1];
                foot_source[start_side] = s_start;
                predictor_in[start_side] = m[1] + dt * s_start;
                break;
            }
        }
    }

    // Node pass: set incoming and outgoing values at every node grid point.
    for (NodeId node : g.node_ids()) {
        const auto& sides = g.sides_at(node);
        const std::size_t deg = sides.size();
        std::vector<double> in(deg), out(deg);

        if (physics.friction == FrictionKind::Semilinear) {
            // Predictor for the node source: couple the predicted incomings.
            std::vector<double> pin(deg), pout(deg);
            for (std::size_t i = 0; i < deg; ++i) {
                pin[i] = predictor_in.at(sides[i]);
            }
            if (deg == 1) {
                pout[0] = bc(sides[0], t_new);
            } else {
                pout = apply_coupling(pin);
            }
            for (std::size_t i = 0; i < deg; ++i) {
                const NodeSide& s = sides[i];
                const double s_node =
                    physics.source(oriented_diff(s.end, pin[i], pout[i]));
                const double half = 0.5 * dt * (foot_source.at(s) + s_node);
                in[i] = s.end == Endpoint::End ? shifted.at(s) - half : shifted.at(s) + half;
            }
            if (deg == 1) {
                out[0] = pout[0];
            } else {
                out = apply_coupling(in);
            }
        } else if (deg == 1) {
            const NodeSide& s = sides[0];
            out[0] = bc(s, t_new);
            // (1+alpha) in - alpha out = shifted
            in[0] = (shifted.at(s) + alpha * out[0]) / (1.0 + alpha);
        } else {
            // Trapezoidal incoming update solved together with the coupling
            // condition: (1+2a) in_i - (2a/deg) * S = shifted_i with
            // S = sum(in) = sum(shifted).
            double total = 0.0;
            for (std::size_t i = 0; i < deg; ++i) {
                total += shifted.at(sides[i]);
            }
            const double denom = 1.0 + 2.0 * alpha;
            const double gain = 2.0 * alpha / static_cast<double>(deg);
            for (std::size_t i = 0; i < deg; ++i) {
                in[i] = (shifted.at(sides[i]) + gain * total) / denom;
            }
            out = apply_coupling(in);
        }

        for (std::size_t i = 0; i < deg; ++i) {
            EdgeField& f = next.fields.at(sides[i].edge);
            incoming_slot(f, sides[i].end) = in[i];
            outgoing_slot(f, sides[i].end) = out[i];
            if (!std::isfinite(in[i]) || !std::isfinite(out[i])) {
                throw Error(ErrorCode::NonFiniteState,
                            "state diverged at node " + std::to_string(node) + ", t=" + fmt(t_new));
            }
        }
    }
}

SystemState step(const SystemState& state, const NetworkGraph& g, const GridMap& grids,
                 const Physics& physics, const BoundaryFn& bc) {
    SystemState next;
    step_into(state, g, grids, physics, bc, next);
    return next;
}

double l2_norm_squared(const SystemState& state, const GridMap& grids) {
    double total = 0.0;
    for (const auto& [edge_id, f] : state.fields) {
        const EdgeGrid& grid = grids.at(edge_id);
        const std::size_t last = f.plus.size() - 1;
        double acc = 0.5 * (f.plus[0] * f.plus[0] + f.minus[0] * f.minus[0] +
                            f.plus[last] * f.plus[last] + f.minus[last] * f.minus[last]);
        for (std::size_t j = 1; j < last; ++j) {
            acc += f.plus[j] * f.plus[j] + f.minus[j] * f.minus[j];
        }
        total += acc * grid.dx;
    }
    return total;
}

ProbeKey ProbeKey::node_side(const NetworkGraph& g, EdgeId edge, Endpoint end, int n_cells) {
    ProbeKey k;
    k.kind = Kind::NodeSide;
    k.edge = edge;
    k.cell = end == Endpoint::End ? n_cells : 0;
    k.node = g.node_at(edge, end);
    k.end = end;
    return k;
}

ProbeKey ProbeKey::sensor(EdgeId edge, int cell) {
    ProbeKey k;
    k.kind = Kind::Sensor;
    k.edge = edge;
    k.cell = cell;
    return k;
}

std::string ProbeKey::label() const {
    if (kind == Kind::NodeSide) {
        return "node" + std::to_string(node) + "_edge" + std::to_string(edge) +
               (end == Endpoint::Start ? "_x0" : "_xl");
    }
    return "sensor_edge" + std::to_string(edge) + "_cell" + std::to_string(cell);
}

const TraceSeries& SimulationResult::node_trace(EdgeId edge, Endpoint end) const {
    auto key = ProbeKey::node_side(graph, edge, end, grids.at(edge).n_cells);
    auto it = traces.find(key);
    if (it == traces.end()) {
        throw Error(ErrorCode::BadInput, "no trace recorded at " + key.label());
    }
    return it->second;
}

const TraceSeries& SimulationResult::sensor_trace(EdgeId edge) const {
    for (const auto& [key, series] : traces) {
        if (key.kind == ProbeKey::Kind::Sensor && key.edge == edge) {
            return series;
        }
    }
    throw Error(ErrorCode::BadInput, "no sensor trace on edge " + std::to_string(edge));
}

long SimulationResult::step_of(double t) const {
    if (times.empty()) {
        throw Error(ErrorCode::BadInput, "empty result");
    }
    long idx = std::lround((t - times.front()) / grids.dt);
    return std::clamp(idx, 0L, static_cast<long>(times.size()) - 1);
}

SimulationResult prepare_result(const NetworkGraph& g, const Physics& physics,
                                const RunOptions& options) {
    GridMap grids = build_grids(g, physics, options.dt);

    SimulationResult result;
    result.graph = g;
    result.physics = physics;
    result.grids = grids;
    result.options = options;

    std::vector<ProbeKey> probes;
    for (const Edge& e : g.edges()) {
        int n = grids.at(e.id).n_cells;
        probes.push_back(ProbeKey::node_side(g, e.id, Endpoint::Start, n));
        probes.push_back(ProbeKey::node_side(g, e.id, Endpoint::End, n));
    }
    for (const Sensor& s : options.sensors) {
        const EdgeGrid& grid = grids.at(s.edge);
        long cell = std::llround(s.position / grid.dx);
        double snap = std::abs(s.position - static_cast<double>(cell) * grid.dx);
        if (cell <= 0 || cell >= grid.n_cells || snap > grid.dx / 2.0 + 1e-15) {
            throw Error(ErrorCode::SensorOffGrid,
                        "sensor at edge " + std::to_string(s.edge) + ", x=" + fmt(s.position) +
                            " does not land on an interior grid point (dx=" + fmt(grid.dx) + ")");
        }
        if (snap > 1e-12 * g.edge(s.edge).length) {
            result.warnings.push_back("sensor on edge " + std::to_string(s.edge) + " snapped by " +
                                      fmt(snap) + " m to grid point " + std::to_string(cell));
        }
        probes.push_back(ProbeKey::sensor(s.edge, static_cast<int>(cell)));
    }
    for (const ProbeKey& key : probes) {
        result.traces[key].probe = key;
    }
    return result;
}

void record_state(SimulationResult& result, const SystemState& state) {
    result.times.push_back(state.time);
    double norm2 = l2_norm_squared(state, result.grids);
    if (!std::isfinite(norm2)) {
        throw Error(ErrorCode::NonFiniteState, "state norm diverged at t=" + fmt(state.time));
    }
    result.l2.push_back(norm2);
    for (auto& [key, series] : result.traces) {
        const EdgeField& f = state.fields.at(key.edge);
        series.times.push_back(state.time);
        series.plus.push_back(f.plus[static_cast<std::size_t>(key.cell)]);
        series.minus.push_back(f.minus[static_cast<std::size_t>(key.cell)]);
    }
    if (result.options.record_states) {
        result.states.push_back(state);
    }
}

InitialData subtract_initial_data(const InitialData& a, const InitialData& b,
                                  const NetworkGraph& g, const GridMap& grids) {
    InitialData out;
    for (const Edge& e : g.edges()) {
        const EdgeGrid& grid = grids.at(e.id);
        std::vector<std::array<double, 3>> samples;
        samples.reserve(grid.n_cells + 1);
        for (int j = 0; j <= grid.n_cells; ++j) {
            double x = static_cast<double>(j) * grid.dx;
            auto [pa, ma] = a.eval(e.id, x);
            auto [pb, mb] = b.eval(e.id, x);
            samples.push_back({x, pa - pb, ma - mb});
        }
        out.set(e.id, EdgeProfile::from_samples(std::move(samples)));
    }
    return out;
}

SimulationResult run(const NetworkGraph& g, const Physics& physics, const InitialData& ic,
                     const BoundaryFn& bc, const RunOptions& options) {
    SimulationResult result = prepare_result(g, physics, options);
    const GridMap& grids = result.grids;

    SystemState state = sample_initial_state(g, grids, ic);
    enforce_node_conditions(state, g, grids, bc);

    record_state(result, state);
    const long n_steps =
        options.t_max <= 0.0 ? 0 : static_cast<long>(std::ceil(options.t_max / options.dt - 1e-9));
    SystemState scratch;
    for (long k = 0; k < n_steps; ++k) {
        step_into(state, g, grids, physics, bc, scratch);
        std::swap(state, scratch);
        record_state(result, state);
    }
    result.final_state = std::move(state);
    return result;
}

SimulationResult run(const NetworkGraph& g, const Physics& physics, const InitialData& ic,
                     const BoundaryData& bc, const RunOptions& options) {
    return run(g, physics, ic, as_boundary_fn(bc), options);
}

} // namespace netobs
