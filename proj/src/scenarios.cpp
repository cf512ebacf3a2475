#include "netobs/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

namespace netobs::scenarios {

namespace {

Physics physics_for(double lambda) {
    return lambda > 0.0 ? Physics::linear_friction(lambda) : Physics::frictionless();
}

} // namespace

Scenario cycle_counterexample(double a, double lambda) {
    Scenario s;
    s.name = "cycle";
    s.description = "4-edge cycle with 5 tails; stationary difference data on the cycle";
    // Cycle 1 -> 3 -> 4 -> 2 -> 1 (edges 0..3), tails 4..8 to the boundary.
    for (NodeId n = 0; n <= 8; ++n) {
        s.graph.add_node(n);
    }
    s.graph.add_edge(0, 1, 3, 1.0);
    s.graph.add_edge(1, 3, 4, 1.0);
    s.graph.add_edge(2, 4, 2, 1.0);
    s.graph.add_edge(3, 2, 1, 1.0);
    s.graph.add_edge(4, 0, 1, 1.0);
    s.graph.add_edge(5, 2, 5, 1.0);
    s.graph.add_edge(6, 2, 6, 1.0);
    s.graph.add_edge(7, 3, 7, 1.0);
    s.graph.add_edge(8, 4, 8, 1.0);
    s.cycle_edges = {0, 1, 2, 3};
    for (EdgeId e : s.cycle_edges) {
        s.plant_ic.set(e, EdgeProfile::constant(a, -a));
    }
    s.physics = physics_for(lambda);
    s.expected_field_rate = 2.0 * lambda;
    s.dt = 0.05;
    s.t_max = 40.0;
    return s;
}

Scenario cycle_with_sensor(double a, double lambda) {
    Scenario s = cycle_counterexample(a, lambda);
    s.name = "cycle-sensor";
    s.description = "cycle network with one interior sensor cutting the cycle";
    s.plan.interior = auto_placement(s.graph);
    s.expected_field_rate.reset(); // the cut changes the dynamics
    return s;
}

Scenario five_pipe_tree(double lambda) {
    Scenario s;
    s.name = "five-pipe";
    s.description = "five equal pipes, six nodes; difference 1 on the middle pipe";
    for (NodeId n = 0; n <= 5; ++n) {
        s.graph.add_node(n);
    }
    s.graph.add_edge(0, 0, 2, 1.0);
    s.graph.add_edge(1, 1, 2, 1.0);
    s.graph.add_edge(2, 2, 3, 1.0); // the middle pipe
    s.graph.add_edge(3, 3, 4, 1.0);
    s.graph.add_edge(4, 3, 5, 1.0);
    s.plant_ic.set(2, EdgeProfile::constant(1.0, 1.0));
    s.physics = physics_for(lambda);
    s.dt = 0.01;
    s.t_max = 40.0;
    s.fit_decades = 8.0;
    return s;
}

double five_pipe_trace_value(int n) {
    return std::pow(-1.0 / 3.0, n + 1);
}

Scenario star(int arms, std::vector<double> lengths, double lambda) {
    if (arms < 2) {
        throw Error(ErrorCode::BadInput, "a star needs at least 2 arms");
    }
    if (lengths.empty()) {
        lengths.assign(arms, 1.0);
    }
    if (static_cast<int>(lengths.size()) != arms) {
        throw Error(ErrorCode::BadInput, "need one length per arm");
    }
    Scenario s;
    s.name = "star" + std::to_string(arms);
    s.description = "star network, exponential peak at the center on both families";
    s.graph.add_node(0);
    for (int i = 0; i < arms; ++i) {
        s.graph.add_node(i + 1);
        s.graph.add_edge(i, 0, i + 1, lengths[i]);
    }
    // plus = e^{-beta(l-x)} leaves through the leaf with amplitude e^{-beta c t};
    // minus = e^{-beta(l+x)} reaches the center, re-emits, and its exit
    // amplitude e^{-beta c t} continues the same envelope on [l/c, 2l/c].
    // The decay of L is one exponential slope of ~2 beta l / ln(10) decades.
    // The center plus sample comes from the coupling map and the leaf minus
    // sample is the boundary value, so the data are compatible to the bit.
    const double beta = 12.0;
    s.dt = 0.005;
    std::vector<double> center_in(arms);
    for (int i = 0; i < arms; ++i) {
        center_in[i] = std::exp(-beta * lengths[i]);
    }
    std::vector<double> center_out = apply_coupling(center_in);
    for (int i = 0; i < arms; ++i) {
        const int cells = static_cast<int>(std::llround(lengths[i] / s.dt));
        std::vector<std::array<double, 3>> samples;
        samples.reserve(cells + 1);
        for (int j = 0; j <= cells; ++j) {
            double x = lengths[i] * static_cast<double>(j) / static_cast<double>(cells);
            samples.push_back({x, std::exp(-beta * (lengths[i] - x)),
                               std::exp(-beta * (lengths[i] + x))});
        }
        samples.front()[1] = center_out[i];
        samples.back()[2] = 0.0;
        s.plant_ic.set(i, EdgeProfile::from_samples(std::move(samples)));
    }
    s.physics = physics_for(lambda);
    s.t_max = 8.0;
    // With friction, conversion between the families surfaces near decade 4
    // of the decay; the single-rate regime is the first three decades.
    s.fit_decades = 3.0;
    return s;
}

Scenario random_tree(int n_inner, unsigned seed, double lambda) {
    if (n_inner < 1) {
        throw Error(ErrorCode::BadInput, "need at least one inner node");
    }
    Scenario s;
    s.name = "random-tree-" + std::to_string(seed);
    s.description = "random tree, inner degrees >= 3, compatible piecewise-linear difference";
    std::mt19937 gen(seed);
    auto uniform = [&gen]() { return static_cast<double>(gen()) * (1.0 / 4294967296.0); };

    // Skeleton tree over the inner nodes, then leaves until every inner node
    // has degree >= 3 (degree-2 nodes are transparent to the coupling and
    // whole trees of them synchronize in finite time).
    EdgeId next_edge = 0;
    std::map<NodeId, int> degree;
    for (NodeId n = 0; n < n_inner; ++n) {
        s.graph.add_node(n);
    }
    for (NodeId n = 1; n < n_inner; ++n) {
        NodeId parent = static_cast<NodeId>(uniform() * n);
        s.graph.add_edge(next_edge++, parent, n, 1.0);
        degree[parent]++;
        degree[n]++;
    }
    NodeId next_node = n_inner;
    for (NodeId n = 0; n < n_inner; ++n) {
        int leaves = std::max(0, 3 - degree[n]) + (uniform() < 0.3 ? 1 : 0);
        for (int k = 0; k < leaves; ++k) {
            s.graph.add_node(next_node);
            s.graph.add_edge(next_edge++, n, next_node, 1.0);
            ++next_node;
        }
    }

    // Compatible initial difference: draw the incoming node values, derive
    // the outgoing ones from the coupling (zero at the boundary), then
    // interpolate linearly along each edge.
    std::map<NodeSide, double> in_value, out_value;
    for (NodeId node : s.graph.node_ids()) {
        const auto& sides = s.graph.sides_at(node);
        std::vector<double> in(sides.size());
        for (auto& v : in) {
            v = 2.0 * uniform() - 1.0;
        }
        std::vector<double> out =
            sides.size() == 1 ? std::vector<double>{0.0} : apply_coupling(in);
        for (std::size_t i = 0; i < sides.size(); ++i) {
            in_value[sides[i]] = in[i];
            out_value[sides[i]] = out[i];
        }
    }
    for (const Edge& e : s.graph.edges()) {
        NodeSide start{e.id, e.from, Endpoint::Start};
        NodeSide end{e.id, e.to, Endpoint::End};
        s.plant_ic.set(e.id, EdgeProfile::linear(out_value[start], in_value[start],
                                                 in_value[end], out_value[end], e.length));
    }
    s.physics = physics_for(lambda);
    s.dt = 0.02;
    s.t_max = 120.0;
    s.fit_decades = 8.0;
    return s;
}

std::vector<std::string> scenario_names() {
    return {"cycle", "cycle-sensor", "five-pipe", "star3", "random-tree-1", "random-tree-2",
            "random-tree-3", "random-tree-4", "random-tree-5"};
}

Scenario by_name(const std::string& name) {
    if (name == "cycle") {
        return cycle_counterexample(1.0, 0.0);
    }
    if (name == "cycle-sensor") {
        return cycle_with_sensor(1.0, 0.0);
    }
    if (name == "five-pipe") {
        return five_pipe_tree();
    }
    if (name == "star3") {
        return star(3);
    }
    const std::string prefix = "random-tree-";
    if (name.rfind(prefix, 0) == 0) {
        try {
            unsigned seed = static_cast<unsigned>(std::stoul(name.substr(prefix.size())));
            return random_tree(3 + static_cast<int>(seed % 3), seed);
        } catch (const std::exception&) {
            throw Error(ErrorCode::BadInput, "bad random-tree seed in '" + name + "'");
        }
    }
    throw Error(ErrorCode::BadInput, "unknown scenario '" + name + "'");
}

} // namespace netobs::scenarios
