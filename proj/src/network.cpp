#include "netobs/network.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <set>
#include <sstream>

namespace netobs {

const char* error_code_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::DuplicateNodeId: return "DuplicateNodeId";
        case ErrorCode::DuplicateEdgeId: return "DuplicateEdgeId";
        case ErrorCode::DanglingEndpoint: return "DanglingEndpoint";
        case ErrorCode::LengthNonPositive: return "LengthNonPositive";
        case ErrorCode::Disconnected: return "Disconnected";
        case ErrorCode::BoundaryFlagMismatch: return "BoundaryFlagMismatch";
        case ErrorCode::EmptyGraph: return "EmptyGraph";
        case ErrorCode::NotATree: return "NotATree";
        case ErrorCode::TooFewInnerNodes: return "TooFewInnerNodes";
        case ErrorCode::CycleUnsensed: return "CycleUnsensed";
        case ErrorCode::SensorOffGrid: return "SensorOffGrid";
        case ErrorCode::IncommensurableLengths: return "IncommensurableLengths";
        case ErrorCode::NonFiniteState: return "NonFiniteState";
        case ErrorCode::WindowOutOfRange: return "WindowOutOfRange";
        case ErrorCode::HorizonTooShort: return "HorizonTooShort";
        case ErrorCode::NonPositiveL: return "NonPositiveL";
        case ErrorCode::BadInput: return "BadInput";
    }
    return "UnknownError";
}

std::string ValidationReport::to_string() const {
    if (ok()) {
        return "valid";
    }
    std::ostringstream out;
    for (const auto& v : violations) {
        out << error_code_name(v.code) << ": " << v.message << "\n";
    }
    return out.str();
}

void NetworkGraph::add_node(NodeId id, std::optional<bool> boundary_flag) {
    if (has_node(id)) {
        throw Error(ErrorCode::DuplicateNodeId, "node " + std::to_string(id) + " added twice");
    }
    node_ids_.insert(std::upper_bound(node_ids_.begin(), node_ids_.end(), id), id);
    declared_[id] = boundary_flag;
    adjacency_[id];
}

void NetworkGraph::add_edge(EdgeId id, NodeId from, NodeId to, double length) {
    if (has_edge(id)) {
        throw Error(ErrorCode::DuplicateEdgeId, "edge " + std::to_string(id) + " added twice");
    }
    Edge e{id, from, to, length};
    auto pos = std::upper_bound(edges_.begin(), edges_.end(), e,
                                [](const Edge& a, const Edge& b) { return a.id < b.id; });
    edges_.insert(pos, e);
    auto attach = [&](NodeId node, Endpoint end) {
        auto& sides = adjacency_[node];
        NodeSide s{id, node, end};
        sides.insert(std::upper_bound(sides.begin(), sides.end(), s), s);
    };
    attach(from, Endpoint::Start);
    attach(to, Endpoint::End);
}

bool NetworkGraph::has_node(NodeId id) const {
    return std::binary_search(node_ids_.begin(), node_ids_.end(), id);
}

bool NetworkGraph::has_edge(EdgeId id) const {
    return std::binary_search(edges_.begin(), edges_.end(), Edge{id, 0, 0, 0.0},
                              [](const Edge& a, const Edge& b) { return a.id < b.id; });
}

const Edge& NetworkGraph::edge(EdgeId id) const {
    auto it = std::lower_bound(edges_.begin(), edges_.end(), Edge{id, 0, 0, 0.0},
                               [](const Edge& a, const Edge& b) { return a.id < b.id; });
    if (it == edges_.end() || it->id != id) {
        throw Error(ErrorCode::BadInput, "unknown edge id " + std::to_string(id));
    }
    return *it;
}

int NetworkGraph::degree(NodeId id) const {
    auto it = adjacency_.find(id);
    return it == adjacency_.end() ? 0 : static_cast<int>(it->second.size());
}

std::vector<NodeId> NetworkGraph::boundary_nodes() const {
    std::vector<NodeId> out;
    for (NodeId id : node_ids_) {
        if (degree(id) == 1) {
            out.push_back(id);
        }
    }
    return out;
}

std::vector<NodeId> NetworkGraph::inner_nodes() const {
    std::vector<NodeId> out;
    for (NodeId id : node_ids_) {
        if (degree(id) > 1) {
            out.push_back(id);
        }
    }
    return out;
}

int NetworkGraph::inner_node_count() const {
    return static_cast<int>(inner_nodes().size());
}

const std::vector<NodeSide>& NetworkGraph::sides_at(NodeId id) const {
    auto it = adjacency_.find(id);
    if (it == adjacency_.end()) {
        throw Error(ErrorCode::BadInput, "unknown node id " + std::to_string(id));
    }
    return it->second;
}

NodeSide NetworkGraph::side(EdgeId edge_id, Endpoint end) const {
    const Edge& e = edge(edge_id);
    return NodeSide{edge_id, end == Endpoint::Start ? e.from : e.to, end};
}

NodeId NetworkGraph::node_at(EdgeId edge_id, Endpoint end) const {
    const Edge& e = edge(edge_id);
    return end == Endpoint::Start ? e.from : e.to;
}

double NetworkGraph::max_edge_length() const {
    double m = 0.0;
    for (const auto& e : edges_) {
        m = std::max(m, e.length);
    }
    return m;
}

double NetworkGraph::min_edge_length() const {
    double m = std::numeric_limits<double>::infinity();
    for (const auto& e : edges_) {
        m = std::min(m, e.length);
    }
    return edges_.empty() ? 0.0 : m;
}

double NetworkGraph::total_length() const {
    double sum = 0.0;
    for (const auto& e : edges_) {
        sum += e.length;
    }
    return sum;
}

namespace {

// Union-find over node ids.
class DisjointSets {
public:
    explicit DisjointSets(const std::vector<NodeId>& ids) {
        for (NodeId id : ids) {
            parent_[id] = id;
        }
    }

    NodeId find(NodeId x) {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }

    bool unite(NodeId a, NodeId b) {
        NodeId ra = find(a), rb = find(b);
        if (ra == rb) {
            return false;
        }
        parent_[std::max(ra, rb)] = std::min(ra, rb);
        return true;
    }

private:
    std::map<NodeId, NodeId> parent_;
};

} // namespace

ValidationReport NetworkGraph::validate() const {
    ValidationReport report;
    if (node_ids_.empty() || edges_.empty()) {
        report.violations.push_back({ErrorCode::EmptyGraph, "graph needs at least one edge"});
        return report;
    }
    for (const auto& e : edges_) {
        if (!has_node(e.from) || !has_node(e.to)) {
            report.violations.push_back(
                {ErrorCode::DanglingEndpoint,
                 "edge " + std::to_string(e.id) + " references a missing node"});
        }
        if (!(e.length > 0.0) || !std::isfinite(e.length)) {
            report.violations.push_back(
                {ErrorCode::LengthNonPositive,
                 "edge " + std::to_string(e.id) + " has length " + std::to_string(e.length)});
        }
    }
    for (NodeId id : node_ids_) {
        const auto& flag = declared_.at(id);
        if (flag.has_value() && *flag != (degree(id) == 1)) {
            report.violations.push_back(
                {ErrorCode::BoundaryFlagMismatch,
                 "node " + std::to_string(id) + " declared " +
                     (*flag ? "boundary" : "inner") + " but has degree " +
                     std::to_string(degree(id))});
        }
        if (degree(id) == 0) {
            report.violations.push_back(
                {ErrorCode::Disconnected, "node " + std::to_string(id) + " is isolated"});
        }
    }
    DisjointSets sets(node_ids_);
    for (const auto& e : edges_) {
        if (has_node(e.from) && has_node(e.to)) {
            sets.unite(e.from, e.to);
        }
    }
    std::set<NodeId> roots;
    for (NodeId id : node_ids_) {
        roots.insert(sets.find(id));
    }
    if (roots.size() > 1) {
        report.violations.push_back(
            {ErrorCode::Disconnected,
             "graph has " + std::to_string(roots.size()) + " connected components"});
    }
    return report;
}

void NetworkGraph::require_valid() const {
    auto report = validate();
    if (!report.ok()) {
        throw Error(report.violations.front().code, report.violations.front().message);
    }
}

NodeId NetworkGraph::next_free_node_id() const {
    return node_ids_.empty() ? 0 : node_ids_.back() + 1;
}

EdgeId NetworkGraph::next_free_edge_id() const {
    return edges_.empty() ? 0 : edges_.back().id + 1;
}

bool is_tree(const NetworkGraph& g) {
    g.require_valid();
    return g.edges().size() + 1 == g.node_ids().size();
}

std::vector<std::vector<EdgeId>> cycle_basis(const NetworkGraph& g) {
    g.require_valid();
    // Spanning tree by BFS from the lowest node id, edges taken in id order.
    std::map<NodeId, std::pair<EdgeId, NodeId>> tree_parent; // node -> (edge up, parent)
    std::set<NodeId> visited;
    std::set<EdgeId> tree_edges;
    std::deque<NodeId> queue;
    NodeId root = g.node_ids().front();
    visited.insert(root);
    queue.push_back(root);
    while (!queue.empty()) {
        NodeId u = queue.front();
        queue.pop_front();
        for (const NodeSide& s : g.sides_at(u)) {
            const Edge& e = g.edge(s.edge);
            NodeId v = (s.end == Endpoint::Start) ? e.to : e.from;
            if (!visited.count(v)) {
                visited.insert(v);
                tree_edges.insert(e.id);
                tree_parent[v] = {e.id, u};
                queue.push_back(v);
            }
        }
    }

    auto path_to_root = [&](NodeId v) {
        std::vector<EdgeId> path;
        while (tree_parent.count(v)) {
            path.push_back(tree_parent[v].first);
            v = tree_parent[v].second;
        }
        return path;
    };

    std::vector<std::vector<EdgeId>> cycles;
    for (const Edge& e : g.edges()) {
        if (tree_edges.count(e.id)) {
            continue;
        }
        if (e.from == e.to) {
            cycles.push_back({e.id});
            continue;
        }
        // Chord closes the tree path between its endpoints: drop the shared
        // tail of the two root paths.
        std::vector<EdgeId> pa = path_to_root(e.from);
        std::vector<EdgeId> pb = path_to_root(e.to);
        while (!pa.empty() && !pb.empty() && pa.back() == pb.back()) {
            pa.pop_back();
            pb.pop_back();
        }
        std::vector<EdgeId> cycle{e.id};
        cycle.insert(cycle.end(), pb.begin(), pb.end());
        cycle.insert(cycle.end(), pa.rbegin(), pa.rend());
        cycles.push_back(std::move(cycle));
    }
    return cycles;
}

namespace {

bool is_boundary_edge(const NetworkGraph& g, const Edge& e) {
    return g.is_boundary(e.from) || g.is_boundary(e.to);
}

} // namespace

NodeId find_first_order_boundary_node(const NetworkGraph& g) {
    if (!is_tree(g)) {
        throw Error(ErrorCode::NotATree, "reduction step needs a tree");
    }
    if (g.inner_node_count() < 2) {
        throw Error(ErrorCode::TooFewInnerNodes,
                    "reduction step needs at least 2 inner nodes, got " +
                        std::to_string(g.inner_node_count()));
    }
    for (NodeId id : g.inner_nodes()) {
        int inner_edges = 0;
        for (const NodeSide& s : g.sides_at(id)) {
            if (!is_boundary_edge(g, g.edge(s.edge))) {
                ++inner_edges;
            }
        }
        if (inner_edges == 1) {
            return id; // node ids are iterated ascending, first hit is lowest
        }
    }
    throw Error(ErrorCode::NotATree, "no first-order boundary node found"); // unreachable on trees
}

NetworkGraph reduce_once(const NetworkGraph& g) {
    NodeId pivot = find_first_order_boundary_node(g);
    std::set<EdgeId> drop_edges;
    std::set<NodeId> drop_nodes;
    for (const NodeSide& s : g.sides_at(pivot)) {
        const Edge& e = g.edge(s.edge);
        if (is_boundary_edge(g, e)) {
            drop_edges.insert(e.id);
            drop_nodes.insert(g.is_boundary(e.from) ? e.from : e.to);
        }
    }
    NetworkGraph out;
    for (NodeId id : g.node_ids()) {
        if (!drop_nodes.count(id)) {
            out.add_node(id);
        }
    }
    for (const Edge& e : g.edges()) {
        if (!drop_edges.count(e.id)) {
            out.add_edge(e.id, e.from, e.to, e.length);
        }
    }
    return out;
}

const EdgeCut* SensorMap::find(EdgeId original_edge) const {
    for (const auto& cut : cuts) {
        if (cut.sensor.edge == original_edge) {
            return &cut;
        }
    }
    return nullptr;
}

CutResult cut_cycles(const NetworkGraph& g, const SensorPlacement& placement) {
    g.require_valid();
    if (placement.empty()) {
        return CutResult{g, {}};
    }
    std::set<EdgeId> sensed;
    for (const Sensor& s : placement) {
        const Edge& e = g.edge(s.edge);
        if (!(s.position > 0.0) || !(s.position < e.length)) {
            throw Error(ErrorCode::SensorOffGrid,
                        "sensor position " + std::to_string(s.position) + " not interior to edge " +
                            std::to_string(s.edge));
        }
        if (!sensed.insert(s.edge).second) {
            throw Error(ErrorCode::BadInput,
                        "edge " + std::to_string(s.edge) + " carries more than one sensor");
        }
    }
    for (const auto& cycle : cycle_basis(g)) {
        bool covered = false;
        for (EdgeId e : cycle) {
            covered = covered || sensed.count(e);
        }
        if (!covered) {
            std::string ids;
            for (EdgeId e : cycle) {
                ids += (ids.empty() ? "" : ",") + std::to_string(e);
            }
            throw Error(ErrorCode::CycleUnsensed, "basis cycle {" + ids + "} has no sensor");
        }
    }

    SensorPlacement ordered = placement;
    std::sort(ordered.begin(), ordered.end(), [](const Sensor& a, const Sensor& b) {
        return a.edge < b.edge;
    });

    NetworkGraph cut;
    for (NodeId id : g.node_ids()) {
        cut.add_node(id);
    }
    NodeId next_node = g.next_free_node_id();
    EdgeId next_edge = g.next_free_edge_id();
    SensorMap map;
    for (const Edge& e : g.edges()) {
        auto it = std::find_if(ordered.begin(), ordered.end(),
                               [&](const Sensor& s) { return s.edge == e.id; });
        if (it == ordered.end()) {
            cut.add_edge(e.id, e.from, e.to, e.length);
            continue;
        }
        EdgeCut c;
        c.sensor = *it;
        c.left_node = next_node++;
        c.right_node = next_node++;
        c.left_edge = next_edge++;
        c.right_edge = next_edge++;
        cut.add_node(c.left_node);
        cut.add_node(c.right_node);
        cut.add_edge(c.left_edge, e.from, c.left_node, it->position);
        cut.add_edge(c.right_edge, c.right_node, e.to, e.length - it->position);
        map.cuts.push_back(c);
    }
    if (!is_tree(cut) && !cycle_basis(cut).empty()) {
        throw Error(ErrorCode::CycleUnsensed, "placement leaves at least one cycle uncut");
    }
    return CutResult{std::move(cut), std::move(map)};
}

SensorPlacement auto_placement(const NetworkGraph& g) {
    SensorPlacement placement;
    NetworkGraph current = g;
    // Midpoint of the smallest edge id per basis cycle. When two cycles share
    // that edge a single cut handles only one of them, so iterate on the cut
    // graph until acyclic.
    while (true) {
        auto cycles = cycle_basis(current);
        if (cycles.empty()) {
            break;
        }
        std::set<EdgeId> chosen;
        for (const auto& cycle : cycles) {
            EdgeId best = *std::min_element(cycle.begin(), cycle.end());
            chosen.insert(best);
        }
        for (EdgeId id : chosen) {
            placement.push_back(Sensor{id, g.edge(id).length / 2.0});
        }
        // Rebuild with the chosen edges removed to find remaining cycles; the
        // removal is only a probe, the real cut happens in cut_cycles.
        NetworkGraph probe;
        for (NodeId nid : current.node_ids()) {
            probe.add_node(nid);
        }
        std::set<EdgeId> all_chosen;
        for (const Sensor& s : placement) {
            all_chosen.insert(s.edge);
        }
        for (const Edge& e : g.edges()) {
            if (!all_chosen.count(e.id)) {
                probe.add_edge(e.id, e.from, e.to, e.length);
            }
        }
        bool acyclic = probe.edges().size() + 1 == probe.node_ids().size();
        if (acyclic) {
            break;
        }
        current = probe;
    }
    std::sort(placement.begin(), placement.end(),
              [](const Sensor& a, const Sensor& b) { return a.edge < b.edge; });
    return placement;
}

CutResult cut_cycles_auto(const NetworkGraph& g) {
    return cut_cycles(g, auto_placement(g));
}

std::string serialize(const NetworkGraph& g) {
    nlohmann::ordered_json doc;
    doc["nodes"] = nlohmann::ordered_json::array();
    for (NodeId id : g.node_ids()) {
        doc["nodes"].push_back({{"id", id}});
    }
    doc["edges"] = nlohmann::ordered_json::array();
    for (const Edge& e : g.edges()) {
        doc["edges"].push_back(
            {{"id", e.id}, {"from", e.from}, {"to", e.to}, {"length", e.length}});
    }
    return doc.dump(2) + "\n";
}

NetworkGraph parse_network(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& ex) {
        throw Error(ErrorCode::BadInput, std::string("network file is not valid JSON: ") + ex.what());
    }
    NetworkGraph g;
    try {
        for (const auto& n : doc.at("nodes")) {
            std::optional<bool> flag;
            if (n.contains("boundary")) {
                flag = n.at("boundary").get<bool>();
            }
            NodeId id = n.at("id").get<NodeId>();
            if (id < 0) {
                throw Error(ErrorCode::BadInput, "node ids must be non-negative");
            }
            g.add_node(id, flag);
        }
        for (const auto& e : doc.at("edges")) {
            EdgeId id = e.at("id").get<EdgeId>();
            if (id < 0) {
                throw Error(ErrorCode::BadInput, "edge ids must be non-negative");
            }
            g.add_edge(id, e.at("from").get<NodeId>(), e.at("to").get<NodeId>(),
                       e.at("length").get<double>());
        }
    } catch (const nlohmann::json::exception& ex) {
        throw Error(ErrorCode::BadInput, std::string("malformed network file: ") + ex.what());
    }
    return g;
}

} // namespace netobs
