#ifndef NETOBS_NETWORK_HPP
#define NETOBS_NETWORK_HPP

#include "netobs/errors.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace netobs {

using NodeId = std::int32_t;
using EdgeId = std::int32_t;

/// Endpoint of an edge in local coordinates: Start is x=0 (the `from` node),
/// End is x=length (the `to` node).
enum class Endpoint { Start, End };

struct Edge {
    EdgeId id = -1;
    NodeId from = -1;
    NodeId to = -1;
    double length = 0.0; // meters

    bool operator==(const Edge&) const = default;
};

/// One side of a node: the attachment point of an edge at that node.
/// A self-loop contributes two sides at the same node.
struct NodeSide {
    EdgeId edge = -1;
    NodeId node = -1;
    Endpoint end = Endpoint::Start;

    bool operator==(const NodeSide&) const = default;
    auto operator<=>(const NodeSide&) const = default;
};

struct Sensor {
    EdgeId edge = -1;
    double position = 0.0; // strictly interior: 0 < position < length

    bool operator==(const Sensor&) const = default;
};

/// Interior measurement points, at most one per edge.
using SensorPlacement = std::vector<Sensor>;

struct Violation {
    ErrorCode code;
    std::string message;
};

struct ValidationReport {
    std::vector<Violation> violations;

    bool ok() const { return violations.empty(); }
    std::string to_string() const;
};

/**
 * Directed metric graph. Nodes and edges carry integer ids that are stable
 * across serialization. Boundary nodes are the degree-1 nodes; a declared
 * boundary flag, when present, is checked against the degree by validate().
 *
 * Multigraphs are allowed: parallel edges and self-loops are legal, and a
 * self-loop counts twice in the degree of its node.
 *
 * Treat instances as immutable once built; all accessors are const and safe
 * to share across threads.
 */
class NetworkGraph {
public:
    NetworkGraph() = default;

    void add_node(NodeId id, std::optional<bool> boundary_flag = std::nullopt);
    void add_edge(EdgeId id, NodeId from, NodeId to, double length);

    const std::vector<Edge>& edges() const { return edges_; }
    const std::vector<NodeId>& node_ids() const { return node_ids_; }

    bool has_node(NodeId id) const;
    bool has_edge(EdgeId id) const;
    const Edge& edge(EdgeId id) const;

    /// Number of edge attachments at the node (self-loops count twice).
    int degree(NodeId id) const;
    bool is_boundary(NodeId id) const { return degree(id) == 1; }

    std::vector<NodeId> boundary_nodes() const;
    std::vector<NodeId> inner_nodes() const;
    int inner_node_count() const;

    /// All sides attached to a node, ordered by (edge id, endpoint).
    const std::vector<NodeSide>& sides_at(NodeId id) const;
    NodeSide side(EdgeId edge_id, Endpoint end) const;
    NodeId node_at(EdgeId edge_id, Endpoint end) const;

    /// -1 at the `from` node, +1 at the `to` node.
    int orientation_sign(Endpoint end) const { return end == Endpoint::Start ? -1 : +1; }

    double max_edge_length() const;
    double min_edge_length() const;
    double total_length() const;

    ValidationReport validate() const;
    /// Throws Error with the first violation if the graph is not usable.
    void require_valid() const;

    NodeId next_free_node_id() const;
    EdgeId next_free_edge_id() const;

    /// Structural equality (node ids, edge tuples); declared boundary flags
    /// are validation inputs, not state, and do not participate.
    bool operator==(const NetworkGraph& other) const {
        return node_ids_ == other.node_ids_ && edges_ == other.edges_;
    }

private:
    std::vector<NodeId> node_ids_;                     // sorted
    std::map<NodeId, std::optional<bool>> declared_;   // declared boundary flags
    std::vector<Edge> edges_;                          // sorted by id
    std::map<NodeId, std::vector<NodeSide>> adjacency_;
};

/// Connected and |E| == |V| - 1, i.e. acyclic.
bool is_tree(const NetworkGraph& g);

/**
 * Fundamental cycles of a spanning tree, |E| - |V| + 1 of them.
 * Each cycle is returned as a closed edge walk starting with the non-tree
 * chord. Deterministic: the spanning tree grows from the lowest node id
 * taking edges in id order, and cycles are listed by chord id.
 */
std::vector<std::vector<EdgeId>> cycle_basis(const NetworkGraph& g);

/**
 * An inner node with exactly one incident inner edge, all other incident
 * edges leading to boundary nodes. Lowest id among candidates.
 * Requires a tree with at least two inner nodes.
 */
NodeId find_first_order_boundary_node(const NetworkGraph& g);

/// Removes the boundary edges incident to find_first_order_boundary_node(g)
/// together with their leaf nodes. The pivot becomes a boundary node of the
/// result and the inner-node count drops by exactly one.
NetworkGraph reduce_once(const NetworkGraph& g);

/// Record of one cut: the sensed edge was split into `left` (keeps x in
/// [0, position], ends in boundary node `left_node`) and `right`
/// (x in [position, length], starts in boundary node `right_node`).
struct EdgeCut {
    Sensor sensor;
    EdgeId left_edge = -1;
    EdgeId right_edge = -1;
    NodeId left_node = -1;
    NodeId right_node = -1;
};

struct SensorMap {
    std::vector<EdgeCut> cuts;

    const EdgeCut* find(EdgeId original_edge) const;
};

struct CutResult {
    NetworkGraph graph;
    SensorMap sensors;
};

/**
 * Splits every sensed edge at its sensor position, adding two artificial
 * boundary nodes per cut. With one suitably chosen sensor per cycle the
 * result is a tree. An empty placement leaves the graph unchanged; a
 * non-empty placement must cover every basis cycle and the cut graph must
 * come out acyclic, otherwise CycleUnsensed is thrown.
 */
CutResult cut_cycles(const NetworkGraph& g, const SensorPlacement& placement);

/// Midpoint of the lexicographically-smallest edge of each basis cycle,
/// iterated until all cycles are cut (a shared smallest edge can leave a
/// cycle uncut on the first pass). Returns an empty placement on trees.
SensorPlacement auto_placement(const NetworkGraph& g);

CutResult cut_cycles_auto(const NetworkGraph& g);

/// Canonical JSON form, sorted ids:
/// {"nodes":[{"id":0},...],"edges":[{"id":0,"from":0,"to":1,"length":1.0},...]}
std::string serialize(const NetworkGraph& g);
NetworkGraph parse_network(const std::string& text);

} // namespace netobs

#endif
