#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <set>
#include <vector>

namespace deanon {

using NodeId = std::int64_t;
using NodeSet = std::set<NodeId>;

/// Undirected simple graph over arbitrary non-negative integer node ids.
/// Immutable once built; all read paths are safe for concurrent use.
///
/// Adjacency is kept in ordered containers so that every iteration order is
/// deterministic, which seeded sampling and canonical writers depend on.
class Graph {
public:
    Graph() = default;

    void add_node(NodeId v);

    /// Inserts the edge (u, v), creating endpoints as needed.
    /// Returns false when the edge already exists. Self-loops are rejected.
    bool add_edge(NodeId u, NodeId v);

    bool has_node(NodeId v) const { return adjacency_.count(v) != 0; }
    bool has_edge(NodeId u, NodeId v) const;

    std::size_t node_count() const { return adjacency_.size(); }
    std::size_t edge_count() const { return edge_count_; }
    bool empty() const { return adjacency_.empty(); }

    /// Neighbor set of v. Throws MissingNodeError when v is absent.
    const NodeSet& neighbors(NodeId v) const;

    std::size_t degree(NodeId v) const { return neighbors(v).size(); }

    /// Node ids in ascending order.
    std::vector<NodeId> nodes() const;

    const std::map<NodeId, NodeSet>& adjacency() const { return adjacency_; }

    /// Edges as (u, v) with u < v, ascending. The canonical edge order.
    std::vector<std::pair<NodeId, NodeId>> edges() const;

    bool operator==(const Graph& other) const { return adjacency_ == other.adjacency_; }

private:
    std::map<NodeId, NodeSet> adjacency_;
    std::size_t edge_count_ = 0;
};

/// Shortest-path distances from a center, capped at a hop radius.
struct HopMap {
    NodeId center = 0;
    std::map<NodeId, int> distances;

    bool contains(NodeId v) const { return distances.count(v) != 0; }
    std::size_t size() const { return distances.size(); }
};

/// Reads a whitespace edge list: two integer tokens per line, '#' comments.
/// Directed duplicates collapse to one undirected edge; self-loops are
/// dropped (their node id is still registered). Empty input gives an empty
/// graph. Malformed lines raise ParseError carrying the line number.
Graph parse_edge_list(std::istream& in);

/// Canonical writer: "u v\n" with u < v, sorted. parse(write(g)) == g.
void write_edge_list(const Graph& g, std::ostream& out);

Graph read_edge_list_file(const std::string& path);
void write_edge_list_file(const Graph& g, const std::string& path);

/// BFS-exact hop distances for every node within k hops of center.
HopMap khop_neighborhood(const Graph& g, NodeId center, int k);

/// Subgraph on `nodes` with exactly the edges of g internal to the set.
Graph induced_subgraph(const Graph& g, const NodeSet& nodes);

/// Preferential-attachment generator: a complete seed clique on
/// attach_degree + 1 nodes, then each new node attaches to attach_degree
/// distinct existing nodes with probability proportional to degree.
/// Deterministic for a fixed seed; the result is connected with
/// C(attach_degree+1, 2) + attach_degree * (node_count - attach_degree - 1)
/// edges. Requires node_count > attach_degree + 1 and attach_degree >= 1.
Graph synth_powerlaw(std::size_t node_count, std::size_t attach_degree, std::uint64_t seed);

}  // namespace deanon
