#include "deanon/graph.hpp"

#include <algorithm>
#include <charconv>
#include <deque>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "deanon/errors.hpp"
#include "deanon/rng.hpp"

namespace deanon {

void Graph::add_node(NodeId v) { adjacency_.try_emplace(v); }

bool Graph::add_edge(NodeId u, NodeId v) {
    if (u == v) throw ConfigError("self-loops are not allowed: " + std::to_string(u));
    add_node(u);
    add_node(v);
    bool inserted = adjacency_[u].insert(v).second;
    if (inserted) {
        adjacency_[v].insert(u);
        ++edge_count_;
    }
    return inserted;
}

bool Graph::has_edge(NodeId u, NodeId v) const {
    auto it = adjacency_.find(u);
    return it != adjacency_.end() && it->second.count(v) != 0;
}

const NodeSet& Graph::neighbors(NodeId v) const {
    auto it = adjacency_.find(v);
    if (it == adjacency_.end()) {
        throw MissingNodeError("node not in graph: " + std::to_string(v));
    }
    return it->second;
}

std::vector<NodeId> Graph::nodes() const {
    std::vector<NodeId> out;
    out.reserve(adjacency_.size());
    for (const auto& [v, _] : adjacency_) out.push_back(v);
    return out;
}

std::vector<std::pair<NodeId, NodeId>> Graph::edges() const {
    std::vector<std::pair<NodeId, NodeId>> out;
    out.reserve(edge_count_);
    for (const auto& [u, nbrs] : adjacency_) {
        for (NodeId v : nbrs) {
            if (u < v) out.emplace_back(u, v);
        }
    }
    return out;
}

namespace {

NodeId parse_node_token(const std::string& token, std::size_t line_no) {
    NodeId value = 0;
    auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (ec != std::errc() || ptr != token.data() + token.size()) {
        throw ParseError("malformed node id '" + token + "'", line_no);
    }
    if (value < 0) {
        throw ParseError("negative node id '" + token + "'", line_no);
    }
    return value;
}

}  // namespace

Graph parse_edge_list(std::istream& in) {
    Graph g;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::size_t start = line.find_first_not_of(" \t\r");
        if (start == std::string::npos || line[start] == '#') continue;

        std::istringstream tokens(line);
        std::string a, b, extra;
        tokens >> a >> b;
        if (b.empty()) throw ParseError("expected two node ids", line_no);
        if (tokens >> extra) throw ParseError("trailing token '" + extra + "'", line_no);

        NodeId u = parse_node_token(a, line_no);
        NodeId v = parse_node_token(b, line_no);
        if (u == v) {
            g.add_node(u);  // self-loop dropped, the id still exists
        } else {
            g.add_edge(u, v);
        }
    }
    return g;
}

void write_edge_list(const Graph& g, std::ostream& out) {
    for (const auto& [u, v] : g.edges()) {
        out << u << ' ' << v << '\n';
    }
}

Graph read_edge_list_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open edge list: " + path);
    return parse_edge_list(in);
}

void write_edge_list_file(const Graph& g, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write edge list: " + path);
    write_edge_list(g, out);
}

HopMap khop_neighborhood(const Graph& g, NodeId center, int k) {
    if (!g.has_node(center)) {
        throw MissingNodeError("khop center not in graph: " + std::to_string(center));
    }
    HopMap hops;
    hops.center = center;
    hops.distances[center] = 0;
    std::deque<NodeId> frontier{center};
    int depth = 0;
    while (!frontier.empty() && depth < k) {
        ++depth;
        std::deque<NodeId> next;
        for (NodeId u : frontier) {
            for (NodeId v : g.neighbors(u)) {
                if (hops.distances.emplace(v, depth).second) next.push_back(v);
            }
        }
        frontier.swap(next);
    }
    return hops;
}

Graph induced_subgraph(const Graph& g, const NodeSet& nodes) {
    Graph sub;
    for (NodeId v : nodes) {
        if (!g.has_node(v)) {
            throw MissingNodeError("induced_subgraph node not in graph: " + std::to_string(v));
        }
        sub.add_node(v);
    }
    for (NodeId v : nodes) {
        for (NodeId w : g.neighbors(v)) {
            if (v < w && nodes.count(w)) sub.add_edge(v, w);
        }
    }
    return sub;
}

Graph synth_powerlaw(std::size_t node_count, std::size_t attach_degree, std::uint64_t seed) {
    if (attach_degree < 1 || node_count <= attach_degree + 1) {
        throw ConfigError("synth_powerlaw requires node_count > attach_degree + 1 >= 2, got (" +
                          std::to_string(node_count) + ", " + std::to_string(attach_degree) + ")");
    }
    Graph g;
    const std::size_t clique = attach_degree + 1;
    // Endpoint list: each node appears once per incident edge, so a uniform
    // pick is degree-proportional.
    std::vector<NodeId> endpoints;
    endpoints.reserve(2 * (clique * (clique - 1) / 2 + attach_degree * (node_count - clique)));
    for (std::size_t u = 0; u < clique; ++u) {
        for (std::size_t v = u + 1; v < clique; ++v) {
            g.add_edge(static_cast<NodeId>(u), static_cast<NodeId>(v));
            endpoints.push_back(static_cast<NodeId>(u));
            endpoints.push_back(static_cast<NodeId>(v));
        }
    }
    Rng rng(seed);
    std::set<NodeId> targets;
    for (std::size_t u = clique; u < node_count; ++u) {
        targets.clear();
        while (targets.size() < attach_degree) {
            targets.insert(endpoints[rng.below(endpoints.size())]);
        }
        for (NodeId t : targets) {
            g.add_edge(static_cast<NodeId>(u), t);
            endpoints.push_back(static_cast<NodeId>(u));
            endpoints.push_back(t);
        }
    }
    return g;
}

}  // namespace deanon
