#include "deanon/perturb.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>
#include <unordered_set>

#include "deanon/errors.hpp"
#include "deanon/rng.hpp"

namespace deanon {

double beta_from_edge_overlap(double alpha_e) {
    if (alpha_e <= 0.0 || alpha_e > 1.0) {
        throw std::domain_error("edge overlap must lie in (0, 1]");
    }
    return (1.0 - alpha_e) / (1.0 + alpha_e);
}

double edge_overlap_from_beta(double beta) {
    if (beta < 0.0 || beta >= 1.0) throw std::domain_error("beta must lie in [0, 1)");
    return (1.0 - beta) / (1.0 + beta);
}

namespace {

Graph project_copy(const std::vector<std::pair<NodeId, NodeId>>& edges,
                   const std::vector<std::size_t>& deleted, const std::vector<NodeId>& keep_nodes) {
    std::unordered_set<NodeId> keep(keep_nodes.begin(), keep_nodes.end());
    std::vector<bool> removed(edges.size(), false);
    for (std::size_t idx : deleted) removed[idx] = true;

    Graph g;
    for (NodeId v : keep_nodes) g.add_node(v);
    for (std::size_t i = 0; i < edges.size(); ++i) {
        if (removed[i]) continue;
        const auto& [u, v] = edges[i];
        if (keep.count(u) && keep.count(v)) g.add_edge(u, v);
    }
    return g;
}

}  // namespace

OverlapSample sample_overlapping_graphs(const Graph& g, const OverlapConfig& cfg) {
    if (g.node_count() < 4) throw ConfigError("overlap sampling requires |V| >= 4");
    if (cfg.alpha_v < 0.0 || cfg.alpha_v > 1.0) throw ConfigError("alpha_v must lie in [0, 1]");
    const double beta = beta_from_edge_overlap(cfg.alpha_e);

    const std::size_t n = g.node_count();
    const std::size_t n_shared =
        static_cast<std::size_t>(std::llround(cfg.alpha_v * static_cast<double>(n)));
    const std::size_t remainder = n - n_shared;
    const std::size_t n_a = remainder - remainder / 2;
    const std::size_t n_c = remainder / 2;
    if (cfg.alpha_v > 0.0 && n_shared == 0) {
        throw ConfigError("alpha_v rounds to an empty shared set");
    }
    if (cfg.alpha_v < 1.0 && (n_a == 0 || n_c == 0)) {
        throw ConfigError("alpha_v rounds to an empty exclusive set");
    }

    std::vector<NodeId> order = g.nodes();
    Rng partition_rng(derive_seed(cfg.seed, 0));
    partition_rng.shuffle(order);

    OverlapSample out;
    out.only_1.assign(order.begin(), order.begin() + n_a);
    out.shared.assign(order.begin() + n_a, order.begin() + n_a + n_shared);
    out.only_2.assign(order.begin() + n_a + n_shared, order.end());
    std::sort(out.only_1.begin(), out.only_1.end());
    std::sort(out.shared.begin(), out.shared.end());
    std::sort(out.only_2.begin(), out.only_2.end());

    const auto edges = g.edges();
    const std::size_t delete_count =
        static_cast<std::size_t>(beta * static_cast<double>(edges.size()));

    std::vector<NodeId> v1 = out.only_1;
    v1.insert(v1.end(), out.shared.begin(), out.shared.end());
    std::vector<NodeId> v2 = out.shared;
    v2.insert(v2.end(), out.only_2.begin(), out.only_2.end());

    Rng del1(derive_seed(cfg.seed, 1));
    Rng del2(derive_seed(cfg.seed, 2));
    out.g1 = project_copy(edges, del1.sample_without_replacement(edges.size(), delete_count), v1);
    out.g2 = project_copy(edges, del2.sample_without_replacement(edges.size(), delete_count), v2);
    return out;
}

std::vector<std::string> write_overlap_sample(const OverlapSample& s, const OverlapConfig& cfg,
                                              const std::string& dir) {
    const std::string tag = ".seed" + std::to_string(cfg.seed) + ".txt";
    const std::string p1 = dir + "/g1" + tag;
    const std::string p2 = dir + "/g2" + tag;
    const std::string pc = dir + "/correspondence" + tag;
    write_edge_list_file(s.g1, p1);
    write_edge_list_file(s.g2, p2);
    std::ofstream corr(pc);
    if (!corr) throw ConfigError("cannot write correspondence file: " + pc);
    for (NodeId v : s.shared) corr << v << ' ' << v << '\n';
    return {p1, p2, pc};
}

}  // namespace deanon
