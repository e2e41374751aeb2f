#pragma once

#include <cstdint>
#include <vector>

#include "deanon/graph.hpp"

namespace deanon {

/// Overlap parameters for the two-copy benchmark: alpha_v is the node
/// overlap (Jaccard) between the copies, alpha_e the edge overlap among
/// shared edges. Each copy independently loses a fraction
/// beta = (1 - alpha_e) / (1 + alpha_e) of the source edges.
struct OverlapConfig {
    double alpha_v = 0.25;
    double alpha_e = 0.25;
    std::uint64_t seed = 0;
};

/// beta = (1 - alpha_e) / (1 + alpha_e). Requires alpha_e in (0, 1].
double beta_from_edge_overlap(double alpha_e);

/// Inverse map: alpha_e = (1 - beta) / (1 + beta).
double edge_overlap_from_beta(double beta);

struct OverlapSample {
    Graph g1, g2;
    std::vector<NodeId> shared;  // V_B ascending; correspondence is the identity on it
    std::vector<NodeId> only_1;  // V_A
    std::vector<NodeId> only_2;  // V_C
};

/// Seeded partition of the node set into V_A, V_B, V_C with
/// |V_B| = round(alpha_v |V|) and the remainder split as evenly as possible
/// (V_A gets the odd node). The two copies are the source edges minus
/// floor(beta |E|) independently chosen deletions each, projected onto
/// V_A u V_B and V_B u V_C.
OverlapSample sample_overlapping_graphs(const Graph& g, const OverlapConfig& cfg);

/// Writes g1/g2 edge lists plus the identity correspondence on V_B, using
/// seed-labeled filenames under `dir`:
/// g1.seed<seed>.txt, g2.seed<seed>.txt, correspondence.seed<seed>.txt.
/// Returns the three paths.
std::vector<std::string> write_overlap_sample(const OverlapSample& s, const OverlapConfig& cfg,
                                              const std::string& dir);

}  // namespace deanon
