#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "deanon/egonet.hpp"
#include "deanon/graph.hpp"

namespace deanon {

/// Sorted multiset of degrees within a node's 1-hop network (the induced
/// subgraph on the node and its neighbors), the node's own entry included.
using Signature = std::vector<std::uint32_t>;

Signature node_signature(const Graph& view, NodeId node);

struct AdhocMatch {
    NodeId pseudo_a = 0;  // node in the first egonet
    NodeId pseudo_b = 0;  // node in the second egonet
};

/// Exact-signature attack on two Scheme-1 releases: emits every pair of
/// hop <= 1 nodes whose signatures have length >= min_signature_len and are
/// exactly equal. Output is sorted by (pseudo_a, pseudo_b). Scheme-2 input
/// raises UnsupportedSchemeError.
std::vector<AdhocMatch> adhoc_link(const Egonet& e1, const Egonet& e2,
                                   std::size_t min_signature_len = 7);

/// Match report line: "<egonet1>\t<pseudo1>\t<egonet2>\t<pseudo2>".
void write_match_report(std::ostream& out, std::size_t egonet1, std::size_t egonet2,
                        const std::vector<AdhocMatch>& matches);

}  // namespace deanon
