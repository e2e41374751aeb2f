#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "deanon/graph.hpp"

namespace deanon {

/// Binned histogram of neighbor degrees. A dual vector is two histograms
/// back to back: 1-hop neighbors first, then the 2-hop neighborhood.
struct FeatureVector {
    std::vector<std::uint32_t> bins;
    std::uint32_t bin_width = 15;
    bool dual = false;

    std::size_t length() const { return bins.size(); }
    std::size_t histogram_bins() const { return dual ? bins.size() / 2 : bins.size(); }

    bool operator==(const FeatureVector&) const = default;
};

/// Histogram bin for a neighbor degree d >= 1: bin i covers
/// i*b < d <= (i+1)*b, and every degree above (bin_count-2)*bin_width
/// collapses into the last bin.
std::size_t degree_bin(std::uint64_t degree, std::size_t bin_count, std::uint32_t bin_width);

/// Feature vector of `node`: histogram of its neighbors' degrees, with both
/// the neighbor set and the degrees taken from `view`. The node's own degree
/// is not counted.
FeatureVector degree_histogram_vector(const Graph& view, NodeId node, std::size_t bin_count,
                                      std::uint32_t bin_width);

/// Which nodes the second half of a dual vector histograms.
enum class TwoHopConvention {
    WithinTwo,   // every node at distance 1 or 2 (the node itself excluded)
    ExactlyTwo,  // only nodes at distance exactly 2
};

/// Concatenated 1-hop || 2-hop histogram of length 2 * bin_count, degrees
/// measured in g.
FeatureVector dual_hop_vector(const Graph& g, NodeId node, std::size_t bin_count,
                              std::uint32_t bin_width,
                              TwoHopConvention convention = TwoHopConvention::WithinTwo);

/// One dump line: "<egonet-id> <pseudonym> c_0,...,c_{n-1}".
void write_feature_line(std::ostream& out, std::size_t egonet_id, NodeId pseudonym,
                        const FeatureVector& vec);

std::string format_bins(const FeatureVector& vec);
std::vector<std::uint32_t> parse_bins(const std::string& csv);

}  // namespace deanon
