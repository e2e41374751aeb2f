#include "deanon/features.hpp"

#include <charconv>
#include <ostream>
#include <string>

#include "deanon/errors.hpp"

namespace deanon {

std::size_t degree_bin(std::uint64_t degree, std::size_t bin_count, std::uint32_t bin_width) {
    if (degree == 0) return 0;  // unreachable for real neighbors, kept total
    std::size_t i = static_cast<std::size_t>((degree - 1) / bin_width);
    if (bin_count >= 2 && i >= bin_count - 2) return bin_count - 1;
    return i < bin_count ? i : bin_count - 1;
}

FeatureVector degree_histogram_vector(const Graph& view, NodeId node, std::size_t bin_count,
                                      std::uint32_t bin_width) {
    if (bin_count < 1 || bin_width < 1) {
        throw ConfigError("degree_histogram_vector requires bin_count >= 1 and bin_width >= 1");
    }
    FeatureVector vec;
    vec.bins.assign(bin_count, 0);
    vec.bin_width = bin_width;
    for (NodeId nb : view.neighbors(node)) {
        ++vec.bins[degree_bin(view.degree(nb), bin_count, bin_width)];
    }
    return vec;
}

FeatureVector dual_hop_vector(const Graph& g, NodeId node, std::size_t bin_count,
                              std::uint32_t bin_width, TwoHopConvention convention) {
    if (bin_count < 1 || bin_width < 1) {
        throw ConfigError("dual_hop_vector requires bin_count >= 1 and bin_width >= 1");
    }
    FeatureVector vec;
    vec.bins.assign(2 * bin_count, 0);
    vec.bin_width = bin_width;
    vec.dual = true;
    for (NodeId nb : g.neighbors(node)) {
        ++vec.bins[degree_bin(g.degree(nb), bin_count, bin_width)];
    }
    HopMap hops = khop_neighborhood(g, node, 2);
    for (const auto& [v, dist] : hops.distances) {
        if (dist == 0) continue;
        if (convention == TwoHopConvention::ExactlyTwo && dist != 2) continue;
        ++vec.bins[bin_count + degree_bin(g.degree(v), bin_count, bin_width)];
    }
    return vec;
}

std::string format_bins(const FeatureVector& vec) {
    std::string out;
    for (std::size_t k = 0; k < vec.bins.size(); ++k) {
        if (k) out += ',';
        out += std::to_string(vec.bins[k]);
    }
    return out;
}

std::vector<std::uint32_t> parse_bins(const std::string& csv) {
    std::vector<std::uint32_t> bins;
    const char* p = csv.data();
    const char* end = csv.data() + csv.size();
    while (p < end) {
        std::uint32_t value = 0;
        auto [next, ec] = std::from_chars(p, end, value);
        if (ec != std::errc()) throw ParseError("malformed bin count in '" + csv + "'", 0);
        bins.push_back(value);
        p = next;
        if (p < end) {
            if (*p != ',') throw ParseError("expected ',' in bin list", 0);
            ++p;
        }
    }
    return bins;
}

void write_feature_line(std::ostream& out, std::size_t egonet_id, NodeId pseudonym,
                        const FeatureVector& vec) {
    out << egonet_id << ' ' << pseudonym << ' ' << format_bins(vec) << '\n';
}

}  // namespace deanon
