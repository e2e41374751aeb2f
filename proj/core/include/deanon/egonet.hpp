#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <vector>

#include "deanon/features.hpp"
#include "deanon/graph.hpp"

namespace deanon {

enum class Scheme : int {
    One = 1,  // full 2-hop induced subgraph
    Two = 2,  // same, minus every edge joining two hop-2 nodes
};

/// Released anonymized egonet. Node ids are per-egonet pseudonyms forming a
/// bijection onto 0..N-1; hop_of records each node's hop distance from the
/// ego in the source graph.
struct Egonet {
    Scheme scheme = Scheme::One;
    Graph graph;
    NodeId ego_pseudonym = 0;
    std::map<NodeId, int> hop_of;
};

/// Secret pseudonym -> original-node mapping for one egonet. Never written
/// into the released egonet file.
using TruthMap = std::map<NodeId, NodeId>;

/// Pair taxonomy by the two nodes' hop distances from their egos.
enum class PairCase : int {
    One = 1,    // both nodes at hop 0 or 1
    Two = 2,    // exactly one node at hop 2
    Three = 3,  // both nodes at hop 2
};

enum class PairLabel { Identical, NonIdentical };

struct PairSource {
    std::size_t egonet = 0;
    NodeId pseudonym = 0;
};

/// One labeled training/testing instance: two feature vectors from two
/// different releases.
struct PairSample {
    FeatureVector vec_a, vec_b;
    PairLabel label = PairLabel::NonIdentical;
    PairCase pair_case = PairCase::One;
    PairSource a, b;
};

/// Seeded sample, without replacement, of egos whose 2-hop neighborhood
/// (ego included) has more than min_egonet_nodes nodes. Throws
/// ExhaustionError naming the achievable count when too few qualify.
std::vector<NodeId> select_egos(const Graph& g, std::size_t count, std::size_t min_egonet_nodes,
                                std::uint64_t seed);

/// Extracts and pseudonymizes the 2-hop egonet around `ego`.
std::pair<Egonet, TruthMap> extract_egonet(const Graph& g, NodeId ego, Scheme scheme,
                                           std::uint64_t seed);

/// The unique node whose eccentricity within the egonet is <= 2, or nullopt
/// when zero or several nodes qualify (ambiguity is a value, not an error).
std::optional<NodeId> detect_ego(const Egonet& e);

PairCase classify_pair_case(int hop_a, int hop_b);

struct PairGenConfig {
    std::uint32_t min_degree = 5;         // keep nodes with degree > min_degree
    double non_identical_ratio = 1.0;     // non-identical pool size per split
    double test_fraction = 0.5;           // fraction of original nodes held out
    std::size_t bin_count = 70;
    std::uint32_t bin_width = 15;
    bool filter_by_original_degree = false;  // use source-graph degree for the filter
};

struct PairPools {
    std::array<std::vector<PairSample>, 3> identical_by_case;
    std::vector<PairSample> non_identical;

    const std::vector<PairSample>& identical(PairCase c) const {
        return identical_by_case[static_cast<int>(c) - 1];
    }
    std::vector<PairSample>& identical(PairCase c) {
        return identical_by_case[static_cast<int>(c) - 1];
    }
    std::size_t identical_total() const {
        return identical_by_case[0].size() + identical_by_case[1].size() +
               identical_by_case[2].size();
    }
};

struct PairSplit {
    PairPools train, test;
};

/// Builds labeled pair pools from a set of releases and their ground truth.
///
/// Identical pairs are every cross-egonet pseudonym pair mapping to the same
/// original node, bucketed by case. Non-identical pairs are a seeded uniform
/// sample of cross-egonet pairs with distinct originals, kept as one
/// undifferentiated pool. Both apply the degree filter. Train and test pools
/// share no original node; when `source` is given and
/// cfg.filter_by_original_degree is set, the filter uses source-graph degrees.
PairSplit generate_pair_samples(const std::vector<Egonet>& egonets,
                                const std::vector<TruthMap>& truths, const PairGenConfig& cfg,
                                std::uint64_t seed, const Graph* source = nullptr);

/// Release format: header "scheme=<1|2> ego=<pseudonym>", hop lines
/// "<pseudonym> <hop>", a "# edges" separator, then edge lines.
void write_egonet(const Egonet& e, std::ostream& out);
Egonet read_egonet(std::istream& in);

/// Secret ground-truth file: "<egonet-id> <pseudonym> <original>" triples.
void write_truth(const std::vector<TruthMap>& truths, std::ostream& out);
std::vector<TruthMap> read_truth(std::istream& in);

}  // namespace deanon
