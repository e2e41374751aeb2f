#include "deanon/egonet.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <unordered_map>
#include <unordered_set>

#include "deanon/errors.hpp"
#include "deanon/rng.hpp"

namespace deanon {

std::vector<NodeId> select_egos(const Graph& g, std::size_t count, std::size_t min_egonet_nodes,
                                std::uint64_t seed) {
    if (count < 1) throw ConfigError("select_egos requires count >= 1");
    if (g.empty()) throw ConfigError("select_egos on empty graph");

    std::vector<NodeId> qualifying;
    for (NodeId v : g.nodes()) {
        if (khop_neighborhood(g, v, 2).size() > min_egonet_nodes) qualifying.push_back(v);
    }
    if (qualifying.size() < count) {
        throw ExhaustionError("fewer qualifying egos than requested", qualifying.size());
    }
    Rng rng(seed);
    auto picks = rng.sample_without_replacement(qualifying.size(), count);
    std::vector<NodeId> egos;
    egos.reserve(count);
    for (std::size_t idx : picks) egos.push_back(qualifying[idx]);
    return egos;
}

std::pair<Egonet, TruthMap> extract_egonet(const Graph& g, NodeId ego, Scheme scheme,
                                           std::uint64_t seed) {
    HopMap hops = khop_neighborhood(g, ego, 2);  // throws MissingNodeError when absent

    std::vector<NodeId> originals;
    originals.reserve(hops.size());
    for (const auto& [v, _] : hops.distances) originals.push_back(v);  // sorted

    std::vector<NodeId> pseudos(originals.size());
    for (std::size_t i = 0; i < pseudos.size(); ++i) pseudos[i] = static_cast<NodeId>(i);
    Rng rng(seed);
    rng.shuffle(pseudos);

    std::unordered_map<NodeId, NodeId> to_pseudo;
    TruthMap truth;
    for (std::size_t i = 0; i < originals.size(); ++i) {
        to_pseudo[originals[i]] = pseudos[i];
        truth[pseudos[i]] = originals[i];
    }

    Egonet e;
    e.scheme = scheme;
    e.ego_pseudonym = to_pseudo[ego];
    for (const auto& [v, d] : hops.distances) {
        e.hop_of[to_pseudo[v]] = d;
        e.graph.add_node(to_pseudo[v]);
    }
    for (const auto& [v, dv] : hops.distances) {
        for (NodeId w : g.neighbors(v)) {
            if (v >= w) continue;
            auto it = hops.distances.find(w);
            if (it == hops.distances.end()) continue;
            if (scheme == Scheme::Two && dv == 2 && it->second == 2) continue;
            e.graph.add_edge(to_pseudo[v], to_pseudo[w]);
        }
    }
    return {std::move(e), std::move(truth)};
}

std::optional<NodeId> detect_ego(const Egonet& e) {
    if (e.graph.empty()) throw ConfigError("detect_ego on empty egonet");
    const std::size_t total = e.graph.node_count();
    std::optional<NodeId> found;
    for (NodeId v : e.graph.nodes()) {
        if (khop_neighborhood(e.graph, v, 2).size() == total) {
            if (found) return std::nullopt;  // second candidate: ambiguous
            found = v;
        }
    }
    return found;
}

PairCase classify_pair_case(int hop_a, int hop_b) {
    if (hop_a < 0 || hop_a > 2 || hop_b < 0 || hop_b > 2) {
        throw std::invalid_argument("pair hops must be in {0,1,2}");
    }
    if (hop_a <= 1 && hop_b <= 1) return PairCase::One;
    if (hop_a == 2 && hop_b == 2) return PairCase::Three;
    return PairCase::Two;
}

namespace {

struct Occurrence {
    std::size_t egonet;
    NodeId pseudonym;
    NodeId original;
};

std::uint64_t pair_key(std::size_t e1, NodeId p1, std::size_t e2, NodeId p2) {
    std::uint64_t h = splitmix64((std::uint64_t(e1) << 32) ^ std::uint64_t(p1));
    return h ^ splitmix64(((std::uint64_t(e2) << 32) ^ std::uint64_t(p2)) + 0x9e3779b97f4a7c15ULL);
}

}  // namespace

PairSplit generate_pair_samples(const std::vector<Egonet>& egonets,
                                const std::vector<TruthMap>& truths, const PairGenConfig& cfg,
                                std::uint64_t seed, const Graph* source) {
    if (egonets.size() < 2) throw ConfigError("generate_pair_samples requires >= 2 egonets");
    if (egonets.size() != truths.size()) {
        throw ConfigError("egonet and truth counts differ");
    }
    if (cfg.filter_by_original_degree && source == nullptr) {
        throw ConfigError("original-degree filter requires the source graph");
    }

    // Qualifying occurrences of each original node across releases.
    std::map<NodeId, std::vector<Occurrence>> by_original;
    for (std::size_t e = 0; e < egonets.size(); ++e) {
        for (const auto& [pseudo, original] : truths[e]) {
            std::size_t deg = cfg.filter_by_original_degree ? source->degree(original)
                                                            : egonets[e].graph.degree(pseudo);
            if (deg > cfg.min_degree) by_original[original].push_back({e, pseudo, original});
        }
    }

    // Train/test sides assigned per original node.
    std::vector<NodeId> originals;
    originals.reserve(by_original.size());
    for (const auto& [o, _] : by_original) originals.push_back(o);
    Rng split_rng(derive_seed(seed, 0));
    split_rng.shuffle(originals);
    const std::size_t test_count =
        static_cast<std::size_t>(cfg.test_fraction * static_cast<double>(originals.size()) + 0.5);
    std::unordered_set<NodeId> test_side(originals.begin(), originals.begin() + test_count);

    // Feature vectors are shared across pairs; compute each node once.
    std::map<std::pair<std::size_t, NodeId>, FeatureVector> vec_cache;
    auto vector_of = [&](std::size_t e, NodeId pseudo) -> const FeatureVector& {
        auto key = std::make_pair(e, pseudo);
        auto it = vec_cache.find(key);
        if (it == vec_cache.end()) {
            it = vec_cache
                     .emplace(key, degree_histogram_vector(egonets[e].graph, pseudo,
                                                           cfg.bin_count, cfg.bin_width))
                     .first;
        }
        return it->second;
    };
    auto make_sample = [&](const Occurrence& x, const Occurrence& y, PairLabel label) {
        PairSample s;
        s.vec_a = vector_of(x.egonet, x.pseudonym);
        s.vec_b = vector_of(y.egonet, y.pseudonym);
        s.label = label;
        s.pair_case = classify_pair_case(egonets[x.egonet].hop_of.at(x.pseudonym),
                                         egonets[y.egonet].hop_of.at(y.pseudonym));
        s.a = {x.egonet, x.pseudonym};
        s.b = {y.egonet, y.pseudonym};
        return s;
    };

    PairSplit out;
    std::array<std::vector<Occurrence>, 2> side_occurrences;  // 0 = train, 1 = test
    for (const auto& [original, occs] : by_original) {
        const bool is_test = test_side.count(original) != 0;
        PairPools& pools = is_test ? out.test : out.train;
        for (const Occurrence& occ : occs) side_occurrences[is_test ? 1 : 0].push_back(occ);
        for (std::size_t i = 0; i < occs.size(); ++i) {
            for (std::size_t j = i + 1; j < occs.size(); ++j) {
                // Member from the lower-indexed egonet goes first.
                PairSample s = make_sample(occs[i], occs[j], PairLabel::Identical);
                pools.identical(s.pair_case).push_back(std::move(s));
            }
        }
    }

    for (int side = 0; side < 2; ++side) {
        PairPools& pools = side ? out.test : out.train;
        const auto& occs = side_occurrences[side];
        const std::size_t target = static_cast<std::size_t>(
            cfg.non_identical_ratio * static_cast<double>(pools.identical_total()) + 0.5);
        if (occs.size() < 2 || target == 0) continue;
        Rng rng(derive_seed(seed, 1 + static_cast<std::uint64_t>(side)));
        std::unordered_set<std::uint64_t> seen;
        std::size_t attempts = 0;
        const std::size_t max_attempts = 200 * target + 1000;
        while (pools.non_identical.size() < target && attempts++ < max_attempts) {
            const Occurrence& x = occs[rng.below(occs.size())];
            const Occurrence& y = occs[rng.below(occs.size())];
            if (x.egonet == y.egonet || x.original == y.original) continue;
            const Occurrence& first = x.egonet < y.egonet ? x : y;
            const Occurrence& second = x.egonet < y.egonet ? y : x;
            if (!seen.insert(pair_key(first.egonet, first.pseudonym, second.egonet,
                                      second.pseudonym))
                     .second) {
                continue;
            }
            pools.non_identical.push_back(make_sample(first, second, PairLabel::NonIdentical));
        }
    }
    return out;
}

void write_egonet(const Egonet& e, std::ostream& out) {
    out << "scheme=" << static_cast<int>(e.scheme) << " ego=" << e.ego_pseudonym << '\n';
    for (const auto& [pseudo, hop] : e.hop_of) {
        out << pseudo << ' ' << hop << '\n';
    }
    out << "# edges\n";
    write_edge_list(e.graph, out);
}

Egonet read_egonet(std::istream& in) {
    Egonet e;
    std::string line;
    std::size_t line_no = 0;
    bool header_seen = false;
    bool in_edges = false;
    while (std::getline(in, line)) {
        ++line_no;
        std::size_t start = line.find_first_not_of(" \t\r");
        if (start == std::string::npos) continue;
        if (line[start] == '#') {
            if (line.find("# edges", start) == start) in_edges = true;
            continue;
        }
        std::istringstream tokens(line);
        if (!header_seen) {
            std::string scheme_kv, ego_kv;
            tokens >> scheme_kv >> ego_kv;
            if (scheme_kv.rfind("scheme=", 0) != 0 || ego_kv.rfind("ego=", 0) != 0) {
                throw ParseError("expected 'scheme=<1|2> ego=<pseudonym>' header", line_no);
            }
            int scheme = std::stoi(scheme_kv.substr(7));
            if (scheme != 1 && scheme != 2) throw ParseError("unknown scheme", line_no);
            e.scheme = static_cast<Scheme>(scheme);
            e.ego_pseudonym = std::stoll(ego_kv.substr(4));
            header_seen = true;
            continue;
        }
        NodeId a, b;
        if (!(tokens >> a >> b)) throw ParseError("expected two integers", line_no);
        if (in_edges) {
            e.graph.add_edge(a, b);
        } else {
            e.hop_of[a] = static_cast<int>(b);
            e.graph.add_node(a);
        }
    }
    if (!header_seen) throw ParseError("missing egonet header", line_no);
    return e;
}

void write_truth(const std::vector<TruthMap>& truths, std::ostream& out) {
    for (std::size_t e = 0; e < truths.size(); ++e) {
        for (const auto& [pseudo, original] : truths[e]) {
            out << e << ' ' << pseudo << ' ' << original << '\n';
        }
    }
}

std::vector<TruthMap> read_truth(std::istream& in) {
    std::vector<TruthMap> truths;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::size_t start = line.find_first_not_of(" \t\r");
        if (start == std::string::npos || line[start] == '#') continue;
        std::istringstream tokens(line);
        std::size_t egonet_id;
        NodeId pseudo, original;
        if (!(tokens >> egonet_id >> pseudo >> original)) {
            throw ParseError("expected '<egonet-id> <pseudonym> <original>'", line_no);
        }
        if (truths.size() <= egonet_id) truths.resize(egonet_id + 1);
        truths[egonet_id][pseudo] = original;
    }
    return truths;
}

}  // namespace deanon
