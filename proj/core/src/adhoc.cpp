#include "deanon/adhoc.hpp"

#include <algorithm>
#include <map>
#include <ostream>
#include <unordered_set>

#include "deanon/errors.hpp"

namespace deanon {

Signature node_signature(const Graph& view, NodeId node) {
    const NodeSet& nbrs = view.neighbors(node);  // throws MissingNodeError
    std::unordered_set<NodeId> members(nbrs.begin(), nbrs.end());
    members.insert(node);

    Signature sig;
    sig.reserve(members.size());
    sig.push_back(static_cast<std::uint32_t>(nbrs.size()));  // the node itself
    for (NodeId m : nbrs) {
        std::uint32_t deg = 0;
        for (NodeId w : view.neighbors(m)) {
            if (members.count(w)) ++deg;
        }
        sig.push_back(deg);
    }
    std::sort(sig.begin(), sig.end());
    return sig;
}

namespace {

std::map<Signature, std::vector<NodeId>> signature_index(const Egonet& e,
                                                         std::size_t min_signature_len) {
    std::map<Signature, std::vector<NodeId>> index;
    for (const auto& [pseudo, hop] : e.hop_of) {
        if (hop > 1) continue;
        Signature sig = node_signature(e.graph, pseudo);
        if (sig.size() < min_signature_len) continue;
        index[std::move(sig)].push_back(pseudo);
    }
    return index;
}

}  // namespace

std::vector<AdhocMatch> adhoc_link(const Egonet& e1, const Egonet& e2,
                                   std::size_t min_signature_len) {
    if (e1.scheme != Scheme::One || e2.scheme != Scheme::One) {
        throw UnsupportedSchemeError("adhoc_link applies to Scheme 1 releases only");
    }
    auto index1 = signature_index(e1, min_signature_len);
    auto index2 = signature_index(e2, min_signature_len);

    std::vector<AdhocMatch> matches;
    for (const auto& [sig, nodes1] : index1) {
        auto it = index2.find(sig);
        if (it == index2.end()) continue;
        for (NodeId a : nodes1) {
            for (NodeId b : it->second) matches.push_back({a, b});
        }
    }
    std::sort(matches.begin(), matches.end(), [](const AdhocMatch& x, const AdhocMatch& y) {
        return x.pseudo_a != y.pseudo_a ? x.pseudo_a < y.pseudo_a : x.pseudo_b < y.pseudo_b;
    });
    return matches;
}

void write_match_report(std::ostream& out, std::size_t egonet1, std::size_t egonet2,
                        const std::vector<AdhocMatch>& matches) {
    for (const AdhocMatch& m : matches) {
        out << egonet1 << '\t' << m.pseudo_a << '\t' << egonet2 << '\t' << m.pseudo_b << '\n';
    }
}

}  // namespace deanon
