#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "deanon/egonet.hpp"
#include "deanon/features.hpp"
#include "deanon/rng.hpp"

namespace deanon {

/// Split predicate delta(v_a[i], v_b[j]) <= tau. tau lives on the inclusive
/// grid 0, 0.05, ..., 1.00 and is stored as a grid index so that routing is
/// exact integer arithmetic. For dual vectors i and j always lie in the same
/// half.
struct WeakLearner {
    std::uint32_t i = 0;
    std::uint32_t j = 0;
    std::uint32_t tau_index = 0;

    double tau(std::size_t tau_steps = 20) const {
        return static_cast<double>(tau_index) / static_cast<double>(tau_steps);
    }
};

/// Node of a binary decision tree, stored flat in preorder. left < 0 marks a
/// leaf; leaves keep the raw (non-identical, identical) counts of training
/// samples that reached them.
struct TreeNode {
    WeakLearner learner;
    std::int32_t left = -1;
    std::int32_t right = -1;
    std::uint64_t count_non_identical = 0;
    std::uint64_t count_identical = 0;

    bool is_leaf() const { return left < 0; }
};

struct Tree {
    std::vector<TreeNode> nodes;  // preorder, root at 0
};

struct ForestParams {
    std::size_t bin_count = 70;
    std::uint32_t bin_width = 15;
    bool dual = false;
    std::size_t tree_count = 400;
    std::size_t bag_per_class = 600;
    double feature_fraction = 0.05;
    double min_node_fraction = 0.10;
    std::size_t tau_steps = 20;  // grid 0..tau_steps inclusive

    std::size_t vector_length() const { return dual ? 2 * bin_count : bin_count; }
};

struct Forest {
    ForestParams params;
    std::uint64_t master_seed = 0;
    std::string dataset_digest;
    std::vector<Tree> trees;
};

/// Silhouette coefficient between two bin counts: 0 when both are zero,
/// otherwise |x - y| / max(x, y). Symmetric, in [0, 1].
double delta(std::uint64_t x, std::uint64_t y);

/// Shannon entropy in bits of a two-class count vector. Total must be > 0.
double entropy_bits(std::uint64_t count_a, std::uint64_t count_b);

using ClassCounts = std::array<std::uint64_t, 2>;  // (non-identical, identical)

/// H(S) - sum_i |S_i|/|S| H(S_i). Children must sum to the parent.
double information_gain(const ClassCounts& parent, const ClassCounts& left,
                        const ClassCounts& right);

/// Optional record of what training saw at each node, aligned with the
/// tree's preorder node array. Lets tests replay a node's candidate draw and
/// re-verify the stored split is the gain argmax.
struct TrainTraceNode {
    std::size_t sample_count = 0;
    ClassCounts counts{0, 0};
    std::vector<std::pair<std::uint32_t, std::uint32_t>> candidates;  // draw order
    bool is_split = false;
    WeakLearner chosen;
    double best_gain = 0.0;
};
struct TrainTrace {
    std::vector<TrainTraceNode> nodes;
    std::vector<std::size_t> bag_identical;      // pool indices drawn into the bag
    std::vector<std::size_t> bag_non_identical;
};

/// Grows one tree on a bag. Per node, a random feature_fraction of the valid
/// (i, j) space is drawn without replacement and tau is scanned over the full
/// grid; the gain-maximizing triple is kept, ties going to the earliest
/// candidate drawn and then the smallest tau. Nodes become leaves when they
/// receive fewer than min_node_fraction of the root bag, are pure, or no
/// candidate achieves positive gain.
Tree train_tree(const std::vector<const PairSample*>& bag, const ForestParams& params, Rng& rng,
                TrainTrace* trace = nullptr);

/// Trains tree_count trees independently. Each tree t derives its own rng
/// stream from (master_seed, t) and bags bag_per_class samples per class with
/// replacement, or the whole pool when it is smaller. `workers` only controls
/// scheduling; the result is identical for any worker count.
Forest train_forest(const std::vector<PairSample>& identical,
                    const std::vector<PairSample>& non_identical, const ForestParams& params,
                    std::uint64_t master_seed, std::size_t workers = 1,
                    std::vector<TrainTrace>* traces = nullptr);

/// Mean over trees of the reached leaf's posterior for class non-identical.
/// Higher score means more likely non-identical.
double predict_forest(const Forest& f, const FeatureVector& vec_a, const FeatureVector& vec_b);

/// Model document codec (versioned JSON, tree nodes in preorder).
std::string forest_to_json(const Forest& f);
Forest forest_from_json(const std::string& text);
void save_forest(const Forest& f, const std::string& path);
Forest load_forest(const std::string& path);

}  // namespace deanon
