#include "deanon/forest.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "deanon/errors.hpp"

namespace deanon {

double delta(std::uint64_t x, std::uint64_t y) {
    if (x == y) return 0.0;
    const std::uint64_t hi = x > y ? x : y;
    const std::uint64_t lo = x > y ? y : x;
    return static_cast<double>(hi - lo) / static_cast<double>(hi);
}

double entropy_bits(std::uint64_t count_a, std::uint64_t count_b) {
    const std::uint64_t total = count_a + count_b;
    if (total == 0) throw std::domain_error("entropy of an empty set is undefined");
    double h = 0.0;
    for (std::uint64_t c : {count_a, count_b}) {
        if (c == 0) continue;
        const double p = static_cast<double>(c) / static_cast<double>(total);
        h -= p * std::log2(p);
    }
    return h;
}

double information_gain(const ClassCounts& parent, const ClassCounts& left,
                        const ClassCounts& right) {
    for (int c = 0; c < 2; ++c) {
        if (left[c] + right[c] != parent[c]) {
            throw std::invalid_argument("information_gain: children do not sum to parent");
        }
    }
    const std::uint64_t total = parent[0] + parent[1];
    const std::uint64_t n_left = left[0] + left[1];
    const std::uint64_t n_right = right[0] + right[1];
    double gain = entropy_bits(parent[0], parent[1]);
    if (n_left > 0) {
        gain -= static_cast<double>(n_left) / total * entropy_bits(left[0], left[1]);
    }
    if (n_right > 0) {
        gain -= static_cast<double>(n_right) / total * entropy_bits(right[0], right[1]);
    }
    if (gain < 0.0 && gain > -1e-9) gain = 0.0;  // floating slack on exact-zero splits
    return gain;
}

namespace {

/// Smallest tau grid index k with delta(x, y) <= k / tau_steps, evaluated in
/// exact integer arithmetic: tau_steps * |x - y| <= k * max(x, y).
std::uint32_t min_tau_index(std::uint64_t x, std::uint64_t y, std::uint64_t tau_steps) {
    if (x == y) return 0;
    const std::uint64_t hi = x > y ? x : y;
    const std::uint64_t diff = x > y ? x - y : y - x;
    return static_cast<std::uint32_t>((tau_steps * diff + hi - 1) / hi);
}

bool routes_right(std::uint64_t x, std::uint64_t y, std::uint32_t tau_index,
                  std::uint64_t tau_steps) {
    return min_tau_index(x, y, tau_steps) <= tau_index;
}

struct CandidateSpace {
    std::size_t half;   // histogram bins per half (== length when not dual)
    bool dual;
    std::size_t size;   // number of valid (i, j) tuples

    std::pair<std::uint32_t, std::uint32_t> unpack(std::size_t idx) const {
        const std::size_t h2 = half * half;
        if (!dual || idx < h2) {
            return {static_cast<std::uint32_t>(idx / half),
                    static_cast<std::uint32_t>(idx % half)};
        }
        idx -= h2;
        return {static_cast<std::uint32_t>(half + idx / half),
                static_cast<std::uint32_t>(half + idx % half)};
    }
};

CandidateSpace candidate_space(const ForestParams& params) {
    CandidateSpace space;
    space.half = params.bin_count;
    space.dual = params.dual;
    space.size = params.dual ? 2 * params.bin_count * params.bin_count
                             : params.bin_count * params.bin_count;
    return space;
}

ClassCounts count_classes(const std::vector<const PairSample*>& samples) {
    ClassCounts counts{0, 0};
    for (const PairSample* s : samples) {
        ++counts[s->label == PairLabel::Identical ? 1 : 0];
    }
    return counts;
}

}  // namespace

Tree train_tree(const std::vector<const PairSample*>& bag, const ForestParams& params, Rng& rng,
                TrainTrace* trace) {
    if (bag.empty()) throw TrainingError("train_tree: empty bag");
    const std::size_t vec_len = params.vector_length();
    for (const PairSample* s : bag) {
        if (s->vec_a.length() != vec_len || s->vec_b.length() != vec_len) {
            throw TrainingError("train_tree: sample vector length does not match params");
        }
    }
    {
        ClassCounts root = count_classes(bag);
        if (root[0] == 0 || root[1] == 0) {
            throw TrainingError("train_tree: root bag must contain both classes");
        }
    }

    const CandidateSpace space = candidate_space(params);
    const std::size_t candidate_count = std::max<std::size_t>(
        1, static_cast<std::size_t>(
               std::ceil(params.feature_fraction * static_cast<double>(space.size))));
    const double floor_count = params.min_node_fraction * static_cast<double>(bag.size());
    const std::size_t grid = params.tau_steps;

    Tree tree;
    std::vector<std::uint64_t> hist[2];
    hist[0].resize(grid + 1);
    hist[1].resize(grid + 1);

    std::function<std::int32_t(const std::vector<const PairSample*>&)> build =
        [&](const std::vector<const PairSample*>& samples) -> std::int32_t {
        const std::int32_t index = static_cast<std::int32_t>(tree.nodes.size());
        tree.nodes.emplace_back();
        if (trace) trace->nodes.emplace_back();

        const ClassCounts counts = count_classes(samples);
        if (trace) {
            trace->nodes[index].sample_count = samples.size();
            trace->nodes[index].counts = counts;
        }
        auto make_leaf = [&]() {
            tree.nodes[index].count_non_identical = counts[0];
            tree.nodes[index].count_identical = counts[1];
            return index;
        };
        const bool pure = counts[0] == 0 || counts[1] == 0;
        if (pure || static_cast<double>(samples.size()) < floor_count) return make_leaf();

        auto drawn = rng.sample_without_replacement(space.size, candidate_count);

        WeakLearner best;
        double best_gain = 0.0;
        bool have_split = false;
        for (std::size_t idx : drawn) {
            auto [i, j] = space.unpack(idx);
            if (trace) trace->nodes[index].candidates.emplace_back(i, j);
            std::fill(hist[0].begin(), hist[0].end(), 0);
            std::fill(hist[1].begin(), hist[1].end(), 0);
            for (const PairSample* s : samples) {
                const std::uint32_t q = min_tau_index(s->vec_a.bins[i], s->vec_b.bins[j], grid);
                ++hist[s->label == PairLabel::Identical ? 1 : 0][q];
            }
            ClassCounts right{0, 0};
            for (std::uint32_t k = 0; k <= grid; ++k) {
                right[0] += hist[0][k];
                right[1] += hist[1][k];
                const ClassCounts left{counts[0] - right[0], counts[1] - right[1]};
                if (right[0] + right[1] == 0 || left[0] + left[1] == 0) continue;
                const double gain = information_gain(counts, left, right);
                if (gain > best_gain) {
                    best_gain = gain;
                    best = WeakLearner{i, j, k};
                    have_split = true;
                }
            }
        }
        if (!have_split || best_gain <= 0.0) return make_leaf();

        std::vector<const PairSample*> left_samples, right_samples;
        for (const PairSample* s : samples) {
            if (routes_right(s->vec_a.bins[best.i], s->vec_b.bins[best.j], best.tau_index,
                             grid)) {
                right_samples.push_back(s);
            } else {
                left_samples.push_back(s);
            }
        }
        tree.nodes[index].learner = best;
        if (trace) {
            trace->nodes[index].is_split = true;
            trace->nodes[index].chosen = best;
            trace->nodes[index].best_gain = best_gain;
        }
        // Preorder: left subtree first (the False branch), then right.
        const std::int32_t left_index = build(left_samples);
        const std::int32_t right_index = build(right_samples);
        tree.nodes[index].left = left_index;
        tree.nodes[index].right = right_index;
        return index;
    };
    build(bag);
    return tree;
}

namespace {

std::vector<const PairSample*> draw_bag(const std::vector<PairSample>& pool,
                                        std::size_t bag_per_class, Rng& rng,
                                        std::vector<std::size_t>* picked) {
    std::vector<const PairSample*> bag;
    if (pool.size() < bag_per_class) {
        // Small pool: every tree sees all of it.
        bag.reserve(pool.size());
        for (std::size_t i = 0; i < pool.size(); ++i) {
            bag.push_back(&pool[i]);
            if (picked) picked->push_back(i);
        }
        return bag;
    }
    bag.reserve(bag_per_class);
    for (std::size_t k = 0; k < bag_per_class; ++k) {
        const std::size_t i = static_cast<std::size_t>(rng.below(pool.size()));
        bag.push_back(&pool[i]);
        if (picked) picked->push_back(i);
    }
    return bag;
}

}  // namespace

Forest train_forest(const std::vector<PairSample>& identical,
                    const std::vector<PairSample>& non_identical, const ForestParams& params,
                    std::uint64_t master_seed, std::size_t workers,
                    std::vector<TrainTrace>* traces) {
    if (identical.empty()) throw TrainingError("train_forest: empty identical pool");
    if (non_identical.empty()) throw TrainingError("train_forest: empty non-identical pool");
    if (params.tree_count < 1) throw ConfigError("train_forest: tree_count must be >= 1");

    Forest forest;
    forest.params = params;
    forest.master_seed = master_seed;
    forest.trees.resize(params.tree_count);
    if (traces) traces->assign(params.tree_count, {});

    auto train_one = [&](std::size_t t) {
        Rng rng(derive_seed(master_seed, t));
        TrainTrace* trace = traces ? &(*traces)[t] : nullptr;
        std::vector<const PairSample*> bag =
            draw_bag(identical, params.bag_per_class, rng, trace ? &trace->bag_identical : nullptr);
        std::vector<const PairSample*> neg = draw_bag(
            non_identical, params.bag_per_class, rng, trace ? &trace->bag_non_identical : nullptr);
        bag.insert(bag.end(), neg.begin(), neg.end());
        forest.trees[t] = train_tree(bag, params, rng, trace);
    };

    if (workers <= 1 || params.tree_count == 1) {
        for (std::size_t t = 0; t < params.tree_count; ++t) train_one(t);
    } else {
        const std::size_t n_threads = std::min(workers, params.tree_count);
        std::vector<std::thread> pool;
        pool.reserve(n_threads);
        std::exception_ptr failure;
        std::mutex failure_mutex;
        for (std::size_t w = 0; w < n_threads; ++w) {
            pool.emplace_back([&, w] {
                try {
                    for (std::size_t t = w; t < params.tree_count; t += n_threads) train_one(t);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                }
            });
        }
        for (auto& th : pool) th.join();
        if (failure) std::rethrow_exception(failure);
    }
    return forest;
}

double predict_forest(const Forest& f, const FeatureVector& vec_a, const FeatureVector& vec_b) {
    const std::size_t vec_len = f.params.vector_length();
    if (vec_a.length() != vec_len || vec_b.length() != vec_len ||
        vec_a.dual != f.params.dual || vec_b.dual != f.params.dual) {
        throw std::invalid_argument("predict_forest: vector shape does not match model params");
    }
    if (f.trees.empty()) throw ModelFormatError("predict_forest: forest has no trees");

    double sum = 0.0;
    for (const Tree& tree : f.trees) {
        std::int32_t at = 0;
        while (!tree.nodes[at].is_leaf()) {
            const TreeNode& node = tree.nodes[at];
            at = routes_right(vec_a.bins[node.learner.i], vec_b.bins[node.learner.j],
                              node.learner.tau_index, f.params.tau_steps)
                     ? node.right
                     : node.left;
        }
        const TreeNode& leaf = tree.nodes[at];
        const double total =
            static_cast<double>(leaf.count_non_identical + leaf.count_identical);
        sum += static_cast<double>(leaf.count_non_identical) / total;
    }
    return sum / static_cast<double>(f.trees.size());
}

namespace {

using nlohmann::json;

constexpr int kModelVersion = 1;

json node_to_json(const TreeNode& node, std::size_t tau_steps) {
    if (node.is_leaf()) {
        return json{{"leaf", {node.count_non_identical, node.count_identical}}};
    }
    return json{{"split",
                 {{"i", node.learner.i},
                  {"j", node.learner.j},
                  {"tau", static_cast<double>(node.learner.tau_index) /
                              static_cast<double>(tau_steps)}}},
                {"l", node.left},
                {"r", node.right}};
}

TreeNode node_from_json(const json& j, const ForestParams& params, std::size_t index,
                        std::size_t node_count) {
    TreeNode node;
    if (j.contains("leaf")) {
        const auto& leaf = j.at("leaf");
        if (!leaf.is_array() || leaf.size() != 2) {
            throw ModelFormatError("leaf must be a [non-identical, identical] pair");
        }
        node.count_non_identical = leaf[0].get<std::uint64_t>();
        node.count_identical = leaf[1].get<std::uint64_t>();
        if (node.count_non_identical == 0 && node.count_identical == 0) {
            throw ModelFormatError("leaf with zero samples");
        }
        return node;
    }
    if (!j.contains("split")) throw ModelFormatError("node is neither split nor leaf");
    const auto& split = j.at("split");
    node.learner.i = split.at("i").get<std::uint32_t>();
    node.learner.j = split.at("j").get<std::uint32_t>();
    const double tau = split.at("tau").get<double>();
    if (tau < 0.0 || tau > 1.0) throw ModelFormatError("tau outside [0,1]");
    node.learner.tau_index =
        static_cast<std::uint32_t>(std::lround(tau * static_cast<double>(params.tau_steps)));
    node.left = j.at("l").get<std::int32_t>();
    node.right = j.at("r").get<std::int32_t>();
    const auto in_range = [&](std::int32_t child) {
        return child > static_cast<std::int32_t>(index) &&
               child < static_cast<std::int32_t>(node_count);
    };
    if (!in_range(node.left) || !in_range(node.right)) {
        throw ModelFormatError("split child index out of range");
    }
    const std::size_t vec_len = params.vector_length();
    if (node.learner.i >= vec_len || node.learner.j >= vec_len) {
        throw ModelFormatError("split feature index out of range");
    }
    if (params.dual &&
        (node.learner.i < params.bin_count) != (node.learner.j < params.bin_count)) {
        throw ModelFormatError("dual split mixes vector halves");
    }
    return node;
}

}  // namespace

std::string forest_to_json(const Forest& f) {
    json doc;
    doc["version"] = kModelVersion;
    doc["params"] = {{"n", f.params.bin_count},
                     {"b", f.params.bin_width},
                     {"dual", f.params.dual},
                     {"T", f.params.tree_count},
                     {"tau_step", 1.0 / static_cast<double>(f.params.tau_steps)},
                     {"feature_fraction", f.params.feature_fraction},
                     {"bag_per_class", f.params.bag_per_class},
                     {"min_node_fraction", f.params.min_node_fraction}};
    doc["seed"] = f.master_seed;
    doc["dataset_digest"] = f.dataset_digest;
    json trees = json::array();
    for (const Tree& tree : f.trees) {
        json nodes = json::array();
        for (const TreeNode& node : tree.nodes) {
            nodes.push_back(node_to_json(node, f.params.tau_steps));
        }
        trees.push_back(std::move(nodes));
    }
    doc["trees"] = std::move(trees);
    return doc.dump();
}

Forest forest_from_json(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw ModelFormatError(std::string("model document unreadable: ") + e.what());
    }
    try {
        if (!doc.contains("version") || doc.at("version").get<int>() != kModelVersion) {
            throw ModelFormatError("unsupported model version");
        }
        Forest f;
        const auto& p = doc.at("params");
        f.params.bin_count = p.at("n").get<std::size_t>();
        f.params.bin_width = p.at("b").get<std::uint32_t>();
        f.params.dual = p.at("dual").get<bool>();
        f.params.tree_count = p.at("T").get<std::size_t>();
        const double tau_step = p.at("tau_step").get<double>();
        if (tau_step <= 0.0 || tau_step > 1.0) throw ModelFormatError("bad tau_step");
        f.params.tau_steps = static_cast<std::size_t>(std::lround(1.0 / tau_step));
        f.params.feature_fraction = p.at("feature_fraction").get<double>();
        f.params.bag_per_class = p.at("bag_per_class").get<std::size_t>();
        f.params.min_node_fraction = p.at("min_node_fraction").get<double>();
        f.master_seed = doc.at("seed").get<std::uint64_t>();
        f.dataset_digest = doc.value("dataset_digest", std::string());

        const auto& trees = doc.at("trees");
        if (!trees.is_array() || trees.empty()) {
            throw ModelFormatError("model must contain a nonempty trees array");
        }
        if (trees.size() != f.params.tree_count) {
            throw ModelFormatError("params.T does not match number of trees");
        }
        for (const auto& jt : trees) {
            if (!jt.is_array() || jt.empty()) throw ModelFormatError("empty tree");
            Tree tree;
            for (std::size_t idx = 0; idx < jt.size(); ++idx) {
                tree.nodes.push_back(node_from_json(jt[idx], f.params, idx, jt.size()));
            }
            f.trees.push_back(std::move(tree));
        }
        return f;
    } catch (const json::exception& e) {
        throw ModelFormatError(std::string("model document invalid: ") + e.what());
    }
}

void save_forest(const Forest& f, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write model file: " + path);
    out << forest_to_json(f) << '\n';
}

Forest load_forest(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open model file: " + path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return forest_from_json(text);
}

}  // namespace deanon
