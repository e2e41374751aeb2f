#include "deanon/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include <json.hpp>
#include <openssl/evp.h>

#include "deanon/adhoc.hpp"
#include "deanon/errors.hpp"
#include "deanon/rng.hpp"

namespace deanon {

namespace fs = std::filesystem;
using nlohmann::json;

// --- Config ---------------------------------------------------------------

Config Config::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    Config cfg;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::size_t start = line.find_first_not_of(" \t\r");
        if (start == std::string::npos || line[start] == '#') continue;
        std::size_t eq = line.find('=', start);
        if (eq == std::string::npos) throw ParseError("expected key=value", line_no);
        auto trim = [](std::string s) {
            std::size_t b = s.find_first_not_of(" \t\r");
            std::size_t e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        std::string key = trim(line.substr(start, eq - start));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw ParseError("empty config key", line_no);
        cfg.set(key, value);
    }
    return cfg;
}

std::string Config::get(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) throw ConfigError("missing config key: " + key);
    return it->second;
}

std::string Config::get_or(const std::string& key, const std::string& fallback) const {
    auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
}

std::int64_t Config::get_int(const std::string& key, std::int64_t fallback) const {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    try {
        return std::stoll(it->second);
    } catch (const std::exception&) {
        throw ConfigError("config key '" + key + "' is not an integer: " + it->second);
    }
}

double Config::get_double(const std::string& key, double fallback) const {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    try {
        return std::stod(it->second);
    } catch (const std::exception&) {
        throw ConfigError("config key '" + key + "' is not a number: " + it->second);
    }
}

std::uint64_t Config::seed() const {
    auto it = values_.find("seed");
    if (it == values_.end()) {
        throw ConfigError("master seed is required: pass --seed or set seed= in the config");
    }
    try {
        return std::stoull(it->second);
    } catch (const std::exception&) {
        throw ConfigError("seed is not an unsigned integer: " + it->second);
    }
}

// --- Digests ----------------------------------------------------------------

std::string sha256_hex(const std::string& bytes) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
        throw std::runtime_error("sha256 failed");
    }
    static const char* hex = "0123456789abcdef";
    std::string out;
    out.reserve(2 * len);
    for (unsigned int i = 0; i < len; ++i) {
        out.push_back(hex[digest[i] >> 4]);
        out.push_back(hex[digest[i] & 0xf]);
    }
    return out;
}

std::string file_sha256(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open input for digest: " + path);
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return sha256_hex(bytes);
}

// --- RunManifest ------------------------------------------------------------

namespace {

std::string now_iso8601() {
    std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[sizeof "1970-01-01T00:00:00Z"];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

bool execution_only_key(const std::string& key) {
    return key == "workers" || key == "out_root";
}

}  // namespace

std::string RunManifest::digest() const {
    std::ostringstream canon;
    canon << "command " << command << '\n';
    for (const auto& [k, v] : config) {
        if (!execution_only_key(k)) canon << "config " << k << '=' << v << '\n';
    }
    canon << "seed " << master_seed << '\n';
    for (const auto& [path, d] : input_digests) {
        canon << "input " << path << '=' << d << '\n';
    }
    return sha256_hex(canon.str());
}

std::string RunManifest::to_json() const {
    json doc;
    doc["command"] = command;
    doc["config"] = config;
    doc["seed"] = master_seed;
    doc["inputs"] = input_digests;
    doc["artifacts"] = artifacts;
    doc["started_at"] = started_at;
    doc["finished_at"] = finished_at;
    doc["digest"] = digest();
    return doc.dump(2);
}

void RunManifest::save(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write manifest: " + path);
    out << to_json() << '\n';
}

std::filesystem::path output_root(const Config& cfg) {
    if (cfg.has("out_root")) return cfg.get("out_root");
    if (const char* env = std::getenv("DEANON_CACHE_DIR")) return env;
    return "runs";
}

// --- Stage bookkeeping --------------------------------------------------------

namespace {

class Stage {
public:
    Stage(std::string command, const Config& cfg) : cfg_(cfg) {
        manifest_.command = std::move(command);
        manifest_.config = cfg.values();
        manifest_.master_seed = cfg.seed();
        manifest_.started_at = now_iso8601();
    }

    const Config& cfg() const { return cfg_; }

    void add_input(const std::string& path) {
        if (dir_made_) throw StageError(manifest_.command, "input registered after run dir fixed");
        manifest_.input_digests[path] = file_sha256(path);
    }

    const fs::path& dir() {
        if (!dir_made_) {
            dir_ = output_root(cfg_) / (manifest_.command + "-" + manifest_.digest().substr(0, 16));
            fs::create_directories(dir_);
            dir_made_ = true;
        }
        return dir_;
    }

    fs::path artifact(const std::string& rel) {
        fs::path p = dir() / rel;
        fs::create_directories(p.parent_path());
        manifest_.artifacts.push_back(rel);
        return p;
    }

    StageResult finish() {
        manifest_.finished_at = now_iso8601();
        std::sort(manifest_.artifacts.begin(), manifest_.artifacts.end());
        manifest_.save((dir() / "manifest.json").string());
        return {dir_, manifest_};
    }

private:
    Config cfg_;
    RunManifest manifest_;
    fs::path dir_;
    bool dir_made_ = false;
};

std::ofstream open_out(const fs::path& path, const std::string& what) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write " + what + ": " + path.string());
    return out;
}

std::string egonet_filename(std::size_t index) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "egonet_%05zu.txt", index);
    return buf;
}

}  // namespace

// --- Case filters ---------------------------------------------------------------

std::vector<PairCase> parse_case_filter(const std::string& filter) {
    if (filter == "1") return {PairCase::One};
    if (filter == "12") return {PairCase::Two};
    if (filter == "2") return {PairCase::Three};
    if (filter == "all") return {PairCase::One, PairCase::Two, PairCase::Three};
    throw ConfigError("case filter must be one of 1 | 12 | 2 | all, got '" + filter + "'");
}

std::string case_row_label(PairCase c) {
    switch (c) {
        case PairCase::One: return "1-hop";
        case PairCase::Two: return "1,2-hop";
        case PairCase::Three: return "2-hop";
    }
    return "?";
}

// --- Pairs directory IO -----------------------------------------------------------

namespace {

void write_pair_file(const std::vector<PairSample>& pairs, const fs::path& path) {
    std::ofstream out = open_out(path, "pair file");
    for (const PairSample& s : pairs) {
        out << s.a.egonet << ' ' << s.a.pseudonym << ' ' << s.b.egonet << ' ' << s.b.pseudonym
            << ' ' << static_cast<int>(s.pair_case) << ' ' << format_bins(s.vec_a) << ' '
            << format_bins(s.vec_b) << '\n';
    }
}

std::vector<PairSample> read_pair_file(const fs::path& path, PairLabel label,
                                       std::uint32_t bin_width, bool dual) {
    std::vector<PairSample> pairs;
    std::ifstream in(path);
    if (!in) return pairs;  // absent file means an empty pool
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::istringstream tokens(line);
        PairSample s;
        int case_tag = 0;
        std::string bins_a, bins_b;
        if (!(tokens >> s.a.egonet >> s.a.pseudonym >> s.b.egonet >> s.b.pseudonym >> case_tag >>
              bins_a >> bins_b)) {
            throw ParseError("malformed pair line in " + path.string(), line_no);
        }
        s.label = label;
        s.pair_case = static_cast<PairCase>(case_tag);
        s.vec_a.bins = parse_bins(bins_a);
        s.vec_b.bins = parse_bins(bins_b);
        s.vec_a.bin_width = s.vec_b.bin_width = bin_width;
        s.vec_a.dual = s.vec_b.dual = dual;
        pairs.push_back(std::move(s));
    }
    return pairs;
}

const char* kPairFiles[3] = {"identical_case1.tsv", "identical_case2.tsv",
                             "identical_case3.tsv"};

}  // namespace

void write_pairs_dir(const PairsOnDisk& pairs, const fs::path& dir) {
    fs::create_directories(dir / "train");
    fs::create_directories(dir / "test");
    {
        std::ofstream meta = open_out(dir / "meta.txt", "pairs meta");
        meta << "bins=" << pairs.bin_count << '\n'
             << "bin_size=" << pairs.bin_width << '\n'
             << "dual=" << (pairs.dual ? 1 : 0) << '\n';
    }
    for (int side = 0; side < 2; ++side) {
        const PairPools& pools = side ? pairs.split.test : pairs.split.train;
        const fs::path base = dir / (side ? "test" : "train");
        for (int c = 0; c < 3; ++c) {
            write_pair_file(pools.identical_by_case[c], base / kPairFiles[c]);
        }
        write_pair_file(pools.non_identical, base / "non_identical.tsv");
    }
}

PairsOnDisk read_pairs_dir(const fs::path& dir) {
    Config meta = Config::from_file((dir / "meta.txt").string());
    PairsOnDisk out;
    out.bin_count = static_cast<std::size_t>(meta.get_int("bins", 70));
    out.bin_width = static_cast<std::uint32_t>(meta.get_int("bin_size", 15));
    out.dual = meta.get_int("dual", 0) != 0;
    for (int side = 0; side < 2; ++side) {
        PairPools& pools = side ? out.split.test : out.split.train;
        const fs::path base = dir / (side ? "test" : "train");
        for (int c = 0; c < 3; ++c) {
            pools.identical_by_case[c] =
                read_pair_file(base / kPairFiles[c], PairLabel::Identical, out.bin_width, out.dual);
        }
        pools.non_identical =
            read_pair_file(base / "non_identical.tsv", PairLabel::NonIdentical, out.bin_width,
                           out.dual);
    }
    return out;
}

// --- Shared stage logic ---------------------------------------------------------

namespace {

struct EgonetSet {
    std::vector<Egonet> egonets;
    std::vector<TruthMap> truths;
};

EgonetSet build_egonets(const Graph& g, Scheme scheme, std::size_t count, std::size_t min_size,
                        std::uint64_t seed) {
    EgonetSet set;
    std::vector<NodeId> egos = select_egos(g, count, min_size, derive_seed(seed, 0));
    set.egonets.reserve(egos.size());
    set.truths.reserve(egos.size());
    for (std::size_t i = 0; i < egos.size(); ++i) {
        auto [egonet, truth] = extract_egonet(g, egos[i], scheme, derive_seed(seed, i + 1));
        set.egonets.push_back(std::move(egonet));
        set.truths.push_back(std::move(truth));
    }
    return set;
}

void write_egonet_set(const EgonetSet& set, Stage& stage) {
    for (std::size_t i = 0; i < set.egonets.size(); ++i) {
        std::ofstream out = open_out(stage.artifact(egonet_filename(i)), "egonet file");
        write_egonet(set.egonets[i], out);
    }
    std::ofstream truth = open_out(stage.artifact("secret_truth.txt"), "truth file");
    write_truth(set.truths, truth);
}

EgonetSet read_egonet_set(const fs::path& dir, bool need_truth) {
    EgonetSet set;
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        const std::string name = entry.path().filename().string();
        if (name.rfind("egonet_", 0) == 0 && name.size() > 4 &&
            name.substr(name.size() - 4) == ".txt") {
            files.push_back(entry.path());
        }
    }
    if (files.empty()) throw ConfigError("no egonet_*.txt files under " + dir.string());
    std::sort(files.begin(), files.end());
    for (const auto& f : files) {
        std::ifstream in(f);
        if (!in) throw ConfigError("cannot open egonet file: " + f.string());
        set.egonets.push_back(read_egonet(in));
    }
    const fs::path truth_path = dir / "secret_truth.txt";
    if (fs::exists(truth_path)) {
        std::ifstream in(truth_path);
        set.truths = read_truth(in);
        set.truths.resize(set.egonets.size());
    } else if (need_truth) {
        throw ConfigError("missing secret_truth.txt under " + dir.string());
    }
    return set;
}

void write_feature_dump(const EgonetSet& set, std::size_t bin_count, std::uint32_t bin_width,
                        std::ostream& out) {
    for (std::size_t e = 0; e < set.egonets.size(); ++e) {
        for (NodeId pseudo : set.egonets[e].graph.nodes()) {
            write_feature_line(out, e, pseudo,
                               degree_histogram_vector(set.egonets[e].graph, pseudo, bin_count,
                                                       bin_width));
        }
    }
}

PairGenConfig pair_config_from(const Config& cfg) {
    PairGenConfig pc;
    pc.min_degree = static_cast<std::uint32_t>(cfg.get_int("min_degree", 5));
    pc.non_identical_ratio = cfg.get_double("ratio", 1.0);
    pc.test_fraction = cfg.get_double("test_fraction", 0.5);
    pc.bin_count = static_cast<std::size_t>(cfg.get_int("bins", 70));
    pc.bin_width = static_cast<std::uint32_t>(cfg.get_int("bin_size", 15));
    pc.filter_by_original_degree = cfg.get_int("original_degree_filter", 0) != 0;
    return pc;
}

ForestParams forest_params_from(const Config& cfg, std::size_t bin_count,
                                std::uint32_t bin_width, bool dual) {
    ForestParams params;
    params.bin_count = bin_count;
    params.bin_width = bin_width;
    params.dual = dual;
    params.tree_count = static_cast<std::size_t>(cfg.get_int("trees", 400));
    params.bag_per_class = static_cast<std::size_t>(cfg.get_int("bag", 600));
    params.feature_fraction = cfg.get_double("feature_fraction", 0.05);
    params.min_node_fraction = cfg.get_double("min_node_fraction", 0.10);
    return params;
}

std::vector<PairSample> gather_identical(const PairPools& pools,
                                         const std::vector<PairCase>& cases) {
    std::vector<PairSample> out;
    for (PairCase c : cases) {
        const auto& pool = pools.identical(c);
        out.insert(out.end(), pool.begin(), pool.end());
    }
    return out;
}

Forest train_from_pairs(const PairsOnDisk& pairs, const std::vector<PairCase>& cases,
                        const Config& cfg, const std::string& dataset_digest) {
    ForestParams params = forest_params_from(cfg, pairs.bin_count, pairs.bin_width, pairs.dual);
    std::vector<PairSample> identical = gather_identical(pairs.split.train, cases);
    if (identical.empty()) throw TrainingError("no identical training pairs for this case filter");
    if (pairs.split.train.non_identical.empty()) {
        throw TrainingError("no non-identical training pairs");
    }
    const std::size_t workers = static_cast<std::size_t>(cfg.get_int("workers", 1));
    Forest forest = train_forest(identical, pairs.split.train.non_identical, params, cfg.seed(),
                                 workers);
    forest.dataset_digest = dataset_digest;
    return forest;
}

std::vector<double> scores_of(const Forest& forest, const std::vector<PairSample>& pairs) {
    std::vector<double> out;
    out.reserve(pairs.size());
    for (const PairSample& s : pairs) out.push_back(predict_forest(forest, s.vec_a, s.vec_b));
    return out;
}

std::vector<double> fp_levels_from(const Config& cfg) {
    if (!cfg.has("fp_levels")) return default_fp_levels();
    std::vector<double> levels;
    std::istringstream in(cfg.get("fp_levels"));
    std::string tok;
    while (std::getline(in, tok, ',')) levels.push_back(std::stod(tok));
    if (levels.empty()) throw ConfigError("fp_levels is empty");
    return levels;
}

void eval_and_write(const Forest& forest, const PairsOnDisk& pairs,
                    const std::vector<PairCase>& cases, const std::vector<double>& levels,
                    Stage& stage) {
    const PairPools& test = pairs.split.test;
    if (test.non_identical.empty()) throw ConfigError("test pools have no non-identical pairs");
    const std::vector<double> neg_scores = scores_of(forest, test.non_identical);

    std::ofstream report = open_out(stage.artifact("report.tsv"), "report");
    write_report_header(report, levels);
    auto emit_row = [&](const std::string& label, const std::vector<PairSample>& identical,
                        const std::string& roc_name) {
        if (identical.empty()) {
            report << label << "\t(no identical test pairs)\n";
            return;
        }
        const std::vector<double> pos_scores = scores_of(forest, identical);
        RocResult roc = roc_and_auc(pos_scores, neg_scores);
        EvalReport r;
        r.auc = roc.auc;
        r.fp_levels = levels;
        r.tp_rates = tp_at_fp(roc.curve, levels);
        r.identical_count = identical.size();
        r.non_identical_count = neg_scores.size();
        write_report_row(report, label, r);
        std::ofstream roc_out = open_out(stage.artifact(roc_name), "roc csv");
        write_roc_csv(roc.curve, roc_out);
    };
    for (PairCase c : cases) {
        emit_row(case_row_label(c), test.identical(c),
                 "roc_case" + std::to_string(static_cast<int>(c)) + ".csv");
    }
    if (cases.size() > 1) {
        emit_row("Complete", gather_identical(test, cases), "roc_complete.csv");
    }
}

Scheme scheme_from(const Config& cfg) {
    const std::int64_t s = cfg.get_int("scheme", 1);
    if (s != 1 && s != 2) throw ConfigError("scheme must be 1 or 2");
    return static_cast<Scheme>(s);
}

}  // namespace

// --- Traditional (two-copy) task ----------------------------------------------

PairSplit make_traditional_pairs(const OverlapSample& sample, std::size_t seed_count,
                                 std::size_t non_identical_train, std::size_t identical_test,
                                 std::size_t non_identical_test, std::size_t bin_count,
                                 std::uint32_t bin_width, std::uint64_t seed) {
    if (sample.shared.size() < seed_count + identical_test) {
        throw ExhaustionError("not enough shared nodes for the requested identical pairs",
                              sample.shared.size());
    }
    std::vector<NodeId> shared = sample.shared;
    Rng rng(derive_seed(seed, 0));
    rng.shuffle(shared);

    auto identical_sample = [&](NodeId v) {
        PairSample s;
        s.vec_a = dual_hop_vector(sample.g1, v, bin_count, bin_width);
        s.vec_b = dual_hop_vector(sample.g2, v, bin_count, bin_width);
        s.label = PairLabel::Identical;
        s.pair_case = PairCase::One;
        s.a = {0, v};
        s.b = {1, v};
        return s;
    };

    PairSplit out;
    for (std::size_t k = 0; k < seed_count; ++k) {
        out.train.identical(PairCase::One).push_back(identical_sample(shared[k]));
    }
    for (std::size_t k = 0; k < identical_test; ++k) {
        out.test.identical(PairCase::One).push_back(identical_sample(shared[seed_count + k]));
    }

    const std::vector<NodeId> v1 = sample.g1.nodes();
    const std::vector<NodeId> v2 = sample.g2.nodes();
    std::unordered_set<std::uint64_t> seen;
    auto draw_non_identical = [&](std::vector<PairSample>& into, std::size_t count, Rng& r) {
        std::size_t attempts = 0;
        const std::size_t max_attempts = 200 * count + 1000;
        while (into.size() < count && attempts++ < max_attempts) {
            NodeId u = v1[r.below(v1.size())];
            NodeId w = v2[r.below(v2.size())];
            if (u == w) continue;
            std::uint64_t key = splitmix64(static_cast<std::uint64_t>(u)) ^
                                splitmix64(static_cast<std::uint64_t>(w) + 0x9e3779b97f4a7c15ULL);
            if (!seen.insert(key).second) continue;
            PairSample s;
            s.vec_a = dual_hop_vector(sample.g1, u, bin_count, bin_width);
            s.vec_b = dual_hop_vector(sample.g2, w, bin_count, bin_width);
            s.label = PairLabel::NonIdentical;
            s.pair_case = PairCase::One;
            s.a = {0, u};
            s.b = {1, w};
            into.push_back(std::move(s));
        }
    };
    Rng rng_train(derive_seed(seed, 1));
    Rng rng_test(derive_seed(seed, 2));
    draw_non_identical(out.train.non_identical, non_identical_train, rng_train);
    draw_non_identical(out.test.non_identical, non_identical_test, rng_test);
    return out;
}

std::vector<ScoredPair> score_traditional_pairs(const Forest& forest,
                                                const OverlapSample& sample,
                                                const std::vector<PairSample>& pairs) {
    std::vector<ScoredPair> out;
    out.reserve(pairs.size());
    auto two_hop_set = [](const Graph& g, NodeId v) {
        NodeSet nodes;
        for (const auto& [node, _] : khop_neighborhood(g, v, 2).distances) nodes.insert(node);
        return nodes;
    };
    for (const PairSample& s : pairs) {
        ScoredPair sp;
        sp.score = predict_forest(forest, s.vec_a, s.vec_b);
        sp.jc = jaccard(two_hop_set(sample.g1, s.a.pseudonym),
                        two_hop_set(sample.g2, s.b.pseudonym));
        sp.label = s.label;
        out.push_back(sp);
    }
    return out;
}

// --- Stages ------------------------------------------------------------------

StageResult run_synth(const Config& cfg) {
    Stage stage("synth", cfg);
    const std::size_t nodes = static_cast<std::size_t>(cfg.get_int("nodes", 20000));
    const std::size_t degree = static_cast<std::size_t>(cfg.get_int("degree", 6));
    Graph g = synth_powerlaw(nodes, degree, cfg.seed());
    write_edge_list_file(g, stage.artifact("graph.txt").string());
    std::ofstream stats = open_out(stage.artifact("stats.txt"), "stats");
    stats << "nodes=" << g.node_count() << "\nedges=" << g.edge_count() << '\n';
    return stage.finish();
}

StageResult run_ingest(const Config& cfg) {
    Stage stage("ingest", cfg);
    const std::string input = cfg.get("input");
    stage.add_input(input);
    Graph g = read_edge_list_file(input);
    write_edge_list_file(g, stage.artifact("graph.txt").string());
    std::ofstream stats = open_out(stage.artifact("stats.txt"), "stats");
    stats << "nodes=" << g.node_count() << "\nedges=" << g.edge_count() << '\n';
    return stage.finish();
}

StageResult run_egonets(const Config& cfg) {
    Stage stage("egonets", cfg);
    const std::string input = cfg.get("input");
    stage.add_input(input);
    Graph g = read_edge_list_file(input);
    EgonetSet set = build_egonets(g, scheme_from(cfg),
                                  static_cast<std::size_t>(cfg.get_int("count", 100)),
                                  static_cast<std::size_t>(cfg.get_int("min_size", 400)),
                                  cfg.seed());
    write_egonet_set(set, stage);
    return stage.finish();
}

StageResult run_pairs(const Config& cfg) {
    Stage stage("pairs", cfg);
    const fs::path egonet_dir = cfg.get("input");
    EgonetSet set = read_egonet_set(egonet_dir, /*need_truth=*/true);
    PairGenConfig pc = pair_config_from(cfg);
    PairsOnDisk pairs;
    pairs.split = generate_pair_samples(set.egonets, set.truths, pc, cfg.seed());
    pairs.bin_count = pc.bin_count;
    pairs.bin_width = pc.bin_width;
    pairs.dual = false;
    write_pairs_dir(pairs, stage.dir() / "pairs");
    for (int side = 0; side < 2; ++side) {
        std::string base = side ? "pairs/test/" : "pairs/train/";
        for (int c = 0; c < 3; ++c) stage.artifact(base + kPairFiles[c]);
        stage.artifact(base + "non_identical.tsv");
    }
    stage.artifact("pairs/meta.txt");
    std::ofstream features = open_out(stage.artifact("features.tsv"), "feature dump");
    write_feature_dump(set, pc.bin_count, pc.bin_width, features);
    return stage.finish();
}

StageResult run_train(const Config& cfg) {
    Stage stage("train", cfg);
    const fs::path pairs_dir = cfg.get("input");
    stage.add_input((pairs_dir / "meta.txt").string());
    PairsOnDisk pairs = read_pairs_dir(pairs_dir);
    if (cfg.has("bins") &&
        static_cast<std::size_t>(cfg.get_int("bins", 0)) != pairs.bin_count) {
        throw ConfigError("--bins does not match the pairs directory meta");
    }
    if (cfg.has("bin_size") &&
        static_cast<std::uint32_t>(cfg.get_int("bin_size", 0)) != pairs.bin_width) {
        throw ConfigError("--bin-size does not match the pairs directory meta");
    }
    const std::vector<PairCase> cases = parse_case_filter(cfg.get_or("case", "all"));
    Forest forest = train_from_pairs(pairs, cases, cfg, file_sha256((pairs_dir / "meta.txt").string()));
    save_forest(forest, stage.artifact("model.json").string());
    return stage.finish();
}

StageResult run_score(const Config& cfg) {
    Stage stage("score", cfg);
    const std::string model_path = cfg.get("model");
    const fs::path pairs_dir = cfg.get("input");
    stage.add_input(model_path);
    stage.add_input((pairs_dir / "meta.txt").string());
    Forest forest = load_forest(model_path);
    PairsOnDisk pairs = read_pairs_dir(pairs_dir);
    const std::vector<PairCase> cases = parse_case_filter(cfg.get_or("case", "all"));
    const bool use_train = cfg.get_or("split", "test") == "train";
    const PairPools& pools = use_train ? pairs.split.train : pairs.split.test;

    std::ofstream out = open_out(stage.artifact("scores.tsv"), "scores");
    out << "egonet_a\tpseudo_a\tegonet_b\tpseudo_b\tcase\tlabel\tscore\n";
    auto emit = [&](const std::vector<PairSample>& list, const char* label) {
        for (const PairSample& s : list) {
            out << s.a.egonet << '\t' << s.a.pseudonym << '\t' << s.b.egonet << '\t'
                << s.b.pseudonym << '\t' << static_cast<int>(s.pair_case) << '\t' << label << '\t'
                << predict_forest(forest, s.vec_a, s.vec_b) << '\n';
        }
    };
    for (PairCase c : cases) emit(pools.identical(c), "identical");
    emit(pools.non_identical, "non_identical");
    return stage.finish();
}

StageResult run_eval(const Config& cfg) {
    Stage stage("eval", cfg);
    const std::string model_path = cfg.get("model");
    const fs::path pairs_dir = cfg.get("input");
    stage.add_input(model_path);
    stage.add_input((pairs_dir / "meta.txt").string());
    Forest forest = load_forest(model_path);
    PairsOnDisk pairs = read_pairs_dir(pairs_dir);
    eval_and_write(forest, pairs, parse_case_filter(cfg.get_or("case", "all")),
                   fp_levels_from(cfg), stage);
    return stage.finish();
}

StageResult run_adhoc(const Config& cfg) {
    Stage stage("adhoc", cfg);
    const fs::path egonet_dir = cfg.get("input");
    EgonetSet set = read_egonet_set(egonet_dir, /*need_truth=*/false);
    const std::size_t min_len = static_cast<std::size_t>(cfg.get_int("min_len", 7));

    std::ofstream matches_out = open_out(stage.artifact("matches.tsv"), "match report");
    std::size_t total_matches = 0, correct_matches = 0;
    const bool have_truth = !set.truths.empty();
    std::size_t identical_candidates = 0, identical_found = 0;

    for (std::size_t i = 0; i < set.egonets.size(); ++i) {
        for (std::size_t j = i + 1; j < set.egonets.size(); ++j) {
            std::vector<AdhocMatch> matches = adhoc_link(set.egonets[i], set.egonets[j], min_len);
            write_match_report(matches_out, i, j, matches);
            total_matches += matches.size();
            if (!have_truth) continue;
            for (const AdhocMatch& m : matches) {
                if (set.truths[i].at(m.pseudo_a) == set.truths[j].at(m.pseudo_b)) {
                    ++correct_matches;
                }
            }
            // Recall denominator: identical hop<=1 pairs whose signatures qualify.
            std::map<NodeId, NodeId> originals_i;
            for (const auto& [pseudo, hop] : set.egonets[i].hop_of) {
                if (hop <= 1 && node_signature(set.egonets[i].graph, pseudo).size() >= min_len) {
                    originals_i[set.truths[i].at(pseudo)] = pseudo;
                }
            }
            std::unordered_set<std::uint64_t> matched;
            for (const AdhocMatch& m : matches) {
                matched.insert(splitmix64(static_cast<std::uint64_t>(m.pseudo_a)) ^
                               splitmix64(static_cast<std::uint64_t>(m.pseudo_b) + 1));
            }
            for (const auto& [pseudo, hop] : set.egonets[j].hop_of) {
                if (hop > 1) continue;
                auto it = originals_i.find(set.truths[j].at(pseudo));
                if (it == originals_i.end()) continue;
                if (node_signature(set.egonets[j].graph, pseudo).size() < min_len) continue;
                ++identical_candidates;
                if (matched.count(splitmix64(static_cast<std::uint64_t>(it->second)) ^
                                  splitmix64(static_cast<std::uint64_t>(pseudo) + 1))) {
                    ++identical_found;
                }
            }
        }
    }
    std::ofstream report = open_out(stage.artifact("adhoc_report.txt"), "adhoc report");
    report << "egonets=" << set.egonets.size() << '\n'
           << "min_signature_len=" << min_len << '\n'
           << "matches=" << total_matches << '\n';
    if (have_truth) {
        report << "correct_matches=" << correct_matches << '\n'
               << "identical_pairs=" << identical_candidates << '\n'
               << "identical_recovered=" << identical_found << '\n';
        if (identical_candidates > 0) {
            report << "recall=" << static_cast<double>(identical_found) / identical_candidates
                   << '\n';
        }
        if (total_matches > 0) {
            report << "precision=" << static_cast<double>(correct_matches) / total_matches << '\n';
        }
        // Success rate on sampled non-identical pairs, Table-1 style: a pair
        // is classified correctly when its signatures do not match exactly.
        const std::size_t negatives =
            static_cast<std::size_t>(cfg.get_int("adhoc_negatives", 5000));
        std::vector<std::pair<std::size_t, NodeId>> candidates;
        for (std::size_t e = 0; e < set.egonets.size(); ++e) {
            for (const auto& [pseudo, hop] : set.egonets[e].hop_of) {
                if (hop <= 1 &&
                    node_signature(set.egonets[e].graph, pseudo).size() >= min_len) {
                    candidates.emplace_back(e, pseudo);
                }
            }
        }
        if (candidates.size() >= 2) {
            Rng rng(derive_seed(cfg.seed(), 99));
            std::size_t sampled = 0, wrong = 0, attempts = 0;
            const std::size_t max_attempts = 200 * negatives + 1000;
            while (sampled < negatives && attempts++ < max_attempts) {
                const auto& [e1, p1] = candidates[rng.below(candidates.size())];
                const auto& [e2, p2] = candidates[rng.below(candidates.size())];
                if (e1 == e2 || set.truths[e1].at(p1) == set.truths[e2].at(p2)) continue;
                ++sampled;
                if (node_signature(set.egonets[e1].graph, p1) ==
                    node_signature(set.egonets[e2].graph, p2)) {
                    ++wrong;
                }
            }
            report << "non_identical_sampled=" << sampled << '\n'
                   << "non_identical_wrong=" << wrong << '\n';
            if (sampled > 0) {
                report << "non_identical_accuracy="
                       << 1.0 - static_cast<double>(wrong) / static_cast<double>(sampled) << '\n';
            }
        }
    }
    return stage.finish();
}

StageResult run_perturb(const Config& cfg) {
    Stage stage("perturb", cfg);
    const std::string input = cfg.get("input");
    stage.add_input(input);
    Graph g = read_edge_list_file(input);
    OverlapConfig oc;
    oc.alpha_v = cfg.get_double("alpha_v", 0.25);
    oc.alpha_e = cfg.get_double("alpha_e", 0.25);
    oc.seed = cfg.seed();
    OverlapSample sample = sample_overlapping_graphs(g, oc);
    for (const std::string& path : write_overlap_sample(sample, oc, stage.dir().string())) {
        stage.artifact(fs::path(path).filename().string());
    }
    return stage.finish();
}

namespace {

std::vector<std::string> split_csv(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    std::string tok;
    while (std::getline(in, tok, ',')) {
        if (!tok.empty()) out.push_back(tok);
    }
    return out;
}

}  // namespace

StageResult run_sweep(const Config& cfg) {
    Stage stage("sweep", cfg);
    const std::string grid = cfg.get_or("grid", "nb");
    const std::vector<double> levels = fp_levels_from(cfg);
    const std::string input = cfg.get("input");
    stage.add_input(input);

    std::ofstream out = open_out(stage.artifact("sweep_report.tsv"), "sweep report");
    write_report_header(out, levels);

    auto guarded_row = [&](const std::string& label, auto&& body) {
        try {
            EvalReport report = body();
            write_report_row(out, label, report);
        } catch (const std::exception& e) {
            out << label << "\tERROR: " << e.what() << '\n';
        }
    };

    if (grid == "nb") {
        EgonetSet set = read_egonet_set(input, /*need_truth=*/true);
        for (const std::string& cell : split_csv(cfg.get_or("nb_grid", "21x50,35x30,70x15,105x10"))) {
            guarded_row(cell, [&]() {
                const std::size_t x = cell.find('x');
                if (x == std::string::npos) throw ConfigError("nb cell must look like 70x15");
                Config cell_cfg = cfg;
                cell_cfg.set("bins", cell.substr(0, x));
                cell_cfg.set("bin_size", cell.substr(x + 1));
                PairGenConfig pc = pair_config_from(cell_cfg);
                PairsOnDisk pairs;
                pairs.split = generate_pair_samples(set.egonets, set.truths, pc, cfg.seed());
                pairs.bin_count = pc.bin_count;
                pairs.bin_width = pc.bin_width;
                const std::vector<PairCase> cases = parse_case_filter(cfg.get_or("case", "all"));
                Forest forest = train_from_pairs(pairs, cases, cell_cfg, "");
                std::vector<PairSample> identical = gather_identical(pairs.split.test, cases);
                if (identical.empty()) throw ConfigError("no identical test pairs");
                return evaluate_scores(scores_of(forest, identical),
                                       scores_of(forest, pairs.split.test.non_identical), levels);
            });
        }
        return stage.finish();
    }

    // seeds / alpha grids run the two-copy task on the input graph.
    Graph g = read_edge_list_file(input);
    const std::size_t non_identical_train =
        static_cast<std::size_t>(cfg.get_int("non_identical_train", 5000));
    const std::size_t identical_test = static_cast<std::size_t>(cfg.get_int("identical_test", 2000));
    const std::size_t non_identical_test =
        static_cast<std::size_t>(cfg.get_int("non_identical_test", 2000));
    const std::size_t bins = static_cast<std::size_t>(cfg.get_int("bins", 70));
    const std::uint32_t bin_size = static_cast<std::uint32_t>(cfg.get_int("bin_size", 15));

    auto run_cell = [&](double alpha_e, std::size_t seed_count) {
        OverlapConfig oc;
        oc.alpha_v = cfg.get_double("alpha_v", 0.25);
        oc.alpha_e = alpha_e;
        oc.seed = cfg.seed();
        OverlapSample sample = sample_overlapping_graphs(g, oc);
        PairSplit pairs = make_traditional_pairs(sample, seed_count, non_identical_train,
                                                 identical_test, non_identical_test, bins,
                                                 bin_size, derive_seed(cfg.seed(), 17));
        ForestParams params = forest_params_from(cfg, bins, bin_size, /*dual=*/true);
        const std::size_t workers = static_cast<std::size_t>(cfg.get_int("workers", 1));
        Forest forest = train_forest(pairs.train.identical(PairCase::One),
                                     pairs.train.non_identical, params, cfg.seed(), workers);
        return evaluate_scores(scores_of(forest, pairs.test.identical(PairCase::One)),
                               scores_of(forest, pairs.test.non_identical), levels);
    };

    if (grid == "seeds") {
        const double alpha_e = cfg.get_double("alpha_e", 0.25);
        for (const std::string& cell : split_csv(cfg.get_or("seeds_grid", "10,50,250,1250"))) {
            guarded_row(cell + " seeds",
                        [&]() { return run_cell(alpha_e, std::stoull(cell)); });
        }
    } else if (grid == "alpha") {
        const std::size_t seed_count = static_cast<std::size_t>(cfg.get_int("seed_count", 50));
        for (const std::string& cell : split_csv(cfg.get_or("alpha_grid", "0.25,0.5,0.75,1.0"))) {
            guarded_row("alpha_e=" + cell, [&]() { return run_cell(std::stod(cell), seed_count); });
        }
    } else {
        throw ConfigError("grid must be one of nb | seeds | alpha");
    }
    return stage.finish();
}

StageResult run_pipeline(const Config& cfg) {
    Stage stage("run", cfg);
    try {
        const std::string input = cfg.get("input");
        stage.add_input(input);

        Graph g = [&]() {
            try {
                return read_edge_list_file(input);
            } catch (const std::exception& e) {
                throw StageError("ingest", e.what());
            }
        }();
        write_edge_list_file(g, stage.artifact("graph.txt").string());

        EgonetSet set;
        try {
            set = build_egonets(g, scheme_from(cfg),
                                static_cast<std::size_t>(cfg.get_int("count", 100)),
                                static_cast<std::size_t>(cfg.get_int("min_size", 400)),
                                cfg.seed());
            write_egonet_set(set, stage);
        } catch (const StageError&) {
            throw;
        } catch (const std::exception& e) {
            throw StageError("egonets", e.what());
        }

        PairsOnDisk pairs;
        try {
            PairGenConfig pc = pair_config_from(cfg);
            pairs.split = generate_pair_samples(set.egonets, set.truths, pc, cfg.seed());
            pairs.bin_count = pc.bin_count;
            pairs.bin_width = pc.bin_width;
            write_pairs_dir(pairs, stage.dir() / "pairs");
        } catch (const std::exception& e) {
            throw StageError("pairs", e.what());
        }

        Forest forest;
        const std::vector<PairCase> cases = parse_case_filter(cfg.get_or("case", "all"));
        try {
            forest = train_from_pairs(pairs, cases, cfg, "");
            save_forest(forest, stage.artifact("model.json").string());
        } catch (const std::exception& e) {
            throw StageError("train", e.what());
        }

        try {
            std::ofstream scores = open_out(stage.artifact("scores.tsv"), "scores");
            scores << "egonet_a\tpseudo_a\tegonet_b\tpseudo_b\tcase\tlabel\tscore\n";
            for (PairCase c : cases) {
                for (const PairSample& s : pairs.split.test.identical(c)) {
                    scores << s.a.egonet << '\t' << s.a.pseudonym << '\t' << s.b.egonet << '\t'
                           << s.b.pseudonym << '\t' << static_cast<int>(s.pair_case)
                           << "\tidentical\t" << predict_forest(forest, s.vec_a, s.vec_b) << '\n';
                }
            }
            for (const PairSample& s : pairs.split.test.non_identical) {
                scores << s.a.egonet << '\t' << s.a.pseudonym << '\t' << s.b.egonet << '\t'
                       << s.b.pseudonym << '\t' << static_cast<int>(s.pair_case)
                       << "\tnon_identical\t" << predict_forest(forest, s.vec_a, s.vec_b) << '\n';
            }
        } catch (const std::exception& e) {
            throw StageError("score", e.what());
        }

        try {
            eval_and_write(forest, pairs, cases, fp_levels_from(cfg), stage);
        } catch (const StageError&) {
            throw;
        } catch (const std::exception& e) {
            throw StageError("eval", e.what());
        }
    } catch (const StageError&) {
        throw;
    }
    return stage.finish();
}

std::string render_report(const std::string& run_dir) {
    const fs::path dir = run_dir;
    const fs::path manifest_path = dir / "manifest.json";
    if (!fs::exists(manifest_path)) {
        throw ConfigError("no manifest.json under " + run_dir);
    }
    std::ostringstream out;
    {
        std::ifstream in(manifest_path);
        out << in.rdbuf() << '\n';
    }
    for (const char* name : {"report.tsv", "sweep_report.tsv", "adhoc_report.txt", "stats.txt"}) {
        const fs::path p = dir / name;
        if (!fs::exists(p)) continue;
        out << "== " << name << " ==\n";
        std::ifstream in(p);
        out << in.rdbuf() << '\n';
    }
    return out.str();
}

}  // namespace deanon
