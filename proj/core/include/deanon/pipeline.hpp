#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "deanon/egonet.hpp"
#include "deanon/eval.hpp"
#include "deanon/forest.hpp"
#include "deanon/perturb.hpp"

namespace deanon {

/// Flat key=value configuration: loaded from a config file, overridden by
/// CLI flags. The master seed has no wall-clock default; stages that sample
/// refuse to run without one.
class Config {
public:
    Config() = default;

    static Config from_file(const std::string& path);

    void set(const std::string& key, const std::string& value) { values_[key] = value; }
    bool has(const std::string& key) const { return values_.count(key) != 0; }

    std::string get(const std::string& key) const;
    std::string get_or(const std::string& key, const std::string& fallback) const;
    std::int64_t get_int(const std::string& key, std::int64_t fallback) const;
    double get_double(const std::string& key, double fallback) const;

    /// The mandatory master seed.
    std::uint64_t seed() const;

    const std::map<std::string, std::string>& values() const { return values_; }

private:
    std::map<std::string, std::string> values_;
};

std::string sha256_hex(const std::string& bytes);
std::string file_sha256(const std::string& path);

/// Record of one run: enough to reproduce it and to locate its artifacts.
/// The digest covers command, semantic config, seed and input digests;
/// execution-only keys (workers, out_root) and timestamps stay outside it,
/// so reruns land in the same run directory with byte-identical artifacts.
struct RunManifest {
    std::string command;
    std::map<std::string, std::string> config;
    std::uint64_t master_seed = 0;
    std::map<std::string, std::string> input_digests;
    std::vector<std::string> artifacts;
    std::string started_at;
    std::string finished_at;

    std::string digest() const;
    std::string to_json() const;
    void save(const std::string& path) const;
};

struct StageResult {
    std::filesystem::path run_dir;
    RunManifest manifest;
};

/// Where run directories are created: the out_root key, else the
/// DEANON_CACHE_DIR environment variable, else ./runs.
std::filesystem::path output_root(const Config& cfg);

StageResult run_synth(const Config& cfg);
StageResult run_ingest(const Config& cfg);
StageResult run_egonets(const Config& cfg);
StageResult run_pairs(const Config& cfg);
StageResult run_train(const Config& cfg);
StageResult run_score(const Config& cfg);
StageResult run_eval(const Config& cfg);
StageResult run_adhoc(const Config& cfg);
StageResult run_perturb(const Config& cfg);
StageResult run_sweep(const Config& cfg);

/// Full chain ingest -> egonets -> pairs -> train -> score -> eval in one
/// run directory. Any stage failure propagates as StageError.
StageResult run_pipeline(const Config& cfg);

/// Renders an existing run directory (manifest + tables) as text.
std::string render_report(const std::string& run_dir);

/// Case filter values 1 | 12 | 2 | all map to the table rows
/// 1-hop / 1,2-hop / 2-hop / Complete.
std::vector<PairCase> parse_case_filter(const std::string& filter);
std::string case_row_label(PairCase c);

/// Pools for one released dataset, as stored in a pairs directory.
struct PairsOnDisk {
    PairSplit split;
    std::size_t bin_count = 70;
    std::uint32_t bin_width = 15;
    bool dual = false;
};

void write_pairs_dir(const PairsOnDisk& pairs, const std::filesystem::path& dir);
PairsOnDisk read_pairs_dir(const std::filesystem::path& dir);

/// Labeled pair pools for the two-copy (traditional) task: identical pairs
/// are seed_count shared nodes, non-identical pairs are sampled cross pairs;
/// features are dual 1-hop||2-hop vectors in the respective copies. Train
/// and test draw from disjoint shared-node sets.
PairSplit make_traditional_pairs(const OverlapSample& sample, std::size_t seed_count,
                                 std::size_t non_identical_train, std::size_t identical_test,
                                 std::size_t non_identical_test, std::size_t bin_count,
                                 std::uint32_t bin_width, std::uint64_t seed);

/// Per-pair 2-hop neighborhood overlap for the error breakdown, computed in
/// the views the features came from.
std::vector<ScoredPair> score_traditional_pairs(const Forest& forest,
                                                const OverlapSample& sample,
                                                const std::vector<PairSample>& pairs);

}  // namespace deanon
