// deanon: adversarial evaluation of social-graph anonymization schemes.
//
// Every subcommand is a seeded, reproducible run: artifacts land in a run
// directory named by the manifest digest under --out-root (or
// $DEANON_CACHE_DIR, or ./runs).

#include <cstdlib>
#include <iostream>
#include <list>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "deanon/errors.hpp"
#include "deanon/pipeline.hpp"

namespace {

using deanon::Config;
using deanon::StageResult;

struct SubcommandArgs {
    CLI::App* app = nullptr;
    std::string config_file;
    std::map<std::string, std::string> overrides;

    Config build() const {
        Config cfg = config_file.empty() ? Config() : Config::from_file(config_file);
        for (const auto& [k, v] : overrides) cfg.set(k, v);
        return cfg;
    }
};

SubcommandArgs* make_sub(CLI::App& app, std::list<SubcommandArgs>& storage,
                         const std::string& name, const std::string& help) {
    storage.emplace_back();
    SubcommandArgs& sub = storage.back();
    sub.app = app.add_subcommand(name, help);
    sub.app->add_option("--config", sub.config_file, "key=value config file; flags override it");
    return &sub;
}

void add_kv(SubcommandArgs* sub, const std::string& flag, const std::string& key,
            const std::string& help) {
    sub->app->add_option_function<std::string>(
        flag, [sub, key](const std::string& v) { sub->overrides[key] = v; }, help);
}

void add_positional_input(SubcommandArgs* sub, const std::string& help) {
    sub->app
        ->add_option_function<std::string>(
            "input", [sub](const std::string& v) { sub->overrides["input"] = v; }, help)
        ->required();
}

void add_common(SubcommandArgs* sub) {
    add_kv(sub, "--seed", "seed", "master seed (required; no wall-clock default)");
    add_kv(sub, "--out-root", "out_root", "directory that holds run directories");
    add_kv(sub, "--workers", "workers", "worker threads; never affects outputs");
}

void print_result(const StageResult& result) {
    std::cout << "run dir: " << result.run_dir.string() << '\n';
    for (const std::string& artifact : result.manifest.artifacts) {
        std::cout << "  " << artifact << '\n';
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"deanon: automated re-identification study harness for anonymized egonets"};
    app.require_subcommand(1);
    std::list<SubcommandArgs> storage;

    auto* synth = make_sub(app, storage, "synth", "generate a synthetic power-law graph");
    add_kv(synth, "--nodes", "nodes", "node count");
    add_kv(synth, "--degree", "degree", "attachment degree");
    add_common(synth);

    auto* ingest = make_sub(app, storage, "ingest", "normalize an edge list into canonical form");
    add_positional_input(ingest, "edge list file");
    add_common(ingest);

    auto* egonets = make_sub(app, storage, "egonets", "extract anonymized egonets + ground truth");
    add_positional_input(egonets, "edge list file");
    add_kv(egonets, "--scheme", "scheme", "anonymization scheme, 1 or 2");
    add_kv(egonets, "--count", "count", "number of egonets");
    add_kv(egonets, "--min-size", "min_size", "minimum 2-hop neighborhood size of an ego");
    add_common(egonets);

    auto* pairs = make_sub(app, storage, "pairs", "build labeled node-pair pools with features");
    add_positional_input(pairs, "egonets run directory");
    add_kv(pairs, "--min-degree", "min_degree", "keep nodes with degree > this");
    add_kv(pairs, "--bins", "bins", "feature vector length n");
    add_kv(pairs, "--bin-size", "bin_size", "histogram bin width b");
    add_kv(pairs, "--ratio", "ratio", "non-identical pool size as a multiple of identical");
    add_kv(pairs, "--test-fraction", "test_fraction", "fraction of original nodes held out");
    add_kv(pairs, "--original-degree-filter", "original_degree_filter",
           "1 = use source-graph degrees for the filter");
    add_common(pairs);

    auto* train = make_sub(app, storage, "train", "train a random decision forest");
    add_positional_input(train, "pairs directory (containing meta.txt)");
    add_kv(train, "--trees", "trees", "forest size T");
    add_kv(train, "--bag", "bag", "bagged pairs per class per tree");
    add_kv(train, "--bins", "bins", "expected vector length (validated against meta)");
    add_kv(train, "--bin-size", "bin_size", "expected bin width (validated against meta)");
    add_kv(train, "--case", "case", "pair case filter: 1 | 12 | 2 | all");
    add_common(train);

    auto* score = make_sub(app, storage, "score", "score pairs with a trained model");
    add_positional_input(score, "pairs directory");
    add_kv(score, "--model", "model", "model.json path");
    add_kv(score, "--case", "case", "pair case filter: 1 | 12 | 2 | all");
    add_kv(score, "--split", "split", "train or test (default test)");
    add_common(score);

    auto* eval = make_sub(app, storage, "eval", "ROC/AUC and TP-at-FP report for a model");
    add_positional_input(eval, "pairs directory");
    add_kv(eval, "--model", "model", "model.json path");
    add_kv(eval, "--case", "case", "pair case filter: 1 | 12 | 2 | all");
    add_kv(eval, "--fp-levels", "fp_levels", "comma-separated FP rates");
    add_common(eval);

    auto* adhoc = make_sub(app, storage, "adhoc", "exact-signature baseline attack (Scheme 1)");
    add_positional_input(adhoc, "egonets run directory");
    add_kv(adhoc, "--min-len", "min_len", "minimum signature length");
    add_common(adhoc);

    auto* perturb = make_sub(app, storage, "perturb", "two overlapping edge-perturbed copies");
    add_positional_input(perturb, "edge list file");
    add_kv(perturb, "--alpha-v", "alpha_v", "node overlap (Jaccard)");
    add_kv(perturb, "--alpha-e", "alpha_e", "edge overlap");
    add_common(perturb);

    auto* sweep = make_sub(app, storage, "sweep", "parameter sweeps with a consolidated report");
    add_positional_input(sweep, "egonets dir (nb grid) or edge list (seeds/alpha grids)");
    add_kv(sweep, "--grid", "grid", "nb | seeds | alpha");
    add_kv(sweep, "--nb-grid", "nb_grid", "cells like 21x50,35x30,70x15,105x10");
    add_kv(sweep, "--seeds-grid", "seeds_grid", "identical training pair counts");
    add_kv(sweep, "--alpha-grid", "alpha_grid", "edge overlap values");
    add_kv(sweep, "--seed-count", "seed_count", "identical training pairs for the alpha grid");
    add_kv(sweep, "--alpha-v", "alpha_v", "node overlap for the two-copy grids");
    add_kv(sweep, "--alpha-e", "alpha_e", "edge overlap for the seeds grid");
    add_kv(sweep, "--trees", "trees", "forest size per cell");
    add_kv(sweep, "--bag", "bag", "bagged pairs per class per tree");
    add_kv(sweep, "--case", "case", "pair case filter for the nb grid");
    add_kv(sweep, "--bins", "bins", "feature vector length for the two-copy grids");
    add_kv(sweep, "--bin-size", "bin_size", "bin width for the two-copy grids");
    add_kv(sweep, "--non-identical-train", "non_identical_train",
           "non-identical training pairs per cell");
    add_kv(sweep, "--identical-test", "identical_test", "identical test pairs per cell");
    add_kv(sweep, "--non-identical-test", "non_identical_test",
           "non-identical test pairs per cell");
    add_common(sweep);

    auto* run = make_sub(app, storage, "run", "full pipeline: ingest through eval");
    add_positional_input(run, "edge list file");
    add_kv(run, "--scheme", "scheme", "anonymization scheme, 1 or 2");
    add_kv(run, "--count", "count", "number of egonets");
    add_kv(run, "--min-size", "min_size", "minimum 2-hop neighborhood size");
    add_kv(run, "--min-degree", "min_degree", "pair degree filter");
    add_kv(run, "--bins", "bins", "feature vector length n");
    add_kv(run, "--bin-size", "bin_size", "histogram bin width b");
    add_kv(run, "--ratio", "ratio", "non-identical pool ratio");
    add_kv(run, "--trees", "trees", "forest size T");
    add_kv(run, "--bag", "bag", "bagged pairs per class per tree");
    add_kv(run, "--case", "case", "pair case filter: 1 | 12 | 2 | all");
    add_common(run);

    std::string report_dir;
    auto* report = app.add_subcommand("report", "render a run directory's manifest and tables");
    report->add_option("run_dir", report_dir, "run directory")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (report->parsed()) {
            std::cout << deanon::render_report(report_dir);
            return 0;
        }
        if (synth->app->parsed()) print_result(deanon::run_synth(synth->build()));
        if (ingest->app->parsed()) print_result(deanon::run_ingest(ingest->build()));
        if (egonets->app->parsed()) print_result(deanon::run_egonets(egonets->build()));
        if (pairs->app->parsed()) print_result(deanon::run_pairs(pairs->build()));
        if (train->app->parsed()) print_result(deanon::run_train(train->build()));
        if (score->app->parsed()) print_result(deanon::run_score(score->build()));
        if (eval->app->parsed()) print_result(deanon::run_eval(eval->build()));
        if (adhoc->app->parsed()) print_result(deanon::run_adhoc(adhoc->build()));
        if (perturb->app->parsed()) print_result(deanon::run_perturb(perturb->build()));
        if (sweep->app->parsed()) print_result(deanon::run_sweep(sweep->build()));
        if (run->app->parsed()) print_result(deanon::run_pipeline(run->build()));
    } catch (const deanon::StageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
