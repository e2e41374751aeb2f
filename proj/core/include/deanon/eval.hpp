#pragma once

#include <cstddef>
#include <iosfwd>
#include <vector>

#include "deanon/egonet.hpp"
#include "deanon/graph.hpp"

namespace deanon {

/// One ROC operating point: rates over the non-identical (fp) and identical
/// (tp) populations at some score threshold.
struct RocPoint {
    double fp = 0.0;
    double tp = 0.0;
};

/// Threshold sweep with ties grouped; starts at (0,0), ends at (1,1), both
/// coordinates nondecreasing. Positive class is "identical" and lower scores
/// mean more likely identical.
struct RocCurve {
    std::vector<RocPoint> points;
};

struct RocResult {
    RocCurve curve;
    double auc = 0.0;
};

/// Builds the ROC and its trapezoidal AUC. The AUC equals the Mann-Whitney
/// statistic P(score_identical < score_non_identical) + P(tie)/2.
RocResult roc_and_auc(const std::vector<double>& identical_scores,
                      const std::vector<double>& non_identical_scores);

/// TP rate at the last curve point whose FP rate does not exceed fp_level
/// (conservative step rule: the budget is never exceeded).
double tp_at_fp(const RocCurve& curve, double fp_level);
std::vector<double> tp_at_fp(const RocCurve& curve, const std::vector<double>& fp_levels);

/// The paper-style report levels: 0.01%, 0.1%, 1%, 10%, 25%.
const std::vector<double>& default_fp_levels();

/// |a n b| / |a u b|; 0 when both sets are empty (the degenerate bucket).
double jaccard(const NodeSet& a, const NodeSet& b);

/// Largest score threshold whose FP rate over these scores stays within
/// fp_level. Classification is positive (identical) at score <= threshold.
double threshold_at_fp(const std::vector<double>& non_identical_scores, double fp_level);

struct ScoredPair {
    double score = 0.0;
    double jc = 0.0;  // Jaccard overlap of the two nodes' 2-hop neighborhoods
    PairLabel label = PairLabel::NonIdentical;
};

/// One row of the neighborhood-overlap error breakdown. Bucket (lower, upper];
/// the first bucket is exactly jc == 0 and the last is open-ended.
struct JcBucket {
    double lower = 0.0;
    double upper = 0.0;
    std::size_t identical_total = 0;
    std::size_t identical_positive = 0;      // true positives
    std::size_t non_identical_total = 0;
    std::size_t non_identical_positive = 0;  // false positives

    double tp_rate() const {
        return identical_total ? static_cast<double>(identical_positive) / identical_total : 0.0;
    }
    double fp_rate() const {
        return non_identical_total
                   ? static_cast<double>(non_identical_positive) / non_identical_total
                   : 0.0;
    }
};

/// Buckets pairs by neighborhood overlap and reports per-bucket TP/FP counts
/// at a fixed score threshold. `edges` are the interior bucket bounds;
/// the default reproduces {=0, (0,.05], (.05,.10], (.10,.15], >=.15}.
std::vector<JcBucket> jc_error_breakdown(const std::vector<ScoredPair>& pairs, double threshold,
                                         const std::vector<double>& edges = {0.05, 0.10, 0.15});

/// Scores plus the per-case TP table of one evaluation run.
struct EvalReport {
    double auc = 0.0;
    std::vector<double> fp_levels;
    std::vector<double> tp_rates;
    std::size_t identical_count = 0;
    std::size_t non_identical_count = 0;
};

EvalReport evaluate_scores(const std::vector<double>& identical_scores,
                           const std::vector<double>& non_identical_scores,
                           const std::vector<double>& fp_levels = default_fp_levels());

/// "fp,tp" per line.
void write_roc_csv(const RocCurve& curve, std::ostream& out);

/// One table row: label, then TP percentage per FP level, tab-separated.
void write_report_header(std::ostream& out, const std::vector<double>& fp_levels);
void write_report_row(std::ostream& out, const std::string& label, const EvalReport& report);

/// CSV rows "lower,upper,tp_rate,fp_rate,tp_count,identical,fp_count,non_identical".
void write_jc_csv(const std::vector<JcBucket>& buckets, std::ostream& out);

}  // namespace deanon
