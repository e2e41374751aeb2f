#include "deanon/eval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "deanon/errors.hpp"

namespace deanon {

RocResult roc_and_auc(const std::vector<double>& identical_scores,
                      const std::vector<double>& non_identical_scores) {
    if (identical_scores.empty() || non_identical_scores.empty()) {
        throw ConfigError("roc_and_auc requires nonempty score sets for both classes");
    }
    std::vector<double> pos = identical_scores;
    std::vector<double> neg = non_identical_scores;
    std::sort(pos.begin(), pos.end());
    std::sort(neg.begin(), neg.end());

    std::vector<double> thresholds;
    thresholds.reserve(pos.size() + neg.size());
    thresholds.insert(thresholds.end(), pos.begin(), pos.end());
    thresholds.insert(thresholds.end(), neg.begin(), neg.end());
    std::sort(thresholds.begin(), thresholds.end());
    thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());

    RocResult result;
    result.curve.points.push_back({0.0, 0.0});
    std::size_t pos_at = 0, neg_at = 0;
    double auc = 0.0;
    double prev_fp = 0.0, prev_tp = 0.0;
    for (double t : thresholds) {
        while (pos_at < pos.size() && pos[pos_at] <= t) ++pos_at;
        while (neg_at < neg.size() && neg[neg_at] <= t) ++neg_at;
        const double tp = static_cast<double>(pos_at) / static_cast<double>(pos.size());
        const double fp = static_cast<double>(neg_at) / static_cast<double>(neg.size());
        auc += (fp - prev_fp) * (tp + prev_tp) / 2.0;
        result.curve.points.push_back({fp, tp});
        prev_fp = fp;
        prev_tp = tp;
    }
    result.auc = auc;
    return result;
}

double tp_at_fp(const RocCurve& curve, double fp_level) {
    double best = 0.0;
    for (const RocPoint& p : curve.points) {
        if (p.fp <= fp_level + 1e-15) best = p.tp;  // points are fp-ascending
    }
    return best;
}

std::vector<double> tp_at_fp(const RocCurve& curve, const std::vector<double>& fp_levels) {
    std::vector<double> out;
    out.reserve(fp_levels.size());
    for (double level : fp_levels) out.push_back(tp_at_fp(curve, level));
    return out;
}

const std::vector<double>& default_fp_levels() {
    static const std::vector<double> levels{0.0001, 0.001, 0.01, 0.10, 0.25};
    return levels;
}

double jaccard(const NodeSet& a, const NodeSet& b) {
    if (a.empty() && b.empty()) return 0.0;
    std::size_t intersection = 0;
    auto ia = a.begin();
    auto ib = b.begin();
    while (ia != a.end() && ib != b.end()) {
        if (*ia < *ib) {
            ++ia;
        } else if (*ib < *ia) {
            ++ib;
        } else {
            ++intersection;
            ++ia;
            ++ib;
        }
    }
    const std::size_t unions = a.size() + b.size() - intersection;
    return static_cast<double>(intersection) / static_cast<double>(unions);
}

double threshold_at_fp(const std::vector<double>& non_identical_scores, double fp_level) {
    if (non_identical_scores.empty()) {
        throw ConfigError("threshold_at_fp requires non-identical scores");
    }
    std::vector<double> neg = non_identical_scores;
    std::sort(neg.begin(), neg.end());
    const std::size_t budget =
        static_cast<std::size_t>(fp_level * static_cast<double>(neg.size()) + 1e-12);
    if (budget >= neg.size()) return neg.back();
    if (budget > 0 && neg[budget] > neg[budget - 1]) return neg[budget - 1];
    // Ties straddle the budget (or budget is zero): back off below the tied value.
    const double blocked = neg[budget];
    auto first = std::lower_bound(neg.begin(), neg.end(), blocked);
    if (first == neg.begin()) {
        return std::nextafter(neg.front(), -std::numeric_limits<double>::infinity());
    }
    return *(first - 1);
}

std::vector<JcBucket> jc_error_breakdown(const std::vector<ScoredPair>& pairs, double threshold,
                                         const std::vector<double>& edges) {
    std::vector<JcBucket> buckets;
    buckets.push_back({0.0, 0.0});  // jc == 0 exactly
    double lower = 0.0;
    for (double edge : edges) {
        buckets.push_back({lower, edge});
        lower = edge;
    }
    buckets.push_back({lower, std::numeric_limits<double>::infinity()});

    auto bucket_of = [&](double jc) -> JcBucket& {
        if (jc <= 0.0) return buckets[0];
        for (std::size_t k = 1; k + 1 < buckets.size(); ++k) {
            if (jc <= buckets[k].upper) return buckets[k];
        }
        return buckets.back();
    };
    for (const ScoredPair& p : pairs) {
        JcBucket& bucket = bucket_of(p.jc);
        const bool positive = p.score <= threshold;
        if (p.label == PairLabel::Identical) {
            ++bucket.identical_total;
            if (positive) ++bucket.identical_positive;
        } else {
            ++bucket.non_identical_total;
            if (positive) ++bucket.non_identical_positive;
        }
    }
    return buckets;
}

EvalReport evaluate_scores(const std::vector<double>& identical_scores,
                           const std::vector<double>& non_identical_scores,
                           const std::vector<double>& fp_levels) {
    RocResult roc = roc_and_auc(identical_scores, non_identical_scores);
    EvalReport report;
    report.auc = roc.auc;
    report.fp_levels = fp_levels;
    report.tp_rates = tp_at_fp(roc.curve, fp_levels);
    report.identical_count = identical_scores.size();
    report.non_identical_count = non_identical_scores.size();
    return report;
}

void write_roc_csv(const RocCurve& curve, std::ostream& out) {
    out << "fp,tp\n";
    for (const RocPoint& p : curve.points) {
        out << p.fp << ',' << p.tp << '\n';
    }
}

void write_report_header(std::ostream& out, const std::vector<double>& fp_levels) {
    out << "False Positive";
    for (double level : fp_levels) out << '\t' << level * 100.0 << '%';
    out << "\tAUC\n";
}

void write_report_row(std::ostream& out, const std::string& label, const EvalReport& report) {
    out << label;
    for (double tp : report.tp_rates) out << '\t' << tp * 100.0;
    out << '\t' << report.auc << '\n';
}

void write_jc_csv(const std::vector<JcBucket>& buckets, std::ostream& out) {
    out << "lower,upper,tp_rate,fp_rate,tp_count,identical,fp_count,non_identical\n";
    for (const JcBucket& b : buckets) {
        out << b.lower << ',' << b.upper << ',' << b.tp_rate() << ',' << b.fp_rate() << ','
            << b.identical_positive << ',' << b.identical_total << ',' << b.non_identical_positive
            << ',' << b.non_identical_total << '\n';
    }
}

}  // namespace deanon
