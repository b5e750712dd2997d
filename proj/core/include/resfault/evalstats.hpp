#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>

namespace resfault {

struct ConfusionMatrix {
    std::int64_t tp = 0, fp = 0, fn = 0, tn = 0;
    std::int64_t total() const { return tp + fp + fn + tn; }
};

// positive class = 1 (residual)
ConfusionMatrix confusion(std::span<const int> preds, std::span<const int> labels);

enum class Metric { Accuracy, Precision, Recall, F1 };
const char* metric_name(Metric m);

// Division-by-zero convention: precision/recall/F1 are 0 when the
// denominator is 0.
double metric_value(Metric m, const ConfusionMatrix& cm);

struct Interval {
    double low = 0, high = 0;
};

struct EvalReport {
    double accuracy = 0, precision = 0, recall = 0, f1 = 0;
    Interval accuracy_ci, precision_ci, recall_ci, f1_ci;
};

EvalReport classification_metrics(const ConfusionMatrix& cm);

// Percentile bootstrap over sample indices. Frozen procedure: resample r
// draws n indices as mt19937_64(seed)() % n in row order; metric values are
// sorted and the interval endpoints are the nearest-rank order statistics at
// floor(q*(R-1)+0.5) for q = alpha/2 and 1-alpha/2.
Interval bootstrap_ci(std::span<const int> preds, std::span<const int> labels, Metric metric,
                      int n_resamples, std::uint64_t seed, double level = 0.95);

EvalReport evaluate_with_ci(std::span<const int> preds, std::span<const int> labels,
                            int n_resamples, std::uint64_t seed, double level = 0.95);

struct McNemarResult {
    std::int64_t b = 0;  // A right, B wrong
    std::int64_t c = 0;  // A wrong, B right
    double p_value = 1.0;
    std::string method;  // "exact" or "chi2-corrected"
};

// Exact two-sided binomial below b+c = 25, chi-square with continuity
// correction above; b+c = 0 gives p = 1 exactly.
McNemarResult mcnemar(std::span<const int> preds_a, std::span<const int> preds_b,
                      std::span<const int> labels);

double chi2_survival_1df(double x);

}  // namespace resfault
