#include "resfault/evalstats.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "resfault/errors.hpp"

namespace resfault {

ConfusionMatrix confusion(std::span<const int> preds, std::span<const int> labels) {
    if (preds.size() != labels.size())
        throw InputError("confusion: prediction/label length mismatch");
    ConfusionMatrix cm;
    for (std::size_t i = 0; i < preds.size(); ++i) {
        bool p = preds[i] != 0, y = labels[i] != 0;
        if (p && y) ++cm.tp;
        else if (p && !y) ++cm.fp;
        else if (!p && y) ++cm.fn;
        else ++cm.tn;
    }
    return cm;
}

const char* metric_name(Metric m) {
    switch (m) {
        case Metric::Accuracy: return "accuracy";
        case Metric::Precision: return "precision";
        case Metric::Recall: return "recall";
        default: return "f1";
    }
}

double metric_value(Metric m, const ConfusionMatrix& cm) {
    const double tp = static_cast<double>(cm.tp), fp = static_cast<double>(cm.fp);
    const double fn = static_cast<double>(cm.fn), tn = static_cast<double>(cm.tn);
    switch (m) {
        case Metric::Accuracy: {
            double total = tp + fp + fn + tn;
            return total > 0 ? (tp + tn) / total : 0.0;
        }
        case Metric::Precision:
            return tp + fp > 0 ? tp / (tp + fp) : 0.0;
        case Metric::Recall:
            return tp + fn > 0 ? tp / (tp + fn) : 0.0;
        case Metric::F1: {
            double denom = 2 * tp + fp + fn;
            return denom > 0 ? 2 * tp / denom : 0.0;
        }
    }
    return 0.0;
}

EvalReport classification_metrics(const ConfusionMatrix& cm) {
    EvalReport r;
    r.accuracy = metric_value(Metric::Accuracy, cm);
    r.precision = metric_value(Metric::Precision, cm);
    r.recall = metric_value(Metric::Recall, cm);
    r.f1 = metric_value(Metric::F1, cm);
    return r;
}

Interval bootstrap_ci(std::span<const int> preds, std::span<const int> labels, Metric metric,
                      int n_resamples, std::uint64_t seed, double level) {
    const std::size_t n = preds.size();
    if (n < 2) throw InputError("bootstrap: need at least 2 samples");
    if (preds.size() != labels.size())
        throw InputError("bootstrap: prediction/label length mismatch");

    std::mt19937_64 rng(seed);
    std::vector<double> values(static_cast<size_t>(n_resamples));
    std::vector<int> rp(n), rl(n);
    for (int r = 0; r < n_resamples; ++r) {
        for (std::size_t i = 0; i < n; ++i) {
            std::size_t idx = static_cast<std::size_t>(rng() % n);
            rp[i] = preds[idx];
            rl[i] = labels[idx];
        }
        values[static_cast<size_t>(r)] = metric_value(metric, confusion(rp, rl));
    }
    std::sort(values.begin(), values.end());
    const double alpha = 1.0 - level;
    auto rank = [&](double q) {
        double pos = q * static_cast<double>(n_resamples - 1) + 0.5;
        auto idx = static_cast<std::size_t>(std::floor(pos));
        return values[std::min(idx, values.size() - 1)];
    };
    return {rank(alpha / 2.0), rank(1.0 - alpha / 2.0)};
}

EvalReport evaluate_with_ci(std::span<const int> preds, std::span<const int> labels,
                            int n_resamples, std::uint64_t seed, double level) {
    EvalReport r = classification_metrics(confusion(preds, labels));
    // percentile intervals widened to contain the point estimate
    auto around = [](Interval ci, double point) {
        return Interval{std::min(ci.low, point), std::max(ci.high, point)};
    };
    r.accuracy_ci = around(
        bootstrap_ci(preds, labels, Metric::Accuracy, n_resamples, seed, level), r.accuracy);
    r.precision_ci = around(
        bootstrap_ci(preds, labels, Metric::Precision, n_resamples, seed, level), r.precision);
    r.recall_ci = around(bootstrap_ci(preds, labels, Metric::Recall, n_resamples, seed, level),
                         r.recall);
    r.f1_ci = around(bootstrap_ci(preds, labels, Metric::F1, n_resamples, seed, level), r.f1);
    return r;
}

double chi2_survival_1df(double x) {
    if (x <= 0) return 1.0;
    return std::erfc(std::sqrt(x / 2.0));
}

McNemarResult mcnemar(std::span<const int> preds_a, std::span<const int> preds_b,
                      std::span<const int> labels) {
    if (preds_a.size() != preds_b.size() || preds_a.size() != labels.size())
        throw InputError("mcnemar: length mismatch");
    McNemarResult r;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        bool a_right = preds_a[i] == labels[i];
        bool b_right = preds_b[i] == labels[i];
        if (a_right && !b_right) ++r.b;
        if (!a_right && b_right) ++r.c;
    }
    const std::int64_t n = r.b + r.c;
    if (n == 0) {
        r.p_value = 1.0;
        r.method = "exact";
        return r;
    }
    if (n < 25) {
        // two-sided exact binomial, p = 2 * P(X <= min(b,c)) capped at 1
        const std::int64_t m = std::min(r.b, r.c);
        double tail = 0.0;
        double coeff = 1.0;  // C(n, 0)
        const double unit = std::pow(0.5, static_cast<double>(n));
        for (std::int64_t i = 0; i <= m; ++i) {
            if (i > 0) {
                coeff = coeff * static_cast<double>(n - i + 1) / static_cast<double>(i);
            }
            tail += coeff * unit;
        }
        r.p_value = std::min(1.0, 2.0 * tail);
        r.method = "exact";
        return r;
    }
    const double diff = std::abs(static_cast<double>(r.b) - static_cast<double>(r.c)) - 1.0;
    const double stat = (diff * diff) / static_cast<double>(n);
    r.p_value = chi2_survival_1df(stat);
    r.method = "chi2-corrected";
    return r;
}

}  // namespace resfault
