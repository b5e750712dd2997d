#include "resfault/importance.hpp"

#include <algorithm>
#include <numeric>
#include <random>

#include "resfault/errors.hpp"
#include "resfault/strutil.hpp"

namespace resfault {

std::vector<double> impurity_importance(const ForestModel& forest) {
    const std::size_t d = forest.schema.size();
    std::vector<double> weights(d, 0.0);
    for (const Tree& t : forest.trees) {
        for (const TreeNode& n : t.nodes) {
            if (n.feature >= 0 && static_cast<std::size_t>(n.feature) < d)
                weights[static_cast<std::size_t>(n.feature)] += n.impurity_decrease;
        }
    }
    double total = std::accumulate(weights.begin(), weights.end(), 0.0);
    if (total <= 0) {
        std::fill(weights.begin(), weights.end(), d > 0 ? 1.0 / static_cast<double>(d) : 0.0);
        return weights;
    }
    for (double& w : weights) w /= total;
    return weights;
}

std::vector<double> permutation_importance(const LabelFn& model, const Matrix& x,
                                           std::span<const int> labels, Metric metric,
                                           std::uint64_t seed, int repeats) {
    const std::size_t n = x.rows(), d = x.cols();
    if (n != labels.size()) throw InputError("permutation importance: length mismatch");

    auto score = [&](const Matrix& data) {
        std::vector<int> preds(n);
        for (std::size_t i = 0; i < n; ++i) {
            std::span<const double> row(&data.data()[i * d], d);
            preds[i] = model(row);
        }
        return metric_value(metric, confusion(preds, labels));
    };
    const double baseline = score(x);

    std::vector<double> drops(d, 0.0);
    for (std::size_t f = 0; f < d; ++f) {
        for (int rep = 0; rep < repeats; ++rep) {
            std::mt19937_64 rng(derive_seed(
                seed, static_cast<std::uint64_t>(f) * static_cast<std::uint64_t>(repeats) +
                          static_cast<std::uint64_t>(rep)));
            std::vector<std::size_t> perm(n);
            std::iota(perm.begin(), perm.end(), 0);
            for (std::size_t i = n; i-- > 1;) {
                std::size_t j = static_cast<std::size_t>(rng() % (i + 1));
                std::swap(perm[i], perm[j]);
            }
            Matrix shuffled = x;
            for (std::size_t i = 0; i < n; ++i) shuffled(i, f) = x(perm[i], f);
            drops[f] += baseline - score(shuffled);
        }
        drops[f] /= static_cast<double>(std::max(1, repeats));
    }
    return drops;
}

std::vector<double> shapley_mc(const PredictFn& f, std::span<const double> x,
                               const Matrix& background, int n_samples, std::uint64_t seed) {
    const std::size_t d = x.size();
    if (background.rows() == 0 || background.cols() != d)
        throw InputError("shapley: background must be non-empty and match x");

    std::vector<double> contrib(d, 0.0);
    std::vector<double> z(d);
    std::vector<std::size_t> order(d);
    for (int s = 0; s < n_samples; ++s) {
        std::mt19937_64 rng(derive_seed(seed, static_cast<std::uint64_t>(s)));
        const std::size_t b = static_cast<std::size_t>(rng() % background.rows());
        for (std::size_t j = 0; j < d; ++j) z[j] = background(b, j);
        std::iota(order.begin(), order.end(), 0);
        for (std::size_t i = d; i-- > 1;) {
            std::size_t j = static_cast<std::size_t>(rng() % (i + 1));
            std::swap(order[i], order[j]);
        }
        double prev = f(z);
        for (std::size_t j : order) {
            z[j] = x[j];
            double cur = f(z);
            contrib[j] += cur - prev;
            prev = cur;
        }
    }
    for (double& c : contrib) c /= static_cast<double>(std::max(1, n_samples));
    return contrib;
}

std::vector<double> shapley_direction_summary(const PredictFn& f, const Matrix& x_test,
                                              const Matrix& background, int n_samples_per_row,
                                              std::uint64_t seed) {
    const std::size_t n = x_test.rows(), d = x_test.cols();
    std::vector<double> mean(d, 0.0);
    if (n == 0) return mean;
    for (std::size_t i = 0; i < n; ++i) {
        std::span<const double> row(&x_test.data()[i * d], d);
        auto phi = shapley_mc(f, row, background, n_samples_per_row,
                              derive_seed(seed, 0xABCD0000ull + i));
        for (std::size_t j = 0; j < d; ++j) mean[j] += phi[j];
    }
    for (double& v : mean) v /= static_cast<double>(n);
    return mean;
}

}  // namespace resfault
