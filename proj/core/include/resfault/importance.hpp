#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "resfault/evalstats.hpp"
#include "resfault/forest.hpp"
#include "resfault/matrix.hpp"

namespace resfault {

using PredictFn = std::function<double(std::span<const double>)>;  // score/probability
using LabelFn = std::function<int(std::span<const double>)>;       // hard label

// Gini-decrease summed over splits per feature, normalized to sum 1
// (uniform when the forest made no splits).
std::vector<double> impurity_importance(const ForestModel& forest);

// Mean metric drop over `repeats` column permutations, per feature.
std::vector<double> permutation_importance(const LabelFn& model, const Matrix& x,
                                           std::span<const int> labels, Metric metric,
                                           std::uint64_t seed, int repeats);

// Monte-Carlo Shapley: permutation sampling against a background sample; the
// per-iteration contributions telescope, so the estimates satisfy the
// efficiency property up to MC error.
std::vector<double> shapley_mc(const PredictFn& f, std::span<const double> x,
                               const Matrix& background, int n_samples, std::uint64_t seed);

// Mean signed contribution over the rows of x_test.
std::vector<double> shapley_direction_summary(const PredictFn& f, const Matrix& x_test,
                                              const Matrix& background, int n_samples_per_row,
                                              std::uint64_t seed);

}  // namespace resfault
