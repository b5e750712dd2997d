#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "resfault/matrix.hpp"
#include "resfault/tree.hpp"

namespace resfault {

struct ForestConfig {
    int n_trees = 300;
    int max_depth = -1;
    int min_leaf = 2;
    int features_per_split = -1;  // -1 -> floor(sqrt(d))
    std::uint64_t seed = 0;
};

struct ForestModel {
    ForestConfig config;
    std::vector<std::string> schema;
    std::vector<Tree> trees;

    double predict_proba(std::span<const double> row) const;
    int predict(std::span<const double> row, double threshold = 0.5) const;

    std::string serialize() const;
    static ForestModel deserialize(const std::string& text);
};

// Bootstrap + Gini CART; per-tree RNG streams derived from (seed, tree idx),
// so training is a deterministic function of (data, config, seed).
ForestModel train_random_forest(const Matrix& x, std::span<const double> y,
                                const std::vector<std::string>& schema,
                                const ForestConfig& cfg);

}  // namespace resfault
