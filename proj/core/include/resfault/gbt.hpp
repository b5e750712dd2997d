#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "resfault/matrix.hpp"
#include "resfault/tree.hpp"

namespace resfault {

struct GbtConfig {
    int n_rounds = 200;
    double learning_rate = 0.1;
    int max_depth = 4;
    int min_leaf = 2;
    std::uint64_t seed = 0;
};

// Gradient boosting on logistic loss with Newton-step leaves.
struct BoostedModel {
    GbtConfig config;
    std::vector<std::string> schema;
    double base_score = 0.0;  // prior log-odds
    std::vector<Tree> trees;

    double decision(std::span<const double> row) const;  // raw log-odds
    double predict_proba(std::span<const double> row) const;
    int predict(std::span<const double> row, double threshold = 0.5) const;

    std::string serialize() const;
    static BoostedModel deserialize(const std::string& text);
};

BoostedModel train_gbt(const Matrix& x, std::span<const double> y,
                       const std::vector<std::string>& schema, const GbtConfig& cfg,
                       std::vector<double>* loss_curve = nullptr);

}  // namespace resfault
