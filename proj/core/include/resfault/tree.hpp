#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "resfault/matrix.hpp"

namespace resfault {

struct TreeNode {
    int feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    int left = -1, right = -1;
    double value = 0.0;
    int n_samples = 0;
    double impurity_decrease = 0.0;  // weighted by node fraction
};

struct Tree {
    std::vector<TreeNode> nodes;  // nodes[0] is the root

    double predict(std::span<const double> row) const;
    int max_depth() const;
};

enum class SplitCriterion { Gini, NewtonMse };

struct TreeBuildConfig {
    SplitCriterion criterion = SplitCriterion::Gini;
    int max_depth = -1;  // -1 unlimited; 0 builds a single leaf
    int min_leaf = 2;
    int features_per_split = -1;  // -1 uses all features
};

// CART with deterministic tie-breaking: strictly better gain wins, so the
// lowest candidate feature index and lowest threshold win ties by iteration
// order. For Gini, y holds {0,1} labels and leaves store the positive
// fraction; for NewtonMse, leaves store -sum(g)/sum(h).
Tree build_tree(const Matrix& x, std::span<const double> y_or_grad,
                std::span<const double> hess, std::span<const int> rows,
                const TreeBuildConfig& cfg, std::mt19937_64& rng);

std::string tree_serialize(const Tree& t);
Tree tree_deserialize(std::span<const std::string> lines, std::size_t& pos);

}  // namespace resfault
