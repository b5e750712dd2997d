#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "resfault/matrix.hpp"

namespace resfault {

struct IsolationConfig {
    int n_trees = 100;
    int subsample = 256;
    double contamination = 0.5;
    std::uint64_t seed = 0;
};

// Isolation forest; anomaly_score returns s = 2^(-E[path]/c(psi)) in (0,1).
struct IsolationModel {
    struct Node {
        int feature = -1;  // -1 marks an external node
        double threshold = 0.0;
        int left = -1, right = -1;
        int size = 0;  // samples at an external node
    };
    struct ITree {
        std::vector<Node> nodes;
    };

    IsolationConfig config;
    std::vector<std::string> schema;
    std::vector<ITree> trees;
    int subsample_used = 0;
    double threshold = 0.5;  // score cut from the contamination quantile

    double anomaly_score(std::span<const double> row) const;
    int predict(std::span<const double> row) const;  // 1 = anomaly

    std::string serialize() const;
    static IsolationModel deserialize(const std::string& text);
};

IsolationModel fit_isolation_forest(const Matrix& x, const std::vector<std::string>& schema,
                                    const IsolationConfig& cfg);

// average path-length normalizer c(n)
double isolation_c(double n);

struct LofConfig {
    int k = 20;
    double outlier_threshold = 1.5;
    std::uint64_t seed = 0;
};

// Local outlier factor; the model keeps the training points.
struct LofModel {
    LofConfig config;
    std::vector<std::string> schema;
    Matrix points;
    std::vector<double> k_distance;  // per training point
    std::vector<double> lrd;         // local reachability density

    double lof_score(std::span<const double> row) const;
    int predict(std::span<const double> row) const;  // 1 = outlier

    std::string serialize() const;
    static LofModel deserialize(const std::string& text);
};

LofModel fit_lof(const Matrix& x, const std::vector<std::string>& schema, const LofConfig& cfg);

}  // namespace resfault
