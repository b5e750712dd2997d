#pragma once

#include <span>
#include <string>
#include <vector>

#include "resfault/matrix.hpp"

namespace resfault {

struct ComponentSpace {
    Matrix loadings;  // d x k, orthonormal columns
    std::vector<double> explained_variance;
    double variance_retained = 0;
    double total_variance = 0;
    std::vector<double> mean;  // column means used for centering
    int k() const { return static_cast<int>(explained_variance.size()); }
};

// Eigendecomposition of the covariance matrix (cyclic Jacobi); k = smallest
// component count whose cumulative variance reaches the threshold; zero
// eigenvalues dropped.
ComponentSpace pca_fit(const Matrix& x, double variance_threshold = 0.95);
Matrix pca_transform(const ComponentSpace& space, const Matrix& x);

// Spearman rho with average ranks for ties; constant columns give rho = 0.
double spearman_rho(std::span<const double> a, std::span<const double> b);

struct SpearmanSummary {
    Matrix rho;  // cols(a) x cols(b)
    double max_abs = 0;
    double mean_per_column_max = 0;  // mean over a's columns of max_j |rho_ij|
    std::vector<bool> constant_a, constant_b;
};
SpearmanSummary spearman_cross(const Matrix& a_scores, const Matrix& b_scores);

// First k canonical correlations, descending, in [0,1]; ridge regularizes the
// within-set covariances. ridge = 0 with a singular covariance throws with a
// message instructing ridge use.
std::vector<double> cca(const Matrix& a, const Matrix& b, int k, double ridge = 1e-6);

struct OrthogonalityReport {
    int k_metrics = 0, k_embeddings = 0;
    double max_abs_rho = 0;
    double mean_per_component_max = 0;
    std::vector<double> canonical;
    double mean_canonical_first20 = 0;  // mean over available when k < 20

    struct Point {
        std::string id;
        double x = 0, y = 0;
        std::string cluster;
        bool centroid = false;
    };
    std::vector<Point> projection;  // 2-D PCA of unit-normalized score columns
};

// standardize -> pca on both spaces, spearman_cross, cca, plus the joint 2-D
// projection of component score vectors with per-cluster centroids
OrthogonalityReport orthogonality_report(const Matrix& metrics, const Matrix& embeddings,
                                         double variance_threshold = 0.95,
                                         double ridge = 1e-6);

}  // namespace resfault
