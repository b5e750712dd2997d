#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace resfault {

// Row-major dense matrix, just enough linear algebra for PCA/CCA.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    const std::vector<double>& data() const { return data_; }
    std::vector<double>& data() { return data_; }

    Matrix transposed() const;
    std::vector<double> column(std::size_t c) const;
    void set_column(std::size_t c, const std::vector<double>& v);

private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<double> data_;
};

Matrix matmul(const Matrix& a, const Matrix& b);

struct EigenResult {
    std::vector<double> values;  // descending
    Matrix vectors;              // columns are unit eigenvectors, same order
};

// Cyclic Jacobi rotations on a symmetric matrix; eigenpairs sorted by
// descending eigenvalue. Eigenvector sign fixed so the entry of largest
// magnitude is positive.
EigenResult jacobi_eigen_symmetric(const Matrix& sym, int max_sweeps = 100,
                                   double tol = 1e-12);

// Covariance of the columns of x (mean-centered), divided by (n-1).
Matrix covariance(const Matrix& x);

// B = V diag(f(lambda)) V^T for a symmetric PSD matrix; eigenvalues below
// `cutoff` are treated as zero.
Matrix symmetric_power(const Matrix& sym, double exponent, double cutoff = 1e-12);

}  // namespace resfault
