#include "resfault/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace resfault {

Matrix Matrix::transposed() const {
    Matrix t(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r)
        for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
    return t;
}

std::vector<double> Matrix::column(std::size_t c) const {
    std::vector<double> v(rows_);
    for (std::size_t r = 0; r < rows_; ++r) v[r] = (*this)(r, c);
    return v;
}

void Matrix::set_column(std::size_t c, const std::vector<double>& v) {
    for (std::size_t r = 0; r < rows_; ++r) (*this)(r, c) = v[r];
}

Matrix matmul(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows()) throw std::invalid_argument("matmul: shape mismatch");
    Matrix out(a.rows(), b.cols(), 0.0);
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t k = 0; k < a.cols(); ++k) {
            double aik = a(i, k);
            if (aik == 0.0) continue;
            for (std::size_t j = 0; j < b.cols(); ++j) out(i, j) += aik * b(k, j);
        }
    }
    return out;
}

EigenResult jacobi_eigen_symmetric(const Matrix& sym, int max_sweeps, double tol) {
    const std::size_t n = sym.rows();
    if (n != sym.cols()) throw std::invalid_argument("jacobi: matrix not square");
    Matrix a = sym;
    Matrix v(n, n, 0.0);
    for (std::size_t i = 0; i < n; ++i) v(i, i) = 1.0;

    double scale = 0.0;
    for (std::size_t i = 0; i < n; ++i) scale = std::max(scale, std::abs(a(i, i)));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) scale = std::max(scale, std::abs(a(i, j)));
    if (scale == 0.0) scale = 1.0;

    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        double off = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) off += a(i, j) * a(i, j);
        if (std::sqrt(off) <= tol * scale * static_cast<double>(n)) break;

        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                double apq = a(p, q);
                if (std::abs(apq) <= tol * scale * 1e-4) continue;
                double app = a(p, p), aqq = a(q, q);
                double theta = (aqq - app) / (2.0 * apq);
                double t = (theta >= 0 ? 1.0 : -1.0) /
                           (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                double c = 1.0 / std::sqrt(t * t + 1.0);
                double s = t * c;

                for (std::size_t k = 0; k < n; ++k) {
                    double akp = a(k, p), akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    double apk = a(p, k), aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    double vkp = v(k, p), vkq = v(k, q);
                    v(k, p) = c * vkp - s * vkq;
                    v(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::vector<double> diag(n);
    for (std::size_t i = 0; i < n; ++i) diag[i] = a(i, i);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t x, std::size_t y) { return diag[x] > diag[y]; });

    EigenResult res;
    res.values.resize(n);
    res.vectors = Matrix(n, n);
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t src = order[c];
        res.values[c] = diag[src];
        // sign convention: largest-magnitude entry positive
        std::size_t imax = 0;
        double vmax = 0.0;
        for (std::size_t r = 0; r < n; ++r) {
            if (std::abs(v(r, src)) > vmax) {
                vmax = std::abs(v(r, src));
                imax = r;
            }
        }
        double sign = v(imax, src) < 0 ? -1.0 : 1.0;
        for (std::size_t r = 0; r < n; ++r) res.vectors(r, c) = sign * v(r, src);
    }
    return res;
}

Matrix covariance(const Matrix& x) {
    const std::size_t n = x.rows(), d = x.cols();
    if (n < 2) throw std::invalid_argument("covariance: need at least 2 rows");
    std::vector<double> mean(d, 0.0);
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < d; ++c) mean[c] += x(r, c);
    for (auto& m : mean) m /= static_cast<double>(n);

    Matrix cov(d, d, 0.0);
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t i = 0; i < d; ++i) {
            double xi = x(r, i) - mean[i];
            for (std::size_t j = i; j < d; ++j) {
                cov(i, j) += xi * (x(r, j) - mean[j]);
            }
        }
    }
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = i; j < d; ++j) {
            cov(i, j) /= static_cast<double>(n - 1);
            cov(j, i) = cov(i, j);
        }
    return cov;
}

Matrix symmetric_power(const Matrix& sym, double exponent, double cutoff) {
    EigenResult eig = jacobi_eigen_symmetric(sym);
    const std::size_t n = sym.rows();
    double lmax = 0.0;
    for (double l : eig.values) lmax = std::max(lmax, std::abs(l));
    Matrix out(n, n, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
        double l = eig.values[k];
        if (l <= cutoff * std::max(lmax, 1.0)) continue;
        double f = std::pow(l, exponent);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                out(i, j) += f * eig.vectors(i, k) * eig.vectors(j, k);
    }
    return out;
}

}  // namespace resfault
