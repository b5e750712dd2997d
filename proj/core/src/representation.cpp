#include "resfault/representation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "resfault/errors.hpp"
#include "resfault/scaler.hpp"

namespace resfault {

ComponentSpace pca_fit(const Matrix& x, double variance_threshold) {
    const std::size_t n = x.rows(), d = x.cols();
    if (n < 2) throw InputError("pca: need at least 2 rows");
    ComponentSpace space;
    space.mean.assign(d, 0.0);
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < d; ++c) space.mean[c] += x(r, c);
    for (auto& m : space.mean) m /= static_cast<double>(n);

    Matrix cov = covariance(x);
    EigenResult eig = jacobi_eigen_symmetric(cov);

    double lmax = 0.0;
    for (double l : eig.values) lmax = std::max(lmax, l);
    const double cutoff = 1e-12 * std::max(lmax, 1.0);

    double total = 0.0;
    std::size_t usable = 0;
    for (double l : eig.values) {
        if (l > cutoff) {
            total += l;
            ++usable;
        }
    }
    space.total_variance = total;
    if (total <= 0 || usable == 0) {
        space.loadings = Matrix(d, 0);
        space.variance_retained = 1.0;
        return space;
    }

    std::size_t k = usable;
    double cum = 0.0;
    for (std::size_t i = 0; i < usable; ++i) {
        cum += eig.values[i];
        if (cum / total >= variance_threshold) {
            k = i + 1;
            break;
        }
    }
    space.loadings = Matrix(d, k);
    space.explained_variance.resize(k);
    double retained = 0.0;
    for (std::size_t c = 0; c < k; ++c) {
        space.explained_variance[c] = eig.values[c];
        retained += eig.values[c];
        for (std::size_t r = 0; r < d; ++r) space.loadings(r, c) = eig.vectors(r, c);
    }
    space.variance_retained = retained / total;
    return space;
}

Matrix pca_transform(const ComponentSpace& space, const Matrix& x) {
    const std::size_t n = x.rows(), d = x.cols(), k = space.loadings.cols();
    Matrix out(n, k, 0.0);
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t c = 0; c < k; ++c) {
            double s = 0;
            for (std::size_t j = 0; j < d; ++j)
                s += (x(r, j) - space.mean[j]) * space.loadings(j, c);
            out(r, c) = s;
        }
    }
    return out;
}

namespace {

std::vector<double> average_ranks(std::span<const double> v) {
    const std::size_t n = v.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> ranks(n, 0.0);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && v[order[j + 1]] == v[order[i]]) ++j;
        double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
        for (std::size_t t = i; t <= j; ++t) ranks[order[t]] = avg;
        i = j + 1;
    }
    return ranks;
}

bool is_constant(std::span<const double> v) {
    for (double x : v)
        if (x != v[0]) return false;
    return true;
}

double pearson(const std::vector<double>& a, const std::vector<double>& b) {
    const std::size_t n = a.size();
    double ma = 0, mb = 0;
    for (std::size_t i = 0; i < n; ++i) {
        ma += a[i];
        mb += b[i];
    }
    ma /= static_cast<double>(n);
    mb /= static_cast<double>(n);
    double num = 0, da = 0, db = 0;
    for (std::size_t i = 0; i < n; ++i) {
        num += (a[i] - ma) * (b[i] - mb);
        da += (a[i] - ma) * (a[i] - ma);
        db += (b[i] - mb) * (b[i] - mb);
    }
    if (da <= 0 || db <= 0) return 0.0;
    return num / std::sqrt(da * db);
}

}  // namespace

double spearman_rho(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size() || a.empty()) throw InputError("spearman: length mismatch");
    if (is_constant(a) || is_constant(b)) return 0.0;
    return pearson(average_ranks(a), average_ranks(b));
}

SpearmanSummary spearman_cross(const Matrix& a_scores, const Matrix& b_scores) {
    if (a_scores.rows() != b_scores.rows())
        throw InputError("spearman_cross: row count mismatch");
    const std::size_t da = a_scores.cols(), db = b_scores.cols();
    SpearmanSummary s;
    s.rho = Matrix(da, db);
    s.constant_a.resize(da);
    s.constant_b.resize(db);

    std::vector<std::vector<double>> ranks_a(da), ranks_b(db);
    for (std::size_t i = 0; i < da; ++i) {
        auto col = a_scores.column(i);
        s.constant_a[i] = is_constant(col);
        ranks_a[i] = average_ranks(col);
    }
    for (std::size_t j = 0; j < db; ++j) {
        auto col = b_scores.column(j);
        s.constant_b[j] = is_constant(col);
        ranks_b[j] = average_ranks(col);
    }

    double col_max_sum = 0.0;
    for (std::size_t i = 0; i < da; ++i) {
        double col_max = 0.0;
        for (std::size_t j = 0; j < db; ++j) {
            double r = (s.constant_a[i] || s.constant_b[j]) ? 0.0
                                                            : pearson(ranks_a[i], ranks_b[j]);
            s.rho(i, j) = r;
            s.max_abs = std::max(s.max_abs, std::abs(r));
            col_max = std::max(col_max, std::abs(r));
        }
        col_max_sum += col_max;
    }
    s.mean_per_column_max = da > 0 ? col_max_sum / static_cast<double>(da) : 0.0;
    return s;
}

namespace {

Matrix center_columns(const Matrix& x) {
    Matrix out = x;
    const std::size_t n = x.rows(), d = x.cols();
    for (std::size_t c = 0; c < d; ++c) {
        double m = 0;
        for (std::size_t r = 0; r < n; ++r) m += x(r, c);
        m /= static_cast<double>(n);
        for (std::size_t r = 0; r < n; ++r) out(r, c) -= m;
    }
    return out;
}

Matrix cross_covariance(const Matrix& a_centered, const Matrix& b_centered) {
    const std::size_t n = a_centered.rows();
    Matrix out(a_centered.cols(), b_centered.cols(), 0.0);
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t i = 0; i < a_centered.cols(); ++i) {
            double ai = a_centered(r, i);
            if (ai == 0.0) continue;
            for (std::size_t j = 0; j < b_centered.cols(); ++j)
                out(i, j) += ai * b_centered(r, j);
        }
    for (auto& v : out.data()) v /= static_cast<double>(n - 1);
    return out;
}

}  // namespace

std::vector<double> cca(const Matrix& a, const Matrix& b, int k, double ridge) {
    const std::size_t n = a.rows();
    if (n != b.rows()) throw InputError("cca: row count mismatch");
    if (n <= std::max(a.cols(), b.cols()))
        throw InputError("cca: need more rows than the wider space");
    if (k < 1 || static_cast<std::size_t>(k) > std::min(a.cols(), b.cols()))
        throw InputError("cca: k out of range");

    Matrix ac = center_columns(a), bc = center_columns(b);
    Matrix saa = covariance(a), sbb = covariance(b);
    for (std::size_t i = 0; i < saa.rows(); ++i) saa(i, i) += ridge;
    for (std::size_t i = 0; i < sbb.rows(); ++i) sbb(i, i) += ridge;

    auto check_pd = [&](const Matrix& m, const char* name) {
        EigenResult e = jacobi_eigen_symmetric(m);
        for (double l : e.values) {
            if (l <= 1e-14) {
                throw InputError(std::string("cca: ") + name +
                                 " covariance is singular; pass a positive ridge");
            }
        }
    };
    if (ridge <= 0) {
        check_pd(saa, "first");
        check_pd(sbb, "second");
    }

    Matrix sab = cross_covariance(ac, bc);
    Matrix saa_inv_sqrt = symmetric_power(saa, -0.5);
    Matrix sbb_inv = symmetric_power(sbb, -1.0);
    Matrix t1 = matmul(saa_inv_sqrt, sab);        // da x db
    Matrix t2 = matmul(t1, sbb_inv);              // da x db
    Matrix m = matmul(t2, t1.transposed());       // da x da, symmetric PSD
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = i + 1; j < m.cols(); ++j) {
            double avg = 0.5 * (m(i, j) + m(j, i));
            m(i, j) = avg;
            m(j, i) = avg;
        }

    EigenResult eig = jacobi_eigen_symmetric(m);
    std::vector<double> rho;
    for (int i = 0; i < k && static_cast<std::size_t>(i) < eig.values.size(); ++i) {
        double v = std::clamp(eig.values[static_cast<std::size_t>(i)], 0.0, 1.0);
        rho.push_back(std::sqrt(v));
    }
    return rho;
}

OrthogonalityReport orthogonality_report(const Matrix& metrics, const Matrix& embeddings,
                                         double variance_threshold, double ridge) {
    if (metrics.rows() != embeddings.rows())
        throw InputError("orthogonality: row ids do not align");

    Matrix ms = apply_scaler(fit_scaler(metrics), metrics);
    Matrix es = apply_scaler(fit_scaler(embeddings), embeddings);
    ComponentSpace pa = pca_fit(ms, variance_threshold);
    ComponentSpace pb = pca_fit(es, variance_threshold);
    Matrix a_scores = pca_transform(pa, ms);
    Matrix b_scores = pca_transform(pb, es);

    OrthogonalityReport rep;
    rep.k_metrics = pa.k();
    rep.k_embeddings = pb.k();

    SpearmanSummary sp = spearman_cross(a_scores, b_scores);
    rep.max_abs_rho = sp.max_abs;
    rep.mean_per_component_max = sp.mean_per_column_max;

    int kk = static_cast<int>(std::min({static_cast<std::size_t>(20), a_scores.cols(),
                                        b_scores.cols()}));
    if (kk >= 1 && a_scores.rows() > std::max(a_scores.cols(), b_scores.cols())) {
        rep.canonical = cca(a_scores, b_scores, kk, ridge);
        double sum = 0;
        for (double c : rep.canonical) sum += c;
        rep.mean_canonical_first20 =
            rep.canonical.empty() ? 0.0 : sum / static_cast<double>(rep.canonical.size());
    }

    // joint 2-D PCA over unit-normalized component score vectors
    const std::size_t n = a_scores.rows();
    const std::size_t total = a_scores.cols() + b_scores.cols();
    if (total >= 2 && n >= 2) {
        Matrix points(total, n);
        auto put = [&](const Matrix& scores, std::size_t row_off) {
            for (std::size_t c = 0; c < scores.cols(); ++c) {
                double norm = 0;
                for (std::size_t r = 0; r < n; ++r) norm += scores(r, c) * scores(r, c);
                norm = std::sqrt(norm);
                for (std::size_t r = 0; r < n; ++r)
                    points(row_off + c, r) = norm > 0 ? scores(r, c) / norm : 0.0;
            }
        };
        put(a_scores, 0);
        put(b_scores, a_scores.cols());

        ComponentSpace proj = pca_fit(points, 1.0);
        Matrix coords = pca_transform(proj, points);
        auto coord = [&](std::size_t r, std::size_t c) {
            return c < coords.cols() ? coords(r, c) : 0.0;
        };
        double cx[2] = {0, 0}, cy[2] = {0, 0};
        for (std::size_t r = 0; r < total; ++r) {
            bool is_metric = r < a_scores.cols();
            OrthogonalityReport::Point p;
            p.id = (is_metric ? "metric:" : "embedding:") +
                   std::to_string(is_metric ? r : r - a_scores.cols());
            p.x = coord(r, 0);
            p.y = coord(r, 1);
            p.cluster = is_metric ? "metric" : "embedding";
            cx[is_metric ? 0 : 1] += p.x;
            cy[is_metric ? 0 : 1] += p.y;
            rep.projection.push_back(std::move(p));
        }
        const double na = static_cast<double>(std::max<std::size_t>(1, a_scores.cols()));
        const double nb = static_cast<double>(std::max<std::size_t>(1, b_scores.cols()));
        rep.projection.push_back({"centroid:metric", cx[0] / na, cy[0] / na, "metric", true});
        rep.projection.push_back(
            {"centroid:embedding", cx[1] / nb, cy[1] / nb, "embedding", true});
    }
    return rep;
}

}  // namespace resfault
