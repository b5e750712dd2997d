#include "resfault/anomaly.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "resfault/errors.hpp"
#include "resfault/strutil.hpp"

namespace resfault {

namespace {
constexpr double kEulerGamma = 0.5772156649015329;
constexpr double kDensityEps = 1e-12;

double euclidean(std::span<const double> a, std::span<const double> b) {
    double s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        double d = a[i] - b[i];
        s += d * d;
    }
    return std::sqrt(s);
}
}  // namespace

double isolation_c(double n) {
    if (n <= 1.0) return 0.0;
    if (n == 2.0) return 1.0;
    return 2.0 * (std::log(n - 1.0) + kEulerGamma) - 2.0 * (n - 1.0) / n;
}

namespace {

struct ITreeBuilder {
    const Matrix& x;
    std::mt19937_64& rng;
    int height_limit;
    IsolationModel::ITree tree;

    int build(std::vector<int> rows, int depth) {
        int idx = static_cast<int>(tree.nodes.size());
        tree.nodes.emplace_back();
        if (depth >= height_limit || rows.size() <= 1) {
            tree.nodes[static_cast<size_t>(idx)].size = static_cast<int>(rows.size());
            return idx;
        }
        std::vector<int> usable;
        for (std::size_t f = 0; f < x.cols(); ++f) {
            double lo = x(static_cast<size_t>(rows[0]), f), hi = lo;
            for (int r : rows) {
                lo = std::min(lo, x(static_cast<size_t>(r), f));
                hi = std::max(hi, x(static_cast<size_t>(r), f));
            }
            if (hi > lo) usable.push_back(static_cast<int>(f));
        }
        if (usable.empty()) {
            tree.nodes[static_cast<size_t>(idx)].size = static_cast<int>(rows.size());
            return idx;
        }
        std::uniform_int_distribution<std::size_t> pick(0, usable.size() - 1);
        int f = usable[pick(rng)];
        double lo = x(static_cast<size_t>(rows[0]), static_cast<size_t>(f)), hi = lo;
        for (int r : rows) {
            lo = std::min(lo, x(static_cast<size_t>(r), static_cast<size_t>(f)));
            hi = std::max(hi, x(static_cast<size_t>(r), static_cast<size_t>(f)));
        }
        std::uniform_real_distribution<double> cut(lo, hi);
        double threshold = cut(rng);

        std::vector<int> left, right;
        for (int r : rows) {
            if (x(static_cast<size_t>(r), static_cast<size_t>(f)) <= threshold)
                left.push_back(r);
            else
                right.push_back(r);
        }
        if (left.empty() || right.empty()) {
            tree.nodes[static_cast<size_t>(idx)].size = static_cast<int>(rows.size());
            return idx;
        }
        tree.nodes[static_cast<size_t>(idx)].feature = f;
        tree.nodes[static_cast<size_t>(idx)].threshold = threshold;
        int l = build(std::move(left), depth + 1);
        int r = build(std::move(right), depth + 1);
        tree.nodes[static_cast<size_t>(idx)].left = l;
        tree.nodes[static_cast<size_t>(idx)].right = r;
        return idx;
    }
};

double itree_path_length(const IsolationModel::ITree& t, std::span<const double> row) {
    int i = 0;
    int depth = 0;
    while (t.nodes[static_cast<size_t>(i)].feature >= 0) {
        const auto& n = t.nodes[static_cast<size_t>(i)];
        i = row[static_cast<size_t>(n.feature)] <= n.threshold ? n.left : n.right;
        ++depth;
    }
    return depth + isolation_c(t.nodes[static_cast<size_t>(i)].size);
}

}  // namespace

double IsolationModel::anomaly_score(std::span<const double> row) const {
    if (!schema.empty() && row.size() != schema.size())
        throw InputError("isolation forest: row width does not match the training schema");
    if (trees.empty() || subsample_used < 2) return 0.5;
    double sum = 0;
    for (const ITree& t : trees) sum += itree_path_length(t, row);
    double mean = sum / static_cast<double>(trees.size());
    return std::pow(2.0, -mean / isolation_c(static_cast<double>(subsample_used)));
}

int IsolationModel::predict(std::span<const double> row) const {
    return anomaly_score(row) >= threshold ? 1 : 0;
}

IsolationModel fit_isolation_forest(const Matrix& x, const std::vector<std::string>& schema,
                                    const IsolationConfig& cfg) {
    const std::size_t n = x.rows();
    if (n < 2) throw InputError("isolation forest: need at least 2 samples");
    IsolationModel model;
    model.config = cfg;
    model.schema = schema;
    const int psi = static_cast<int>(std::min<std::size_t>(
        n, static_cast<std::size_t>(std::max(2, cfg.subsample))));
    model.subsample_used = psi;
    const int height_limit =
        std::max(1, static_cast<int>(std::ceil(std::log2(static_cast<double>(psi)))));

    for (int t = 0; t < cfg.n_trees; ++t) {
        std::mt19937_64 rng(derive_seed(cfg.seed, static_cast<std::uint64_t>(t)));
        std::vector<int> pool(n);
        std::iota(pool.begin(), pool.end(), 0);
        for (int i = 0; i < psi; ++i) {
            std::uniform_int_distribution<std::size_t> pick(static_cast<std::size_t>(i),
                                                            n - 1);
            std::swap(pool[static_cast<size_t>(i)], pool[pick(rng)]);
        }
        pool.resize(static_cast<size_t>(psi));
        ITreeBuilder b{x, rng, height_limit, {}};
        b.build(pool, 0);
        model.trees.push_back(std::move(b.tree));
    }

    // threshold at the contamination quantile of training scores
    std::vector<double> scores(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::span<const double> row(&x.data()[i * x.cols()], x.cols());
        scores[i] = model.anomaly_score(row);
    }
    std::sort(scores.begin(), scores.end(), std::greater<>());
    double count = std::clamp(std::round(cfg.contamination * static_cast<double>(n)), 1.0,
                              static_cast<double>(n));
    model.threshold = scores[static_cast<size_t>(count) - 1];
    return model;
}

std::string IsolationModel::serialize() const {
    std::string schema_csv;
    for (const auto& s : schema) {
        if (!schema_csv.empty()) schema_csv += ',';
        schema_csv += s;
    }
    std::string out = "resfault-model v1\n";
    out += "type iforest\n";
    out += "schema_hash " + std::to_string(fnv1a64(schema_csv)) + "\n";
    out += "schema " + schema_csv + "\n";
    out += "config n_trees=" + std::to_string(config.n_trees) +
           " subsample=" + std::to_string(config.subsample) +
           " contamination=" + format_double_exact(config.contamination) +
           " seed=" + std::to_string(config.seed) + "\n";
    out += "subsample_used " + std::to_string(subsample_used) + "\n";
    out += "threshold " + format_double_exact(threshold) + "\n";
    for (const ITree& t : trees) {
        out += "itree " + std::to_string(t.nodes.size()) + "\n";
        for (const Node& nd : t.nodes) {
            out += std::to_string(nd.feature) + " " + format_double_exact(nd.threshold) +
                   " " + std::to_string(nd.left) + " " + std::to_string(nd.right) + " " +
                   std::to_string(nd.size) + "\n";
        }
    }
    return out;
}

IsolationModel IsolationModel::deserialize(const std::string& text) {
    IsolationModel m;
    auto lines = split_lines(text);
    std::size_t pos = 0;
    for (; pos < lines.size(); ++pos) {
        const std::string& line = lines[pos];
        if (starts_with(line, "schema ")) {
            m.schema = split(line.substr(7), ',');
        } else if (starts_with(line, "config ")) {
            for (const auto& kv : split(line.substr(7), ' ')) {
                auto eq = kv.find('=');
                if (eq == std::string::npos) continue;
                std::string key = kv.substr(0, eq);
                std::string val = kv.substr(eq + 1);
                if (key == "n_trees") m.config.n_trees = std::atoi(val.c_str());
                else if (key == "subsample") m.config.subsample = std::atoi(val.c_str());
                else if (key == "contamination") m.config.contamination = std::atof(val.c_str());
                else if (key == "seed")
                    m.config.seed = static_cast<std::uint64_t>(std::atoll(val.c_str()));
            }
        } else if (starts_with(line, "subsample_used ")) {
            m.subsample_used = std::atoi(line.c_str() + 15);
        } else if (starts_with(line, "threshold ")) {
            m.threshold = std::atof(line.c_str() + 10);
        } else if (starts_with(line, "itree ")) {
            break;
        }
    }
    while (pos < lines.size() && starts_with(lines[pos], "itree ")) {
        std::size_t count = static_cast<std::size_t>(std::atoll(lines[pos].c_str() + 6));
        ++pos;
        ITree t;
        for (std::size_t i = 0; i < count && pos < lines.size(); ++i, ++pos) {
            auto parts = split(lines[pos], ' ');
            if (parts.size() < 5) continue;
            Node nd;
            nd.feature = std::atoi(parts[0].c_str());
            nd.threshold = std::atof(parts[1].c_str());
            nd.left = std::atoi(parts[2].c_str());
            nd.right = std::atoi(parts[3].c_str());
            nd.size = std::atoi(parts[4].c_str());
            t.nodes.push_back(nd);
        }
        m.trees.push_back(std::move(t));
    }
    return m;
}

// ---------------------------------------------------------------------------
// LOF

namespace {

// first k training points by (distance, index); returns their indices
std::vector<int> nearest_k(const Matrix& pts, std::span<const double> row, int k,
                           int exclude = -1) {
    std::vector<std::pair<double, int>> dists;
    dists.reserve(pts.rows());
    for (std::size_t i = 0; i < pts.rows(); ++i) {
        if (static_cast<int>(i) == exclude) continue;
        std::span<const double> p(&pts.data()[i * pts.cols()], pts.cols());
        dists.emplace_back(euclidean(row, p), static_cast<int>(i));
    }
    std::sort(dists.begin(), dists.end());
    std::vector<int> out;
    for (int i = 0; i < k && static_cast<size_t>(i) < dists.size(); ++i)
        out.push_back(dists[static_cast<size_t>(i)].second);
    return out;
}

}  // namespace

LofModel fit_lof(const Matrix& x, const std::vector<std::string>& schema,
                 const LofConfig& cfg) {
    const int n = static_cast<int>(x.rows());
    if (cfg.k < 1) throw InputError("lof: k must be >= 1");
    if (n <= cfg.k) throw InputError("lof: need more samples than k");
    LofModel m;
    m.config = cfg;
    m.schema = schema;
    m.points = x;
    m.k_distance.assign(static_cast<size_t>(n), 0.0);
    m.lrd.assign(static_cast<size_t>(n), 0.0);

    std::vector<std::vector<int>> neighbors(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
        std::span<const double> row(&x.data()[static_cast<size_t>(i) * x.cols()], x.cols());
        neighbors[static_cast<size_t>(i)] = nearest_k(x, row, cfg.k, i);
        const int far = neighbors[static_cast<size_t>(i)].back();
        std::span<const double> fp(&x.data()[static_cast<size_t>(far) * x.cols()], x.cols());
        m.k_distance[static_cast<size_t>(i)] = euclidean(row, fp);
    }
    for (int i = 0; i < n; ++i) {
        std::span<const double> row(&x.data()[static_cast<size_t>(i) * x.cols()], x.cols());
        double sum = 0;
        for (int o : neighbors[static_cast<size_t>(i)]) {
            std::span<const double> po(&x.data()[static_cast<size_t>(o) * x.cols()], x.cols());
            sum += std::max(euclidean(row, po), m.k_distance[static_cast<size_t>(o)]);
        }
        double mean = sum / static_cast<double>(neighbors[static_cast<size_t>(i)].size());
        m.lrd[static_cast<size_t>(i)] = 1.0 / std::max(mean, kDensityEps);
    }
    return m;
}

double LofModel::lof_score(std::span<const double> row) const {
    if (!schema.empty() && row.size() != schema.size())
        throw InputError("lof: row width does not match the training schema");
    auto nbrs = nearest_k(points, row, config.k);
    if (nbrs.empty()) return 1.0;
    double reach_sum = 0, lrd_sum = 0;
    for (int o : nbrs) {
        std::span<const double> po(&points.data()[static_cast<size_t>(o) * points.cols()],
                                   points.cols());
        reach_sum += std::max(euclidean(row, po), k_distance[static_cast<size_t>(o)]);
        lrd_sum += lrd[static_cast<size_t>(o)];
    }
    double own_lrd =
        1.0 / std::max(reach_sum / static_cast<double>(nbrs.size()), kDensityEps);
    double mean_nbr_lrd = lrd_sum / static_cast<double>(nbrs.size());
    return mean_nbr_lrd / own_lrd;
}

int LofModel::predict(std::span<const double> row) const {
    return lof_score(row) > config.outlier_threshold ? 1 : 0;
}

std::string LofModel::serialize() const {
    std::string schema_csv;
    for (const auto& s : schema) {
        if (!schema_csv.empty()) schema_csv += ',';
        schema_csv += s;
    }
    std::string out = "resfault-model v1\n";
    out += "type lof\n";
    out += "schema_hash " + std::to_string(fnv1a64(schema_csv)) + "\n";
    out += "schema " + schema_csv + "\n";
    out += "config k=" + std::to_string(config.k) +
           " outlier_threshold=" + format_double_exact(config.outlier_threshold) +
           " seed=" + std::to_string(config.seed) + "\n";
    out += "points " + std::to_string(points.rows()) + " " + std::to_string(points.cols()) +
           "\n";
    for (std::size_t r = 0; r < points.rows(); ++r) {
        std::string line;
        for (std::size_t c = 0; c < points.cols(); ++c) {
            if (!line.empty()) line += ' ';
            line += format_double_exact(points(r, c));
        }
        out += line + "\n";
    }
    auto vec_line = [&](const char* name, const std::vector<double>& v) {
        out += name;
        for (double val : v) {
            out += ' ';
            out += format_double_exact(val);
        }
        out += '\n';
    };
    vec_line("k_distance", k_distance);
    vec_line("lrd", lrd);
    return out;
}

LofModel LofModel::deserialize(const std::string& text) {
    LofModel m;
    auto lines = split_lines(text);
    std::size_t pos = 0;
    std::size_t rows = 0, cols = 0;
    for (; pos < lines.size(); ++pos) {
        const std::string& line = lines[pos];
        if (starts_with(line, "schema ")) {
            std::string names = line.substr(7);
            if (!names.empty()) m.schema = split(names, ',');
        } else if (starts_with(line, "config ")) {
            for (const auto& kv : split(line.substr(7), ' ')) {
                auto eq = kv.find('=');
                if (eq == std::string::npos) continue;
                std::string key = kv.substr(0, eq);
                std::string val = kv.substr(eq + 1);
                if (key == "k") m.config.k = std::atoi(val.c_str());
                else if (key == "outlier_threshold")
                    m.config.outlier_threshold = std::atof(val.c_str());
                else if (key == "seed")
                    m.config.seed = static_cast<std::uint64_t>(std::atoll(val.c_str()));
            }
        } else if (starts_with(line, "points ")) {
            auto parts = split(line.substr(7), ' ');
            rows = static_cast<std::size_t>(std::atoll(parts[0].c_str()));
            cols = parts.size() > 1 ? static_cast<std::size_t>(std::atoll(parts[1].c_str())) : 0;
            ++pos;
            break;
        }
    }
    m.points = Matrix(rows, cols);
    for (std::size_t r = 0; r < rows && pos < lines.size(); ++r, ++pos) {
        auto parts = split(lines[pos], ' ');
        for (std::size_t c = 0; c < cols && c < parts.size(); ++c)
            m.points(r, c) = std::atof(parts[c].c_str());
    }
    for (; pos < lines.size(); ++pos) {
        const std::string& line = lines[pos];
        std::vector<double>* target = nullptr;
        std::size_t off = 0;
        if (starts_with(line, "k_distance ")) {
            target = &m.k_distance;
            off = 11;
        } else if (starts_with(line, "lrd ")) {
            target = &m.lrd;
            off = 4;
        }
        if (!target) continue;
        for (const auto& p : split(line.substr(off), ' '))
            if (!p.empty()) target->push_back(std::atof(p.c_str()));
    }
    return m;
}

}  // namespace resfault
