#include "resfault/tree.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

#include "resfault/strutil.hpp"

namespace resfault {

double Tree::predict(std::span<const double> row) const {
    int i = 0;
    while (nodes[static_cast<size_t>(i)].feature >= 0) {
        const TreeNode& n = nodes[static_cast<size_t>(i)];
        i = row[static_cast<size_t>(n.feature)] <= n.threshold ? n.left : n.right;
    }
    return nodes[static_cast<size_t>(i)].value;
}

int Tree::max_depth() const {
    std::function<int(int)> depth = [&](int i) -> int {
        const TreeNode& n = nodes[static_cast<size_t>(i)];
        if (n.feature < 0) return 0;
        return 1 + std::max(depth(n.left), depth(n.right));
    };
    return nodes.empty() ? 0 : depth(0);
}

namespace {

struct Builder {
    const Matrix& x;
    std::span<const double> y;     // labels (Gini) or gradients (NewtonMse)
    std::span<const double> hess;  // empty for Gini
    const TreeBuildConfig& cfg;
    std::mt19937_64& rng;
    Tree tree;
    double n_root = 0;

    double leaf_value(std::span<const int> rows) const {
        if (cfg.criterion == SplitCriterion::Gini) {
            double pos = 0;
            for (int r : rows) pos += y[static_cast<size_t>(r)];
            return rows.empty() ? 0.0 : pos / static_cast<double>(rows.size());
        }
        double g = 0, h = 0;
        for (int r : rows) {
            g += y[static_cast<size_t>(r)];
            h += hess[static_cast<size_t>(r)];
        }
        return h > 1e-12 ? -g / h : 0.0;
    }

    // impurity for Gini, negative Newton score otherwise (lower is better)
    double node_impurity(std::span<const int> rows) const {
        if (rows.empty()) return 0.0;
        if (cfg.criterion == SplitCriterion::Gini) {
            double pos = 0;
            for (int r : rows) pos += y[static_cast<size_t>(r)];
            double p = pos / static_cast<double>(rows.size());
            return 2.0 * p * (1.0 - p);
        }
        double g = 0, h = 0;
        for (int r : rows) {
            g += y[static_cast<size_t>(r)];
            h += hess[static_cast<size_t>(r)];
        }
        return h > 1e-12 ? -(g * g) / (2.0 * h * static_cast<double>(rows.size())) : 0.0;
    }

    std::vector<int> candidate_features() {
        const int d = static_cast<int>(x.cols());
        int take = cfg.features_per_split;
        if (take <= 0 || take >= d) {
            std::vector<int> all(static_cast<size_t>(d));
            std::iota(all.begin(), all.end(), 0);
            return all;
        }
        std::vector<int> pool(static_cast<size_t>(d));
        std::iota(pool.begin(), pool.end(), 0);
        for (int i = 0; i < take; ++i) {
            std::uniform_int_distribution<int> pick(i, d - 1);
            std::swap(pool[static_cast<size_t>(i)], pool[static_cast<size_t>(pick(rng))]);
        }
        pool.resize(static_cast<size_t>(take));
        std::sort(pool.begin(), pool.end());
        return pool;
    }

    int build(std::vector<int> rows, int depth) {
        const int idx = static_cast<int>(tree.nodes.size());
        tree.nodes.emplace_back();
        tree.nodes[static_cast<size_t>(idx)].n_samples = static_cast<int>(rows.size());
        const double parent_imp = node_impurity(rows);

        // gradients can sum to zero on a splittable node, so the purity stop
        // only applies to Gini
        bool pure = cfg.criterion == SplitCriterion::Gini && parent_imp <= 1e-12;
        bool stop = rows.size() < 2 * static_cast<size_t>(cfg.min_leaf) ||
                    (cfg.max_depth >= 0 && depth >= cfg.max_depth) || pure;
        double best_gain = 1e-12;
        int best_feature = -1;
        double best_threshold = 0;
        std::vector<int> best_left, best_right;

        if (!stop) {
            for (int f : candidate_features()) {
                std::vector<std::pair<double, int>> vals;
                vals.reserve(rows.size());
                for (int r : rows)
                    vals.emplace_back(x(static_cast<size_t>(r), static_cast<size_t>(f)), r);
                std::sort(vals.begin(), vals.end());
                if (vals.front().first == vals.back().first) continue;

                // prefix stats
                double lg = 0, lh = 0;
                double tg = 0, th = 0;
                for (int r : rows) {
                    tg += y[static_cast<size_t>(r)];
                    th += cfg.criterion == SplitCriterion::Gini
                              ? 1.0
                              : hess[static_cast<size_t>(r)];
                }
                if (cfg.criterion == SplitCriterion::Gini) th = static_cast<double>(rows.size());

                for (size_t i = 0; i + 1 < vals.size(); ++i) {
                    int r = vals[i].second;
                    lg += y[static_cast<size_t>(r)];
                    lh += cfg.criterion == SplitCriterion::Gini ? 1.0
                                                                : hess[static_cast<size_t>(r)];
                    if (vals[i].first == vals[i + 1].first) continue;
                    const double nl = static_cast<double>(i + 1);
                    const double nr = static_cast<double>(vals.size() - i - 1);
                    if (nl < cfg.min_leaf || nr < cfg.min_leaf) continue;

                    double gain;
                    if (cfg.criterion == SplitCriterion::Gini) {
                        double pl = lg / nl, pr = (tg - lg) / nr;
                        double gl = 2.0 * pl * (1.0 - pl), gr = 2.0 * pr * (1.0 - pr);
                        double n = nl + nr;
                        gain = parent_imp - (nl / n) * gl - (nr / n) * gr;
                    } else {
                        double rg = tg - lg, rh = th - lh;
                        double score_l = lh > 1e-12 ? (lg * lg) / lh : 0.0;
                        double score_r = rh > 1e-12 ? (rg * rg) / rh : 0.0;
                        double score_p = th > 1e-12 ? (tg * tg) / th : 0.0;
                        gain = 0.5 * (score_l + score_r - score_p) /
                               static_cast<double>(rows.size());
                    }
                    if (gain > best_gain) {
                        best_gain = gain;
                        best_feature = f;
                        best_threshold = 0.5 * (vals[i].first + vals[i + 1].first);
                    }
                }
            }
        }

        if (best_feature < 0) {
            tree.nodes[static_cast<size_t>(idx)].value = leaf_value(rows);
            return idx;
        }

        for (int r : rows) {
            if (x(static_cast<size_t>(r), static_cast<size_t>(best_feature)) <= best_threshold)
                best_left.push_back(r);
            else
                best_right.push_back(r);
        }
        tree.nodes[static_cast<size_t>(idx)].feature = best_feature;
        tree.nodes[static_cast<size_t>(idx)].threshold = best_threshold;
        tree.nodes[static_cast<size_t>(idx)].impurity_decrease =
            best_gain * (static_cast<double>(rows.size()) / n_root);
        int l = build(std::move(best_left), depth + 1);
        int r = build(std::move(best_right), depth + 1);
        tree.nodes[static_cast<size_t>(idx)].left = l;
        tree.nodes[static_cast<size_t>(idx)].right = r;
        return idx;
    }
};

}  // namespace

Tree build_tree(const Matrix& x, std::span<const double> y_or_grad,
                std::span<const double> hess, std::span<const int> rows,
                const TreeBuildConfig& cfg, std::mt19937_64& rng) {
    Builder b{x, y_or_grad, hess, cfg, rng, {}, static_cast<double>(rows.size())};
    b.build(std::vector<int>(rows.begin(), rows.end()), 0);
    return std::move(b.tree);
}

std::string tree_serialize(const Tree& t) {
    std::string out = "tree " + std::to_string(t.nodes.size()) + "\n";
    for (const TreeNode& n : t.nodes) {
        out += std::to_string(n.feature) + " " + format_double_exact(n.threshold) + " " +
               std::to_string(n.left) + " " + std::to_string(n.right) + " " +
               format_double_exact(n.value) + " " + std::to_string(n.n_samples) + " " +
               format_double_exact(n.impurity_decrease) + "\n";
    }
    return out;
}

Tree tree_deserialize(std::span<const std::string> lines, std::size_t& pos) {
    Tree t;
    if (pos >= lines.size() || !starts_with(lines[pos], "tree ")) return t;
    size_t count = static_cast<size_t>(std::atoll(lines[pos].c_str() + 5));
    ++pos;
    for (size_t i = 0; i < count && pos < lines.size(); ++i, ++pos) {
        auto parts = split(lines[pos], ' ');
        if (parts.size() < 7) continue;
        TreeNode n;
        n.feature = std::atoi(parts[0].c_str());
        n.threshold = std::atof(parts[1].c_str());
        n.left = std::atoi(parts[2].c_str());
        n.right = std::atoi(parts[3].c_str());
        n.value = std::atof(parts[4].c_str());
        n.n_samples = std::atoi(parts[5].c_str());
        n.impurity_decrease = std::atof(parts[6].c_str());
        t.nodes.push_back(n);
    }
    return t;
}

}  // namespace resfault
