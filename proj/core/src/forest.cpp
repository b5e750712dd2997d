#include "resfault/forest.hpp"

#include <cmath>

#include "resfault/errors.hpp"
#include "resfault/strutil.hpp"

namespace resfault {

double ForestModel::predict_proba(std::span<const double> row) const {
    if (!schema.empty() && row.size() != schema.size())
        throw InputError("forest: row width does not match the training schema");
    if (trees.empty()) return 0.0;
    double sum = 0;
    for (const Tree& t : trees) sum += t.predict(row);
    return sum / static_cast<double>(trees.size());
}

int ForestModel::predict(std::span<const double> row, double threshold) const {
    return predict_proba(row) >= threshold ? 1 : 0;
}

ForestModel train_random_forest(const Matrix& x, std::span<const double> y,
                                const std::vector<std::string>& schema,
                                const ForestConfig& cfg) {
    const std::size_t n = x.rows();
    if (n < 2) throw InputError("forest: need at least 2 samples");
    bool has0 = false, has1 = false;
    for (double v : y) (v >= 0.5 ? has1 : has0) = true;
    if (!has0 || !has1) throw InputError("forest: both classes must be present");

    ForestModel model;
    model.config = cfg;
    model.schema = schema;

    TreeBuildConfig tc;
    tc.criterion = SplitCriterion::Gini;
    tc.max_depth = cfg.max_depth;
    tc.min_leaf = cfg.min_leaf;
    tc.features_per_split = cfg.features_per_split > 0
                                ? cfg.features_per_split
                                : std::max(1, static_cast<int>(std::sqrt(
                                                  static_cast<double>(x.cols()))));

    for (int t = 0; t < cfg.n_trees; ++t) {
        std::mt19937_64 rng(derive_seed(cfg.seed, static_cast<std::uint64_t>(t)));
        std::vector<int> rows(n);
        for (std::size_t i = 0; i < n; ++i)
            rows[i] = static_cast<int>(rng() % n);  // bootstrap
        model.trees.push_back(build_tree(x, y, {}, rows, tc, rng));
    }
    return model;
}

std::string ForestModel::serialize() const {
    std::string schema_csv;
    for (const auto& s : schema) {
        if (!schema_csv.empty()) schema_csv += ',';
        schema_csv += s;
    }
    std::string out = "resfault-model v1\n";
    out += "type forest\n";
    out += "schema_hash " + std::to_string(fnv1a64(schema_csv)) + "\n";
    out += "schema " + schema_csv + "\n";
    out += "config n_trees=" + std::to_string(config.n_trees) +
           " max_depth=" + std::to_string(config.max_depth) +
           " min_leaf=" + std::to_string(config.min_leaf) +
           " features_per_split=" + std::to_string(config.features_per_split) +
           " seed=" + std::to_string(config.seed) + "\n";
    for (const Tree& t : trees) out += tree_serialize(t);
    return out;
}

ForestModel ForestModel::deserialize(const std::string& text) {
    ForestModel m;
    auto lines = split_lines(text);
    std::size_t pos = 0;
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
                long long val = std::atoll(kv.c_str() + eq + 1);
                if (key == "n_trees") m.config.n_trees = static_cast<int>(val);
                else if (key == "max_depth") m.config.max_depth = static_cast<int>(val);
                else if (key == "min_leaf") m.config.min_leaf = static_cast<int>(val);
                else if (key == "features_per_split")
                    m.config.features_per_split = static_cast<int>(val);
                else if (key == "seed") m.config.seed = static_cast<std::uint64_t>(val);
            }
        } else if (starts_with(line, "tree ")) {
            break;
        }
    }
    while (pos < lines.size() && starts_with(lines[pos], "tree ")) {
        m.trees.push_back(tree_deserialize(lines, pos));
    }
    return m;
}

}  // namespace resfault
