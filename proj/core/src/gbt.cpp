#include "resfault/gbt.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "resfault/errors.hpp"
#include "resfault/strutil.hpp"

namespace resfault {

namespace {
double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }
}  // namespace

double BoostedModel::decision(std::span<const double> row) const {
    if (!schema.empty() && row.size() != schema.size())
        throw InputError("gbt: row width does not match the training schema");
    double f = base_score;
    for (const Tree& t : trees) f += config.learning_rate * t.predict(row);
    return f;
}

double BoostedModel::predict_proba(std::span<const double> row) const {
    return sigmoid(decision(row));
}

int BoostedModel::predict(std::span<const double> row, double threshold) const {
    return predict_proba(row) >= threshold ? 1 : 0;
}

BoostedModel train_gbt(const Matrix& x, std::span<const double> y,
                       const std::vector<std::string>& schema, const GbtConfig& cfg,
                       std::vector<double>* loss_curve) {
    const std::size_t n = x.rows();
    if (n < 2) throw InputError("gbt: need at least 2 samples");
    bool has0 = false, has1 = false;
    for (double v : y) (v >= 0.5 ? has1 : has0) = true;
    if (!has0 || !has1) throw InputError("gbt: both classes must be present");

    BoostedModel model;
    model.config = cfg;
    model.schema = schema;
    double pos = 0;
    for (double v : y) pos += v;
    double prior = pos / static_cast<double>(n);
    prior = std::clamp(prior, 1e-12, 1.0 - 1e-12);
    model.base_score = std::log(prior / (1.0 - prior));

    std::vector<double> f(n, model.base_score);
    std::vector<double> grad(n), hess(n);
    std::vector<int> rows(n);
    std::iota(rows.begin(), rows.end(), 0);

    TreeBuildConfig tc;
    tc.criterion = SplitCriterion::NewtonMse;
    tc.max_depth = cfg.max_depth;
    tc.min_leaf = cfg.min_leaf;

    auto logloss = [&]() {
        double sum = 0;
        for (std::size_t i = 0; i < n; ++i) {
            double p = std::clamp(sigmoid(f[i]), 1e-12, 1.0 - 1e-12);
            sum += y[i] > 0.5 ? -std::log(p) : -std::log(1.0 - p);
        }
        return sum / static_cast<double>(n);
    };

    for (int round = 0; round < cfg.n_rounds; ++round) {
        for (std::size_t i = 0; i < n; ++i) {
            double p = sigmoid(f[i]);
            grad[i] = p - y[i];
            hess[i] = std::max(p * (1.0 - p), 1e-12);
        }
        std::mt19937_64 rng(derive_seed(cfg.seed, static_cast<std::uint64_t>(round)));
        Tree tree = build_tree(x, grad, hess, rows, tc, rng);
        for (std::size_t i = 0; i < n; ++i) {
            std::span<const double> row(&x.data()[i * x.cols()], x.cols());
            f[i] += cfg.learning_rate * tree.predict(row);
        }
        model.trees.push_back(std::move(tree));
        if (loss_curve) loss_curve->push_back(logloss());
    }
    return model;
}

std::string BoostedModel::serialize() const {
    std::string schema_csv;
    for (const auto& s : schema) {
        if (!schema_csv.empty()) schema_csv += ',';
        schema_csv += s;
    }
    std::string out = "resfault-model v1\n";
    out += "type gbt\n";
    out += "schema_hash " + std::to_string(fnv1a64(schema_csv)) + "\n";
    out += "schema " + schema_csv + "\n";
    out += "config n_rounds=" + std::to_string(config.n_rounds) +
           " learning_rate=" + format_double_exact(config.learning_rate) +
           " max_depth=" + std::to_string(config.max_depth) +
           " min_leaf=" + std::to_string(config.min_leaf) +
           " seed=" + std::to_string(config.seed) + "\n";
    out += "base_score " + format_double_exact(base_score) + "\n";
    for (const Tree& t : trees) out += tree_serialize(t);
    return out;
}

BoostedModel BoostedModel::deserialize(const std::string& text) {
    BoostedModel m;
    auto lines = split_lines(text);
    std::size_t pos = 0;
    for (; pos < lines.size(); ++pos) {
        const std::string& line = lines[pos];
        if (starts_with(line, "schema ")) {
            std::string names = line.substr(7);
            if (!names.empty()) m.schema = split(names, ',');
        } else if (starts_with(line, "base_score ")) {
            m.base_score = std::atof(line.c_str() + 11);
        } else if (starts_with(line, "config ")) {
            for (const auto& kv : split(line.substr(7), ' ')) {
                auto eq = kv.find('=');
                if (eq == std::string::npos) continue;
                std::string key = kv.substr(0, eq);
                std::string val = kv.substr(eq + 1);
                if (key == "n_rounds") m.config.n_rounds = std::atoi(val.c_str());
                else if (key == "learning_rate") m.config.learning_rate = std::atof(val.c_str());
                else if (key == "max_depth") m.config.max_depth = std::atoi(val.c_str());
                else if (key == "min_leaf") m.config.min_leaf = std::atoi(val.c_str());
                else if (key == "seed")
                    m.config.seed = static_cast<std::uint64_t>(std::atoll(val.c_str()));
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
