#include <doctest.h>

#include <cmath>
#include <random>

#include "resfault/anomaly.hpp"
#include "resfault/errors.hpp"
#include "resfault/evalstats.hpp"
#include "resfault/forest.hpp"
#include "resfault/gbt.hpp"
#include "resfault/scaler.hpp"

using namespace resfault;

namespace {

std::vector<std::string> schema_of(std::size_t d) {
    std::vector<std::string> s;
    for (std::size_t i = 0; i < d; ++i) s.push_back("f" + std::to_string(i));
    return s;
}

// two gaussian blobs, linearly separable apart from noise
void make_blobs(std::size_t n, std::size_t d, std::uint64_t seed, double gap, Matrix* x,
                std::vector<double>* y) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, 1.0);
    *x = Matrix(n, d);
    y->assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        int label = static_cast<int>(rng() % 2);
        (*y)[i] = label;
        for (std::size_t c = 0; c < d; ++c) {
            (*x)(i, c) = (label ? gap : -gap) + noise(rng);
        }
    }
}

std::span<const double> row_of(const Matrix& m, std::size_t r) {
    return {&m.data()[r * m.cols()], m.cols()};
}

}  // namespace

TEST_CASE("scaler arithmetic on a known column") {
    Matrix x(3, 1);
    x(0, 0) = 1;
    x(1, 0) = 2;
    x(2, 0) = 3;
    ScalerParams p = fit_scaler(x);
    CHECK(p.mean[0] == doctest::Approx(2.0));
    CHECK(p.stddev[0] == doctest::Approx(std::sqrt(2.0 / 3.0)).epsilon(1e-12));  // population
}

TEST_CASE("scaler maps constant columns to zero") {
    Matrix x(4, 2);
    for (std::size_t r = 0; r < 4; ++r) {
        x(r, 0) = 7.5;
        x(r, 1) = static_cast<double>(r);
    }
    ScalerParams p = fit_scaler(x);
    CHECK(p.constant[0]);
    Matrix out = apply_scaler(p, x);
    for (std::size_t r = 0; r < 4; ++r) CHECK(out(r, 0) == 0.0);
}

TEST_CASE("scaler round trip: zero mean unit variance") {
    Matrix x;
    std::vector<double> y;
    make_blobs(500, 6, 11, 1.5, &x, &y);
    Matrix out = apply_scaler(fit_scaler(x), x);
    for (std::size_t c = 0; c < out.cols(); ++c) {
        double mean = 0, var = 0;
        for (std::size_t r = 0; r < out.rows(); ++r) mean += out(r, c);
        mean /= static_cast<double>(out.rows());
        for (std::size_t r = 0; r < out.rows(); ++r)
            var += (out(r, c) - mean) * (out(r, c) - mean);
        var /= static_cast<double>(out.rows());
        CHECK(std::abs(mean) < 1e-9);
        CHECK(std::abs(var - 1.0) < 1e-6);
    }
    // a scaler fit on one sample does not center another
    Matrix x2;
    make_blobs(200, 6, 12, 0.2, &x2, &y);
    Matrix other = apply_scaler(fit_scaler(x), x2);
    double mean0 = 0;
    for (std::size_t r = 0; r < other.rows(); ++r) mean0 += other(r, 0);
    mean0 /= static_cast<double>(other.rows());
    CHECK(std::abs(mean0) > 1e-6);
    CHECK_THROWS_AS(fit_scaler(Matrix(0, 0)), InputError);
}

TEST_CASE("forest fits separable data perfectly in-sample") {
    Matrix x;
    std::vector<double> y;
    make_blobs(200, 2, 5, 4.0, &x, &y);
    ForestConfig cfg;
    cfg.n_trees = 20;
    cfg.seed = 3;
    ForestModel model = train_random_forest(x, y, schema_of(2), cfg);
    int correct = 0;
    for (std::size_t i = 0; i < x.rows(); ++i)
        if (model.predict(row_of(x, i)) == static_cast<int>(y[i])) ++correct;
    CHECK(correct == static_cast<int>(x.rows()));
}

TEST_CASE("depth-1 forest cannot beat the exhaustive stump bound on xor") {
    Matrix x(100, 2);
    std::vector<double> y(100);
    for (int i = 0; i < 100; ++i) {
        int a = (i / 2) % 2, b = i % 2;
        x(static_cast<size_t>(i), 0) = a;
        x(static_cast<size_t>(i), 1) = b;
        y[static_cast<size_t>(i)] = a ^ b;
    }
    // exhaustive check of all depth-1 stumps: feature, threshold 0.5, either
    // polarity -> accuracy is at most 0.75 on xor
    double best_stump = 0;
    for (int f = 0; f < 2; ++f) {
        for (int polarity = 0; polarity < 2; ++polarity) {
            int correct = 0;
            for (int i = 0; i < 100; ++i) {
                int pred = x(static_cast<size_t>(i), static_cast<size_t>(f)) <= 0.5
                               ? polarity
                               : 1 - polarity;
                if (pred == static_cast<int>(y[static_cast<size_t>(i)])) ++correct;
            }
            best_stump = std::max(best_stump, correct / 100.0);
        }
    }
    CHECK(best_stump <= 0.75);

    ForestConfig cfg;
    cfg.n_trees = 30;
    cfg.max_depth = 1;
    cfg.seed = 9;
    cfg.features_per_split = 2;
    ForestModel model = train_random_forest(x, y, schema_of(2), cfg);
    int correct = 0;
    for (std::size_t i = 0; i < x.rows(); ++i)
        if (model.predict(row_of(x, i)) == static_cast<int>(y[i])) ++correct;
    CHECK(correct / 100.0 <= 0.75);
}

TEST_CASE("same seed twice gives identical forest serialization") {
    Matrix x;
    std::vector<double> y;
    make_blobs(120, 4, 21, 1.0, &x, &y);
    ForestConfig cfg;
    cfg.n_trees = 15;
    cfg.seed = 77;
    ForestModel a = train_random_forest(x, y, schema_of(4), cfg);
    ForestModel b = train_random_forest(x, y, schema_of(4), cfg);
    CHECK(a.serialize() == b.serialize());
    cfg.seed = 78;
    ForestModel c = train_random_forest(x, y, schema_of(4), cfg);
    CHECK(a.serialize() != c.serialize());
}

TEST_CASE("forest rejects single-class training data") {
    Matrix x(10, 2);
    std::vector<double> y(10, 1.0);
    CHECK_THROWS_AS(train_random_forest(x, y, schema_of(2), {}), InputError);
}

TEST_CASE("forest probabilities stay within [0,1] and serialization round-trips") {
    Matrix x;
    std::vector<double> y;
    make_blobs(150, 3, 31, 0.7, &x, &y);
    ForestConfig cfg;
    cfg.n_trees = 25;
    cfg.seed = 4;
    ForestModel model = train_random_forest(x, y, schema_of(3), cfg);
    ForestModel back = ForestModel::deserialize(model.serialize());
    for (std::size_t i = 0; i < x.rows(); ++i) {
        double p = model.predict_proba(row_of(x, i));
        CHECK(p >= 0.0);
        CHECK(p <= 1.0);
        CHECK(back.predict_proba(row_of(x, i)) == p);
    }
}

TEST_CASE("gbt with one depth-0 round predicts the prior log-odds") {
    Matrix x(9, 1);
    std::vector<double> y(9, 0.0);
    for (int i = 0; i < 9; ++i) {
        x(static_cast<size_t>(i), 0) = i;
        y[static_cast<size_t>(i)] = i < 3 ? 1.0 : 0.0;  // prior 1/3
    }
    GbtConfig cfg;
    cfg.n_rounds = 1;
    cfg.learning_rate = 1.0;
    cfg.max_depth = 0;
    BoostedModel model = train_gbt(x, y, schema_of(1), cfg);
    const double prior_logodds = std::log((1.0 / 3.0) / (2.0 / 3.0));
    for (std::size_t i = 0; i < x.rows(); ++i) {
        CHECK(model.decision(row_of(x, i)) == doctest::Approx(prior_logodds).epsilon(1e-9));
    }
}

TEST_CASE("gbt training loss decreases to a plateau") {
    Matrix x;
    std::vector<double> y;
    make_blobs(200, 3, 41, 1.2, &x, &y);
    GbtConfig cfg;
    cfg.n_rounds = 40;
    cfg.seed = 5;
    std::vector<double> losses;
    train_gbt(x, y, schema_of(3), cfg, &losses);
    REQUIRE(losses.size() == 40);
    for (std::size_t i = 1; i < losses.size(); ++i) CHECK(losses[i] <= losses[i - 1] + 1e-9);
    CHECK(losses.back() < losses.front());
}

TEST_CASE("gbt generalizes on separable data") {
    Matrix x_train, x_test;
    std::vector<double> y_train, y_test;
    make_blobs(400, 5, 51, 2.0, &x_train, &y_train);
    make_blobs(200, 5, 52, 2.0, &x_test, &y_test);
    GbtConfig cfg;
    cfg.n_rounds = 60;
    cfg.seed = 6;
    BoostedModel model = train_gbt(x_train, y_train, schema_of(5), cfg);
    std::vector<int> preds, labels;
    for (std::size_t i = 0; i < x_test.rows(); ++i) {
        preds.push_back(model.predict(row_of(x_test, i)));
        labels.push_back(static_cast<int>(y_test[i]));
    }
    double f1 = metric_value(Metric::F1, confusion(preds, labels));
    CHECK(f1 >= 0.95);
    BoostedModel back = BoostedModel::deserialize(model.serialize());
    CHECK(back.serialize() == model.serialize());
}

TEST_CASE("isolation forest isolates a planted outlier") {
    std::mt19937_64 rng(61);
    std::normal_distribution<double> noise(0.0, 0.3);
    const std::size_t n = 257;
    Matrix x(n, 3);
    for (std::size_t i = 0; i + 1 < n; ++i)
        for (std::size_t c = 0; c < 3; ++c) x(i, c) = noise(rng);
    for (std::size_t c = 0; c < 3; ++c) x(n - 1, c) = 9.0;  // far outlier

    IsolationConfig cfg;
    cfg.n_trees = 100;
    cfg.subsample = 128;
    cfg.seed = 13;
    IsolationModel model = fit_isolation_forest(x, schema_of(3), cfg);
    double outlier_score = model.anomaly_score(row_of(x, n - 1));
    for (std::size_t i = 0; i + 1 < n; ++i) {
        CHECK(model.anomaly_score(row_of(x, i)) < outlier_score);
    }
    for (std::size_t i = 0; i < n; ++i) {
        double s = model.anomaly_score(row_of(x, i));
        CHECK(s > 0.0);
        CHECK(s < 1.0);
    }
}

TEST_CASE("isolation forest scores duplicates equally") {
    Matrix x(64, 2);
    for (std::size_t i = 0; i < 64; ++i) {
        x(i, 0) = i < 32 ? 1.0 : 5.0;
        x(i, 1) = i < 32 ? 1.0 : 5.0;
    }
    IsolationConfig cfg;
    cfg.n_trees = 50;
    cfg.subsample = 64;
    cfg.seed = 2;
    IsolationModel model = fit_isolation_forest(x, schema_of(2), cfg);
    CHECK(model.anomaly_score(row_of(x, 0)) ==
          doctest::Approx(model.anomaly_score(row_of(x, 31))).epsilon(1e-12));
    IsolationModel back = IsolationModel::deserialize(model.serialize());
    CHECK(back.serialize() == model.serialize());
}

TEST_CASE("lof is near one inside a uniform grid and high for an outlier") {
    Matrix grid(121, 2);
    std::size_t idx = 0;
    for (int a = 0; a < 11; ++a)
        for (int b = 0; b < 11; ++b) {
            grid(idx, 0) = a;
            grid(idx, 1) = b;
            ++idx;
        }
    LofConfig cfg;
    cfg.k = 8;
    LofModel model = fit_lof(grid, schema_of(2), cfg);
    double center[2] = {5.2, 5.2};
    CHECK(model.lof_score({center, 2}) == doctest::Approx(1.0).epsilon(0.2));

    double lonely[2] = {40.0, 40.0};
    CHECK(model.lof_score({lonely, 2}) > 1.5);
    CHECK(model.predict({lonely, 2}) == 1);
    CHECK(model.predict({center, 2}) == 0);

    LofModel back = LofModel::deserialize(model.serialize());
    CHECK(back.lof_score({lonely, 2}) == doctest::Approx(model.lof_score({lonely, 2})));
}

TEST_CASE("lof degenerate n = k+1 stays defined") {
    Matrix x(4, 1);
    for (std::size_t i = 0; i < 4; ++i) x(i, 0) = static_cast<double>(i);
    LofConfig cfg;
    cfg.k = 3;
    LofModel model = fit_lof(x, schema_of(1), cfg);
    double probe = 1.5;
    double s = model.lof_score({&probe, 1});
    CHECK(std::isfinite(s));
    CHECK(s >= 0.0);
    CHECK_THROWS_AS(fit_lof(x, schema_of(1), LofConfig{4, 1.5, 0}), InputError);
    CHECK_THROWS_AS(fit_lof(x, schema_of(1), LofConfig{9, 1.5, 0}), InputError);
}

TEST_CASE("prediction rejects rows that do not match the schema") {
    Matrix x;
    std::vector<double> y;
    make_blobs(60, 3, 71, 2.0, &x, &y);
    ForestConfig fc;
    fc.n_trees = 5;
    fc.seed = 1;
    ForestModel forest = train_random_forest(x, y, schema_of(3), fc);
    GbtConfig gc;
    gc.n_rounds = 3;
    BoostedModel gbt = train_gbt(x, y, schema_of(3), gc);
    IsolationModel iforest = fit_isolation_forest(x, schema_of(3), {10, 32, 0.5, 1});
    LofModel lof = fit_lof(x, schema_of(3), {5, 1.5, 0});

    double wide[4] = {0, 0, 0, 0};
    CHECK_THROWS_AS(forest.predict_proba({wide, 4}), InputError);
    CHECK_THROWS_AS(gbt.predict_proba({wide, 4}), InputError);
    CHECK_THROWS_AS(iforest.anomaly_score({wide, 4}), InputError);
    CHECK_THROWS_AS(lof.lof_score({wide, 4}), InputError);
    double ok[3] = {0, 0, 0};
    CHECK_NOTHROW(forest.predict_proba({ok, 3}));
}

TEST_CASE("probability is monotone when a constant positive tree is appended") {
    Matrix x;
    std::vector<double> y;
    make_blobs(100, 3, 81, 1.0, &x, &y);
    ForestConfig cfg;
    cfg.n_trees = 9;
    cfg.seed = 2;
    ForestModel model = train_random_forest(x, y, schema_of(3), cfg);
    ForestModel larger = model;
    Tree constant_pos;
    TreeNode leaf;
    leaf.value = 1.0;
    leaf.n_samples = 1;
    constant_pos.nodes.push_back(leaf);
    larger.trees.push_back(constant_pos);
    for (std::size_t i = 0; i < x.rows(); ++i) {
        CHECK(larger.predict_proba(row_of(x, i)) >= model.predict_proba(row_of(x, i)));
    }
}
