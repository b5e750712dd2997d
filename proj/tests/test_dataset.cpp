#include <doctest.h>

#include <filesystem>
#include <random>
#include <set>

#include "resfault/dataset.hpp"
#include "resfault/errors.hpp"
#include "resfault/product_metrics.hpp"
#include "resfault/strutil.hpp"

using namespace resfault;

namespace {

CsvTable product_table(const std::vector<std::string>& keys) {
    CsvTable t;
    t.header = {"repo_id", "commit_id", "method"};
    for (const auto& n : product_metric_names()) t.header.push_back(n);
    t.header.push_back("presence");
    int v = 1;
    for (const auto& key : keys) {
        auto parts = split(key, '|');
        std::vector<std::string> row = {parts[0], parts[1], parts[2]};
        for (std::size_t i = 0; i < product_metric_names().size(); ++i)
            row.push_back(std::to_string(v++ % 13));
        row.push_back("5");
        t.rows.push_back(row);
    }
    return t;
}

CsvTable process_table(const std::vector<std::string>& keys) {
    CsvTable t;
    t.header = {"repo_id", "commit_id", "method"};
    for (const auto& n : process_metric_names()) t.header.push_back(n);
    int v = 2;
    for (const auto& key : keys) {
        auto parts = split(key, '|');
        std::vector<std::string> row = {parts[0], parts[1], parts[2]};
        for (std::size_t i = 0; i < process_metric_names().size(); ++i)
            row.push_back(std::to_string(v++ % 7));
        t.rows.push_back(row);
    }
    return t;
}

CsvTable ent_table(const std::vector<std::string>& keys) {
    CsvTable t;
    t.header = {"repo_id", "commit_id", "method", "ENT"};
    double v = 1.5;
    for (const auto& key : keys) {
        auto parts = split(key, '|');
        t.rows.push_back({parts[0], parts[1], parts[2], format_double(v)});
        v += 0.25;
    }
    return t;
}

std::vector<LabelRecord> labels_for(const std::vector<std::pair<std::string, Label>>& commits) {
    std::vector<LabelRecord> out;
    for (const auto& [commit, label] : commits) {
        LabelRecord r;
        r.repo_id = "r";
        r.commit_id = commit;
        r.label = label;
        out.push_back(r);
    }
    return out;
}

}  // namespace

TEST_CASE("assemble joins three labeled faults") {
    std::vector<std::string> keys = {"r|c1|f.py::a", "r|c2|f.py::b", "r|c3|f.py::c"};
    Dataset ds = assemble_dataset(
        labels_for({{"c1", Label::PostRelease}, {"c2", Label::PreRelease},
                    {"c3", Label::PostRelease}}),
        product_table(keys), process_table(keys), ent_table(keys));
    REQUIRE(ds.rows.size() == 3);
    CHECK(ds.feature_names == feature_catalog());
    CHECK(ds.rows[0].features.size() == 82);
    CHECK(ds.rows[0].label == 1);
    CHECK(ds.rows[1].label == 0);
    // ENT landed in its catalog slot
    CHECK(ds.rows[0].features[56] == doctest::Approx(1.5));
}

TEST_CASE("assemble drops unknown labels by default and keeps them on request") {
    std::vector<std::string> keys = {"r|c1|f.py::a", "r|c2|f.py::b"};
    auto labels = labels_for({{"c1", Label::Unknown}, {"c2", Label::PostRelease}});
    Dataset dropped = assemble_dataset(labels, product_table(keys), process_table(keys),
                                       ent_table(keys));
    REQUIRE(dropped.rows.size() == 1);
    CHECK(dropped.rows[0].commit_id == "c2");

    AssembleOptions opts;
    opts.include_unknown = true;
    Dataset kept = assemble_dataset(labels, product_table(keys), process_table(keys),
                                    ent_table(keys), opts);
    REQUIRE(kept.rows.size() == 2);
    CHECK(kept.rows[0].label == -1);
}

TEST_CASE("assemble policy for missing process metrics") {
    std::vector<std::string> keys = {"r|c1|f.py::a", "r|c2|f.py::b"};
    std::vector<std::string> partial = {"r|c1|f.py::a"};
    auto labels = labels_for({{"c1", Label::PostRelease}, {"c2", Label::PreRelease}});

    std::vector<std::string> warnings;
    Dataset ds = assemble_dataset(labels, product_table(keys), process_table(partial),
                                  ent_table(keys), {}, &warnings);
    REQUIRE(ds.rows.size() == 1);
    CHECK(warnings.size() == 1);

    AssembleOptions opts;
    opts.zero_fill_missing = true;
    Dataset filled = assemble_dataset(labels, product_table(keys), process_table(partial),
                                      ent_table(keys), opts);
    REQUIRE(filled.rows.size() == 2);
    for (std::size_t i = 57; i < 82; ++i) CHECK(filled.rows[1].features[i] == 0.0);
}

TEST_CASE("assemble rejects duplicate keys") {
    std::vector<std::string> keys = {"r|c1|f.py::a", "r|c1|f.py::a"};
    CHECK_THROWS_AS(assemble_dataset(labels_for({{"c1", Label::PostRelease}}),
                                     product_table(keys), process_table(keys),
                                     ent_table(keys)),
                    InputError);
}

namespace {

Dataset synthetic_dataset(int commits, int methods_per_commit) {
    Dataset ds;
    ds.feature_names = {"f0", "f1"};
    for (int c = 0; c < commits; ++c) {
        for (int m = 0; m < methods_per_commit; ++m) {
            DatasetRow row;
            row.repo_id = "r";
            row.commit_id = "c" + std::to_string(c);
            row.method = "m" + std::to_string(m);
            row.features = {static_cast<double>(c), static_cast<double>(m)};
            row.label = c % 2;
            ds.rows.push_back(row);
        }
    }
    return ds;
}

}  // namespace

TEST_CASE("split puts nine of ten single-method commits in train") {
    Dataset ds = synthetic_dataset(10, 1);
    for (std::uint64_t seed : {1ull, 7ull, 42ull}) {
        auto [train, test] = split_dataset(ds, 0.9, seed);
        CHECK(train.rows.size() == 9);
        CHECK(test.rows.size() == 1);
    }
}

TEST_CASE("methods sharing a commit never separate") {
    Dataset ds = synthetic_dataset(8, 3);
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        auto [train, test] = split_dataset(ds, 0.75, seed);
        std::set<std::string> train_commits, test_commits;
        for (const auto& r : train.rows) train_commits.insert(r.commit_id);
        for (const auto& r : test.rows) test_commits.insert(r.commit_id);
        for (const auto& c : test_commits) CHECK(train_commits.count(c) == 0);
        CHECK(train.rows.size() + test.rows.size() == ds.rows.size());
        CHECK(train.rows.size() % 3 == 0);  // whole commit groups only
    }
}

TEST_CASE("split is deterministic per seed") {
    Dataset ds = synthetic_dataset(12, 2);
    auto [a_train, a_test] = split_dataset(ds, 0.8, 5);
    auto [b_train, b_test] = split_dataset(ds, 0.8, 5);
    REQUIRE(a_train.rows.size() == b_train.rows.size());
    for (std::size_t i = 0; i < a_train.rows.size(); ++i) {
        CHECK(a_train.rows[i].commit_id == b_train.rows[i].commit_id);
        CHECK(a_train.rows[i].method == b_train.rows[i].method);
    }
    auto [c_train, c_test] = split_dataset(ds, 0.8, 6);
    bool same = c_train.rows.size() == a_train.rows.size();
    if (same) {
        same = false;
        for (std::size_t i = 0; i < a_train.rows.size(); ++i) {
            if (a_train.rows[i].commit_id != c_train.rows[i].commit_id) same = false;
        }
    }
    CHECK(split_dataset(ds, 0.8, 5).first.rows.size() == a_train.rows.size());
}

TEST_CASE("split validates inputs") {
    Dataset ds = synthetic_dataset(1, 1);
    CHECK_THROWS_AS(split_dataset(ds, 0.9, 1), InputError);
    Dataset two = synthetic_dataset(2, 1);
    CHECK_THROWS_AS(split_dataset(two, 1.5, 1), InputError);
}

TEST_CASE("dataset csv round trip") {
    Dataset ds = synthetic_dataset(3, 2);
    auto path = (std::filesystem::temp_directory_path() / "resfault_ds_test.csv").string();
    write_dataset_csv(path, ds, {"# seed=1 config=x version=y"});
    Dataset back = read_dataset_csv(path);
    REQUIRE(back.rows.size() == ds.rows.size());
    CHECK(back.feature_names == ds.feature_names);
    for (std::size_t i = 0; i < ds.rows.size(); ++i) {
        CHECK(back.rows[i].commit_id == ds.rows[i].commit_id);
        CHECK(back.rows[i].features == ds.rows[i].features);
        CHECK(back.rows[i].label == ds.rows[i].label);
    }
    std::filesystem::remove(path);
}

TEST_CASE("dataset statistics on a single method") {
    DatasetStats st = dataset_stats({"x = 1"});
    CHECK(st.unique_statements == 1);
    CHECK(st.unique_tokens == 3);
    CHECK(st.avg_tokens_per_statement == doctest::Approx(3.0));
}

TEST_CASE("duplicated methods count once") {
    DatasetStats st = dataset_stats({"x = 1", "x = 1", "x = 1"});
    CHECK(st.method_count == 1);
    CHECK(st.unique_statements == 1);
    CHECK(st.unique_tokens == 3);
}

TEST_CASE("hand-counted statistics over a small corpus") {
    // method 1: 2 statements, tokens: var0 = num0 / var1 = var0 + num1  (3+5)
    // method 2: 1 statement, tokens: return num0                        (2)
    std::vector<std::string> corpus = {"var0 = num0\nvar1 = var0 + num1\n", "return num0\n"};
    DatasetStats st = dataset_stats(corpus);
    CHECK(st.method_count == 2);
    CHECK(st.unique_statements == 3);
    // distinct tokens: var0 = num0 var1 + num1 return -> 7
    CHECK(st.unique_tokens == 7);
    CHECK(st.avg_tokens_per_statement == doctest::Approx(10.0 / 3.0));
    REQUIRE(st.token_histogram.size() == 1);  // all methods under 50 tokens
    CHECK(st.token_histogram[0] == 2);
}
