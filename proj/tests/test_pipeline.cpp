#include <doctest.h>

#include <filesystem>

#include "resfault/csv.hpp"
#include "resfault/dataset.hpp"
#include "resfault/errors.hpp"
#include "resfault/pipeline.hpp"
#include "resfault/product_metrics.hpp"
#include "test_support.hpp"

using namespace resfault;
using testsupport::FixtureRepo;

TEST_CASE("diff hunk parsing extracts post-image ranges per file") {
    const char* diff =
        "diff --git a/pkg/mod.py b/pkg/mod.py\n"
        "index 111..222 100644\n"
        "--- a/pkg/mod.py\n"
        "+++ b/pkg/mod.py\n"
        "@@ -10,3 +12,4 @@ def f():\n"
        " ctx\n"
        "+new line\n"
        " ctx\n"
        "@@ -40,0 +44,2 @@\n"
        "+a\n"
        "+b\n"
        "diff --git a/gone.py b/gone.py\n"
        "--- a/gone.py\n"
        "+++ /dev/null\n"
        "@@ -1,5 +0,0 @@\n"
        "-x\n"
        "diff --git a/other.py b/other.py\n"
        "--- a/other.py\n"
        "+++ b/other.py\n"
        "@@ -7 +7 @@\n"
        "-old\n"
        "+new\n";
    auto ranges = parse_diff_new_ranges(diff);
    REQUIRE(ranges.count("pkg/mod.py") == 1);
    REQUIRE(ranges["pkg/mod.py"].size() == 2);
    CHECK(ranges["pkg/mod.py"][0].start == 13);  // the added line, not the context
    CHECK(ranges["pkg/mod.py"][0].count == 1);
    CHECK(ranges["pkg/mod.py"][1].start == 44);
    CHECK(ranges["pkg/mod.py"][1].count == 2);
    CHECK(ranges.count("gone.py") == 0);  // deleted file
    REQUIRE(ranges.count("other.py") == 1);
    REQUIRE(ranges["other.py"].size() == 1);  // replacement collapses to one range
    CHECK(ranges["other.py"][0].start == 7);
    CHECK(ranges["other.py"][0].count == 1);
}

TEST_CASE("pure deletions leave a zero-count marker at their position") {
    const char* diff =
        "diff --git a/d.py b/d.py\n"
        "--- a/d.py\n"
        "+++ b/d.py\n"
        "@@ -5,2 +4,0 @@\n"
        "-a\n"
        "-b\n";
    auto ranges = parse_diff_new_ranges(diff);
    REQUIRE(ranges.count("d.py") == 1);
    REQUIRE(ranges["d.py"].size() == 1);
    CHECK(ranges["d.py"][0].start == 4);
    CHECK(ranges["d.py"][0].count == 0);
}

TEST_CASE("repo ids deduplicate by basename") {
    PipelineConfig cfg;
    cfg.repos = {"/tmp/a/proj", "/tmp/b/proj", "/tmp/c/other/"};
    auto ids = pipeline_repo_ids(cfg);
    REQUIRE(ids.size() == 3);
    CHECK(ids[0].first == "proj");
    CHECK(ids[1].first == "proj#2");
    CHECK(ids[2].first == "other");
}

TEST_CASE("config loading, defaults and validation") {
    namespace fs = std::filesystem;
    fs::path p = fs::temp_directory_path() / "resfault_cfg_test.json";
    write_file_atomic(p.string(),
                      "{\"repos\": [\"/r1\"], \"split_ratio\": 0.8, \"seed\": 9,"
                      " \"keywords\": [\"FIX\", \"oops\"],"
                      " \"forest\": {\"n_trees\": 12}, \"lof\": {\"k\": 4}}\n");
    PipelineConfig cfg = load_pipeline_config(p.string());
    CHECK(cfg.repos == std::vector<std::string>{"/r1"});
    CHECK(cfg.split_ratio == 0.8);
    CHECK(cfg.seed == 9);
    CHECK(cfg.forest.n_trees == 12);
    CHECK(cfg.gbt.n_rounds == 200);  // untouched default
    CHECK(cfg.lof.k == 4);
    CHECK(cfg.effective_keywords().count("fix") == 1);  // lowercased
    CHECK(cfg.effective_keywords().count("oops") == 1);

    PipelineConfig defaults;
    CHECK(defaults.effective_keywords().count("defect") == 1);

    std::string h1 = pipeline_config_hash(cfg);
    CHECK(h1 == pipeline_config_hash(cfg));
    PipelineConfig other = cfg;
    other.seed = 10;
    CHECK(h1 != pipeline_config_hash(other));

    write_file_atomic(p.string(), "{\"split_ratio\": 1.5}\n");
    CHECK_THROWS_AS(load_pipeline_config(p.string()), InputError);
    write_file_atomic(p.string(), "not json\n");
    CHECK_THROWS_AS(load_pipeline_config(p.string()), InputError);
    CHECK_THROWS_AS(load_pipeline_config("/nonexistent/cfg.json"), InputError);
    fs::remove(p);
}

namespace {

void build_stage_repo(FixtureRepo& repo) {
    repo.write("issues.jsonl",
               "{\"id\": 1, \"created_at\": \"2019-05-01T00:00:00Z\", \"title\": \"t\", "
               "\"body\": \"found during testing\", \"labels\": [], \"milestone_state\": "
               "\"open\", \"reporter_login\": \"core\"}\n"
               "{\"id\": 2, \"created_at\": \"2020-02-01T00:00:00Z\", \"title\": \"boom\", "
               "\"body\": \"affects 1.0\", \"labels\": [\"regression\"], "
               "\"milestone_state\": \"closed\", \"reporter_login\": \"user\"}\n");
    repo.write("contributors.txt", "core\n");
    repo.write("app.py",
               "def load(path):\n    return path\n\n"
               "def save(path, data):\n    return path + data\n");
    repo.commit("initial", "2019-04-01T00:00:00Z", "Alice", "alice@x");
    repo.write("app.py",
               "def load(path):\n    if not path:\n        return None\n    return path\n\n"
               "def save(path, data):\n    return path + data\n");
    repo.commit("fix empty path handling (#1)", "2019-06-01T00:00:00Z", "Bob", "bob@x");
    repo.tag("v1.0");
    repo.write("app.py",
               "def load(path):\n    if not path:\n        return None\n    return path\n\n"
               "def save(path, data):\n    return str(path) + data\n");
    repo.commit("fix crash when saving (#2)", "2020-03-01T00:00:00Z", "Alice", "alice@x");
}

}  // namespace

TEST_CASE("stage functions run end to end over a fixture repository") {
    FixtureRepo repo("stages");
    build_stage_repo(repo);
    namespace fs = std::filesystem;
    fs::path out = fs::temp_directory_path() / "resfault_stage_test";
    fs::remove_all(out);

    PipelineConfig cfg;
    cfg.repos = {repo.path()};
    cfg.out_dir = out.string();
    cfg.seed = 11;

    stage_mine(cfg);
    auto commits = read_commits_jsonl(cfg.artifact("commits.jsonl"));
    REQUIRE(commits.size() == 2);
    CHECK(commits[0].linked_issue_id == 1);
    CHECK(commits[1].linked_issue_id == 2);

    stage_classify(cfg);
    auto labels = read_labels_jsonl(cfg.artifact("labels.jsonl"));
    REQUIRE(labels.size() == 2);
    CHECK(labels[0].label == Label::PreRelease);   // issue predates v1.0
    CHECK(labels[0].reason_code == "strong_pre");
    CHECK(labels[1].label == Label::PostRelease);  // affects + regression
    CHECK(labels[1].reason_code == "strong_post");

    stage_metrics(cfg);
    CsvTable product = read_csv(cfg.artifact("product_metrics.csv"));
    CsvTable process = read_csv(cfg.artifact("process_metrics.csv"));
    REQUIRE(product.rows.size() == 2);  // load at commit 2, save at commit 3
    CHECK(product.rows[0][2] == "app.py::load");
    CHECK(product.rows[1][2] == "app.py::save");
    CHECK(product.header.back() == "presence");
    REQUIRE(process.rows.size() == 2);
    // save was touched twice by the cutoff commit: creation + the fix
    int c_cmc = process.column("CMC");
    REQUIRE(c_cmc >= 0);
    CHECK(process.rows[1][static_cast<size_t>(c_cmc)] == "2");

    stage_entropy(cfg);
    CsvTable ent = read_csv(cfg.artifact("ent.csv"));
    REQUIRE(ent.rows.size() == 2);
    for (const auto& row : ent.rows) CHECK(std::atof(row[3].c_str()) >= 0.0);

    stage_assemble(cfg);
    Dataset ds = read_dataset_csv(cfg.artifact("dataset.csv"));
    REQUIRE(ds.rows.size() == 2);
    CHECK(ds.feature_names.size() == 82);
    CHECK(ds.rows[0].label + ds.rows[1].label == 1);  // one of each class

    fs::remove_all(out);
}

TEST_CASE("split stage enforces the leakage assertion on disk") {
    namespace fs = std::filesystem;
    fs::path out = fs::temp_directory_path() / "resfault_split_stage";
    fs::remove_all(out);
    PipelineConfig cfg;
    cfg.out_dir = out.string();
    cfg.split_ratio = 0.5;
    cfg.seed = 3;

    Dataset ds;
    ds.feature_names = feature_catalog();
    for (int c = 0; c < 6; ++c) {
        for (int m = 0; m < 2; ++m) {
            DatasetRow row;
            row.repo_id = "r";
            row.commit_id = "c" + std::to_string(c);
            row.method = "m" + std::to_string(m);
            row.features.assign(ds.feature_names.size(), 0.5);
            row.label = c % 2;
            ds.rows.push_back(row);
        }
    }
    write_dataset_csv(cfg.artifact("dataset.csv"), ds);
    stage_split(cfg);
    Dataset train = read_dataset_csv(cfg.artifact("train.csv"));
    Dataset test = read_dataset_csv(cfg.artifact("test.csv"));
    CHECK(train.rows.size() + test.rows.size() == ds.rows.size());
    CHECK(!train.rows.empty());
    CHECK(!test.rows.empty());
    std::set<std::string> tc;
    for (const auto& r : train.rows) tc.insert(r.commit_id);
    for (const auto& r : test.rows) CHECK(tc.count(r.commit_id) == 0);
    fs::remove_all(out);
}
