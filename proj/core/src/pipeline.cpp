#include "resfault/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <functional>

#include <json.hpp>

#include "resfault/classify.hpp"
#include "resfault/csv.hpp"
#include "resfault/dataset.hpp"
#include "resfault/errors.hpp"
#include "resfault/evalstats.hpp"
#include "resfault/gitrepo.hpp"
#include "resfault/importance.hpp"
#include "resfault/ngram.hpp"
#include "resfault/normalize.hpp"
#include "resfault/process_metrics.hpp"
#include "resfault/product_metrics.hpp"
#include "resfault/repo_miner.hpp"
#include "resfault/representation.hpp"
#include "resfault/scaler.hpp"
#include "resfault/strutil.hpp"
#include "resfault/version.hpp"

namespace resfault {

using ojson = nlohmann::ordered_json;
namespace fs = std::filesystem;

const std::set<std::string>& PipelineConfig::effective_keywords() const {
    return keywords.empty() ? default_bugfix_keywords() : keywords;
}

PipelineConfig load_pipeline_config(const std::string& path) {
    if (!file_exists(path)) throw InputError("config file not found: " + path);
    ojson j = ojson::parse(read_file(path), nullptr, false);
    if (j.is_discarded() || !j.is_object()) throw InputError("config: invalid JSON: " + path);

    PipelineConfig cfg;
    if (j.contains("repos"))
        for (const auto& r : j["repos"]) cfg.repos.push_back(r.get<std::string>());
    if (j.contains("keywords"))
        for (const auto& k : j["keywords"]) cfg.keywords.insert(to_lower(k.get<std::string>()));
    cfg.split_ratio = j.value("split_ratio", cfg.split_ratio);
    cfg.seed = j.value("seed", cfg.seed);
    cfg.out_dir = j.value("out", cfg.out_dir);
    cfg.embeddings_csv = j.value("embeddings_csv", cfg.embeddings_csv);
    cfg.include_unknown = j.value("include_unknown", cfg.include_unknown);
    cfg.zero_fill_missing = j.value("zero_fill_missing", cfg.zero_fill_missing);
    if (j.contains("ngram")) {
        cfg.ngram_order = j["ngram"].value("order", cfg.ngram_order);
        cfg.ngram_k = j["ngram"].value("k", cfg.ngram_k);
    }
    cfg.bootstrap_resamples = j.value("bootstrap_resamples", cfg.bootstrap_resamples);
    if (j.contains("shapley")) {
        cfg.shapley_samples_per_row =
            j["shapley"].value("samples_per_row", cfg.shapley_samples_per_row);
        cfg.shapley_background_rows =
            j["shapley"].value("background_rows", cfg.shapley_background_rows);
    }
    cfg.permutation_repeats = j.value("permutation_repeats", cfg.permutation_repeats);
    if (j.contains("forest")) {
        const auto& f = j["forest"];
        cfg.forest.n_trees = f.value("n_trees", cfg.forest.n_trees);
        cfg.forest.max_depth = f.value("max_depth", cfg.forest.max_depth);
        cfg.forest.min_leaf = f.value("min_leaf", cfg.forest.min_leaf);
        cfg.forest.features_per_split =
            f.value("features_per_split", cfg.forest.features_per_split);
    }
    if (j.contains("gbt")) {
        const auto& g = j["gbt"];
        cfg.gbt.n_rounds = g.value("n_rounds", cfg.gbt.n_rounds);
        cfg.gbt.learning_rate = g.value("learning_rate", cfg.gbt.learning_rate);
        cfg.gbt.max_depth = g.value("max_depth", cfg.gbt.max_depth);
        cfg.gbt.min_leaf = g.value("min_leaf", cfg.gbt.min_leaf);
    }
    if (j.contains("iforest")) {
        const auto& f = j["iforest"];
        cfg.iforest.n_trees = f.value("n_trees", cfg.iforest.n_trees);
        cfg.iforest.subsample = f.value("subsample", cfg.iforest.subsample);
        cfg.iforest.contamination = f.value("contamination", cfg.iforest.contamination);
    }
    if (j.contains("lof")) {
        const auto& l = j["lof"];
        cfg.lof.k = l.value("k", cfg.lof.k);
        cfg.lof.outlier_threshold = l.value("outlier_threshold", cfg.lof.outlier_threshold);
    }
    if (!(cfg.split_ratio > 0.0 && cfg.split_ratio < 1.0))
        throw InputError("config: split_ratio must be in (0,1)");
    return cfg;
}

namespace {

ojson config_json(const PipelineConfig& cfg) {
    ojson j;
    j["repos"] = cfg.repos;
    j["keywords"] = std::vector<std::string>(cfg.effective_keywords().begin(),
                                             cfg.effective_keywords().end());
    j["split_ratio"] = cfg.split_ratio;
    j["seed"] = cfg.seed;
    j["embeddings_csv"] = cfg.embeddings_csv;
    j["include_unknown"] = cfg.include_unknown;
    j["zero_fill_missing"] = cfg.zero_fill_missing;
    j["ngram"] = {{"order", cfg.ngram_order}, {"k", cfg.ngram_k}};
    j["bootstrap_resamples"] = cfg.bootstrap_resamples;
    j["shapley"] = {{"samples_per_row", cfg.shapley_samples_per_row},
                    {"background_rows", cfg.shapley_background_rows}};
    j["permutation_repeats"] = cfg.permutation_repeats;
    j["forest"] = {{"n_trees", cfg.forest.n_trees},
                   {"max_depth", cfg.forest.max_depth},
                   {"min_leaf", cfg.forest.min_leaf},
                   {"features_per_split", cfg.forest.features_per_split}};
    j["gbt"] = {{"n_rounds", cfg.gbt.n_rounds},
                {"learning_rate", cfg.gbt.learning_rate},
                {"max_depth", cfg.gbt.max_depth},
                {"min_leaf", cfg.gbt.min_leaf}};
    j["iforest"] = {{"n_trees", cfg.iforest.n_trees},
                    {"subsample", cfg.iforest.subsample},
                    {"contamination", cfg.iforest.contamination}};
    j["lof"] = {{"k", cfg.lof.k}, {"outlier_threshold", cfg.lof.outlier_threshold}};
    return j;
}

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

std::vector<std::string> csv_meta(const PipelineConfig& cfg) {
    return {"# seed=" + std::to_string(cfg.seed) + " config=" + pipeline_config_hash(cfg) +
            " version=" + kToolVersion};
}

ojson json_meta(const PipelineConfig& cfg) {
    ojson m;
    m["seed"] = cfg.seed;
    m["config"] = pipeline_config_hash(cfg);
    m["version"] = kToolVersion;
    return m;
}

bool is_python_file(const std::string& path) {
    return path.size() > 3 && path.substr(path.size() - 3) == ".py";
}

std::uint64_t seed_for(const PipelineConfig& cfg, std::uint64_t stream) {
    return derive_seed(cfg.seed, stream);
}

struct SourceRecord {
    std::string repo_id, commit_id, method, file;
    std::string normalized;
    std::int64_t token_count = 0;
    int label = -1;
};

std::vector<SourceRecord> read_sources(const std::string& path) {
    std::vector<SourceRecord> out;
    for (const auto& line : split_lines(read_file(path))) {
        if (trim(line).empty()) continue;
        ojson j = ojson::parse(line);
        SourceRecord r;
        r.repo_id = j.value("repo_id", "");
        r.commit_id = j.value("commit_id", "");
        r.method = j.value("method", "");
        r.file = j.value("file", "");
        r.normalized = j.value("normalized", "");
        r.token_count = j.value("token_count", static_cast<std::int64_t>(0));
        out.push_back(std::move(r));
    }
    return out;
}

}  // namespace

std::string pipeline_config_hash(const PipelineConfig& cfg) {
    return hex64(fnv1a64(config_json(cfg).dump()));
}

std::vector<std::pair<std::string, std::string>> pipeline_repo_ids(const PipelineConfig& cfg) {
    std::vector<std::pair<std::string, std::string>> out;
    std::map<std::string, int> used;
    for (const auto& path : cfg.repos) {
        std::string id = path;
        while (!id.empty() && id.back() == '/') id.pop_back();
        if (auto pos = id.rfind('/'); pos != std::string::npos) id = id.substr(pos + 1);
        int n = ++used[id];
        if (n > 1) id += "#" + std::to_string(n);
        out.emplace_back(id, path);
    }
    return out;
}

std::map<std::string, std::vector<HunkRange>> parse_diff_new_ranges(const std::string& diff) {
    std::map<std::string, std::vector<int>> added;      // new-file line numbers
    std::map<std::string, std::vector<int>> deletions;  // positions in the new file
    std::string current;
    bool in_hunk = false;
    int new_line = 0;
    for (const auto& line : split_lines(diff)) {
        if (starts_with(line, "diff ") || starts_with(line, "--- ")) {
            in_hunk = false;
            continue;
        }
        if (starts_with(line, "+++ ")) {
            in_hunk = false;
            std::string p = line.substr(4);
            if (auto tab = p.find('\t'); tab != std::string::npos) p = p.substr(0, tab);
            if (p == "/dev/null") {
                current.clear();
            } else {
                if (starts_with(p, "b/")) p = p.substr(2);
                current = p;
            }
            continue;
        }
        if (starts_with(line, "@@")) {
            auto plus = line.find('+');
            if (plus == std::string::npos || current.empty()) {
                in_hunk = false;
                continue;
            }
            new_line = std::atoi(line.c_str() + plus + 1);
            in_hunk = true;
            continue;
        }
        if (!in_hunk || current.empty()) continue;
        if (line.empty()) {  // context line of an empty source line
            ++new_line;
            continue;
        }
        switch (line[0]) {
            case '+':
                added[current].push_back(new_line);
                ++new_line;
                break;
            case '-':
                deletions[current].push_back(std::max(1, new_line));
                break;
            case ' ':
                ++new_line;
                break;
            case '\\':  // "\ No newline at end of file"
                break;
            default:
                in_hunk = false;
                break;
        }
    }

    std::map<std::string, std::vector<HunkRange>> out;
    for (auto& [file, lines] : added) {
        std::sort(lines.begin(), lines.end());
        lines.erase(std::unique(lines.begin(), lines.end()), lines.end());
        for (std::size_t i = 0; i < lines.size();) {
            std::size_t j = i;
            while (j + 1 < lines.size() && lines[j + 1] == lines[j] + 1) ++j;
            out[file].push_back({lines[i], lines[j] - lines[i] + 1});
            i = j + 1;
        }
    }
    for (auto& [file, points] : deletions) {
        std::sort(points.begin(), points.end());
        points.erase(std::unique(points.begin(), points.end()), points.end());
        auto& ranges = out[file];
        for (int p : points) {
            bool covered = false;
            for (const auto& r : ranges) {
                if (p >= r.start && p < r.start + std::max(r.count, 1)) covered = true;
            }
            if (!covered) ranges.push_back({p, 0});
        }
        std::sort(ranges.begin(), ranges.end(),
                  [](const HunkRange& a, const HunkRange& b) { return a.start < b.start; });
    }
    return out;
}

// ---------------------------------------------------------------------------
// stages

void stage_mine(const PipelineConfig& cfg) {
    if (cfg.repos.empty()) throw InputError("mine: no repositories configured");
    std::vector<CommitRecord> all;
    for (const auto& [repo_id, path] : pipeline_repo_ids(cfg)) {
        auto records = scan_bugfix_commits(path, cfg.effective_keywords());
        for (auto& r : records) {
            r.repo_id = repo_id;
            all.push_back(std::move(r));
        }
    }
    write_commits_jsonl(cfg.artifact("commits.jsonl"), all);
}

void stage_classify(const PipelineConfig& cfg) {
    auto commits = read_commits_jsonl(cfg.artifact("commits.jsonl"));
    std::map<std::string, std::string> repo_paths;
    for (const auto& [id, path] : pipeline_repo_ids(cfg)) repo_paths[id] = path;

    std::map<std::string, ReleaseInfo> releases;
    std::map<std::string, std::map<std::int64_t, IssueEvidence>> evidence_by_repo;
    for (const auto& [id, path] : repo_paths) {
        releases[id] = detect_first_stable_release(path);
        auto contributors = load_contributors(path + "/contributors.txt");
        for (const auto& raw : load_issues_jsonl(path + "/issues.jsonl")) {
            if (auto ev = extract_issue_evidence(raw, contributors)) {
                evidence_by_repo[id][raw.id] = *ev;
            }
        }
    }

    std::vector<LabelRecord> labels;
    for (const auto& c : commits) {
        std::optional<IssueEvidence> ev;
        if (c.linked_issue_id) {
            auto& issues = evidence_by_repo[c.repo_id];
            if (auto it = issues.find(*c.linked_issue_id); it != issues.end()) ev = it->second;
        }
        LabelDecision d = classify_commit(c, ev, releases[c.repo_id]);
        labels.push_back({c.repo_id, c.commit_id, d.label, d.hints, d.reason_code});
    }
    write_labels_jsonl(cfg.artifact("labels.jsonl"), labels);
}

namespace {

struct FaultRow {
    std::string repo_id, commit_id, method_id, file, qualified;
    MethodMetrics method;
    const ClassMetrics* cls = nullptr;
    ClassMetrics cls_storage;
    bool has_class = false;
    FileMetrics file_metrics_v;
    PySpecificMetrics py;
    ProcessMetrics process;
    std::string normalized;
    std::int64_t token_count = 0;
    std::string body_text;
};

const py::SyntaxUnit* find_enclosing_class(const py::SyntaxUnit& root,
                                           const py::SyntaxUnit* target) {
    const py::SyntaxUnit* best = nullptr;
    std::function<bool(const py::SyntaxUnit&)> walk = [&](const py::SyntaxUnit& u) -> bool {
        if (&u == target) return true;
        for (const auto& ch : u.children) {
            if (walk(ch)) {
                if (u.kind == py::UnitKind::Class && !best) best = &u;
                return true;
            }
        }
        return false;
    };
    walk(root);
    return best;
}

}  // namespace

void stage_metrics(const PipelineConfig& cfg) {
    auto commits = read_commits_jsonl(cfg.artifact("commits.jsonl"));
    std::map<std::string, std::string> repo_paths;
    for (const auto& [id, path] : pipeline_repo_ids(cfg)) repo_paths[id] = path;

    CsvTable product;
    product.header = {"repo_id", "commit_id", "method"};
    for (const auto& n : product_metric_names()) product.header.push_back(n);
    product.header.push_back("presence");
    CsvTable process;
    process.header = {"repo_id", "commit_id", "method"};
    for (const auto& n : process_metric_names()) process.header.push_back(n);

    std::string sources_out;
    std::set<std::string> seen_keys;

    for (const auto& commit : commits) {
        auto rp = repo_paths.find(commit.repo_id);
        if (rp == repo_paths.end()) continue;
        GitRepo repo(rp->second);
        auto ranges = parse_diff_new_ranges(commit.diff);

        // project index over every python file at this commit
        std::vector<std::pair<std::string, std::string>> files;
        for (const auto& f : repo.ls_files(commit.commit_id)) {
            if (!is_python_file(f)) continue;
            if (auto content = repo.show_file(commit.commit_id, f))
                files.emplace_back(f, std::move(*content));
        }
        ProjectIndex index = ProjectIndex::build(files);

        for (const auto& [path, hunks] : ranges) {
            if (!is_python_file(path)) continue;
            auto content = repo.show_file(commit.commit_id, path);
            if (!content) continue;
            py::ParseResult pr = py::parse_source(*content);
            FileMetrics fm = file_metrics(pr.root);

            for (const py::SyntaxUnit* unit : py::all_units(pr.root)) {
                if (unit->kind != py::UnitKind::Method) continue;
                bool hit = false;
                for (const auto& h : hunks) {
                    int h1 = h.start, h2 = h.start + std::max(h.count, 1) - 1;
                    if (unit->start_line <= h2 && h1 <= unit->end_line) {
                        hit = true;
                        break;
                    }
                }
                if (!hit) continue;
                std::string method_id = path + "::" + unit->qualified_name;
                std::string key = commit.repo_id + "\x1f" + commit.commit_id + "\x1f" + method_id;
                if (!seen_keys.insert(key).second) continue;

                FaultRow row;
                row.repo_id = commit.repo_id;
                row.commit_id = commit.commit_id;
                row.method_id = method_id;
                row.method = method_metrics(*unit);
                coupling_metrics(index, path, *unit, &row.method);
                if (const py::SyntaxUnit* cls = find_enclosing_class(pr.root, unit)) {
                    row.cls_storage = class_metrics(*cls, index, path);
                    row.has_class = true;
                }
                row.file_metrics_v = fm;
                row.py = python_specific(*unit);

                HistorySlice slice =
                    build_history_slice(repo, path, unit->qualified_name, commit.commit_id);
                row.process = process_metrics(slice, cfg.effective_keywords());

                NormalizeResult norm = normalize_code(unit->body_text);
                row.normalized = norm.text;
                auto toks = tokenize_for_lm(norm.text);
                row.token_count = static_cast<std::int64_t>(toks.size()) - 2;

                std::vector<std::string> prow = {row.repo_id, row.commit_id, row.method_id};
                auto pvec = product_vector(row.method, row.has_class ? &row.cls_storage : nullptr,
                                           row.file_metrics_v, row.py);
                for (double v : pvec) prow.push_back(format_double(v));
                prow.push_back(std::to_string(product_presence_mask(row.has_class)));
                product.rows.push_back(std::move(prow));

                std::vector<std::string> qrow = {row.repo_id, row.commit_id, row.method_id};
                for (double v : process_vector(row.process)) qrow.push_back(format_double(v));
                process.rows.push_back(std::move(qrow));

                ojson s;
                s["repo_id"] = row.repo_id;
                s["commit_id"] = row.commit_id;
                s["method"] = row.method_id;
                s["file"] = path;
                s["normalized"] = row.normalized;
                s["token_count"] = row.token_count;
                sources_out += s.dump();
                sources_out += '\n';
            }
        }
    }

    auto sort_table = [](CsvTable& t) {
        std::sort(t.rows.begin(), t.rows.end(),
                  [](const std::vector<std::string>& a, const std::vector<std::string>& b) {
                      return std::tie(a[0], a[1], a[2]) < std::tie(b[0], b[1], b[2]);
                  });
    };
    sort_table(product);
    sort_table(process);
    write_csv(cfg.artifact("product_metrics.csv"), product, csv_meta(cfg));
    write_csv(cfg.artifact("process_metrics.csv"), process, csv_meta(cfg));
    write_file_atomic(cfg.artifact("sources.jsonl"), sources_out);
}

void stage_entropy(const PipelineConfig& cfg) {
    CsvTable product = read_csv(cfg.artifact("product_metrics.csv"));
    std::map<std::string, std::string> repo_paths;
    for (const auto& [id, path] : pipeline_repo_ids(cfg)) repo_paths[id] = path;

    int c_repo = product.column("repo_id");
    int c_commit = product.column("commit_id");
    int c_method = product.column("method");

    // fault files per repo are excluded from the training corpus
    std::map<std::string, std::set<std::string>> fault_files;
    for (const auto& row : product.rows) {
        const std::string& method_id = row[static_cast<size_t>(c_method)];
        auto sep = method_id.find("::");
        if (sep != std::string::npos)
            fault_files[row[static_cast<size_t>(c_repo)]].insert(method_id.substr(0, sep));
    }

    std::vector<std::vector<std::string>> corpus;
    for (const auto& [repo_id, path] : repo_paths) {
        GitRepo repo(path);
        const auto& excluded = fault_files[repo_id];
        for (const auto& f : repo.ls_files("HEAD")) {
            if (!is_python_file(f) || excluded.count(f)) continue;
            if (auto content = repo.show_file("HEAD", f)) {
                corpus.push_back(tokenize_for_lm(*content));
            }
        }
    }
    if (corpus.empty()) corpus.push_back({kBeginToken, kEndToken});
    NgramModel model = NgramModel::train(corpus, cfg.ngram_order, cfg.ngram_k);
    write_file_atomic(cfg.artifact("ngram_model.txt"), model.serialize());

    CsvTable ent;
    ent.header = {"repo_id", "commit_id", "method", "ENT"};
    for (const auto& row : product.rows) {
        const std::string& repo_id = row[static_cast<size_t>(c_repo)];
        const std::string& commit_id = row[static_cast<size_t>(c_commit)];
        const std::string& method_id = row[static_cast<size_t>(c_method)];
        auto sep = method_id.find("::");
        double value = 0.0;
        if (sep != std::string::npos && repo_paths.count(repo_id)) {
            GitRepo repo(repo_paths[repo_id]);
            std::string file = method_id.substr(0, sep);
            std::string qualified = method_id.substr(sep + 2);
            if (auto content = repo.show_file(commit_id, file)) {
                py::ParseResult pr = py::parse_source(*content);
                if (const py::SyntaxUnit* u =
                        py::find_unit(pr.root, py::UnitKind::Method, qualified)) {
                    value = model.cross_entropy(tokenize_for_lm(u->body_text));
                }
            }
        }
        ent.rows.push_back({repo_id, commit_id, method_id, format_double(value)});
    }
    write_csv(cfg.artifact("ent.csv"), ent, csv_meta(cfg));
}

void stage_assemble(const PipelineConfig& cfg) {
    auto labels = read_labels_jsonl(cfg.artifact("labels.jsonl"));
    CsvTable product = read_csv(cfg.artifact("product_metrics.csv"));
    CsvTable process = read_csv(cfg.artifact("process_metrics.csv"));
    CsvTable ent = read_csv(cfg.artifact("ent.csv"));
    AssembleOptions opts{cfg.include_unknown, cfg.zero_fill_missing};
    Dataset ds = assemble_dataset(labels, product, process, ent, opts);
    write_dataset_csv(cfg.artifact("dataset.csv"), ds, csv_meta(cfg));
}

void stage_split(const PipelineConfig& cfg) {
    Dataset ds = read_dataset_csv(cfg.artifact("dataset.csv"));
    auto [train, test] = split_dataset(ds, cfg.split_ratio, cfg.seed);

    std::set<std::string> train_commits, test_commits;
    for (const auto& r : train.rows) train_commits.insert(r.repo_id + ":" + r.commit_id);
    for (const auto& r : test.rows) test_commits.insert(r.repo_id + ":" + r.commit_id);
    for (const auto& c : test_commits) {
        if (train_commits.count(c))
            throw std::runtime_error("split: leakage, commit in both sides: " + c);
    }
    write_dataset_csv(cfg.artifact("train.csv"), train, csv_meta(cfg));
    write_dataset_csv(cfg.artifact("test.csv"), test, csv_meta(cfg));
}

void stage_train(const PipelineConfig& cfg) {
    Dataset train = read_dataset_csv(cfg.artifact("train.csv"));
    std::vector<DatasetRow> labeled;
    for (const auto& r : train.rows)
        if (r.label >= 0) labeled.push_back(r);
    if (labeled.size() < 2) throw InputError("train: not enough labeled rows");
    Dataset tl;
    tl.feature_names = train.feature_names;
    tl.rows = std::move(labeled);

    Matrix x = tl.features();
    std::vector<double> y = tl.labels();
    ScalerParams scaler = fit_scaler(x);
    Matrix xs = apply_scaler(scaler, x);
    write_file_atomic(cfg.artifact("scaler.txt"), scaler_serialize(scaler));

    ForestConfig fc = cfg.forest;
    if (fc.seed == 0) fc.seed = seed_for(cfg, 1);
    GbtConfig gc = cfg.gbt;
    if (gc.seed == 0) gc.seed = seed_for(cfg, 2);
    IsolationConfig ic = cfg.iforest;
    if (ic.seed == 0) ic.seed = seed_for(cfg, 3);
    LofConfig lc = cfg.lof;
    if (lc.seed == 0) lc.seed = seed_for(cfg, 4);
    lc.k = std::min(lc.k, static_cast<int>(xs.rows()) - 1);

    ForestModel forest = train_random_forest(xs, y, tl.feature_names, fc);
    write_file_atomic(cfg.artifact("model_forest.txt"), forest.serialize());
    BoostedModel gbt = train_gbt(xs, y, tl.feature_names, gc);
    write_file_atomic(cfg.artifact("model_gbt.txt"), gbt.serialize());
    IsolationModel iforest = fit_isolation_forest(xs, tl.feature_names, ic);
    write_file_atomic(cfg.artifact("model_iforest.txt"), iforest.serialize());
    LofModel lof = fit_lof(xs, tl.feature_names, lc);
    write_file_atomic(cfg.artifact("model_lof.txt"), lof.serialize());
}

namespace {

struct NamedPreds {
    std::string name;
    std::vector<int> preds;
    std::vector<double> scores;
};

std::vector<NamedPreds> predict_all(const PipelineConfig& cfg, const Dataset& test,
                                    const Matrix& xs) {
    ForestModel forest = ForestModel::deserialize(read_file(cfg.artifact("model_forest.txt")));
    BoostedModel gbt = BoostedModel::deserialize(read_file(cfg.artifact("model_gbt.txt")));
    IsolationModel iforest =
        IsolationModel::deserialize(read_file(cfg.artifact("model_iforest.txt")));
    LofModel lof = LofModel::deserialize(read_file(cfg.artifact("model_lof.txt")));
    if (forest.schema != test.feature_names)
        throw InputError("evaluate: test columns do not match the trained model schema");

    std::vector<NamedPreds> out(4);
    out[0].name = "forest";
    out[1].name = "gbt";
    out[2].name = "iforest";
    out[3].name = "lof";
    const std::size_t n = xs.rows(), d = xs.cols();
    for (std::size_t i = 0; i < n; ++i) {
        std::span<const double> row(&xs.data()[i * d], d);
        double pf = forest.predict_proba(row);
        out[0].preds.push_back(pf >= 0.5 ? 1 : 0);
        out[0].scores.push_back(pf);
        double pg = gbt.predict_proba(row);
        out[1].preds.push_back(pg >= 0.5 ? 1 : 0);
        out[1].scores.push_back(pg);
        double si = iforest.anomaly_score(row);
        out[2].preds.push_back(iforest.predict(row));
        out[2].scores.push_back(si);
        double sl = lof.lof_score(row);
        out[3].preds.push_back(lof.predict(row));
        out[3].scores.push_back(sl);
    }
    (void)test;
    return out;
}

}  // namespace

void stage_evaluate(const PipelineConfig& cfg) {
    Dataset all_rows = read_dataset_csv(cfg.artifact("test.csv"));
    Dataset test;
    test.feature_names = all_rows.feature_names;
    for (auto& r : all_rows.rows) {
        if (r.label >= 0) test.rows.push_back(std::move(r));  // unknowns are not evaluated
    }
    if (test.rows.empty()) throw InputError("evaluate: no labeled test rows");
    ScalerParams scaler = scaler_deserialize(read_file(cfg.artifact("scaler.txt")));
    Matrix xs = apply_scaler(scaler, test.features());
    std::vector<int> labels = test.label_ints();

    auto all = predict_all(cfg, test, xs);

    ojson report;
    report["_meta"] = json_meta(cfg);
    std::string text;
    char line[256];
    std::snprintf(line, sizeof(line), "%-10s %18s %18s %18s %18s\n", "model", "accuracy",
                  "precision", "recall", "f1");
    text += line;

    for (std::size_t m = 0; m < all.size(); ++m) {
        const auto& np = all[m];
        ConfusionMatrix cm = confusion(np.preds, labels);
        EvalReport er = evaluate_with_ci(np.preds, labels, cfg.bootstrap_resamples,
                                         seed_for(cfg, 100 + m));
        ojson jm;
        jm["confusion"] = {{"tp", cm.tp}, {"fp", cm.fp}, {"fn", cm.fn}, {"tn", cm.tn}};
        auto metric_obj = [](double v, const Interval& ci) {
            return ojson{{"value", v}, {"ci_low", ci.low}, {"ci_high", ci.high}};
        };
        jm["accuracy"] = metric_obj(er.accuracy, er.accuracy_ci);
        jm["precision"] = metric_obj(er.precision, er.precision_ci);
        jm["recall"] = metric_obj(er.recall, er.recall_ci);
        jm["f1"] = metric_obj(er.f1, er.f1_ci);
        report["models"][np.name] = jm;

        auto cell = [](double v, const Interval& ci) {
            char buf[64];
            std::snprintf(buf, sizeof(buf), "%.3f[%.2f,%.2f]", v, ci.low, ci.high);
            return std::string(buf);
        };
        std::snprintf(line, sizeof(line), "%-10s %18s %18s %18s %18s\n", np.name.c_str(),
                      cell(er.accuracy, er.accuracy_ci).c_str(),
                      cell(er.precision, er.precision_ci).c_str(),
                      cell(er.recall, er.recall_ci).c_str(), cell(er.f1, er.f1_ci).c_str());
        text += line;

        CsvTable preds;
        preds.header = {"repo_id", "commit_id", "method", "label", "pred", "score"};
        for (std::size_t i = 0; i < test.rows.size(); ++i) {
            preds.rows.push_back({test.rows[i].repo_id, test.rows[i].commit_id,
                                  test.rows[i].method, std::to_string(labels[i]),
                                  std::to_string(np.preds[i]), format_double(np.scores[i])});
        }
        write_csv(cfg.artifact("preds_" + np.name + ".csv"), preds, csv_meta(cfg));
    }

    for (std::size_t a = 0; a < all.size(); ++a) {
        for (std::size_t b = a + 1; b < all.size(); ++b) {
            McNemarResult mr = mcnemar(all[a].preds, all[b].preds, labels);
            ojson jm;
            jm["b"] = mr.b;
            jm["c"] = mr.c;
            jm["p_value"] = mr.p_value;
            jm["method"] = mr.method;
            report["mcnemar"][all[a].name + "_vs_" + all[b].name] = jm;
        }
    }

    write_file_atomic(cfg.artifact("eval_report.json"), report.dump(2) + "\n");
    write_file_atomic(cfg.artifact("eval_report.txt"), text);
}

void stage_explain(const PipelineConfig& cfg) {
    Dataset train = read_dataset_csv(cfg.artifact("train.csv"));
    Dataset all_rows = read_dataset_csv(cfg.artifact("test.csv"));
    Dataset test;
    test.feature_names = all_rows.feature_names;
    for (auto& r : all_rows.rows) {
        if (r.label >= 0) test.rows.push_back(std::move(r));
    }
    if (test.rows.empty()) throw InputError("explain: no labeled test rows");
    ScalerParams scaler = scaler_deserialize(read_file(cfg.artifact("scaler.txt")));
    ForestModel forest = ForestModel::deserialize(read_file(cfg.artifact("model_forest.txt")));

    Matrix xs_test = apply_scaler(scaler, test.features());
    Matrix xs_train = apply_scaler(scaler, train.features());
    std::vector<int> labels = test.label_ints();

    std::vector<double> impurity = impurity_importance(forest);
    LabelFn hard = [&](std::span<const double> row) { return forest.predict(row); };
    std::vector<double> perm = permutation_importance(hard, xs_test, labels, Metric::F1,
                                                      seed_for(cfg, 200),
                                                      cfg.permutation_repeats);

    std::size_t bg_rows = std::min<std::size_t>(
        xs_train.rows(), static_cast<std::size_t>(std::max(1, cfg.shapley_background_rows)));
    Matrix background(bg_rows, xs_train.cols());
    for (std::size_t r = 0; r < bg_rows; ++r)
        for (std::size_t c = 0; c < xs_train.cols(); ++c) background(r, c) = xs_train(r, c);
    PredictFn proba = [&](std::span<const double> row) { return forest.predict_proba(row); };
    std::vector<double> shap = shapley_direction_summary(
        proba, xs_test, background, cfg.shapley_samples_per_row, seed_for(cfg, 201));

    std::vector<std::size_t> order(test.feature_names.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return impurity[a] > impurity[b]; });

    ojson report;
    report["_meta"] = json_meta(cfg);
    ojson features = ojson::array();
    for (std::size_t i : order) {
        ojson f;
        f["name"] = test.feature_names[i];
        f["impurity_importance"] = impurity[i];
        f["permutation_drop"] = perm[i];
        f["shapley_mean"] = shap[i];
        features.push_back(f);
    }
    report["features"] = features;
    ojson top10 = ojson::array();
    for (std::size_t i = 0; i < order.size() && i < 10; ++i)
        top10.push_back(test.feature_names[order[i]]);
    report["top10"] = top10;
    write_file_atomic(cfg.artifact("explain_report.json"), report.dump(2) + "\n");
}

void stage_repr(const PipelineConfig& cfg) {
    if (cfg.embeddings_csv.empty())
        throw InputError("repr: embeddings_csv not configured");
    Dataset ds = read_dataset_csv(cfg.artifact("dataset.csv"));
    CsvTable emb = read_csv(cfg.embeddings_csv);
    int c_id = emb.column("id");
    if (c_id < 0) throw InputError("repr: embeddings csv needs an id column");

    std::map<std::string, std::size_t> emb_rows;
    for (std::size_t r = 0; r < emb.rows.size(); ++r)
        emb_rows[emb.rows[r][static_cast<size_t>(c_id)]] = r;

    std::vector<std::size_t> ds_sel;
    std::vector<std::size_t> emb_sel;
    for (std::size_t i = 0; i < ds.rows.size(); ++i) {
        std::string id = ds.rows[i].repo_id + ":" + ds.rows[i].commit_id + ":" +
                         ds.rows[i].method;
        if (auto it = emb_rows.find(id); it != emb_rows.end()) {
            ds_sel.push_back(i);
            emb_sel.push_back(it->second);
        }
    }
    if (ds_sel.size() < 2) throw InputError("repr: fewer than 2 joinable rows");

    Matrix metrics(ds_sel.size(), ds.feature_names.size());
    for (std::size_t r = 0; r < ds_sel.size(); ++r)
        for (std::size_t c = 0; c < ds.feature_names.size(); ++c)
            metrics(r, c) = ds.rows[ds_sel[r]].features[c];

    const std::size_t emb_dim = emb.header.size() - 1;
    Matrix embeddings(emb_sel.size(), emb_dim);
    for (std::size_t r = 0; r < emb_sel.size(); ++r) {
        std::size_t cc = 0;
        for (std::size_t c = 0; c < emb.header.size(); ++c) {
            if (static_cast<int>(c) == c_id) continue;
            embeddings(r, cc++) = std::atof(emb.rows[emb_sel[r]][c].c_str());
        }
    }

    OrthogonalityReport rep = orthogonality_report(metrics, embeddings);
    ojson j;
    j["_meta"] = json_meta(cfg);
    j["k_metrics"] = rep.k_metrics;
    j["k_embeddings"] = rep.k_embeddings;
    j["max_abs_spearman"] = rep.max_abs_rho;
    j["mean_per_component_max"] = rep.mean_per_component_max;
    j["canonical_correlations"] = rep.canonical;
    j["mean_canonical_first20"] = rep.mean_canonical_first20;
    write_file_atomic(cfg.artifact("repr_report.json"), j.dump(2) + "\n");

    CsvTable proj;
    proj.header = {"id", "x", "y", "cluster", "centroid"};
    for (const auto& p : rep.projection) {
        proj.rows.push_back({p.id, format_double(p.x), format_double(p.y), p.cluster,
                             p.centroid ? "1" : "0"});
    }
    write_csv(cfg.artifact("projection.csv"), proj, csv_meta(cfg));
}

void stage_stats(const PipelineConfig& cfg) {
    auto sources = read_sources(cfg.artifact("sources.jsonl"));
    Dataset train = read_dataset_csv(cfg.artifact("train.csv"));
    Dataset test = read_dataset_csv(cfg.artifact("test.csv"));

    std::map<std::string, std::pair<std::string, int>> row_info;  // key -> (split, label)
    auto note = [&](const Dataset& ds, const char* split) {
        for (const auto& r : ds.rows) {
            row_info[r.repo_id + "\x1f" + r.commit_id + "\x1f" + r.method] = {split, r.label};
        }
    };
    note(train, "train");
    note(test, "test");

    std::map<std::string, std::vector<std::string>> groups;
    for (const auto& s : sources) {
        auto it = row_info.find(s.repo_id + "\x1f" + s.commit_id + "\x1f" + s.method);
        if (it == row_info.end()) continue;
        const auto& [split, label] = it->second;
        std::string group = std::string(split) + (label == 1 ? " (residual)"
                                                : label == 0 ? " (non-residual)"
                                                             : " (unknown)");
        groups[group].push_back(s.normalized);
        groups["all"].push_back(s.normalized);
    }

    ojson j;
    j["_meta"] = json_meta(cfg);
    CsvTable hist;
    hist.header = {"group", "bin_lo", "bin_hi", "count"};
    for (const auto& [name, texts] : groups) {
        DatasetStats st = dataset_stats(texts);
        ojson g;
        g["methods"] = st.method_count;
        g["unique_statements"] = st.unique_statements;
        g["unique_tokens"] = st.unique_tokens;
        g["avg_tokens_per_statement"] = st.avg_tokens_per_statement;
        j["groups"][name] = g;
        for (std::size_t b = 0; b < st.token_histogram.size(); ++b) {
            hist.rows.push_back({name, std::to_string(b * st.histogram_bin_width),
                                 std::to_string((b + 1) * st.histogram_bin_width - 1),
                                 std::to_string(st.token_histogram[b])});
        }
    }
    write_file_atomic(cfg.artifact("dataset_stats.json"), j.dump(2) + "\n");
    write_csv(cfg.artifact("token_hist.csv"), hist, csv_meta(cfg));
}

// ---------------------------------------------------------------------------
// run with stage skipping

namespace {

std::uint64_t hash_files(const std::vector<std::string>& paths) {
    std::string acc;
    for (const auto& p : paths) {
        acc += p;
        acc += '\x1e';
        if (file_exists(p)) acc += read_file(p);
        acc += '\x1e';
    }
    return fnv1a64(acc);
}

std::string repos_revision(const PipelineConfig& cfg) {
    std::string acc;
    for (const auto& [id, path] : pipeline_repo_ids(cfg)) {
        acc += id + "=" + trim(GitRepo::run_git(path, {"rev-parse", "HEAD"})) + ";";
    }
    return acc;
}

}  // namespace

void run_pipeline(const PipelineConfig& cfg) {
    fs::create_directories(cfg.out_dir + "/.stage");
    const std::string base = pipeline_config_hash(cfg) + "|" + kToolVersion + "|" +
                             repos_revision(cfg);

    ojson manifest;
    manifest["_meta"] = json_meta(cfg);

    auto run_stage = [&](const std::string& name, const std::vector<std::string>& inputs,
                         const std::vector<std::string>& outputs,
                         const std::function<void()>& fn) {
        std::string state_file = cfg.artifact(".stage/" + name + ".hash");
        std::string digest = hex64(fnv1a64(base + "|" + name)) + ":" +
                             hex64(hash_files(inputs));
        bool outputs_exist = true;
        for (const auto& o : outputs)
            if (!file_exists(o)) outputs_exist = false;
        if (outputs_exist && file_exists(state_file) && trim(read_file(state_file)) == digest) {
            manifest["stages"][name] = "skipped";
            return;
        }
        fn();
        // digest recorded over the post-run inputs
        digest = hex64(fnv1a64(base + "|" + name)) + ":" + hex64(hash_files(inputs));
        write_file_atomic(state_file, digest + "\n");
        manifest["stages"][name] = "run";
    };

    const auto a = [&](const char* n) { return cfg.artifact(n); };
    run_stage("mine", {}, {a("commits.jsonl")}, [&] { stage_mine(cfg); });
    {
        std::vector<std::string> in = {a("commits.jsonl")};
        for (const auto& [id, path] : pipeline_repo_ids(cfg)) {
            in.push_back(path + "/issues.jsonl");
            in.push_back(path + "/contributors.txt");
        }
        run_stage("classify", in, {a("labels.jsonl")}, [&] { stage_classify(cfg); });
    }
    run_stage("metrics", {a("commits.jsonl"), a("labels.jsonl")},
              {a("product_metrics.csv"), a("process_metrics.csv"), a("sources.jsonl")},
              [&] { stage_metrics(cfg); });
    run_stage("entropy", {a("product_metrics.csv")}, {a("ngram_model.txt"), a("ent.csv")},
              [&] { stage_entropy(cfg); });
    run_stage("assemble",
              {a("labels.jsonl"), a("product_metrics.csv"), a("process_metrics.csv"),
               a("ent.csv")},
              {a("dataset.csv")}, [&] { stage_assemble(cfg); });
    run_stage("split", {a("dataset.csv")}, {a("train.csv"), a("test.csv")},
              [&] { stage_split(cfg); });
    run_stage("train", {a("train.csv")},
              {a("scaler.txt"), a("model_forest.txt"), a("model_gbt.txt"),
               a("model_iforest.txt"), a("model_lof.txt")},
              [&] { stage_train(cfg); });
    run_stage("evaluate",
              {a("test.csv"), a("scaler.txt"), a("model_forest.txt"), a("model_gbt.txt"),
               a("model_iforest.txt"), a("model_lof.txt")},
              {a("eval_report.json"), a("eval_report.txt")}, [&] { stage_evaluate(cfg); });
    run_stage("explain", {a("train.csv"), a("test.csv"), a("model_forest.txt")},
              {a("explain_report.json")}, [&] { stage_explain(cfg); });
    if (!cfg.embeddings_csv.empty()) {
        run_stage("repr", {a("dataset.csv"), cfg.embeddings_csv},
                  {a("repr_report.json"), a("projection.csv")}, [&] { stage_repr(cfg); });
    }
    run_stage("stats", {a("sources.jsonl"), a("train.csv"), a("test.csv")},
              {a("dataset_stats.json"), a("token_hist.csv")}, [&] { stage_stats(cfg); });

    write_file_atomic(cfg.artifact("manifest.json"), manifest.dump(2) + "\n");
}

}  // namespace resfault
