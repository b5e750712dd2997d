#include "resfault/dataset.hpp"

#include <algorithm>
#include <map>
#include <random>
#include <set>

#include "resfault/errors.hpp"
#include "resfault/ngram.hpp"
#include "resfault/product_metrics.hpp"
#include "resfault/strutil.hpp"

namespace resfault {

Matrix Dataset::features() const {
    Matrix m(rows.size(), feature_names.size());
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (std::size_t c = 0; c < feature_names.size(); ++c) m(r, c) = rows[r].features[c];
    return m;
}

std::vector<double> Dataset::labels() const {
    std::vector<double> y(rows.size());
    for (std::size_t r = 0; r < rows.size(); ++r) y[r] = rows[r].label;
    return y;
}

std::vector<int> Dataset::label_ints() const {
    std::vector<int> y(rows.size());
    for (std::size_t r = 0; r < rows.size(); ++r) y[r] = rows[r].label;
    return y;
}

namespace {

std::string row_key(const std::string& repo, const std::string& commit,
                    const std::string& method) {
    return repo + "\x1f" + commit + "\x1f" + method;
}

struct KeyedTable {
    std::map<std::string, std::vector<double>> values;  // key -> numeric columns
    std::vector<std::string> columns;
};

KeyedTable index_csv(const CsvTable& csv, const std::vector<std::string>& wanted,
                     const char* what) {
    int c_repo = csv.column("repo_id");
    int c_commit = csv.column("commit_id");
    int c_method = csv.column("method");
    if (c_repo < 0 || c_commit < 0 || c_method < 0)
        throw InputError(std::string(what) + ": missing key columns");
    std::vector<int> value_cols;
    for (const auto& name : wanted) {
        int c = csv.column(name);
        if (c < 0) throw InputError(std::string(what) + ": missing column " + name);
        value_cols.push_back(c);
    }
    KeyedTable out;
    out.columns = wanted;
    for (const auto& row : csv.rows) {
        std::string key = row_key(row[static_cast<size_t>(c_repo)],
                                  row[static_cast<size_t>(c_commit)],
                                  row[static_cast<size_t>(c_method)]);
        if (out.values.count(key))
            throw InputError(std::string(what) + ": duplicate key " + key);
        std::vector<double> vals;
        vals.reserve(value_cols.size());
        for (int c : value_cols)
            vals.push_back(std::atof(row[static_cast<size_t>(c)].c_str()));
        out.values.emplace(std::move(key), std::move(vals));
    }
    return out;
}

}  // namespace

Dataset assemble_dataset(const std::vector<LabelRecord>& labels, const CsvTable& product_csv,
                         const CsvTable& process_csv, const CsvTable& ent_csv,
                         const AssembleOptions& opts, std::vector<std::string>* warnings) {
    Dataset ds;
    ds.feature_names = feature_catalog();

    std::map<std::pair<std::string, std::string>, int> label_by_commit;
    for (const auto& rec : labels) {
        int y = rec.label == Label::PostRelease ? 1 : rec.label == Label::PreRelease ? 0 : -1;
        auto key = std::make_pair(rec.repo_id, rec.commit_id);
        if (label_by_commit.count(key))
            throw InputError("assemble: duplicate label for commit " + rec.commit_id);
        label_by_commit[key] = y;
    }

    KeyedTable product = index_csv(product_csv, product_metric_names(), "product_metrics");
    KeyedTable process = index_csv(process_csv, process_metric_names(), "process_metrics");
    KeyedTable ent = index_csv(ent_csv, {"ENT"}, "ent");

    for (const auto& [key, pvals] : product.values) {
        auto parts = split(key, '\x1f');
        const std::string& repo = parts[0];
        const std::string& commit = parts[1];
        const std::string& method = parts[2];

        auto lit = label_by_commit.find({repo, commit});
        if (lit == label_by_commit.end()) continue;  // unlabeled commit
        int y = lit->second;
        if (y < 0 && !opts.include_unknown) continue;

        const std::vector<double>* proc = nullptr;
        const std::vector<double>* e = nullptr;
        if (auto it = process.values.find(key); it != process.values.end()) proc = &it->second;
        if (auto it = ent.values.find(key); it != ent.values.end()) e = &it->second;
        if ((!proc || !e) && !opts.zero_fill_missing) {
            if (warnings)
                warnings->push_back("dropped " + repo + ":" + commit + ":" + method +
                                    " (missing " + (proc ? "ENT" : "process metrics") + ")");
            continue;
        }

        DatasetRow row;
        row.repo_id = repo;
        row.commit_id = commit;
        row.method = method;
        row.label = y;
        row.features = pvals;                                        // 56 product
        row.features.push_back(e ? (*e)[0] : 0.0);                   // ENT
        if (proc) {
            row.features.insert(row.features.end(), proc->begin(), proc->end());
        } else {
            row.features.insert(row.features.end(), process_metric_names().size(), 0.0);
        }
        for (double v : row.features) {
            if (!std::isfinite(v)) throw InputError("assemble: non-finite feature in " + key);
        }
        ds.rows.push_back(std::move(row));
    }

    std::sort(ds.rows.begin(), ds.rows.end(), [](const DatasetRow& a, const DatasetRow& b) {
        return std::tie(a.repo_id, a.commit_id, a.method) <
               std::tie(b.repo_id, b.commit_id, b.method);
    });
    return ds;
}

std::pair<Dataset, Dataset> split_dataset(const Dataset& ds, double ratio, std::uint64_t seed) {
    if (ds.rows.size() < 2) throw InputError("split: need at least 2 rows");
    if (!(ratio > 0.0 && ratio < 1.0)) throw InputError("split: ratio must be in (0,1)");

    std::map<std::pair<std::string, std::string>, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < ds.rows.size(); ++i) {
        groups[{ds.rows[i].repo_id, ds.rows[i].commit_id}].push_back(i);
    }
    std::vector<std::pair<std::string, std::string>> keys;
    keys.reserve(groups.size());
    for (const auto& [k, v] : groups) keys.push_back(k);

    std::mt19937_64 rng(seed);
    for (std::size_t i = keys.size(); i-- > 1;) {
        std::size_t j = static_cast<std::size_t>(rng() % (i + 1));
        std::swap(keys[i], keys[j]);
    }

    const double target = ratio * static_cast<double>(ds.rows.size());
    std::vector<bool> to_train(keys.size(), false);
    double in_train = 0;
    for (std::size_t g = 0; g < keys.size(); ++g) {
        if (in_train < target) {
            to_train[g] = true;
            in_train += static_cast<double>(groups[keys[g]].size());
        }
    }
    // both sides stay non-empty whenever there are two or more commit groups
    if (keys.size() >= 2) {
        bool any_test = false;
        for (bool t : to_train)
            if (!t) any_test = true;
        if (!any_test) to_train.back() = false;
    }

    Dataset train, test;
    train.feature_names = ds.feature_names;
    test.feature_names = ds.feature_names;
    for (std::size_t g = 0; g < keys.size(); ++g) {
        Dataset& side = to_train[g] ? train : test;
        for (std::size_t i : groups[keys[g]]) side.rows.push_back(ds.rows[i]);
    }
    // keep deterministic row order inside each side
    auto sort_rows = [](Dataset& d) {
        std::sort(d.rows.begin(), d.rows.end(), [](const DatasetRow& a, const DatasetRow& b) {
            return std::tie(a.repo_id, a.commit_id, a.method) <
                   std::tie(b.repo_id, b.commit_id, b.method);
        });
    };
    sort_rows(train);
    sort_rows(test);
    return {std::move(train), std::move(test)};
}

void write_dataset_csv(const std::string& path, const Dataset& ds,
                       const std::vector<std::string>& meta_lines) {
    CsvTable t;
    t.header = {"repo_id", "commit_id", "method"};
    for (const auto& n : ds.feature_names) t.header.push_back(n);
    t.header.push_back("label");
    for (const auto& row : ds.rows) {
        std::vector<std::string> r = {row.repo_id, row.commit_id, row.method};
        for (double v : row.features) r.push_back(format_double(v));
        r.push_back(std::to_string(row.label));
        t.rows.push_back(std::move(r));
    }
    write_csv(path, t, meta_lines);
}

Dataset read_dataset_csv(const std::string& path) {
    CsvTable t = read_csv(path);
    Dataset ds;
    if (t.header.size() < 5) throw InputError("dataset csv: malformed header");
    int c_label = t.column("label");
    if (t.header[0] != "repo_id" || t.header[1] != "commit_id" || t.header[2] != "method" ||
        c_label != static_cast<int>(t.header.size()) - 1)
        throw InputError("dataset csv: unexpected column layout");
    ds.feature_names.assign(t.header.begin() + 3, t.header.end() - 1);
    for (const auto& row : t.rows) {
        DatasetRow r;
        r.repo_id = row[0];
        r.commit_id = row[1];
        r.method = row[2];
        for (std::size_t c = 3; c + 1 < row.size(); ++c)
            r.features.push_back(std::atof(row[c].c_str()));
        r.label = std::atoi(row.back().c_str());
        ds.rows.push_back(std::move(r));
    }
    return ds;
}

DatasetStats dataset_stats(const std::vector<std::string>& normalized_methods) {
    DatasetStats st;
    std::set<std::string> distinct(normalized_methods.begin(), normalized_methods.end());
    st.method_count = static_cast<std::int64_t>(distinct.size());

    std::set<std::string> statements;
    std::set<std::string> tokens;
    std::int64_t total_tokens = 0, total_statements = 0;
    for (const auto& text : distinct) {
        std::int64_t method_tokens = 0;
        for (const auto& line : split_lines(text)) {
            if (trim(line).empty()) continue;
            statements.insert(line);
            ++total_statements;
        }
        auto toks = tokenize_for_lm(text);
        for (const auto& t : toks) {
            if (t == kBeginToken || t == kEndToken) continue;
            tokens.insert(t);
            ++total_tokens;
            ++method_tokens;
        }
        std::size_t bin = static_cast<std::size_t>(method_tokens / st.histogram_bin_width);
        if (st.token_histogram.size() <= bin) st.token_histogram.resize(bin + 1, 0);
        ++st.token_histogram[bin];
    }
    st.unique_statements = static_cast<std::int64_t>(statements.size());
    st.unique_tokens = static_cast<std::int64_t>(tokens.size());
    st.avg_tokens_per_statement =
        total_statements > 0
            ? static_cast<double>(total_tokens) / static_cast<double>(total_statements)
            : 0.0;
    return st;
}

}  // namespace resfault
