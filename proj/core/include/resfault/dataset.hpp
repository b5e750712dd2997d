#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "resfault/classify.hpp"
#include "resfault/csv.hpp"
#include "resfault/matrix.hpp"

namespace resfault {

struct DatasetRow {
    std::string repo_id;
    std::string commit_id;
    std::string method;
    std::vector<double> features;  // feature_catalog() order
    int label = 0;                 // 1 residual (post-release), 0 non-residual, -1 unknown
};

struct Dataset {
    std::vector<std::string> feature_names;
    std::vector<DatasetRow> rows;

    Matrix features() const;
    std::vector<double> labels() const;
    std::vector<int> label_ints() const;
};

struct AssembleOptions {
    bool include_unknown = false;
    bool zero_fill_missing = false;
};

// Inner join on (repo_id, commit_id, method); unknown-labeled rows dropped
// unless requested; duplicate keys in any input are an error.
Dataset assemble_dataset(const std::vector<LabelRecord>& labels, const CsvTable& product_csv,
                         const CsvTable& process_csv, const CsvTable& ent_csv,
                         const AssembleOptions& opts = {},
                         std::vector<std::string>* warnings = nullptr);

// Commit-grouped split: all methods of a commit land on one side;
// deterministic shuffle by seed.
std::pair<Dataset, Dataset> split_dataset(const Dataset& ds, double ratio, std::uint64_t seed);

void write_dataset_csv(const std::string& path, const Dataset& ds,
                       const std::vector<std::string>& meta_lines = {});
Dataset read_dataset_csv(const std::string& path);

struct DatasetStats {
    std::int64_t method_count = 0;  // distinct normalized method texts
    std::int64_t unique_statements = 0;
    std::int64_t unique_tokens = 0;
    double avg_tokens_per_statement = 0;
    int histogram_bin_width = 50;
    std::vector<std::int64_t> token_histogram;  // per-method token counts, binned
};

// Statistics over distinct normalized method texts: statements are non-blank
// physical lines, tokens come from the language-model tokenizer.
DatasetStats dataset_stats(const std::vector<std::string>& normalized_methods);

}  // namespace resfault
