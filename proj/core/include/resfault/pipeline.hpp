#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "resfault/anomaly.hpp"
#include "resfault/forest.hpp"
#include "resfault/gbt.hpp"

namespace resfault {

struct PipelineConfig {
    std::vector<std::string> repos;
    std::set<std::string> keywords;  // empty -> default_bugfix_keywords()
    double split_ratio = 0.9;
    std::uint64_t seed = 42;
    std::string out_dir = "out";
    std::string embeddings_csv;  // optional; enables the repr stage
    bool include_unknown = false;
    bool zero_fill_missing = false;
    int ngram_order = 3;
    double ngram_k = 0.01;
    int bootstrap_resamples = 10000;
    int shapley_samples_per_row = 500;
    int shapley_background_rows = 50;
    int permutation_repeats = 5;
    ForestConfig forest;
    GbtConfig gbt;
    IsolationConfig iforest;
    LofConfig lof;

    std::string artifact(const std::string& name) const { return out_dir + "/" + name; }
    const std::set<std::string>& effective_keywords() const;
};

PipelineConfig load_pipeline_config(const std::string& path);
std::string pipeline_config_hash(const PipelineConfig& cfg);
// (repo_id, path) pairs; duplicate basenames get #2, #3, ... suffixes
std::vector<std::pair<std::string, std::string>> pipeline_repo_ids(const PipelineConfig& cfg);

void stage_mine(const PipelineConfig& cfg);
void stage_classify(const PipelineConfig& cfg);
void stage_metrics(const PipelineConfig& cfg);
void stage_entropy(const PipelineConfig& cfg);
void stage_assemble(const PipelineConfig& cfg);
void stage_split(const PipelineConfig& cfg);
void stage_train(const PipelineConfig& cfg);
void stage_evaluate(const PipelineConfig& cfg);
void stage_explain(const PipelineConfig& cfg);
void stage_repr(const PipelineConfig& cfg);
void stage_stats(const PipelineConfig& cfg);

// All stages in order, skipping up-to-date ones by content hash.
void run_pipeline(const PipelineConfig& cfg);

// Post-image line ranges per file from a unified diff.
struct HunkRange {
    int start = 0;  // 1-based first line in the new file
    int count = 0;  // 0 marks a pure deletion point
};
std::map<std::string, std::vector<HunkRange>> parse_diff_new_ranges(const std::string& diff);

}  // namespace resfault
