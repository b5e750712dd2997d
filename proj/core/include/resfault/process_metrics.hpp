#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "resfault/gitrepo.hpp"

namespace resfault {

struct Touch {
    std::string commit_id;
    std::int64_t timestamp = 0;
    std::string author_id;    // normalized name+email key
    std::string author_name;  // display name
    std::int64_t lines_added = 0;    // within the method span
    std::int64_t lines_deleted = 0;  // within the method span
    std::int64_t statements_modified = 0;
    std::string message;
    std::int64_t commit_lines_added = 0;  // whole commit
    std::int64_t commit_lines_deleted = 0;
    std::vector<std::string> commit_files;
};

struct HistorySlice {
    std::string file_path;  // path at the cutoff commit
    std::string qualified_name;
    std::string cutoff_commit;
    std::int64_t cutoff = 0;            // cutoff commit timestamp
    std::vector<Touch> touches;         // ascending by (timestamp, id)
    double method_loc_at_cutoff = 0;
    std::int64_t file_commit_count = 0;  // commits touching the file up to cutoff
};

struct ProcessMetrics {
    double age = 0, bd = 0, fc = 0;
    double acch = 0, mcch = 0, tcch = 0, tms = 0;
    double tc = 0, cmc = 0, mclc = 0, aclc = 0, tcc = 0, cca = 0, ccd = 0, cpc = 0;
    double mca = 0, mcd = 0, tmc = 0, amlc = 0, mmlc = 0;
    double da = 0, ade = 0, dcn = 0, aca = 0, acca = 0;
};

// Line-number diff used for span-scoped churn; 1-based indices.
struct LineDiff {
    std::vector<int> added_new;    // line numbers in the new text
    std::vector<int> deleted_old;  // line numbers in the old text
};
LineDiff diff_line_numbers(const std::vector<std::string>& old_lines,
                           const std::vector<std::string>& new_lines);

// Touches = ancestor commits of `cutoff_commit` whose diff intersects the
// method's span, with renames followed. The method is located by qualified
// name in each revision; a revision where it does not parse out is not a
// touch.
HistorySlice build_history_slice(const GitRepo& repo, const std::string& file_path,
                                 const std::string& qualified_name,
                                 const std::string& cutoff_commit);

void temporal_metrics(const HistorySlice& slice, const std::set<std::string>& fix_keywords,
                      ProcessMetrics* out);
void churn_metrics(const HistorySlice& slice, ProcessMetrics* out);
void commit_metrics(const HistorySlice& slice, ProcessMetrics* out);
void method_churn_metrics(const HistorySlice& slice, ProcessMetrics* out);
void developer_metrics(const HistorySlice& slice, ProcessMetrics* out);

ProcessMetrics process_metrics(const HistorySlice& slice,
                               const std::set<std::string>& fix_keywords);

// Catalog order, 25 values.
std::vector<double> process_vector(const ProcessMetrics& m);

}  // namespace resfault
