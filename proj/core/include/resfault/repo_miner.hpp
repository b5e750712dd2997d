#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace resfault {

struct CommitRecord {
    std::string repo_id;
    std::string commit_id;
    std::int64_t committed_at = 0;
    std::string author_id;  // normalized "name <email>"
    std::string message;
    std::vector<std::string> changed_files;
    std::string diff;
    std::optional<std::int64_t> linked_issue_id;
};

struct IssueEvidence {
    std::int64_t issue_id = 0;
    std::int64_t created_at = 0;
    std::optional<bool> reporter_is_contributor;
    bool has_version_reference = false;
    bool has_regression_tag = false;
    bool has_affects_label = false;
    bool milestone_closed = false;
    bool has_prerelease_qualifier = false;
    bool has_internal_test_marker = false;
    bool has_bug_template = false;
    bool has_reproduction_steps = false;
};

struct ReleaseInfo {
    std::optional<std::int64_t> first_stable_release_at;
    std::vector<std::pair<std::string, std::int64_t>> stable_tags;
};

// One line of issues.jsonl.
struct RawIssue {
    std::int64_t id = 0;
    std::string created_at;  // ISO-8601
    std::string title;
    std::string body;
    std::vector<std::string> labels;
    std::string milestone_state;
    std::string reporter_login;
};

struct ScanStats {
    int skipped_unreadable_diff = 0;
    int skipped_merges = 0;
    int skipped_empty = 0;
};

// {fix, fixes, fixed, bug, fault, defect, crash, issue, error, patch}
const std::set<std::string>& default_bugfix_keywords();

// Word-boundary keyword matching over the lowercased message; merge commits
// skipped; records ordered by (committed_at, commit_id).
std::vector<CommitRecord> scan_bugfix_commits(const std::string& repo_path,
                                              const std::set<std::string>& keywords,
                                              ScanStats* stats = nullptr);

ReleaseInfo detect_first_stable_release(const std::string& repo_path);

// v?MAJOR(.MINOR(.PATCH)?)? with no alphabetic suffix.
bool is_stable_tag(const std::string& tag);

// First "#<digits>" reference in a commit message.
std::optional<std::int64_t> linked_issue_from_message(const std::string& message);

// Pattern extraction; nullopt when the issue has no usable creation time.
std::optional<IssueEvidence> extract_issue_evidence(
    const RawIssue& raw, const std::optional<std::set<std::string>>& contributors);

std::vector<RawIssue> load_issues_jsonl(const std::string& path);
std::optional<std::set<std::string>> load_contributors(const std::string& path);

std::string commit_to_jsonl(const CommitRecord& rec);
CommitRecord commit_from_jsonl(const std::string& line);
void write_commits_jsonl(const std::string& path, const std::vector<CommitRecord>& recs);
std::vector<CommitRecord> read_commits_jsonl(const std::string& path);

}  // namespace resfault
