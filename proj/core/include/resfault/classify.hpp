#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "resfault/repo_miner.hpp"

namespace resfault {

enum class Label { PreRelease, PostRelease, Unknown };

struct HintScores {
    bool strong_pre = false;
    bool strong_post = false;
    int pre_score = 0;
    int post_score = 0;
};

struct LabelDecision {
    Label label = Label::Unknown;
    HintScores hints;
    std::string reason_code;
};

// strong_pre: issue predates the first stable release; strong_post: the
// issue references shipped-version evidence.
std::pair<bool, bool> strong_hints(const IssueEvidence& evidence, const ReleaseInfo& release);

// Unweighted sums of boolean indicators.
// pre:  prerelease qualifier, internal test marker, reporter is contributor
// post: closed milestone, bug template, reproduction steps, external reporter
std::pair<int, int> soft_scores(const IssueEvidence& evidence);

// Staged decision: strong pre, strong post, score comparison, reporter
// tie-break; without an issue only the pre-release timestamp rule applies —
// a timestamp alone never yields PostRelease.
LabelDecision classify_commit(const CommitRecord& commit,
                              const std::optional<IssueEvidence>& evidence,
                              const ReleaseInfo& release);

const char* label_name(Label label);
Label label_from_name(const std::string& name);

struct LabelRecord {
    std::string repo_id;
    std::string commit_id;
    Label label = Label::Unknown;
    HintScores hints;
    std::string reason_code;
};

std::string label_to_jsonl(const LabelRecord& rec);
LabelRecord label_from_jsonl(const std::string& line);
void write_labels_jsonl(const std::string& path, const std::vector<LabelRecord>& recs);
std::vector<LabelRecord> read_labels_jsonl(const std::string& path);

}  // namespace resfault
