#include "resfault/classify.hpp"

#include <json.hpp>

#include "resfault/csv.hpp"
#include "resfault/strutil.hpp"

namespace resfault {

using ojson = nlohmann::ordered_json;

std::pair<bool, bool> strong_hints(const IssueEvidence& evidence, const ReleaseInfo& release) {
    bool strong_pre = release.first_stable_release_at &&
                      evidence.created_at < *release.first_stable_release_at;
    bool strong_post = evidence.has_version_reference || evidence.has_affects_label ||
                       evidence.has_regression_tag;
    return {strong_pre, strong_post};
}

std::pair<int, int> soft_scores(const IssueEvidence& evidence) {
    int pre = 0, post = 0;
    if (evidence.has_prerelease_qualifier) ++pre;
    if (evidence.has_internal_test_marker) ++pre;
    if (evidence.reporter_is_contributor.has_value()) {
        if (*evidence.reporter_is_contributor) ++pre;
        else ++post;
    }
    if (evidence.milestone_closed) ++post;
    if (evidence.has_bug_template) ++post;
    if (evidence.has_reproduction_steps) ++post;
    return {pre, post};
}

LabelDecision classify_commit(const CommitRecord& commit,
                              const std::optional<IssueEvidence>& evidence,
                              const ReleaseInfo& release) {
    LabelDecision d;
    if (evidence) {
        auto [strong_pre, strong_post] = strong_hints(*evidence, release);
        auto [pre, post] = soft_scores(*evidence);
        d.hints = {strong_pre, strong_post, pre, post};
        if (strong_pre) {  // checked before strong_post
            d.label = Label::PreRelease;
            d.reason_code = "strong_pre";
            return d;
        }
        if (strong_post) {
            d.label = Label::PostRelease;
            d.reason_code = "strong_post";
            return d;
        }
        if (pre > post) {
            d.label = Label::PreRelease;
            d.reason_code = "score_pre";
            return d;
        }
        if (post > pre) {
            d.label = Label::PostRelease;
            d.reason_code = "score_post";
            return d;
        }
        if (evidence->reporter_is_contributor.has_value()) {
            if (*evidence->reporter_is_contributor) {
                d.label = Label::PreRelease;
                d.reason_code = "tie_contributor";
            } else {
                d.label = Label::PostRelease;
                d.reason_code = "tie_external";
            }
            return d;
        }
        d.label = Label::Unknown;
        d.reason_code = "tie_reporter_unknown";
        return d;
    }
    if (commit.committed_at > 0 &&
        (!release.first_stable_release_at ||
         commit.committed_at < *release.first_stable_release_at)) {
        d.label = Label::PreRelease;
        d.reason_code = "no_issue_before_first_release";
        return d;
    }
    d.label = Label::Unknown;
    d.reason_code = "no_issue_after_first_release";
    return d;
}

const char* label_name(Label label) {
    switch (label) {
        case Label::PreRelease: return "pre-release";
        case Label::PostRelease: return "post-release";
        default: return "unknown";
    }
}

Label label_from_name(const std::string& name) {
    if (name == "pre-release") return Label::PreRelease;
    if (name == "post-release") return Label::PostRelease;
    return Label::Unknown;
}

std::string label_to_jsonl(const LabelRecord& rec) {
    ojson j;
    j["repo_id"] = rec.repo_id;
    j["commit_id"] = rec.commit_id;
    j["label"] = label_name(rec.label);
    j["strong_pre"] = rec.hints.strong_pre;
    j["strong_post"] = rec.hints.strong_post;
    j["pre_score"] = rec.hints.pre_score;
    j["post_score"] = rec.hints.post_score;
    j["reason_code"] = rec.reason_code;
    return j.dump();
}

LabelRecord label_from_jsonl(const std::string& line) {
    ojson j = ojson::parse(line);
    LabelRecord rec;
    rec.repo_id = j.value("repo_id", "");
    rec.commit_id = j.value("commit_id", "");
    rec.label = label_from_name(j.value("label", "unknown"));
    rec.hints.strong_pre = j.value("strong_pre", false);
    rec.hints.strong_post = j.value("strong_post", false);
    rec.hints.pre_score = j.value("pre_score", 0);
    rec.hints.post_score = j.value("post_score", 0);
    rec.reason_code = j.value("reason_code", "");
    return rec;
}

void write_labels_jsonl(const std::string& path, const std::vector<LabelRecord>& recs) {
    std::string out;
    for (const auto& r : recs) {
        out += label_to_jsonl(r);
        out += '\n';
    }
    write_file_atomic(path, out);
}

std::vector<LabelRecord> read_labels_jsonl(const std::string& path) {
    std::vector<LabelRecord> recs;
    for (const auto& line : split_lines(read_file(path))) {
        if (trim(line).empty()) continue;
        recs.push_back(label_from_jsonl(line));
    }
    return recs;
}

}  // namespace resfault
