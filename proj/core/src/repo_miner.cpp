#include "resfault/repo_miner.hpp"

#include <algorithm>
#include <cctype>

#include <json.hpp>

#include "resfault/csv.hpp"
#include "resfault/errors.hpp"
#include "resfault/gitrepo.hpp"
#include "resfault/strutil.hpp"

namespace resfault {

using ojson = nlohmann::ordered_json;

const std::set<std::string>& default_bugfix_keywords() {
    static const std::set<std::string> kw = {"fix",   "fixes",  "fixed", "bug",   "fault",
                                             "defect", "crash", "issue", "error", "patch"};
    return kw;
}

bool is_stable_tag(const std::string& tag) {
    size_t i = 0;
    if (i < tag.size() && tag[i] == 'v') ++i;
    int groups = 0;
    while (groups < 3) {
        size_t start = i;
        while (i < tag.size() && std::isdigit(static_cast<unsigned char>(tag[i]))) ++i;
        if (i == start) return false;
        ++groups;
        if (i == tag.size()) return true;
        if (tag[i] != '.') return false;
        ++i;
    }
    return false;
}

std::optional<std::int64_t> linked_issue_from_message(const std::string& message) {
    for (size_t i = 0; i + 1 < message.size(); ++i) {
        if (message[i] != '#') continue;
        size_t j = i + 1;
        while (j < message.size() && std::isdigit(static_cast<unsigned char>(message[j]))) ++j;
        if (j > i + 1) {
            return std::strtoll(message.substr(i + 1, j - i - 1).c_str(), nullptr, 10);
        }
    }
    return std::nullopt;
}

namespace {

std::string normalize_author(const std::string& name, const std::string& email) {
    return to_lower(trim(name)) + " <" + to_lower(trim(email)) + ">";
}

}  // namespace

std::vector<CommitRecord> scan_bugfix_commits(const std::string& repo_path,
                                              const std::set<std::string>& keywords,
                                              ScanStats* stats) {
    if (keywords.empty()) throw InputError("keyword set must be non-empty");
    GitRepo repo(repo_path);
    if (!repo.is_valid()) throw InputError("not a readable git repository: " + repo_path);

    std::string repo_id = repo_path;
    while (!repo_id.empty() && repo_id.back() == '/') repo_id.pop_back();
    if (auto pos = repo_id.rfind('/'); pos != std::string::npos) repo_id = repo_id.substr(pos + 1);

    ScanStats local;
    ScanStats& st = stats ? *stats : local;

    std::vector<CommitRecord> records;
    for (const auto& entry : repo.log_all()) {
        if (entry.is_merge) {
            ++st.skipped_merges;
            continue;
        }
        if (!matches_any_keyword(entry.message, keywords)) continue;
        if (entry.changed_files.empty()) {
            ++st.skipped_empty;
            continue;
        }
        auto diff = repo.diff_of_commit(entry.commit_id);
        if (!diff) {
            ++st.skipped_unreadable_diff;
            continue;
        }
        CommitRecord rec;
        rec.repo_id = repo_id;
        rec.commit_id = entry.commit_id;
        rec.committed_at = entry.committed_at;
        rec.author_id = normalize_author(entry.author_name, entry.author_email);
        rec.message = entry.message;
        rec.changed_files = entry.changed_files;
        rec.diff = *diff;
        rec.linked_issue_id = linked_issue_from_message(entry.message);
        records.push_back(std::move(rec));
    }
    // log_all is already ascending by (time, id)
    return records;
}

ReleaseInfo detect_first_stable_release(const std::string& repo_path) {
    GitRepo repo(repo_path);
    if (!repo.is_valid()) throw InputError("not a readable git repository: " + repo_path);
    ReleaseInfo info;
    for (const auto& [name, ts] : repo.tags()) {
        if (!is_stable_tag(name)) continue;
        info.stable_tags.emplace_back(name, ts);
    }
    std::sort(info.stable_tags.begin(), info.stable_tags.end(),
              [](const auto& a, const auto& b) { return a.second < b.second; });
    if (!info.stable_tags.empty()) info.first_stable_release_at = info.stable_tags.front().second;
    return info;
}

namespace {

bool text_has_version_reference(const std::string& lower) {
    for (size_t i = 0; i < lower.size(); ++i) {
        if (lower[i] == 'v' && i + 1 < lower.size() &&
            std::isdigit(static_cast<unsigned char>(lower[i + 1]))) {
            if (i == 0 || !(std::isalnum(static_cast<unsigned char>(lower[i - 1])) ||
                            lower[i - 1] == '_'))
                return true;
        }
    }
    for (const char* word : {"release ", "build ", "version "}) {
        size_t pos = 0;
        while ((pos = lower.find(word, pos)) != std::string::npos) {
            size_t after = pos + std::string(word).size();
            if (after < lower.size() &&
                std::isdigit(static_cast<unsigned char>(lower[after])))
                return true;
            pos = after;
        }
    }
    return false;
}

bool text_has_affects(const std::string& lower) {
    size_t pos = 0;
    while ((pos = lower.find("affects", pos)) != std::string::npos) {
        size_t after = pos + 7;
        while (after < lower.size() && (lower[after] == ' ' || lower[after] == '-' ||
                                        lower[after] == ':' || lower[after] == '/'))
            ++after;
        if (after < lower.size() && std::isdigit(static_cast<unsigned char>(lower[after])))
            return true;
        pos = after;
    }
    return false;
}

bool any_keyword_in(const std::string& lower, std::initializer_list<const char*> words) {
    for (const char* w : words) {
        if (contains_keyword(lower, w)) return true;
    }
    return false;
}

}  // namespace

std::optional<IssueEvidence> extract_issue_evidence(
    const RawIssue& raw, const std::optional<std::set<std::string>>& contributors) {
    auto created = parse_iso8601(raw.created_at);
    if (!created || *created <= 0) return std::nullopt;

    IssueEvidence ev;
    ev.issue_id = raw.id;
    ev.created_at = *created;

    const std::string text = to_lower(raw.title + "\n" + raw.body);
    std::string labels_lower;
    for (const auto& l : raw.labels) labels_lower += to_lower(l) + "\n";

    ev.has_version_reference = text_has_version_reference(text);
    ev.has_affects_label =
        text_has_affects(text) || labels_lower.find("affects") != std::string::npos;
    ev.has_regression_tag = labels_lower.find("regression") != std::string::npos;
    ev.milestone_closed = to_lower(raw.milestone_state) == "closed";

    const std::string all = text + "\n" + labels_lower;
    ev.has_prerelease_qualifier =
        any_keyword_in(all, {"alpha", "beta", "rc", "prerelease", "nightly", "snapshot"}) ||
        all.find("pre-release") != std::string::npos ||
        all.find("release candidate") != std::string::npos;
    ev.has_internal_test_marker =
        all.find("unit test") != std::string::npos ||
        all.find("test suite") != std::string::npos ||
        all.find("during testing") != std::string::npos ||
        all.find("ci failure") != std::string::npos ||
        all.find("failing test") != std::string::npos ||
        all.find("flaky test") != std::string::npos ||
        any_keyword_in(all, {"pytest", "tox"});
    const std::string body_lower = to_lower(raw.body);
    ev.has_bug_template =
        (body_lower.find("expected behavior") != std::string::npos &&
         body_lower.find("actual behavior") != std::string::npos) ||
        (body_lower.find("expected result") != std::string::npos &&
         body_lower.find("actual result") != std::string::npos) ||
        body_lower.find("describe the bug") != std::string::npos ||
        body_lower.find("bug report") != std::string::npos;
    ev.has_reproduction_steps = body_lower.find("steps to reproduce") != std::string::npos ||
                                body_lower.find("how to reproduce") != std::string::npos ||
                                body_lower.find("to reproduce") != std::string::npos ||
                                body_lower.find("repro steps") != std::string::npos ||
                                body_lower.find("reproduction steps") != std::string::npos;

    if (contributors) {
        ev.reporter_is_contributor = contributors->count(to_lower(trim(raw.reporter_login))) > 0;
    }
    return ev;
}

std::vector<RawIssue> load_issues_jsonl(const std::string& path) {
    std::vector<RawIssue> issues;
    if (!file_exists(path)) return issues;
    for (const auto& line : split_lines(read_file(path))) {
        if (trim(line).empty()) continue;
        ojson j = ojson::parse(line, nullptr, false);
        if (j.is_discarded() || !j.is_object()) continue;
        RawIssue issue;
        issue.id = j.value("id", static_cast<std::int64_t>(0));
        issue.created_at = j.value("created_at", "");
        issue.title = j.value("title", "");
        issue.body = j.value("body", "");
        if (j.contains("labels") && j["labels"].is_array()) {
            for (const auto& l : j["labels"])
                if (l.is_string()) issue.labels.push_back(l.get<std::string>());
        }
        issue.milestone_state = j.value("milestone_state", "");
        issue.reporter_login = j.value("reporter_login", "");
        issues.push_back(std::move(issue));
    }
    return issues;
}

std::optional<std::set<std::string>> load_contributors(const std::string& path) {
    if (!file_exists(path)) return std::nullopt;
    std::set<std::string> logins;
    for (const auto& line : split_lines(read_file(path))) {
        std::string login = to_lower(trim(line));
        if (!login.empty()) logins.insert(login);
    }
    return logins;
}

std::string commit_to_jsonl(const CommitRecord& rec) {
    ojson j;
    j["repo_id"] = rec.repo_id;
    j["commit_id"] = rec.commit_id;
    j["committed_at"] = rec.committed_at;
    j["author_id"] = rec.author_id;
    j["message"] = rec.message;
    j["changed_files"] = rec.changed_files;
    j["diff"] = rec.diff;
    if (rec.linked_issue_id) j["linked_issue_id"] = *rec.linked_issue_id;
    else j["linked_issue_id"] = nullptr;
    return j.dump();
}

CommitRecord commit_from_jsonl(const std::string& line) {
    ojson j = ojson::parse(line);
    CommitRecord rec;
    rec.repo_id = j.value("repo_id", "");
    rec.commit_id = j.value("commit_id", "");
    rec.committed_at = j.value("committed_at", static_cast<std::int64_t>(0));
    rec.author_id = j.value("author_id", "");
    rec.message = j.value("message", "");
    if (j.contains("changed_files")) {
        for (const auto& f : j["changed_files"]) rec.changed_files.push_back(f.get<std::string>());
    }
    rec.diff = j.value("diff", "");
    if (j.contains("linked_issue_id") && !j["linked_issue_id"].is_null()) {
        rec.linked_issue_id = j["linked_issue_id"].get<std::int64_t>();
    }
    return rec;
}

void write_commits_jsonl(const std::string& path, const std::vector<CommitRecord>& recs) {
    std::string out;
    for (const auto& r : recs) {
        out += commit_to_jsonl(r);
        out += '\n';
    }
    write_file_atomic(path, out);
}

std::vector<CommitRecord> read_commits_jsonl(const std::string& path) {
    std::vector<CommitRecord> recs;
    for (const auto& line : split_lines(read_file(path))) {
        if (trim(line).empty()) continue;
        recs.push_back(commit_from_jsonl(line));
    }
    return recs;
}

}  // namespace resfault
