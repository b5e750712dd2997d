#include "resfault/gitrepo.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <cstdlib>

#include "resfault/strutil.hpp"

namespace resfault {

namespace {

std::string shell_quote(const std::string& arg) {
    std::string out = "'";
    for (char c : arg) {
        if (c == '\'') out += "'\\''";
        else out += c;
    }
    out += "'";
    return out;
}

// record separators used in --format strings
constexpr char kRecStart = '\x01';
constexpr char kFieldSep = '\x02';
constexpr char kBodyEnd = '\x03';

}  // namespace

std::string GitRepo::run_git(const std::string& repo, const std::vector<std::string>& args,
                             int* exit_code) {
    std::string cmd = "git";
    if (!repo.empty()) cmd += " -C " + shell_quote(repo);
    for (const auto& a : args) cmd += " " + shell_quote(a);
    cmd += " 2>/dev/null";

    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) {
        if (exit_code) *exit_code = -1;
        return {};
    }
    std::string out;
    std::array<char, 65536> buf;
    size_t n;
    while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) out.append(buf.data(), n);
    int rc = pclose(pipe);
    if (exit_code) *exit_code = rc == -1 ? -1 : WEXITSTATUS(rc);
    return out;
}

bool GitRepo::is_valid() const {
    int rc = 0;
    std::string out = run_git(path_, {"rev-parse", "--is-inside-work-tree"}, &rc);
    return rc == 0 && trim(out) == "true";
}

namespace {

std::string log_format() {
    std::string fmt;
    fmt += kRecStart;
    fmt += "%H";
    fmt += kFieldSep;
    fmt += "%ct";
    fmt += kFieldSep;
    fmt += "%an";
    fmt += kFieldSep;
    fmt += "%ae";
    fmt += kFieldSep;
    fmt += "%P";
    fmt += kFieldSep;
    fmt += "%B";
    fmt += kBodyEnd;
    return fmt;
}

}  // namespace

std::vector<GitRepo::LogEntry> GitRepo::parse_log_output(const std::string& out) {
    std::vector<LogEntry> entries;
    if (out.empty()) return entries;

    size_t pos = 0;
    while ((pos = out.find(kRecStart, pos)) != std::string::npos) {
        size_t body_end = out.find(kBodyEnd, pos);
        if (body_end == std::string::npos) break;
        std::string header = out.substr(pos + 1, body_end - pos - 1);
        size_t next = out.find(kRecStart, body_end);
        std::string stats = out.substr(body_end + 1,
                                       (next == std::string::npos ? out.size() : next) -
                                           body_end - 1);
        pos = body_end + 1;

        auto fields = split(header, kFieldSep);
        if (fields.size() < 6) continue;
        LogEntry e;
        e.commit_id = fields[0];
        e.committed_at = std::strtoll(fields[1].c_str(), nullptr, 10);
        e.author_name = fields[2];
        e.author_email = fields[3];
        e.is_merge = fields[4].find(' ') != std::string::npos;
        e.message = fields[5];
        while (!e.message.empty() && (e.message.back() == '\n' || e.message.back() == '\r'))
            e.message.pop_back();

        for (const auto& line : split_lines(stats)) {
            if (line.empty()) continue;
            auto cols = split(line, '\t');
            if (cols.size() < 3) continue;
            if (cols[0] != "-") e.lines_added += std::strtoll(cols[0].c_str(), nullptr, 10);
            if (cols[1] != "-") e.lines_deleted += std::strtoll(cols[1].c_str(), nullptr, 10);
            e.changed_files.push_back(cols[2]);
        }
        entries.push_back(std::move(e));
    }
    return entries;
}

std::vector<GitRepo::LogEntry> GitRepo::log_all() const {
    int rc = 0;
    std::string out = run_git(path_, {"log", "HEAD", "--numstat", "--format=" + log_format()}, &rc);
    if (rc != 0) return {};
    std::vector<LogEntry> entries = parse_log_output(out);
    std::sort(entries.begin(), entries.end(), [](const LogEntry& a, const LogEntry& b) {
        if (a.committed_at != b.committed_at) return a.committed_at < b.committed_at;
        return a.commit_id < b.commit_id;
    });
    return entries;
}

std::optional<GitRepo::LogEntry> GitRepo::log_one(const std::string& commit) const {
    int rc = 0;
    std::string out =
        run_git(path_, {"log", "-1", commit, "--numstat", "--format=" + log_format()}, &rc);
    if (rc != 0) return std::nullopt;
    auto entries = parse_log_output(out);
    if (entries.empty()) return std::nullopt;
    return entries.front();
}

std::optional<std::string> GitRepo::show_file(const std::string& commit,
                                              const std::string& path) const {
    int rc = 0;
    std::string out = run_git(path_, {"show", commit + ":" + path}, &rc);
    if (rc != 0) return std::nullopt;
    return out;
}

std::optional<std::string> GitRepo::diff_of_commit(const std::string& commit) const {
    int rc = 0;
    std::string out =
        run_git(path_, {"show", "--format=", "--unified=3", "--no-color", commit}, &rc);
    if (rc != 0) return std::nullopt;
    return out;
}

std::vector<std::pair<std::string, std::int64_t>> GitRepo::tags() const {
    int rc = 0;
    std::string out = run_git(
        path_, {"for-each-ref", "refs/tags", "--format=%(refname:short)\t%(creatordate:unix)"},
        &rc);
    std::vector<std::pair<std::string, std::int64_t>> tags;
    if (rc != 0) return tags;
    for (const auto& line : split_lines(out)) {
        auto cols = split(line, '\t');
        if (cols.size() != 2 || cols[0].empty()) continue;
        tags.emplace_back(cols[0], std::strtoll(cols[1].c_str(), nullptr, 10));
    }
    return tags;
}

std::vector<GitRepo::FileTouch> GitRepo::file_history(const std::string& path,
                                                      const std::string& from_commit) const {
    int rc = 0;
    std::string fmt;
    fmt += kRecStart;
    fmt += "%H";
    std::vector<std::string> args = {"log", "--follow", "--find-renames", "--name-status",
                                     "--format=" + fmt};
    args.push_back(from_commit.empty() ? "HEAD" : from_commit);
    args.push_back("--");
    args.push_back(path);
    std::string out = run_git(path_, args, &rc);
    std::vector<FileTouch> touches;
    if (rc != 0) return touches;

    std::string current_commit;
    for (const auto& line : split_lines(out)) {
        if (!line.empty() && line[0] == kRecStart) {
            current_commit = line.substr(1);
            continue;
        }
        if (line.empty() || current_commit.empty()) continue;
        auto cols = split(line, '\t');
        if (cols.empty() || cols[0].empty()) continue;
        char status = cols[0][0];
        FileTouch t;
        t.commit_id = current_commit;
        t.status = status;
        if (status == 'R' && cols.size() >= 3) {
            t.old_path = cols[1];
            t.path = cols[2];  // new name as of this commit
        } else if (cols.size() >= 2) {
            t.path = cols[1];
            t.old_path = cols[1];
        } else {
            continue;
        }
        touches.push_back(std::move(t));
    }
    return touches;
}

std::vector<std::string> GitRepo::ls_files(const std::string& commit) const {
    int rc = 0;
    std::string out = run_git(path_, {"ls-tree", "-r", "--name-only", commit}, &rc);
    std::vector<std::string> files;
    if (rc != 0) return files;
    for (auto& line : split_lines(out)) {
        if (!line.empty()) files.push_back(line);
    }
    return files;
}

std::optional<std::string> GitRepo::first_parent(const std::string& commit) const {
    int rc = 0;
    std::string out = run_git(path_, {"rev-parse", commit + "^"}, &rc);
    if (rc != 0) return std::nullopt;
    std::string id = trim(out);
    if (id.empty()) return std::nullopt;
    return id;
}

}  // namespace resfault
