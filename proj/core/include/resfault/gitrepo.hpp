#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace resfault {

// Thin wrapper over the git CLI. Every query shells out and parses; the
// underlying history is treated as read-only.
class GitRepo {
public:
    explicit GitRepo(std::string path) : path_(std::move(path)) {}

    struct LogEntry {
        std::string commit_id;
        std::int64_t committed_at = 0;
        std::string author_name;
        std::string author_email;
        std::string message;  // subject + body
        bool is_merge = false;
        std::vector<std::string> changed_files;
        std::int64_t lines_added = 0;  // whole-commit numstat totals
        std::int64_t lines_deleted = 0;
    };

    struct FileTouch {
        std::string commit_id;
        std::string path;      // path as of that commit (renames followed)
        std::string old_path;  // pre-rename path for 'R' entries, else == path
        char status = 'M';
    };

    bool is_valid() const;

    // Full history of HEAD, ascending by (commit time, id).
    std::vector<LogEntry> log_all() const;
    std::optional<LogEntry> log_one(const std::string& commit) const;

    std::optional<std::string> show_file(const std::string& commit,
                                         const std::string& path) const;
    // Unified diff of a commit against its first parent (or the empty tree).
    std::optional<std::string> diff_of_commit(const std::string& commit) const;
    std::vector<std::pair<std::string, std::int64_t>> tags() const;
    // History of one file with rename following, newest first, starting at
    // `from_commit` (or HEAD when empty).
    std::vector<FileTouch> file_history(const std::string& path,
                                        const std::string& from_commit) const;
    std::vector<std::string> ls_files(const std::string& commit) const;
    std::optional<std::string> first_parent(const std::string& commit) const;

    const std::string& path() const { return path_; }

    static std::string run_git(const std::string& repo, const std::vector<std::string>& args,
                               int* exit_code = nullptr);

private:
    static std::vector<LogEntry> parse_log_output(const std::string& out);

    std::string path_;
};

}  // namespace resfault
