#include "resfault/process_metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "resfault/pysource.hpp"
#include "resfault/strutil.hpp"

namespace resfault {

namespace {

constexpr double kSecondsPerDay = 86400.0;

bool is_blank_or_comment(const std::string& line) {
    for (char c : line) {
        if (c == ' ' || c == '\t') continue;
        return c == '#';
    }
    return true;
}

struct Span {
    int start = 0, end = -1;  // 1-based inclusive; invalid when end < start
    bool valid() const { return end >= start && start > 0; }
    bool contains(int line) const { return valid() && line >= start && line <= end; }
    int size() const { return valid() ? end - start + 1 : 0; }
};

Span method_span(const std::string& content, const std::string& qualified) {
    py::ParseResult pr = py::parse_source(content);
    const py::SyntaxUnit* u = py::find_unit(pr.root, py::UnitKind::Method, qualified);
    if (!u) return {};
    return {u->start_line, u->end_line};
}

}  // namespace

LineDiff diff_line_numbers(const std::vector<std::string>& old_lines,
                           const std::vector<std::string>& new_lines) {
    LineDiff out;
    size_t pre = 0;
    while (pre < old_lines.size() && pre < new_lines.size() &&
           old_lines[pre] == new_lines[pre])
        ++pre;
    size_t suf = 0;
    while (suf + pre < old_lines.size() && suf + pre < new_lines.size() &&
           old_lines[old_lines.size() - 1 - suf] == new_lines[new_lines.size() - 1 - suf])
        ++suf;

    const size_t n = old_lines.size() - pre - suf;
    const size_t m = new_lines.size() - pre - suf;

    if (n == 0 || m == 0 || n * m > 16'000'000) {
        // no overlap worth aligning (or the middle is too large): treat the
        // whole middle as replaced
        for (size_t i = 0; i < n; ++i) out.deleted_old.push_back(static_cast<int>(pre + i + 1));
        for (size_t j = 0; j < m; ++j) out.added_new.push_back(static_cast<int>(pre + j + 1));
        return out;
    }

    // LCS over the trimmed middle
    std::vector<std::vector<int>> dp(n + 1, std::vector<int>(m + 1, 0));
    for (size_t i = n; i-- > 0;) {
        for (size_t j = m; j-- > 0;) {
            if (old_lines[pre + i] == new_lines[pre + j])
                dp[i][j] = dp[i + 1][j + 1] + 1;
            else
                dp[i][j] = std::max(dp[i + 1][j], dp[i][j + 1]);
        }
    }
    size_t i = 0, j = 0;
    while (i < n && j < m) {
        if (old_lines[pre + i] == new_lines[pre + j]) {
            ++i;
            ++j;
        } else if (dp[i + 1][j] >= dp[i][j + 1]) {
            out.deleted_old.push_back(static_cast<int>(pre + i + 1));
            ++i;
        } else {
            out.added_new.push_back(static_cast<int>(pre + j + 1));
            ++j;
        }
    }
    while (i < n) out.deleted_old.push_back(static_cast<int>(pre + i++ + 1));
    while (j < m) out.added_new.push_back(static_cast<int>(pre + j++ + 1));
    return out;
}

HistorySlice build_history_slice(const GitRepo& repo, const std::string& file_path,
                                 const std::string& qualified_name,
                                 const std::string& cutoff_commit) {
    HistorySlice slice;
    slice.file_path = file_path;
    slice.qualified_name = qualified_name;
    slice.cutoff_commit = cutoff_commit;

    auto cutoff_meta = repo.log_one(cutoff_commit);
    if (!cutoff_meta) return slice;
    slice.cutoff = cutoff_meta->committed_at;

    if (auto content = repo.show_file(cutoff_commit, file_path)) {
        slice.method_loc_at_cutoff = method_span(*content, qualified_name).size();
    }

    auto file_touches = repo.file_history(file_path, cutoff_commit);
    slice.file_commit_count = static_cast<std::int64_t>(file_touches.size());

    for (const auto& ft : file_touches) {
        auto meta = repo.log_one(ft.commit_id);
        if (!meta) continue;
        if (meta->committed_at > slice.cutoff) continue;

        auto new_content = repo.show_file(ft.commit_id, ft.path);
        if (!new_content) continue;
        Span new_span = method_span(*new_content, qualified_name);
        if (!new_span.valid()) continue;  // method not present in this revision

        std::vector<std::string> new_lines = split_lines(*new_content);
        std::vector<std::string> old_lines;
        Span old_span;
        if (auto parent = repo.first_parent(ft.commit_id)) {
            if (auto old_content = repo.show_file(*parent, ft.old_path)) {
                old_lines = split_lines(*old_content);
                old_span = method_span(*old_content, qualified_name);
            }
        }

        LineDiff diff = diff_line_numbers(old_lines, new_lines);
        std::int64_t added = 0, deleted = 0, stmts = 0;
        for (int ln : diff.added_new) {
            if (!new_span.contains(ln)) continue;
            ++added;
            if (!is_blank_or_comment(new_lines[static_cast<size_t>(ln) - 1])) ++stmts;
        }
        for (int ln : diff.deleted_old) {
            if (!old_span.contains(ln)) continue;
            ++deleted;
            if (!is_blank_or_comment(old_lines[static_cast<size_t>(ln) - 1])) ++stmts;
        }
        if (added + deleted == 0) continue;  // file changed, method untouched

        Touch t;
        t.commit_id = ft.commit_id;
        t.timestamp = meta->committed_at;
        t.author_id = to_lower(trim(meta->author_name)) + " <" +
                      to_lower(trim(meta->author_email)) + ">";
        t.author_name = meta->author_name;
        t.lines_added = added;
        t.lines_deleted = deleted;
        t.statements_modified = stmts;
        t.message = meta->message;
        t.commit_lines_added = meta->lines_added;
        t.commit_lines_deleted = meta->lines_deleted;
        t.commit_files = meta->changed_files;
        slice.touches.push_back(std::move(t));
    }

    std::sort(slice.touches.begin(), slice.touches.end(), [](const Touch& a, const Touch& b) {
        if (a.timestamp != b.timestamp) return a.timestamp < b.timestamp;
        return a.commit_id < b.commit_id;
    });
    if (slice.touches.empty()) {  // method never found before the cutoff
        slice.file_commit_count = 0;
        slice.method_loc_at_cutoff = 0;
    }
    return slice;
}

void temporal_metrics(const HistorySlice& slice, const std::set<std::string>& fix_keywords,
                      ProcessMetrics* out) {
    if (slice.touches.empty()) return;
    out->age = static_cast<double>(slice.cutoff - slice.touches.front().timestamp) /
               kSecondsPerDay;
    int fc = 0;
    for (const auto& t : slice.touches) {
        if (matches_any_keyword(t.message, fix_keywords)) ++fc;
    }
    out->fc = fc;
    out->bd = fc / std::max(1.0, slice.method_loc_at_cutoff);
}

void churn_metrics(const HistorySlice& slice, ProcessMetrics* out) {
    double total = 0, maxc = 0, tms = 0;
    for (const auto& t : slice.touches) {
        double churn = static_cast<double>(t.lines_added + t.lines_deleted);
        total += churn;
        maxc = std::max(maxc, churn);
        tms += static_cast<double>(t.statements_modified);
    }
    out->tcch = total;
    out->mcch = maxc;
    out->acch = total / std::max<std::size_t>(1, slice.touches.size());
    out->tms = tms;
}

void commit_metrics(const HistorySlice& slice, ProcessMetrics* out) {
    out->tc = static_cast<double>(slice.file_commit_count);
    out->cmc = static_cast<double>(slice.touches.size());
    double max_net = 0, sum_net = 0, tcc = 0, cca = 0, ccd = 0;
    std::set<std::vector<std::string>> patterns;
    for (const auto& t : slice.touches) {
        double net = std::abs(static_cast<double>(t.commit_lines_added) -
                              static_cast<double>(t.commit_lines_deleted));
        max_net = std::max(max_net, net);
        sum_net += net;
        tcc += static_cast<double>(t.commit_lines_added + t.commit_lines_deleted);
        cca += static_cast<double>(t.commit_lines_added);
        ccd += static_cast<double>(t.commit_lines_deleted);
        std::vector<std::string> files = t.commit_files;
        std::sort(files.begin(), files.end());
        patterns.insert(std::move(files));
    }
    out->mclc = max_net;
    out->aclc = slice.touches.empty() ? 0 : sum_net / static_cast<double>(slice.touches.size());
    out->tcc = tcc;
    out->cca = cca;
    out->ccd = ccd;
    out->cpc = static_cast<double>(slice.touches.empty() ? 0 : patterns.size());
}

void method_churn_metrics(const HistorySlice& slice, ProcessMetrics* out) {
    double mca = 0, mcd = 0, max_net = 0, sum_net = 0;
    for (const auto& t : slice.touches) {
        mca += static_cast<double>(t.lines_added);
        mcd += static_cast<double>(t.lines_deleted);
        double net = std::abs(static_cast<double>(t.lines_added) -
                              static_cast<double>(t.lines_deleted));
        max_net = std::max(max_net, net);
        sum_net += net;
    }
    out->mca = mca;
    out->mcd = mcd;
    out->tmc = mca + mcd;
    out->amlc = slice.touches.empty() ? 0 : sum_net / static_cast<double>(slice.touches.size());
    out->mmlc = max_net;
}

void developer_metrics(const HistorySlice& slice, ProcessMetrics* out) {
    if (slice.touches.empty()) return;
    struct AuthorAgg {
        int touches = 0;
        std::int64_t first_ts = 0, last_ts = 0;
    };
    std::map<std::string, AuthorAgg> authors;
    std::set<std::string> names;
    double tcch = 0;
    for (const auto& t : slice.touches) {
        auto& a = authors[t.author_id];
        if (a.touches == 0) {
            a.first_ts = t.timestamp;
            a.last_ts = t.timestamp;
        }
        ++a.touches;
        a.first_ts = std::min(a.first_ts, t.timestamp);
        a.last_ts = std::max(a.last_ts, t.timestamp);
        names.insert(t.author_name);
        tcch += static_cast<double>(t.lines_added + t.lines_deleted);
    }
    const double da = static_cast<double>(authors.size());
    out->da = da;
    out->dcn = static_cast<double>(names.size());
    out->aca = static_cast<double>(slice.touches.size()) / da;
    out->acca = tcch / da;

    // experience: 0.4 share of touches + 0.3 active span over AGE
    //           + 0.3 recency decay with a one-year constant
    double age_days = static_cast<double>(slice.cutoff - slice.touches.front().timestamp) /
                      kSecondsPerDay;
    double sum = 0;
    for (const auto& [id, a] : authors) {
        double share = static_cast<double>(a.touches) /
                       static_cast<double>(slice.touches.size());
        double span_days = static_cast<double>(a.last_ts - a.first_ts) / kSecondsPerDay;
        double span_frac = age_days > 0 ? span_days / age_days : 0.0;
        double recency_days = static_cast<double>(slice.cutoff - a.last_ts) / kSecondsPerDay;
        sum += 0.4 * share + 0.3 * span_frac + 0.3 * std::exp(-recency_days / 365.0);
    }
    out->ade = sum / da;
}

ProcessMetrics process_metrics(const HistorySlice& slice,
                               const std::set<std::string>& fix_keywords) {
    ProcessMetrics m;
    temporal_metrics(slice, fix_keywords, &m);
    churn_metrics(slice, &m);
    commit_metrics(slice, &m);
    method_churn_metrics(slice, &m);
    developer_metrics(slice, &m);
    return m;
}

std::vector<double> process_vector(const ProcessMetrics& m) {
    return {m.age,  m.bd,   m.fc,   m.acch, m.mcch, m.tcch, m.tms,  m.tc,  m.cmc,
            m.mclc, m.aclc, m.tcc,  m.cca,  m.ccd,  m.cpc,  m.mca,  m.mcd, m.tmc,
            m.amlc, m.mmlc, m.da,   m.ade,  m.dcn,  m.aca,  m.acca};
}

}  // namespace resfault
