#include "resfault/ngram.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "resfault/errors.hpp"
#include "resfault/pysource.hpp"
#include "resfault/strutil.hpp"

namespace resfault {

namespace {

constexpr char kJoin = '\x1f';

std::string escape_token(const std::string& t) {
    std::string out;
    for (char c : t) {
        if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '%') {
            char buf[4];
            std::snprintf(buf, sizeof(buf), "%%%02X", static_cast<unsigned char>(c));
            out += buf;
        } else {
            out += c;
        }
    }
    return out;
}

std::string unescape_token(const std::string& t) {
    std::string out;
    for (size_t i = 0; i < t.size(); ++i) {
        if (t[i] == '%' && i + 2 < t.size()) {
            int v = 0;
            std::sscanf(t.substr(i + 1, 2).c_str(), "%02X", &v);
            out += static_cast<char>(v);
            i += 2;
        } else {
            out += t[i];
        }
    }
    return out;
}

}  // namespace

std::vector<std::string> tokenize_for_lm(std::string_view source) {
    std::vector<std::string> out;
    out.emplace_back(kBeginToken);
    for (const py::Token& t : py::lex(source).tokens) {
        switch (t.kind) {
            case py::TokKind::Keyword:
            case py::TokKind::Ident:
            case py::TokKind::Number:
            case py::TokKind::String:
            case py::TokKind::Op:
                out.push_back(t.text);
                break;
            default:
                break;
        }
    }
    out.emplace_back(kEndToken);
    return out;
}

std::string NgramModel::context_key(const std::vector<std::string>& context,
                                    std::size_t take) const {
    std::string key;
    size_t start = context.size() - take;
    for (size_t i = start; i < context.size(); ++i) {
        if (!key.empty()) key += kJoin;
        const std::string& tok = context[i];
        key += vocab_.count(tok) ? tok : kUnkToken;
    }
    return key;
}

NgramModel NgramModel::train(const std::vector<std::vector<std::string>>& corpus, int order,
                             double add_k) {
    if (corpus.empty()) throw InputError("ngram: corpus must be non-empty");
    if (order < 1 || order > 5) throw InputError("ngram: order must be in [1,5]");
    NgramModel m;
    m.order_ = order;
    m.k_ = add_k;
    for (const auto& tokens : corpus) {
        for (const auto& t : tokens) m.vocab_.insert(t);
    }
    for (const auto& tokens : corpus) {
        const int n = static_cast<int>(tokens.size());
        for (int i = 0; i < n; ++i) {
            for (int ctx_len = 0; ctx_len < order; ++ctx_len) {
                if (i - ctx_len < 0) break;
                std::string key;
                for (int j = i - ctx_len; j < i; ++j) {
                    if (!key.empty()) key += kJoin;
                    key += tokens[static_cast<size_t>(j)];
                }
                ++m.counts_[key][tokens[static_cast<size_t>(i)]];
                ++m.context_totals_[key];
            }
        }
    }
    return m;
}

double NgramModel::probability(const std::vector<std::string>& context,
                               const std::string& token) const {
    const std::size_t take =
        std::min<std::size_t>(context.size(), static_cast<std::size_t>(order_ - 1));
    std::string key = context_key(context, take);
    const std::string& tok = vocab_.count(token) ? token : kUnkToken;

    std::int64_t total = 0, count = 0;
    if (auto it = context_totals_.find(key); it != context_totals_.end()) total = it->second;
    if (auto it = counts_.find(key); it != counts_.end()) {
        if (auto jt = it->second.find(tok); jt != it->second.end()) count = jt->second;
    }
    const double denom = static_cast<double>(total) +
                         k_ * static_cast<double>(vocab_.size() + 1);
    if (denom <= 0) return 1.0 / static_cast<double>(vocab_.size() + 1);
    return (static_cast<double>(count) + k_) / denom;
}

double NgramModel::cross_entropy(const std::vector<std::string>& tokens) const {
    if (tokens.size() <= 1) return 0.0;
    const double cap = std::log2(static_cast<double>(vocab_.size() + 1));
    double sum = 0.0;
    int n = 0;
    for (std::size_t i = 1; i < tokens.size(); ++i) {
        std::vector<std::string> ctx(tokens.begin(), tokens.begin() + static_cast<long>(i));
        double p = probability(ctx, tokens[i]);
        double surprisal = -std::log2(p);
        sum += std::min(surprisal, cap);
        ++n;
    }
    return std::max(0.0, sum / n);
}

std::string NgramModel::serialize() const {
    std::string out = "ngram v1\n";
    out += "order " + std::to_string(order_) + "\n";
    out += "k " + format_double_exact(k_) + "\n";
    out += "vocab " + std::to_string(vocab_.size()) + "\n";
    for (const auto& v : vocab_) out += "V\t" + escape_token(v) + "\n";
    for (const auto& [ctx, nexts] : counts_) {
        std::string ctx_esc;
        for (const auto& part : split(ctx, kJoin)) {
            if (!ctx_esc.empty()) ctx_esc += ' ';
            ctx_esc += escape_token(part);
        }
        for (const auto& [tok, count] : nexts) {
            std::string gram = ctx_esc.empty() ? escape_token(tok)
                                               : ctx_esc + " " + escape_token(tok);
            out += gram + "\t" + std::to_string(count) + "\n";
        }
    }
    return out;
}

NgramModel NgramModel::deserialize(const std::string& text) {
    NgramModel m;
    auto lines = split_lines(text);
    if (lines.empty() || lines[0] != "ngram v1") throw InputError("ngram: bad model header");
    size_t i = 1;
    for (; i < lines.size(); ++i) {
        const std::string& line = lines[i];
        if (starts_with(line, "order ")) {
            m.order_ = std::atoi(line.c_str() + 6);
        } else if (starts_with(line, "k ")) {
            m.k_ = std::atof(line.c_str() + 2);
        } else if (starts_with(line, "vocab ")) {
            // size recomputed from V lines
        } else {
            break;
        }
    }
    for (; i < lines.size(); ++i) {
        const std::string& line = lines[i];
        if (line.empty()) continue;
        if (starts_with(line, "V\t")) {
            m.vocab_.insert(unescape_token(line.substr(2)));
            continue;
        }
        auto tab = line.rfind('\t');
        if (tab == std::string::npos) continue;
        std::int64_t count = std::strtoll(line.c_str() + tab + 1, nullptr, 10);
        auto parts = split(line.substr(0, tab), ' ');
        std::string key;
        for (size_t j = 0; j + 1 < parts.size(); ++j) {
            if (!key.empty()) key += kJoin;
            key += unescape_token(parts[j]);
        }
        std::string tok = unescape_token(parts.back());
        m.counts_[key][tok] = count;
        m.context_totals_[key] += count;
    }
    return m;
}

}  // namespace resfault
