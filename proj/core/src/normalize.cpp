#include "resfault/normalize.hpp"

#include <cctype>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "resfault/pysource.hpp"
#include "resfault/strutil.hpp"

namespace resfault {

using py::Token;
using py::TokKind;

namespace {

bool is_dunder(const std::string& s) {
    return s.size() > 4 && s.substr(0, 2) == "__" && s.substr(s.size() - 2) == "__";
}

bool is_placeholder(const std::string& s) {
    size_t base = 0;
    if (starts_with(s, "var")) base = 3;
    else if (starts_with(s, "num")) base = 3;
    else if (starts_with(s, "str")) base = 3;
    else return false;
    if (base >= s.size()) return false;
    for (size_t i = base; i < s.size(); ++i)
        if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
    return true;
}

bool preserved_ident(const std::string& s) {
    return py::is_python_builtin(s) || is_dunder(s) || is_placeholder(s);
}

bool is_opener(const std::string& t) { return t == "(" || t == "[" || t == "{"; }
bool is_closer(const std::string& t) { return t == ")" || t == "]" || t == "}"; }

const std::set<std::string> kExprHeadKeywords = {
    "return", "yield", "if",    "else",  "elif",  "and",  "or",   "not",  "in",
    "is",     "while", "assert", "lambda", "from", "import", "await", "with",
    "as",     "raise", "del",   "for"};

std::string strip_comments_only(std::string_view source, const py::LexResult& lx) {
    std::vector<std::string> lines = split_lines(source);
    for (const Token& t : lx.tokens) {
        if (t.kind != TokKind::Comment) continue;
        if (t.line >= 1 && static_cast<size_t>(t.line) <= lines.size()) {
            std::string& line = lines[static_cast<size_t>(t.line) - 1];
            if (static_cast<size_t>(t.col) <= line.size()) {
                line = line.substr(0, static_cast<size_t>(t.col));
                while (!line.empty() && (line.back() == ' ' || line.back() == '\t'))
                    line.pop_back();
            }
        }
    }
    std::string out;
    for (const auto& l : lines) {
        out += l;
        out += '\n';
    }
    return out;
}

struct Renderer {
    std::string out;
    std::string line;
    int depth = 0;
    int bracket_depth = 0;
    Token prev;
    bool has_prev = false;
    bool prev_unary = false;
    bool line_is_decorator = false;

    void flush() {
        if (!line.empty()) {
            for (int i = 0; i < depth; ++i) out += "    ";
            out += line;
            out += '\n';
        }
        line.clear();
        has_prev = false;
        prev_unary = false;
        line_is_decorator = false;
    }

    bool needs_space(const Token& cur) const {
        if (!has_prev) return false;
        const std::string& p = prev.text;
        const std::string& c = cur.text;
        if (cur.kind == TokKind::Op) {
            if (is_closer(c) || c == "," || c == ";" || c == ":" || c == ".") return false;
            if (c == "(" || c == "[") {
                bool callable_prev = prev.kind == TokKind::Ident ||
                                     prev.kind == TokKind::Number ||
                                     prev.kind == TokKind::String || is_closer(p);
                if (callable_prev) return false;
            }
            if (c == "=" && bracket_depth > 0) return false;
        }
        if (is_opener(p) || p == ".") return false;
        if (prev_unary) return false;
        if (p == "=" && bracket_depth > 0) return false;
        if (p == ":" && bracket_depth > 0) return false;
        if (p == "@" && line_is_decorator) return false;
        return true;
    }

    bool token_is_unary(const Token& cur) const {
        if (cur.kind != TokKind::Op) return false;
        const std::string& c = cur.text;
        if (c != "+" && c != "-" && c != "~" && c != "*" && c != "**") return false;
        if (!has_prev) return true;
        if (prev.kind == TokKind::Op && !is_closer(prev.text)) return true;
        if (prev.kind == TokKind::Keyword && kExprHeadKeywords.count(prev.text)) return true;
        return false;
    }

    void emit(const Token& cur) {
        if (line.empty() && cur.kind == TokKind::Op && cur.text == ";") return;
        if (line.empty() && cur.kind == TokKind::Op && cur.text == "@")
            line_is_decorator = true;
        bool unary = token_is_unary(cur);
        if (needs_space(cur)) line += ' ';
        line += cur.text;
        if (cur.kind == TokKind::Op) {
            if (is_opener(cur.text)) ++bracket_depth;
            if (is_closer(cur.text) && bracket_depth > 0) --bracket_depth;
        }
        prev = cur;
        has_prev = true;
        prev_unary = unary;
    }
};

}  // namespace

NormalizeResult normalize_code(std::string_view source) {
    py::LexResult lx = py::lex(source);
    if (lx.had_error) {
        return {strip_comments_only(source, lx), false};
    }

    // significant-token neighbors for docstring detection
    std::vector<Token> toks;
    toks.reserve(lx.tokens.size());
    for (const Token& t : lx.tokens)
        if (t.kind != TokKind::Comment) toks.push_back(t);

    auto is_boundary_before = [&](size_t i) {
        if (i == 0) return true;
        const Token& p = toks[i - 1];
        if (p.kind == TokKind::Newline || p.kind == TokKind::Indent ||
            p.kind == TokKind::Dedent)
            return true;
        return p.kind == TokKind::Op && (p.text == ";" || p.text == ":");
    };
    auto is_boundary_after = [&](size_t i) {
        if (i + 1 >= toks.size()) return true;
        const Token& nx = toks[i + 1];
        if (nx.kind == TokKind::Newline || nx.kind == TokKind::Dedent ||
            nx.kind == TokKind::End)
            return true;
        return nx.kind == TokKind::Op && nx.text == ";";
    };

    std::map<std::string, std::string> ident_map, num_map, str_map;
    Renderer r;
    for (size_t i = 0; i < toks.size(); ++i) {
        Token t = toks[i];
        switch (t.kind) {
            case TokKind::Newline:
                r.flush();
                continue;
            case TokKind::Indent:
                r.flush();
                ++r.depth;
                continue;
            case TokKind::Dedent:
                r.flush();
                r.depth = std::max(0, r.depth - 1);
                continue;
            case TokKind::End:
                r.flush();
                continue;
            case TokKind::String:
                if (is_boundary_before(i) && is_boundary_after(i)) continue;  // docstring
                if (auto it = str_map.find(t.text); it != str_map.end()) {
                    t.text = it->second;
                } else {
                    std::string ph = "\"str" + std::to_string(str_map.size()) + "\"";
                    str_map.emplace(t.text, ph);
                    t.text = ph;
                }
                break;
            case TokKind::Number:
                if (auto it = num_map.find(t.text); it != num_map.end()) {
                    t.text = it->second;
                } else {
                    std::string ph = "num" + std::to_string(num_map.size());
                    num_map.emplace(t.text, ph);
                    t.text = ph;
                }
                break;
            case TokKind::Ident:
                if (!preserved_ident(t.text)) {
                    if (auto it = ident_map.find(t.text); it != ident_map.end()) {
                        t.text = it->second;
                    } else {
                        std::string ph = "var" + std::to_string(ident_map.size());
                        ident_map.emplace(t.text, ph);
                        t.text = ph;
                    }
                }
                break;
            default:
                break;
        }
        r.emit(t);
    }
    r.flush();
    return {std::move(r.out), true};
}

}  // namespace resfault
