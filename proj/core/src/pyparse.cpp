#include <map>
#include <set>

#include "resfault/pysource.hpp"
#include "resfault/strutil.hpp"

namespace resfault::py {

namespace {

const std::set<std::string_view> kCompoundKw = {"if",  "elif",  "else",    "for",  "while",
                                                "try", "except", "finally", "with", "def",
                                                "class"};

bool starts_compound(const std::vector<Token>& line) {
    if (line.empty()) return false;
    const Token& t = line[0];
    if (t.kind != TokKind::Keyword) return false;
    if (kCompoundKw.count(t.text)) return true;
    if (t.text == "async" && line.size() > 1 &&
        (line[1].text == "def" || line[1].text == "for" || line[1].text == "with"))
        return true;
    return false;
}

int bracket_delta(const Token& t) {
    if (t.kind != TokKind::Op) return 0;
    if (t.text == "(" || t.text == "[" || t.text == "{") return 1;
    if (t.text == ")" || t.text == "]" || t.text == "}") return -1;
    return 0;
}

struct Parser {
    std::vector<Token> toks;  // comments stripped
    size_t i = 0;

    const Token& cur() const { return toks[i]; }
    bool at(TokKind k) const { return cur().kind == k; }

    std::vector<Token> read_logical_line() {
        std::vector<Token> line;
        while (!at(TokKind::Newline) && !at(TokKind::End)) {
            if (at(TokKind::Indent) || at(TokKind::Dedent)) break;  // malformed
            line.push_back(cur());
            ++i;
        }
        if (at(TokKind::Newline)) ++i;
        return line;
    }

    static void split_simple(const std::vector<Token>& tokens, size_t from, size_t to,
                             std::vector<Stmt>& out) {
        int depth = 0;
        size_t start = from;
        for (size_t k = from; k <= to; ++k) {
            bool at_end = k == to;
            if (!at_end) depth += bracket_delta(tokens[k]);
            if (at_end || (depth == 0 && tokens[k].kind == TokKind::Op && tokens[k].text == ";")) {
                size_t end = at_end ? to : k;
                if (end > start) {
                    Stmt s;
                    s.head.assign(tokens.begin() + static_cast<long>(start),
                                  tokens.begin() + static_cast<long>(end));
                    s.compound = false;
                    s.start_line = s.head.front().line;
                    s.end_line = s.head.back().end_line;
                    out.push_back(std::move(s));
                }
                start = k + 1;
            }
        }
    }

    std::vector<Stmt> parse_suite() {
        std::vector<Stmt> stmts;
        while (true) {
            if (at(TokKind::End)) return stmts;
            if (at(TokKind::Newline)) {
                ++i;
                continue;
            }
            if (at(TokKind::Dedent)) {
                ++i;
                return stmts;
            }
            if (at(TokKind::Indent)) {
                // block opened by a construct we did not model (soft keywords
                // like match/case); attach to the previous statement
                ++i;
                auto inner = parse_suite();
                if (!stmts.empty()) {
                    Stmt& prev = stmts.back();
                    prev.compound = true;
                    for (auto& s : inner) prev.body.push_back(std::move(s));
                    if (!prev.body.empty())
                        prev.end_line = std::max(prev.end_line, prev.body.back().end_line);
                } else {
                    for (auto& s : inner) stmts.push_back(std::move(s));
                }
                continue;
            }
            parse_line(stmts);
        }
    }

    void parse_line(std::vector<Stmt>& stmts) {
        std::vector<Token> line = read_logical_line();
        if (line.empty()) return;
        if (!starts_compound(line)) {
            split_simple(line, 0, line.size(), stmts);
            return;
        }
        // locate the suite colon at bracket depth 0
        int depth = 0;
        size_t colon = line.size();
        for (size_t k = 0; k < line.size(); ++k) {
            depth += bracket_delta(line[k]);
            if (depth == 0 && line[k].kind == TokKind::Op && line[k].text == ":") {
                colon = k;
                break;
            }
        }
        if (colon == line.size()) {  // malformed compound; keep as simple
            split_simple(line, 0, line.size(), stmts);
            return;
        }
        Stmt s;
        s.compound = true;
        s.head.assign(line.begin(), line.begin() + static_cast<long>(colon) + 1);
        s.start_line = s.head.front().line;
        s.end_line = s.head.back().end_line;
        if (colon + 1 < line.size()) {
            split_simple(line, colon + 1, line.size(), s.body);
        } else if (at(TokKind::Indent)) {
            ++i;
            s.body = parse_suite();
        }
        if (!s.body.empty()) s.end_line = std::max(s.end_line, s.body.back().end_line);
        stmts.push_back(std::move(s));
    }
};

std::vector<std::string> extract_params(const std::vector<Token>& head) {
    std::vector<std::string> params;
    int depth = 0;
    size_t open = head.size();
    for (size_t k = 0; k < head.size(); ++k) {
        if (head[k].kind == TokKind::Op && head[k].text == "(") {
            open = k;
            break;
        }
    }
    if (open == head.size()) return params;
    // pieces between top-level commas inside (...)
    size_t k = open;
    depth = 0;
    std::vector<std::vector<const Token*>> pieces(1);
    for (; k < head.size(); ++k) {
        int d = bracket_delta(head[k]);
        depth += d;
        if (depth == 0 && d == -1) break;  // closing ')'
        if (k == open) continue;
        if (depth == 1 && head[k].kind == TokKind::Op && head[k].text == ",") {
            pieces.emplace_back();
        } else {
            pieces.back().push_back(&head[k]);
        }
    }
    for (const auto& piece : pieces) {
        for (const Token* t : piece) {
            if (t->kind == TokKind::Op && (t->text == "*" || t->text == "**")) continue;
            if (t->kind == TokKind::Op && t->text == "/") break;  // positional marker
            if (t->kind == TokKind::Ident) {
                params.push_back(t->text);
            }
            break;  // stop at first non-star token (annotation/default follow)
        }
    }
    return params;
}

std::vector<std::string> extract_bases(const std::vector<Token>& head) {
    std::vector<std::string> bases;
    size_t open = head.size();
    for (size_t k = 0; k < head.size(); ++k) {
        if (head[k].kind == TokKind::Op && head[k].text == "(") {
            open = k;
            break;
        }
    }
    if (open == head.size()) return bases;
    int depth = 0;
    std::vector<std::vector<const Token*>> pieces(1);
    for (size_t k = open; k < head.size(); ++k) {
        int d = bracket_delta(head[k]);
        depth += d;
        if (depth == 0 && d == -1) break;
        if (k == open) continue;
        if (depth == 1 && head[k].kind == TokKind::Op && head[k].text == ",") {
            pieces.emplace_back();
        } else {
            pieces.back().push_back(&head[k]);
        }
    }
    for (const auto& piece : pieces) {
        if (piece.empty()) continue;
        bool has_eq = false;
        for (const Token* t : piece) {
            if (t->kind == TokKind::Op && t->text == "=") has_eq = true;
        }
        if (has_eq) continue;  // metaclass=... and other keyword args
        if (piece[0]->kind == TokKind::Op && (piece[0]->text == "*" || piece[0]->text == "**"))
            continue;
        std::string name;
        for (const Token* t : piece) {
            if (t->kind == TokKind::Ident || t->kind == TokKind::Keyword ||
                (t->kind == TokKind::Op && t->text == ".")) {
                name += t->text;
            } else {
                break;  // subscripts like Generic[T] end the dotted name
            }
        }
        if (!name.empty()) bases.push_back(name);
    }
    return bases;
}

std::string slice_lines(const std::vector<std::string>& lines, int start, int end) {
    std::string out;
    for (int l = start; l <= end && l >= 1 && static_cast<size_t>(l) <= lines.size(); ++l) {
        out += lines[static_cast<size_t>(l) - 1];
        out += '\n';
    }
    return out;
}

void collect_units(const std::vector<Stmt>& stmts, const std::string& prefix,
                   const std::vector<std::string>& lines,
                   std::map<std::string, int>& used_methods,
                   std::map<std::string, int>& used_classes,
                   std::vector<SyntaxUnit>& out) {
    for (const Stmt& s : stmts) {
        std::string_view kw = s.head_kw();
        if (kw == "def" || kw == "class") {
            bool is_def = kw == "def";
            std::string name;
            for (size_t k = 0; k < s.head.size(); ++k) {
                if (s.head[k].kind == TokKind::Keyword &&
                    (s.head[k].text == "def" || s.head[k].text == "class")) {
                    if (k + 1 < s.head.size() && s.head[k + 1].kind == TokKind::Ident)
                        name = s.head[k + 1].text;
                    break;
                }
            }
            if (name.empty()) continue;
            SyntaxUnit unit;
            unit.kind = is_def ? UnitKind::Method : UnitKind::Class;
            unit.name = name;
            std::string qualified = prefix.empty() ? name : prefix + "." + name;
            auto& used = is_def ? used_methods : used_classes;
            int n = ++used[qualified];
            unit.qualified_name = n > 1 ? qualified + "#" + std::to_string(n) : qualified;
            unit.start_line = s.start_line;
            unit.end_line = s.end_line;
            unit.body_text = slice_lines(lines, s.start_line, s.end_line);
            if (is_def)
                unit.params = extract_params(s.head);
            else
                unit.bases = extract_bases(s.head);
            collect_units(s.body, qualified, lines, used_methods, used_classes, unit.children);
            out.push_back(std::move(unit));
        } else {
            collect_units(s.body, prefix, lines, used_methods, used_classes, out);
        }
    }
}

}  // namespace

ParseResult parse_source(std::string_view source) {
    ParseResult result;
    result.lex = lex(source);

    Parser parser;
    parser.toks.reserve(result.lex.tokens.size());
    for (const Token& t : result.lex.tokens) {
        if (t.kind != TokKind::Comment) parser.toks.push_back(t);
    }
    result.statements = parser.parse_suite();

    std::vector<std::string> lines = split_lines(source);
    result.root.kind = UnitKind::File;
    result.root.start_line = 1;
    result.root.end_line = static_cast<int>(lines.size());
    result.root.body_text = std::string(source);
    result.root.parse_error = result.lex.had_error;

    std::map<std::string, int> used_methods, used_classes;
    collect_units(result.statements, "", lines, used_methods, used_classes,
                  result.root.children);
    return result;
}

namespace {
void walk_units(const SyntaxUnit& u, std::vector<const SyntaxUnit*>& out) {
    out.push_back(&u);
    for (const auto& c : u.children) walk_units(c, out);
}
}  // namespace

std::vector<const SyntaxUnit*> all_units(const SyntaxUnit& root) {
    std::vector<const SyntaxUnit*> out;
    walk_units(root, out);
    return out;
}

const SyntaxUnit* find_unit(const SyntaxUnit& root, UnitKind kind, std::string_view qualified) {
    for (const SyntaxUnit* u : all_units(root)) {
        if (u->kind == kind && u->qualified_name == qualified) return u;
    }
    return nullptr;
}

}  // namespace resfault::py
