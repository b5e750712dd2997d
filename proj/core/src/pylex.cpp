#include <algorithm>
#include <array>
#include <cctype>
#include <set>
#include <string>

#include "resfault/pysource.hpp"

namespace resfault::py {

namespace {

const std::set<std::string_view> kKeywords = {
    "False",  "None",   "True",    "and",    "as",     "assert", "async",
    "await",  "break",  "class",   "continue", "def",  "del",    "elif",
    "else",   "except", "finally", "for",    "from",   "global", "if",
    "import", "in",     "is",      "lambda", "nonlocal", "not",  "or",
    "pass",   "raise",  "return",  "try",    "while",  "with",   "yield"};

const std::set<std::string_view> kBuiltins = {
    "abs",        "all",        "any",       "ascii",     "bin",       "bool",
    "bytearray",  "bytes",      "callable",  "chr",       "classmethod",
    "compile",    "complex",    "delattr",   "dict",      "dir",       "divmod",
    "enumerate",  "eval",       "exec",      "filter",    "float",     "format",
    "frozenset",  "getattr",    "globals",   "hasattr",   "hash",      "hex",
    "id",         "input",      "int",       "isinstance", "issubclass",
    "iter",       "len",        "list",      "locals",    "map",       "max",
    "memoryview", "min",        "next",      "object",    "oct",       "open",
    "ord",        "pow",        "print",     "property",  "range",     "repr",
    "reversed",   "round",      "set",       "setattr",   "slice",     "sorted",
    "staticmethod", "str",      "sum",       "super",     "tuple",     "type",
    "vars",       "zip",
    "BaseException", "Exception", "ArithmeticError", "AttributeError",
    "ImportError", "IndexError", "IOError", "KeyError", "NameError",
    "NotImplementedError", "OSError", "RuntimeError", "StopIteration",
    "TypeError", "ValueError", "ZeroDivisionError", "UnicodeError", "Warning",
    "DeprecationWarning"};

// longest-match first
const std::array<std::string_view, 45> kOperators = {
    "**=", "//=", ">>=", "<<=", "...", "==", "!=", "<=", ">=", "->", ":=",
    "+=",  "-=",  "*=",  "/=",  "%=",  "@=", "&=", "|=", "^=", "**", "//",
    "<<",  ">>",  "+",   "-",   "*",   "/",  "%",  "@",  "&",  "|",  "^",
    "~",   "<",   ">",   "=",   "(",   ")",  "[",  "]",  "{",  "}",  ",",
    // ':' '.' ';' handled below to keep the array simple
};

bool ident_start(unsigned char c) { return std::isalpha(c) || c == '_' || c >= 0x80; }
bool ident_cont(unsigned char c) { return std::isalnum(c) || c == '_' || c >= 0x80; }

struct Lexer {
    std::string_view src;
    LexResult out;
    size_t pos = 0;
    int line = 1;
    int line_start_pos = 0;
    int bracket_depth = 0;
    std::vector<int> indents;
    bool at_line_start = true;

    explicit Lexer(std::string_view s) : src(s) {
        size_t nlines = 0;
        for (char c : src) {
            if (c == '\n') ++nlines;
        }
        if (!src.empty() && src.back() != '\n') ++nlines;
        out.lines.resize(nlines);
    }

    void mark_code(int from_line, int to_line) {
        for (int l = from_line; l <= to_line; ++l) {
            if (l >= 1 && static_cast<size_t>(l) <= out.lines.size())
                out.lines[l - 1].has_code = true;
        }
    }

    void push(TokKind kind, std::string text, int start_line, int end_line, int col) {
        out.tokens.push_back({kind, std::move(text), start_line, end_line, col});
    }

    char peek(size_t off = 0) const {
        return pos + off < src.size() ? src[pos + off] : '\0';
    }

    int cur_col() const { return static_cast<int>(pos) - line_start_pos; }

    void newline_bookkeeping() {
        ++line;
        line_start_pos = static_cast<int>(pos);
    }

    void error(const std::string& msg) {
        out.had_error = true;
        if (out.diagnostics.size() < 20)
            out.diagnostics.push_back("line " + std::to_string(line) + ": " + msg);
    }

    void handle_line_start() {
        // measure indentation; skip blank and comment-only lines entirely
        while (true) {
            size_t p = pos;
            int width = 0;
            while (p < src.size() && (src[p] == ' ' || src[p] == '\t')) {
                width = src[p] == '\t' ? (width / 8 + 1) * 8 : width + 1;
                ++p;
            }
            if (p >= src.size()) {
                pos = p;
                return;
            }
            if (src[p] == '\r' && p + 1 < src.size() && src[p + 1] == '\n') ++p;
            if (src[p] == '\n') {
                pos = p + 1;
                newline_bookkeeping();
                continue;
            }
            if (src[p] == '#') {
                pos = p;
                lex_comment();
                if (peek() == '\r') ++pos;
                if (peek() == '\n') {
                    ++pos;
                    newline_bookkeeping();
                }
                continue;
            }
            pos = p;
            if (indents.empty()) {
                indents.push_back(width);  // base level of the fragment
            } else if (width > indents.back()) {
                indents.push_back(width);
                push(TokKind::Indent, "", line, line, 0);
            } else {
                while (indents.size() > 1 && width < indents.back()) {
                    indents.pop_back();
                    push(TokKind::Dedent, "", line, line, 0);
                }
                if (width != indents.back()) {
                    error("inconsistent dedent");
                }
            }
            return;
        }
    }

    void lex_comment() {
        int start = line;
        int col = cur_col();
        size_t begin = pos;
        while (pos < src.size() && src[pos] != '\n') ++pos;
        std::string text(src.substr(begin, pos - begin));
        while (!text.empty() && text.back() == '\r') text.pop_back();
        push(TokKind::Comment, text, start, start, col);
        if (start >= 1 && static_cast<size_t>(start) <= out.lines.size())
            out.lines[start - 1].has_comment = true;
    }

    bool try_lex_string() {
        size_t p = pos;
        bool raw = false;
        int prefix_len = 0;
        while (prefix_len < 2 && p < src.size()) {
            char c = static_cast<char>(std::tolower(static_cast<unsigned char>(src[p])));
            if (c == 'r' || c == 'b' || c == 'u' || c == 'f') {
                if (c == 'r') raw = true;
                ++p;
                ++prefix_len;
            } else {
                break;
            }
        }
        if (p >= src.size() || (src[p] != '\'' && src[p] != '"')) return false;
        char quote = src[p];
        bool triple = (p + 2 < src.size() && src[p + 1] == quote && src[p + 2] == quote);
        int start_line = line;
        int col = cur_col();
        size_t begin = pos;
        p += triple ? 3 : 1;

        while (p < src.size()) {
            char c = src[p];
            if (c == '\\' && p + 1 < src.size()) {
                if (src[p + 1] == '\n') newline_bookkeeping_at(p + 1);
                p += 2;
                continue;
            }
            if (c == '\n') {
                if (!triple) {
                    error("unterminated string literal");
                    break;
                }
                newline_bookkeeping_at(p);
                ++p;
                continue;
            }
            if (c == quote) {
                if (!triple) {
                    ++p;
                    goto done;
                }
                if (p + 2 < src.size() && src[p + 1] == quote && src[p + 2] == quote) {
                    p += 3;
                    goto done;
                }
                ++p;
                continue;
            }
            ++p;
        }
        if (p >= src.size()) error("unterminated string literal");
    done:
        pos = p;
        std::string text(src.substr(begin, p - begin));
        push(TokKind::String, text, start_line, line, col);
        mark_code(start_line, line);
        (void)raw;
        return true;
    }

    // strings track their own newlines without emitting Newline tokens
    int pending_line_advances = 0;
    void newline_bookkeeping_at(size_t nl_pos) {
        ++line;
        line_start_pos = static_cast<int>(nl_pos) + 1;
    }

    void lex_number() {
        size_t begin = pos;
        int col = cur_col();
        if (peek() == '0' && (std::tolower(peek(1)) == 'x' || std::tolower(peek(1)) == 'o' ||
                              std::tolower(peek(1)) == 'b')) {
            pos += 2;
            while (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_') ++pos;
        } else {
            while (std::isdigit(static_cast<unsigned char>(peek())) || peek() == '_') ++pos;
            if (peek() == '.' && (std::isdigit(static_cast<unsigned char>(peek(1))) ||
                                  begin != pos)) {
                ++pos;
                while (std::isdigit(static_cast<unsigned char>(peek())) || peek() == '_') ++pos;
            }
            if (std::tolower(peek()) == 'e' &&
                (std::isdigit(static_cast<unsigned char>(peek(1))) ||
                 ((peek(1) == '+' || peek(1) == '-') &&
                  std::isdigit(static_cast<unsigned char>(peek(2)))))) {
                pos += 2;
                while (std::isdigit(static_cast<unsigned char>(peek()))) ++pos;
            }
            if (std::tolower(peek()) == 'j') ++pos;
        }
        push(TokKind::Number, std::string(src.substr(begin, pos - begin)), line, line, col);
        mark_code(line, line);
    }

    void lex_ident() {
        size_t begin = pos;
        int col = cur_col();
        while (pos < src.size() && ident_cont(static_cast<unsigned char>(src[pos]))) ++pos;
        std::string text(src.substr(begin, pos - begin));
        TokKind kind = kKeywords.count(text) ? TokKind::Keyword : TokKind::Ident;
        push(kind, std::move(text), line, line, col);
        mark_code(line, line);
    }

    void ensure_newline_token() {
        if (!out.tokens.empty() && out.tokens.back().kind != TokKind::Newline &&
            out.tokens.back().kind != TokKind::Indent &&
            out.tokens.back().kind != TokKind::Dedent) {
            push(TokKind::Newline, "", line, line, cur_col());
        }
    }

    LexResult run() {
        while (pos < src.size()) {
            if (at_line_start && bracket_depth == 0) {
                handle_line_start();
                at_line_start = false;
                if (pos >= src.size()) break;
            }
            char c = peek();
            if (c == '\r') {
                ++pos;
                continue;
            }
            if (c == '\n') {
                ++pos;
                if (bracket_depth == 0) {
                    ensure_newline_token();
                    at_line_start = true;
                }
                newline_bookkeeping();
                continue;
            }
            if (c == ' ' || c == '\t') {
                ++pos;
                continue;
            }
            if (c == '\\' && peek(1) == '\n') {
                pos += 2;
                newline_bookkeeping();
                continue;
            }
            if (c == '\\' && peek(1) == '\r' && peek(2) == '\n') {
                pos += 3;
                newline_bookkeeping();
                continue;
            }
            if (c == '#') {
                lex_comment();
                continue;
            }
            if (ident_start(static_cast<unsigned char>(c))) {
                size_t save = pos;
                // string prefix?
                if (try_lex_string()) continue;
                pos = save;
                lex_ident();
                continue;
            }
            if (c == '\'' || c == '"') {
                try_lex_string();
                continue;
            }
            if (std::isdigit(static_cast<unsigned char>(c)) ||
                (c == '.' && std::isdigit(static_cast<unsigned char>(peek(1))))) {
                lex_number();
                continue;
            }
            // operators
            {
                bool matched = false;
                for (std::string_view op : kOperators) {
                    if (op.empty()) continue;
                    if (src.substr(pos, op.size()) == op) {
                        if (op == "(" || op == "[" || op == "{") ++bracket_depth;
                        if (op == ")" || op == "]" || op == "}")
                            bracket_depth = std::max(0, bracket_depth - 1);
                        push(TokKind::Op, std::string(op), line, line, cur_col());
                        mark_code(line, line);
                        pos += op.size();
                        matched = true;
                        break;
                    }
                }
                if (matched) continue;
                if (c == ':' || c == '.' || c == ';') {
                    push(TokKind::Op, std::string(1, c), line, line, cur_col());
                    mark_code(line, line);
                    ++pos;
                    continue;
                }
                error(std::string("unexpected character '") + c + "'");
                ++pos;
            }
        }
        ensure_newline_token();
        while (indents.size() > 1) {
            indents.pop_back();
            push(TokKind::Dedent, "", line, line, 0);
        }
        push(TokKind::End, "", line, line, 0);
        return std::move(out);
    }
};

}  // namespace

bool is_python_keyword(std::string_view s) { return kKeywords.count(s) > 0; }
bool is_python_builtin(std::string_view s) { return kBuiltins.count(s) > 0; }

LexResult lex(std::string_view source) {
    Lexer lx(source);
    return lx.run();
}

}  // namespace resfault::py
