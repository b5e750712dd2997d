#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace resfault::py {

enum class TokKind { Keyword, Ident, Number, String, Op, Newline, Indent, Dedent, Comment, End };

struct Token {
    TokKind kind = TokKind::End;
    std::string text;
    int line = 0;      // 1-based; first line of the token
    int end_line = 0;  // last line (strings may span several)
    int col = 0;       // 0-based byte offset within the first line
};

// Per physical line; blank = neither code nor comment.
struct LineInfo {
    bool has_code = false;
    bool has_comment = false;
};

struct LexResult {
    std::vector<Token> tokens;
    std::vector<LineInfo> lines;  // index 0 = line 1
    bool had_error = false;
    std::vector<std::string> diagnostics;
};

bool is_python_keyword(std::string_view s);
bool is_python_builtin(std::string_view s);

// Indentation-aware lexer. The indentation of the first code line is taken
// as the base level, so an indented method body lexes standalone.
LexResult lex(std::string_view source);

// One statement in the structural tree. Compound statements keep their
// header tokens (through the trailing ':') in `head` and the suite in
// `body`; elif/else/except/finally arms are siblings of the opening
// statement, grouped again by the metric passes.
struct Stmt {
    std::vector<Token> head;
    std::vector<Stmt> body;
    bool compound = false;
    int start_line = 0;
    int end_line = 0;

    std::string_view head_kw() const {
        if (head.empty()) return {};
        if (head[0].text == "async" && head.size() > 1) return head[1].text;
        return head[0].text;
    }
};

enum class UnitKind { Method, Class, File };

struct SyntaxUnit {
    UnitKind kind = UnitKind::File;
    std::string name;
    std::string qualified_name;  // dotted path within the file; "" for the root
    int start_line = 1;
    int end_line = 0;
    std::string body_text;  // source slice covering the span (incl. header)
    std::vector<SyntaxUnit> children;
    std::vector<std::string> params;  // Method: declared parameter names
    std::vector<std::string> bases;   // Class: base names as written
    bool parse_error = false;         // set on the File root when lexing had errors
};

struct ParseResult {
    SyntaxUnit root;
    std::vector<Stmt> statements;
    LexResult lex;
};

ParseResult parse_source(std::string_view source);

// Pre-order walk, root first.
std::vector<const SyntaxUnit*> all_units(const SyntaxUnit& root);
const SyntaxUnit* find_unit(const SyntaxUnit& root, UnitKind kind, std::string_view qualified);

}  // namespace resfault::py
