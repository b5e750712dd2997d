#include <doctest.h>

#include "resfault/pysource.hpp"

using namespace resfault;
using py::TokKind;

namespace {
std::vector<py::Token> code_tokens(const std::string& src) {
    std::vector<py::Token> out;
    for (const auto& t : py::lex(src).tokens) {
        switch (t.kind) {
            case TokKind::Keyword:
            case TokKind::Ident:
            case TokKind::Number:
            case TokKind::String:
            case TokKind::Op:
                out.push_back(t);
                break;
            default:
                break;
        }
    }
    return out;
}
}  // namespace

TEST_CASE("lexer basics") {
    auto toks = code_tokens("x = 1 + 2.5\n");
    REQUIRE(toks.size() == 5);
    CHECK(toks[0].kind == TokKind::Ident);
    CHECK(toks[1].text == "=");
    CHECK(toks[2].kind == TokKind::Number);
    CHECK(toks[4].text == "2.5");
}

TEST_CASE("lexer strings and comments") {
    auto lx = py::lex("s = 'it''s'  # trailing\n# full line\nt = \"\"\"multi\nline\"\"\"\n");
    int strings = 0, comments = 0;
    for (const auto& t : lx.tokens) {
        if (t.kind == TokKind::String) ++strings;
        if (t.kind == TokKind::Comment) ++comments;
    }
    CHECK(strings == 3);
    CHECK(comments == 2);
    REQUIRE(lx.lines.size() == 4);
    CHECK(lx.lines[0].has_code);
    CHECK(lx.lines[0].has_comment);
    CHECK_FALSE(lx.lines[1].has_code);
    CHECK(lx.lines[1].has_comment);
    CHECK(lx.lines[3].has_code);  // continuation of the triple-quoted string
}

TEST_CASE("lexer raw and prefixed strings") {
    auto toks = code_tokens("p = r'\\d+'\nq = f\"v={x}\"\nb = rb'\\x00'\n");
    int strings = 0;
    for (const auto& t : toks)
        if (t.kind == TokKind::String) ++strings;
    CHECK(strings == 3);
}

TEST_CASE("lexer brackets suppress newlines") {
    auto pr = py::parse_source("x = [1,\n     2,\n     3]\ny = 4\n");
    REQUIRE(pr.statements.size() == 2);
    CHECK(pr.statements[0].start_line == 1);
    CHECK(pr.statements[0].end_line == 3);
}

TEST_CASE("lexer line continuation") {
    auto pr = py::parse_source("total = 1 + \\\n    2\n");
    REQUIRE(pr.statements.size() == 1);
    CHECK(pr.statements[0].end_line == 2);
}

TEST_CASE("lexer flags bad input without crashing") {
    auto lx = py::lex("x = 'unterminated\ny = 1$\n");
    CHECK(lx.had_error);
}

TEST_CASE("parse minimal units") {
    auto pr = py::parse_source("def f():\n    return 1\n");
    auto units = py::all_units(pr.root);
    REQUIRE(units.size() == 2);  // file + method
    CHECK(units[1]->kind == py::UnitKind::Method);
    CHECK(units[1]->qualified_name == "f");

    auto pr2 = py::parse_source("class A:\n    def m(self):\n        pass\n");
    const py::SyntaxUnit* a = py::find_unit(pr2.root, py::UnitKind::Class, "A");
    REQUIRE(a != nullptr);
    REQUIRE(a->children.size() == 1);
    CHECK(a->children[0].qualified_name == "A.m");
    CHECK(a->children[0].params == std::vector<std::string>{"self"});
}

TEST_CASE("parse fixture with 3 classes and 7 methods") {
    const char* src =
        "class A:\n"
        "    def a1(self):\n"
        "        pass\n"
        "    def a2(self):\n"
        "        pass\n"
        "\n"
        "class B(A):\n"
        "    def b1(self):\n"
        "        pass\n"
        "    def b2(self, x):\n"
        "        def inner():\n"
        "            return x\n"
        "        return inner\n"
        "\n"
        "class C:\n"
        "    def c1(self):\n"
        "        pass\n"
        "\n"
        "def free():\n"
        "    pass\n";
    auto pr = py::parse_source(src);
    int classes = 0, methods = 0;
    for (const auto* u : py::all_units(pr.root)) {
        if (u->kind == py::UnitKind::Class) ++classes;
        if (u->kind == py::UnitKind::Method) ++methods;
    }
    CHECK(classes == 3);
    CHECK(methods == 7);
    const py::SyntaxUnit* inner = py::find_unit(pr.root, py::UnitKind::Method, "B.b2.inner");
    REQUIRE(inner != nullptr);
    CHECK(inner->start_line == 11);
    CHECK(inner->end_line == 12);
    const py::SyntaxUnit* b = py::find_unit(pr.root, py::UnitKind::Class, "B");
    REQUIRE(b != nullptr);
    CHECK(b->bases == std::vector<std::string>{"A"});
}

TEST_CASE("parse inline suites and semicolons") {
    auto pr = py::parse_source("if x: a = 1; b = 2\nelse: c = 3\n");
    REQUIRE(pr.statements.size() == 2);
    CHECK(pr.statements[0].compound);
    CHECK(pr.statements[0].body.size() == 2);
    CHECK(pr.statements[1].head_kw() == "else");
}

TEST_CASE("parse async def") {
    auto pr = py::parse_source("async def fetch(url):\n    return url\n");
    const py::SyntaxUnit* u = py::find_unit(pr.root, py::UnitKind::Method, "fetch");
    REQUIRE(u != nullptr);
    CHECK(u->params == std::vector<std::string>{"url"});
}

TEST_CASE("duplicate qualified names stay unique per kind") {
    auto pr = py::parse_source(
        "def f():\n    pass\n"
        "def f():\n    pass\n");
    auto units = py::all_units(pr.root);
    REQUIRE(units.size() == 3);
    CHECK(units[1]->qualified_name != units[2]->qualified_name);
}

TEST_CASE("decorators and default args parse around the unit") {
    auto pr = py::parse_source(
        "@wrap(option=1)\n"
        "def g(a, b=2, *args, **kwargs):\n"
        "    return a\n");
    const py::SyntaxUnit* g = py::find_unit(pr.root, py::UnitKind::Method, "g");
    REQUIRE(g != nullptr);
    CHECK(g->params == std::vector<std::string>{"a", "b", "args", "kwargs"});
    CHECK(g->start_line == 2);  // span starts at the def line
}
