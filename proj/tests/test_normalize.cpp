#include <doctest.h>

#include "resfault/normalize.hpp"

using namespace resfault;

TEST_CASE("normalize rewrites identifiers and literals") {
    NormalizeResult r = normalize_code("def area(r): return 3.14 * r\n");
    CHECK(r.parse_ok);
    CHECK(r.text == "def var0(var1): return num0 * var1\n");
}

TEST_CASE("normalize is idempotent") {
    const char* samples[] = {
        "def area(r): return 3.14 * r\n",
        "def f(a, b=2):\n    s = 'label'\n    return a + b\n",
        "class A:\n    def m(self):\n        # comment\n        return self.x * 10\n",
        "x = [i for i in range(5) if i > 2]\n",
    };
    for (const char* s : samples) {
        NormalizeResult once = normalize_code(s);
        NormalizeResult twice = normalize_code(once.text);
        CHECK(once.parse_ok);
        CHECK(once.text == twice.text);
    }
}

TEST_CASE("alpha-equivalent methods normalize identically") {
    const char* a =
        "def mean(values):\n"
        "    total = 0\n"
        "    for v in values:\n"
        "        total += v\n"
        "    return total / len(values)\n";
    const char* b =
        "def avg(xs):\n"
        "    acc = 0\n"
        "    for item in xs:\n"
        "        acc += item\n"
        "    return acc / len(xs)\n";
    CHECK(normalize_code(a).text == normalize_code(b).text);
}

TEST_CASE("comments and docstrings are removed") {
    const char* src =
        "def f():\n"
        "    \"\"\"Docstring.\"\"\"\n"
        "    # a comment\n"
        "    return 1  # trailing\n";
    NormalizeResult r = normalize_code(src);
    CHECK(r.text.find("Docstring") == std::string::npos);
    CHECK(r.text.find("#") == std::string::npos);
    CHECK(r.text.find("comment") == std::string::npos);
}

TEST_CASE("keywords and builtins survive") {
    NormalizeResult r = normalize_code("def f(items):\n    return len(items)\n");
    CHECK(r.text.find("len(") != std::string::npos);
    CHECK(r.text.find("return") != std::string::npos);
    CHECK(r.text.find("items") == std::string::npos);
}

TEST_CASE("repeated literals share a placeholder") {
    NormalizeResult r = normalize_code("a = 3.5\nb = 3.5\nc = 7\n");
    CHECK(r.text ==
          "var0 = num0\n"
          "var1 = num0\n"
          "var2 = num1\n");
}

TEST_CASE("string literals become quoted placeholders") {
    NormalizeResult r = normalize_code("name = 'bob'\nother = \"sue\"\n");
    CHECK(r.text ==
          "var0 = \"str0\"\n"
          "var1 = \"str1\"\n");
}

TEST_CASE("lex failure falls back to comment stripping") {
    NormalizeResult r = normalize_code("x = 'open\ny = 2  # note\n");
    CHECK_FALSE(r.parse_ok);
    CHECK(r.text.find("# note") == std::string::npos);
    CHECK(r.text.find("y = 2") != std::string::npos);
}

TEST_CASE("indentation is canonicalized") {
    NormalizeResult r = normalize_code("def f(x):\n  if x:\n          return 1\n  return 2\n");
    CHECK(r.text ==
          "def var0(var1):\n"
          "    if var1:\n"
          "        return num0\n"
          "    return num1\n");
}
