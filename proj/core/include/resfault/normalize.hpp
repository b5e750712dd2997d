#pragma once

#include <string>
#include <string_view>

namespace resfault {

struct NormalizeResult {
    std::string text;
    bool parse_ok = true;  // false: only comment stripping was applied
};

// Anonymizes a code fragment: comments and docstrings removed, identifiers
// renamed var0,var1,... in first-occurrence order (keywords, builtins and
// dunder names preserved), string literals replaced by "str0",..., numeric
// literals by num0,..., layout re-rendered canonically. Idempotent.
NormalizeResult normalize_code(std::string_view source);

}  // namespace resfault
