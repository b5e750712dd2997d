#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace resfault {

std::string to_lower(std::string_view s);
std::string trim(std::string_view s);
std::vector<std::string> split(std::string_view s, char sep);
std::vector<std::string> split_lines(std::string_view text);
bool starts_with(std::string_view s, std::string_view prefix);

// Word-boundary keyword match over lowercased text. A keyword matches only
// when not surrounded by [A-Za-z0-9_] on either side ("prefix" does not
// match "fix").
bool contains_keyword(std::string_view text_lower, std::string_view keyword);
bool matches_any_keyword(std::string_view text, const std::set<std::string>& keywords);

// Case-insensitive substring search.
bool icontains(std::string_view haystack, std::string_view needle);

// ISO-8601 "YYYY-MM-DDTHH:MM:SS[Z]" (or date-only) to unix seconds, UTC.
std::optional<std::int64_t> parse_iso8601(std::string_view s);

// Shortest-round-trip-ish decimal formatting used for all numeric artifact
// output; deterministic for a given value.
std::string format_double(double v);
// Full-precision form for model files (round-trips exactly).
std::string format_double_exact(double v);

std::uint64_t fnv1a64(std::string_view data);
std::uint64_t splitmix64(std::uint64_t x);
// Per-task RNG stream seed derived from (seed, task index).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace resfault
