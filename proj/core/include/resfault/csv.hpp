#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace resfault {

// Minimal CSV with RFC-style quoting for fields containing , " or newline.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    int column(std::string_view name) const;  // -1 when absent
};

std::string csv_escape(std::string_view field);
std::string csv_join(const std::vector<std::string>& fields);
std::vector<std::string> csv_split_line(std::string_view line);

CsvTable read_csv(const std::string& path);
// Lines starting with '#' before the header are returned in `meta` if non-null.
CsvTable read_csv_text(std::string_view text, std::vector<std::string>* meta = nullptr);
void write_csv(const std::string& path, const CsvTable& table,
               const std::vector<std::string>& meta_lines = {});

std::string read_file(const std::string& path);
bool file_exists(const std::string& path);
// Atomic write: temp file in the same directory, then rename.
void write_file_atomic(const std::string& path, std::string_view content);

}  // namespace resfault
