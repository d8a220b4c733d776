#pragma once

#include <string>
#include <vector>

namespace chatq {

// Small CSV table with optional leading '#' comment lines.
struct Table {
    std::vector<std::string> comments;
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;

    void add_row(std::vector<std::string> row);
    std::string to_csv() const;
    // Column lookup by name; throws std::out_of_range.
    std::size_t column(const std::string& name) const;
    double number(std::size_t row, const std::string& name) const;
};

// 17 significant digits; "nan"/"inf" for non-finite values.
std::string format_real(double v);
std::string format_int(long long v);

void write_text_file(const std::string& path, const std::string& text);

} // namespace chatq
