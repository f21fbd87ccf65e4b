#pragma once

#include <map>
#include <string>
#include <vector>

#include "forstruct/common.hpp"

namespace forstruct {

// Minimal headered-CSV reader. Cells are comma-separated with no quoting;
// parse errors report the file and 1-based line number.
class CsvReader {
public:
    explicit CsvReader(const std::string& path);

    const std::vector<std::string>& header() const { return header_; }
    std::size_t n_rows() const { return rows_.size(); }
    const std::vector<std::string>& row(std::size_t i) const { return rows_[i]; }

    // Column index of a required header name.
    std::size_t column(const std::string& name) const;
    bool has_column(const std::string& name) const;

    const std::string& cell(std::size_t row, std::size_t col) const { return rows_[row][col]; }

    // Numeric cell; "NA" yields kMissing when allow_na, otherwise errors.
    double num(std::size_t row, std::size_t col, bool allow_na = false) const;

    // 1-based data line number, for diagnostics.
    std::size_t line_of(std::size_t row) const { return row + 2; }
    const std::string& path() const { return path_; }

    [[noreturn]] void fail(std::size_t row, const std::string& msg) const;

private:
    std::string path_;
    std::vector<std::string> header_;
    std::map<std::string, std::size_t> index_;
    std::vector<std::vector<std::string>> rows_;
};

// Deterministic numeric formatting shared by every writer: shortest
// round-trip form for doubles, the literal NA token for missing values.
std::string format_value(double v);

void write_text_file(const std::string& path, const std::string& content);

}  // namespace forstruct
