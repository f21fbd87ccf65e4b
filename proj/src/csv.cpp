#include "forstruct/csv.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace forstruct {

namespace {

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

}  // namespace

CsvReader::CsvReader(const std::string& path) : path_(path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    std::string line;
    if (!std::getline(in, line)) throw IoError(path + ": empty file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    header_ = split_line(line);
    for (std::size_t i = 0; i < header_.size(); ++i) index_[header_[i]] = i;

    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto cells = split_line(line);
        if (cells.size() != header_.size()) {
            throw IoError(path + ":" + std::to_string(line_no) + ": expected " +
                          std::to_string(header_.size()) + " cells, got " +
                          std::to_string(cells.size()));
        }
        rows_.push_back(std::move(cells));
    }
}

std::size_t CsvReader::column(const std::string& name) const {
    const auto it = index_.find(name);
    if (it == index_.end()) throw IoError(path_ + ": missing required column '" + name + "'");
    return it->second;
}

bool CsvReader::has_column(const std::string& name) const { return index_.count(name) > 0; }

double CsvReader::num(std::size_t row, std::size_t col, bool allow_na) const {
    const std::string& s = rows_[row][col];
    if (s == "NA") {
        if (allow_na) return kMissing;
        fail(row, "unexpected NA in column '" + header_[col] + "'");
    }
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
        fail(row, "cannot parse '" + s + "' in column '" + header_[col] + "' as a number");
    }
    return v;
}

void CsvReader::fail(std::size_t row, const std::string& msg) const {
    throw IoError(path_ + ":" + std::to_string(line_of(row)) + ": " + msg);
}

std::string format_value(double v) {
    if (is_missing(v)) return "NA";
    char buf[40];
    // fewest digits (from 15) that still round-trip
    for (int prec = 15; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof buf, "%.*g", prec, v);
        double back = 0.0;
        std::sscanf(buf, "%lf", &back);
        if (back == v) break;
    }
    return buf;
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    out << content;
    if (!out) throw IoError("failed writing " + path);
}

}  // namespace forstruct
