// Copyright 2026 the qfc developers
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// io.hpp — Plot-ready CSV series with round-trip-exact number formatting,
// and a matching reader.

#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace qfc::io {

/// 17 significant digits: enough to reproduce any finite double exactly.
inline std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

/// Column-oriented numeric table. Rows are written in insertion order, so
/// output is deterministic.
class CsvTable {
public:
    explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

    void add_row(const std::vector<double>& row) {
        if (row.size() != header_.size()) {
            throw std::invalid_argument("CsvTable: row width mismatch");
        }
        rows_.push_back(row);
    }

    const std::vector<std::string>& header() const { return header_; }
    const std::vector<std::vector<double>>& rows() const { return rows_; }
    std::size_t row_count() const { return rows_.size(); }

    double at(std::size_t row, const std::string& column) const {
        for (std::size_t c = 0; c < header_.size(); ++c) {
            if (header_[c] == column) return rows_[row][c];
        }
        throw std::out_of_range("CsvTable: no column " + column);
    }

    /// Optional comment lines (prefixed '#') go before the header.
    void write(std::ostream& os, const std::vector<std::string>& comments = {}) const {
        for (const auto& c : comments) os << "# " << c << "\n";
        for (std::size_t c = 0; c < header_.size(); ++c) {
            os << header_[c] << (c + 1 < header_.size() ? "," : "");
        }
        os << "\n";
        for (const auto& row : rows_) {
            for (std::size_t c = 0; c < row.size(); ++c) {
                os << format_double(row[c]) << (c + 1 < row.size() ? "," : "");
            }
            os << "\n";
        }
    }

    void write_file(const std::string& path, const std::vector<std::string>& comments = {}) const {
        std::ofstream os(path);
        if (!os) throw std::runtime_error("CsvTable: cannot open " + path);
        write(os, comments);
    }

    static CsvTable read(std::istream& is) {
        std::string line;
        // skip comments
        while (std::getline(is, line)) {
            if (!line.empty() && line[0] != '#') break;
        }
        CsvTable table(split_header(line));
        while (std::getline(is, line)) {
            if (line.empty()) continue;
            std::vector<double> row;
            std::stringstream ss(line);
            std::string cell;
            while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
            table.add_row(row);
        }
        return table;
    }

    static CsvTable read_file(const std::string& path) {
        std::ifstream is(path);
        if (!is) throw std::runtime_error("CsvTable: cannot open " + path);
        return read(is);
    }

private:
    static std::vector<std::string> split_header(const std::string& line) {
        std::vector<std::string> cols;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cols.push_back(cell);
        if (cols.empty()) throw std::runtime_error("CsvTable: missing header");
        return cols;
    }

    std::vector<std::string> header_;
    std::vector<std::vector<double>> rows_;
};

}  // namespace qfc::io
