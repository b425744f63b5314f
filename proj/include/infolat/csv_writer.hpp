#ifndef INFOLAT_CSV_WRITER_HPP
#define INFOLAT_CSV_WRITER_HPP

#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

// Deterministic CSV output: fixed float formatting and caller-fixed row order,
// so identical runs produce byte-identical files.

namespace infolat {

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Full round-trip precision with a fixed textual form; "%.16e" prints the same
// bytes for the same bits on every mainstream libc.
inline std::string csv_double(double value) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.16e", value);
    return buf;
}

using CsvCell = std::variant<long long, double, std::string>;

class CsvWriter {
public:
    CsvWriter(const std::string& path, std::initializer_list<std::string> columns)
        : out_(path, std::ios::binary), n_columns_(columns.size()) {
        if (!out_) {
            throw IoError("cannot open output file " + path);
        }
        if (n_columns_ == 0) {
            throw std::invalid_argument("CsvWriter: no columns for " + path);
        }
        bool first = true;
        for (const std::string& name : columns) {
            if (!first) {
                out_ << ',';
            }
            out_ << name;
            first = false;
        }
        out_ << '\n';
    }

    void row(std::initializer_list<CsvCell> cells) {
        if (cells.size() != n_columns_) {
            throw std::invalid_argument("CsvWriter: row width does not match the header");
        }
        bool first = true;
        for (const CsvCell& cell : cells) {
            if (!first) {
                out_ << ',';
            }
            if (const auto* i = std::get_if<long long>(&cell)) {
                out_ << *i;
            } else if (const auto* d = std::get_if<double>(&cell)) {
                out_ << csv_double(*d);
            } else {
                out_ << std::get<std::string>(cell);
            }
            first = false;
        }
        out_ << '\n';
        if (!out_) {
            throw IoError("CsvWriter: write failed");
        }
    }

private:
    std::ofstream out_;
    std::size_t n_columns_;
};

} // namespace infolat

#endif
