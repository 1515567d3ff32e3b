#pragma once
/*
 * Minimal CSV writer: '#' comment lines carrying the schema version and
 * run metadata, then one header row of column names, then numeric rows.
 * Values are printed with %.12g in the C locale so output is byte-stable
 * for identical inputs.
 */

#include <cstdio>
#include <fstream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace mimpol {

inline constexpr const char* csv_schema = "mimpol-csv/1";

class CsvWriter {
public:
    explicit CsvWriter(const std::string& path) : out_(path) {
        if (!out_) throw std::runtime_error("cannot open output file: " + path);
        out_ << "# " << csv_schema << '\n';
    }

    void comment(const std::string& text) { out_ << "# " << text << '\n'; }

    void header(std::span<const std::string> columns) {
        for (std::size_t i = 0; i < columns.size(); ++i) {
            if (i) out_ << ',';
            out_ << columns[i];
        }
        out_ << '\n';
    }

    void row(std::span<const double> values) {
        char buf[32];
        for (std::size_t i = 0; i < values.size(); ++i) {
            if (i) out_ << ',';
            std::snprintf(buf, sizeof buf, "%.12g", values[i]);
            out_ << buf;
        }
        out_ << '\n';
    }

    void row(std::initializer_list<double> values) {
        row(std::span<const double>(values.begin(), values.size()));
    }

private:
    std::ofstream out_;
};

} // namespace mimpol
