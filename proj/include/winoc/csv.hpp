#pragma once

// Deterministic CSV/TSV emission (RFC-4180-style quoting, LF line ends).
// Numeric cells are rendered with 17 significant digits so that rereading a
// file reproduces the exact doubles; byte-identical output for identical
// results is part of the tool's contract.

#include "winoc/bigint.hpp"

#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace winoc {

enum class OutputFormat { csv, tsv };

inline std::string csv_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline std::string csv_int(long long v) { return std::to_string(v); }

inline std::string csv_bigint(const bigint& v) { return v.str(); }

// Quote a field if it contains the delimiter, a quote, or a line break.
inline std::string csv_escape(const std::string& field, char delim) {
    bool needs_quotes = false;
    for (char c : field)
        if (c == delim || c == '"' || c == '\n' || c == '\r') {
            needs_quotes = true;
            break;
        }
    if (!needs_quotes)
        return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"')
            out += '"';
        out += c;
    }
    out += '"';
    return out;
}

// Header row first, then data rows in insertion order.  Empty tables emit
// the header only.
class Table {
public:
    explicit Table(std::vector<std::string> header) : header_(std::move(header)) {}

    void add_row(std::vector<std::string> row) {
        if (row.size() != header_.size())
            throw std::logic_error("Table::add_row: column count mismatch");
        rows_.push_back(std::move(row));
    }

    std::size_t row_count() const { return rows_.size(); }

    void write(std::ostream& os, OutputFormat format) const {
        const char delim = format == OutputFormat::csv ? ',' : '\t';
        write_line(os, header_, delim);
        for (const auto& row : rows_)
            write_line(os, row, delim);
    }

private:
    static void write_line(std::ostream& os, const std::vector<std::string>& cells, char delim) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i)
                os << delim;
            os << csv_escape(cells[i], delim);
        }
        os << '\n';
    }

    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
};

} // namespace winoc
