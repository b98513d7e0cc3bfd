#pragma once

// Minimal CSV used for the pipeline's own files: comma separated, header row,
// no quoting (identifiers never contain commas).

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "greenroute/error.hpp"
#include "greenroute/text.hpp"

namespace greenroute::csv {

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::size_t column(std::string_view name) const {
        for (std::size_t i = 0; i < header.size(); ++i)
            if (header[i] == name) return i;
        throw ValidationError("missing CSV column '" + std::string(name) + "'");
    }
};

inline std::string join(const std::vector<std::string>& cells) {
    std::string out;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) out += ',';
        out += cells[i];
    }
    out += '\n';
    return out;
}

inline Table parse(std::string_view contents, const std::string& source) {
    Table t;
    std::size_t line_no = 0;
    for (auto raw : text::split(contents, '\n')) {
        ++line_no;
        const auto line = text::trim(raw);
        if (line.empty()) continue;
        std::vector<std::string> cells;
        for (auto c : text::split(line, ',')) cells.emplace_back(text::trim(c));
        if (t.header.empty()) {
            t.header = std::move(cells);
            continue;
        }
        if (cells.size() != t.header.size())
            throw ParseError(source, line_no, "expected " + std::to_string(t.header.size()) + " cells, got " +
                                                  std::to_string(cells.size()));
        t.rows.push_back(std::move(cells));
    }
    if (t.header.empty()) throw ParseError(source, 0, "empty CSV");
    return t;
}

inline Table load(const std::string& path) { return parse(text::read_file(path), path); }

inline double number(const std::string& cell, const std::string& source) {
    double v = 0.0;
    if (!text::parse_double(cell, v)) throw ParseError(source, 0, "invalid number '" + cell + "'");
    return v;
}

}  // namespace greenroute::csv
