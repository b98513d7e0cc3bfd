#pragma once

// Reader for the subset of the SNDlib native format used here: the NODES,
// LINKS and DEMANDS sections. Everything else (META, ADMISSIBLE_PATHS, ...)
// is skipped.

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "greenroute/error.hpp"
#include "greenroute/text.hpp"

namespace greenroute::sndlib {

struct Entry {
    std::size_t line = 0;
    std::vector<std::string> tokens;  // parentheses are kept as their own tokens
};

struct Document {
    std::vector<Entry> nodes;
    std::vector<Entry> links;
    std::vector<Entry> demands;
    bool has_nodes = false;
    bool has_links = false;
    bool has_demands = false;
};

inline bool looks_like_sndlib(std::string_view contents) {
    for (auto section : {"NODES", "LINKS", "DEMANDS"}) {
        auto pos = contents.find(section);
        while (pos != std::string_view::npos) {
            const auto rest = text::trim(contents.substr(pos + std::string_view(section).size(), 8));
            if (!rest.empty() && rest.front() == '(') return true;
            pos = contents.find(section, pos + 1);
        }
    }
    return false;
}

inline std::vector<std::string> tokenize(std::string_view line) {
    std::string spaced;
    spaced.reserve(line.size() + 8);
    for (char c : line) {
        if (c == '(' || c == ')') {
            spaced.push_back(' ');
            spaced.push_back(c);
            spaced.push_back(' ');
        } else {
            spaced.push_back(c);
        }
    }
    std::vector<std::string> out;
    for (auto tok : text::split_ws(spaced)) out.emplace_back(tok);
    return out;
}

inline Document parse(std::string_view contents, const std::string& source) {
    Document doc;
    std::vector<Entry>* current = nullptr;
    bool in_other = false;  // inside a section we do not read
    std::size_t line_no = 0;
    for (auto raw : text::split(contents, '\n')) {
        ++line_no;
        const auto line = text::trim(text::strip_comment(raw));
        if (line.empty() || line.front() == '?') continue;
        auto toks = tokenize(line);
        if (!current && !in_other) {
            if (toks.size() == 2 && toks[1] == "(") {
                if (toks[0] == "NODES") {
                    current = &doc.nodes;
                    doc.has_nodes = true;
                } else if (toks[0] == "LINKS") {
                    current = &doc.links;
                    doc.has_links = true;
                } else if (toks[0] == "DEMANDS") {
                    current = &doc.demands;
                    doc.has_demands = true;
                } else {
                    in_other = true;
                }
                continue;
            }
            throw ParseError(source, line_no, "expected a section header, got '" + std::string(line) + "'");
        }
        if (toks.size() == 1 && toks[0] == ")") {
            current = nullptr;
            in_other = false;
            continue;
        }
        if (current) current->push_back(Entry{line_no, std::move(toks)});
    }
    if (current || in_other) throw ParseError(source, line_no, "unterminated section");
    return doc;
}

/// `<id> ( <src> <dst> ) <fields...>` as used by LINKS and DEMANDS entries.
struct Endpoints {
    std::string id;
    std::string src;
    std::string dst;
    std::vector<std::string> fields;  // tokens after the closing parenthesis
};

inline Endpoints endpoints(const Entry& e, const std::string& source) {
    const auto& t = e.tokens;
    if (t.size() < 5 || t[1] != "(" || t[4] != ")")
        throw ParseError(source, e.line, "expected '<id> ( <source> <target> ) ...'");
    return Endpoints{t[0], t[2], t[3], std::vector<std::string>(t.begin() + 5, t.end())};
}

}  // namespace greenroute::sndlib
