#pragma once

#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "leadcast/numeric.hpp"

namespace leadcast::csv {

inline std::vector<std::string_view> split(std::string_view line, char sep = ',') {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(sep, start);
        if (pos == std::string_view::npos) {
            out.push_back(line.substr(start));
            break;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    for (auto& f : out) {
        while (!f.empty() && (f.back() == '\r' || f.back() == ' ')) f.remove_suffix(1);
        while (!f.empty() && f.front() == ' ') f.remove_prefix(1);
    }
    return out;
}

/**
 * Streams data rows of a headed CSV file to `on_row(fields, line_number)`. The header
 * must match `expected_header` exactly (after trimming). Blank lines are skipped.
 */
inline void read(std::istream& in, const std::vector<std::string>& expected_header, const std::string& source,
                 const std::function<void(const std::vector<std::string_view>&, std::size_t)>& on_row) {
    std::string line;
    std::size_t line_no = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (line_no == 1 && line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
        if (line.find_first_not_of(" \r\t") == std::string::npos) continue;
        const auto fields = split(line);
        if (!header_seen) {
            header_seen = true;
            bool ok = fields.size() == expected_header.size();
            for (std::size_t i = 0; ok && i < fields.size(); ++i) ok = fields[i] == expected_header[i];
            if (!ok) {
                std::string want;
                for (const auto& h : expected_header) want += (want.empty() ? "" : ",") + h;
                throw ValidationError(source + ":" + std::to_string(line_no) + ": expected header '" + want + "'");
            }
            continue;
        }
        if (fields.size() != expected_header.size()) {
            throw ValidationError(source + ":" + std::to_string(line_no) + ": expected " +
                                  std::to_string(expected_header.size()) + " fields, got " + std::to_string(fields.size()));
        }
        try {
            on_row(fields, line_no);
        } catch (const ValidationError& e) {
            throw ValidationError(source + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
    if (!header_seen) throw ValidationError(source + ": missing header row");
}

inline void read_file(const std::string& path, const std::vector<std::string>& expected_header,
                      const std::function<void(const std::vector<std::string_view>&, std::size_t)>& on_row) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open '" + path + "'");
    read(in, expected_header, path, on_row);
}

inline void write_file(const std::string& path, const std::string& contents) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw RuntimeFailure("cannot write '" + path + "'");
    out << contents;
    if (!out) throw RuntimeFailure("write failed for '" + path + "'");
}

}  // namespace leadcast::csv
