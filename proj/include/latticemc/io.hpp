#pragma once

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "latticemc/errors.hpp"

// Output plumbing: FNV-1a run hashes, fixed CSV formatting (C locale '.'
// decimals, '\n' terminators), and small readers used by tests and the
// acceptance cache. Every CSV begins with `# manifest = 0x<hash>` so results
// stay tied to the exact configuration that produced them.

namespace latticemc {

inline std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001B3ULL;
    }
    return h;
}

inline std::string hash_string(std::uint64_t h) {
    char buf[24];
    std::snprintf(buf, sizeof buf, "0x%016llx", static_cast<unsigned long long>(h));
    return buf;
}

/// Fixed run-to-run formatting for table values.
inline std::string fmt_cell(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

struct Table {
    std::vector<std::string> comments;               ///< emitted as '# ...' lines before the header
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> trailing_comments;      ///< e.g. the sweep summary line
};

inline std::string render_table(const Table& t) {
    std::string out;
    for (const auto& c : t.comments) out += "# " + c + "\n";
    for (std::size_t i = 0; i < t.header.size(); ++i) {
        if (i) out += ",";
        out += t.header[i];
    }
    out += "\n";
    for (const auto& row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out += ",";
            out += row[i];
        }
        out += "\n";
    }
    for (const auto& c : t.trailing_comments) out += "# " + c + "\n";
    return out;
}

inline void write_text_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw Error(Errc::io_error, "cannot open for writing: " + path.string());
    f << content;
    if (!f) throw Error(Errc::io_error, "write failed: " + path.string());
}

inline std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw Error(Errc::io_error, "cannot open for reading: " + path.string());
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

/// Minimal CSV reader for the files this project writes itself: '#' comment
/// lines are collected separately, the first non-comment line is the header.
struct CsvContent {
    std::vector<std::string> comments;
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    int column(const std::string& name) const {
        for (std::size_t i = 0; i < header.size(); ++i)
            if (header[i] == name) return static_cast<int>(i);
        return -1;
    }
};

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (;;) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
}

inline CsvContent read_csv(const std::filesystem::path& path) {
    CsvContent out;
    std::istringstream in(read_text_file(path));
    std::string line;
    bool have_header = false;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line[0] == '#') {
            out.comments.push_back(line.substr(line.size() > 1 && line[1] == ' ' ? 2 : 1));
            continue;
        }
        if (!have_header) {
            out.header = split_csv_line(line);
            have_header = true;
        } else {
            out.rows.push_back(split_csv_line(line));
        }
    }
    return out;
}

}  // namespace latticemc
