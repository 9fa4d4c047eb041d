#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace selertion {

namespace fs = std::filesystem;

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw IoError("cannot read " + p.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// write-temp-then-rename so a crash never leaves a half-written file
inline void write_file_atomic(const fs::path& p, const std::string& text) {
    fs::create_directories(p.parent_path());
    fs::path tmp = p;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot write " + tmp.string());
        out << text;
    }
    fs::rename(tmp, p);
}

inline std::vector<std::string> split(std::string_view s, char sep) {
    std::vector<std::string> out;
    size_t start = 0;
    while (true) {
        size_t pos = s.find(sep, start);
        if (pos == std::string_view::npos) {
            out.emplace_back(s.substr(start));
            break;
        }
        out.emplace_back(s.substr(start, pos - start));
        start = pos + 1;
    }
    return out;
}

inline std::string join(const std::vector<std::string>& parts, const std::string& sep) {
    std::string out;
    for (size_t i = 0; i < parts.size(); ++i) {
        if (i) out += sep;
        out += parts[i];
    }
    return out;
}

inline bool starts_with(std::string_view s, std::string_view prefix) {
    return s.substr(0, prefix.size()) == prefix;
}

inline bool ends_with(std::string_view s, std::string_view suffix) {
    return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

// TSV rows, UTF-8, LF line endings, sorted lexicographically for
// bit-exact reproducibility of store files.
inline std::string tsv_render(std::vector<std::vector<std::string>> rows) {
    std::vector<std::string> lines;
    lines.reserve(rows.size());
    for (auto& r : rows) lines.push_back(join(r, "\t"));
    std::sort(lines.begin(), lines.end());
    std::string out;
    for (auto& l : lines) {
        out += l;
        out += '\n';
    }
    return out;
}

inline std::vector<std::vector<std::string>> tsv_parse(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    for (auto& line : split(text, '\n')) {
        if (line.empty()) continue;
        rows.push_back(split(line, '\t'));
    }
    return rows;
}

// Relative .mj paths under a project root, sorted for determinism.
inline std::vector<std::string> list_source_files(const fs::path& root) {
    std::vector<std::string> out;
    for (const char* sub : {"src", "tests"}) {
        fs::path dir = root / sub;
        if (!fs::exists(dir)) continue;
        for (auto& e : fs::recursive_directory_iterator(dir)) {
            if (!e.is_regular_file()) continue;
            if (e.path().extension() != ".mj") continue;
            out.push_back(fs::relative(e.path(), root).generic_string());
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

inline bool is_test_path(std::string_view relPath) {
    return starts_with(relPath, "tests/");
}

}  // namespace selertion
