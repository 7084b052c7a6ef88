#pragma once

// Output artifacts: CSV ledgers (one '#' header comment, a column row, then
// data rows prefixed by the full parameter echo in cfg_* columns) and
// whitespace-separated plot data. Nothing touches the filesystem until
// write_all().

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#ifndef RESTRICTION_LAB_VERSION
#define RESTRICTION_LAB_VERSION "0.0.0"
#endif

namespace restriction_lab::driver {

inline constexpr const char* version = RESTRICTION_LAB_VERSION;

/// 64-bit FNV-1a.
inline std::uint64_t fnv1a(std::string_view bytes) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

inline std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

inline std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.15g", v);
    return buf;
}
inline std::string fmt(long long v) { return std::to_string(v); }
inline std::string fmt(int v) { return std::to_string(v); }
inline std::string fmt(std::size_t v) { return std::to_string(v); }
inline std::string fmt(bool v) { return v ? "true" : "false"; }
inline std::string fmt(const std::string& v) { return v; }
inline std::string fmt(const char* v) { return v; }

inline std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

using Echo = std::vector<std::pair<std::string, std::string>>;

struct Table {
    std::string name;  // file stem
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;

    template <class... V>
    void add(const V&... values) {
        rows.push_back({fmt(values)...});
        if (rows.back().size() != columns.size()) throw std::logic_error("table '" + name + "': row/column mismatch");
    }
};

struct PlotData {
    std::string name;
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

struct Artifact {
    std::string filename;
    std::string content;
};

struct Provenance {
    std::string experiment;
    std::string config_hash;
};

inline std::string header_line(const Provenance& p) {
    return "# restriction-lab " + std::string(version) + " experiment=" + p.experiment + " config=" + p.config_hash +
           "\n";
}

inline Artifact render_csv(const Table& t, const Provenance& p, const Echo& echo) {
    std::string out = header_line(p);
    std::string line;
    for (const auto& [k, v] : echo) line += csv_field("cfg_" + k) + ",";
    for (std::size_t i = 0; i < t.columns.size(); ++i) line += (i ? "," : "") + csv_field(t.columns[i]);
    out += line + "\n";
    std::string prefix;
    for (const auto& [k, v] : echo) prefix += csv_field(v) + ",";
    for (const auto& row : t.rows) {
        line = prefix;
        for (std::size_t i = 0; i < row.size(); ++i) line += (i ? "," : "") + csv_field(row[i]);
        out += line + "\n";
    }
    return {t.name + ".csv", std::move(out)};
}

inline Artifact render_plot(const PlotData& d, const Provenance& p) {
    std::string out = header_line(p) + "#";
    for (const auto& c : d.columns) out += " " + c;
    out += "\n";
    for (const auto& row : d.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) out += (i ? " " : "") + fmt(row[i]);
        out += "\n";
    }
    return {d.name + ".dat", std::move(out)};
}

/// Lines that do not start with '#'.
inline std::string body_of(const std::string& content) {
    std::string out;
    std::size_t pos = 0;
    while (pos < content.size()) {
        const auto end = content.find('\n', pos);
        const auto stop = end == std::string::npos ? content.size() : end + 1;
        if (content[pos] != '#') out.append(content, pos, stop - pos);
        pos = stop;
    }
    return out;
}

inline void write_all(const std::filesystem::path& dir, const std::vector<Artifact>& artifacts) {
    std::filesystem::create_directories(dir);
    for (const auto& a : artifacts) {
        std::filesystem::create_directories((dir / a.filename).parent_path());
        std::ofstream f(dir / a.filename, std::ios::binary);
        if (!f) throw std::runtime_error("cannot write " + (dir / a.filename).string());
        f << a.content;
        if (!f) throw std::runtime_error("short write to " + (dir / a.filename).string());
    }
}

}  // namespace restriction_lab::driver
