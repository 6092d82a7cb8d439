#pragma once

// CSV plumbing: one-line header, 17-significant-digit doubles (lossless
// round-trip), dot decimal separator, newline-terminated rows. All writes go
// through a temp file followed by rename.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "cap1d/core.hpp"

namespace cap1d {

struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

inline std::string format_full(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline void write_text_atomic(const std::filesystem::path& path, const std::string& content) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out{tmp, std::ios::binary | std::ios::trunc};
    if (!out) throw Error("cannot open for writing: " + tmp.string());
    out << content;
    if (!out.flush()) throw Error("write failed: " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

inline void write_csv(const std::filesystem::path& path, const CsvTable& table) {
  std::ostringstream out;
  for (std::size_t i = 0; i < table.columns.size(); ++i) {
    if (i) out << ',';
    out << table.columns[i];
  }
  out << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out << ',';
      out << format_full(row[i]);
    }
    out << '\n';
  }
  write_text_atomic(path, out.str());
}

inline CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in{path};
  if (!in) throw Error("cannot open CSV: " + path.string());
  CsvTable table;
  std::string line;
  const auto split = [](const std::string& s) {
    std::vector<std::string> parts;
    std::string cur;
    for (char c : s) {
      if (c == ',') {
        parts.push_back(cur);
        cur.clear();
      } else if (c != '\r') {
        cur.push_back(c);
      }
    }
    parts.push_back(cur);
    return parts;
  };
  if (!std::getline(in, line)) throw Error("empty CSV: " + path.string());
  table.columns = split(line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto parts = split(line);
    if (parts.size() != table.columns.size()) {
      throw Error("CSV row width mismatch in " + path.string());
    }
    std::vector<double> row;
    row.reserve(parts.size());
    for (const auto& p : parts) {
      std::size_t used = 0;
      double v = std::stod(p, &used);
      if (used != p.size()) throw Error("bad CSV number '" + p + "' in " + path.string());
      row.push_back(v);
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

}  // namespace cap1d
