#pragma once

// Plain-text key-value run configuration with [section] headers. Unknown
// keys or sections are errors, not warnings: a silent typo in a k-target
// would invalidate a physics run.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "cap1d/core.hpp"
#include "cap1d/inversion.hpp"

namespace cap1d {

enum class RunMode { invert, optimize, baseline, scan };

inline std::string to_string(RunMode m) {
  switch (m) {
    case RunMode::invert: return "invert";
    case RunMode::optimize: return "optimize";
    case RunMode::baseline: return "baseline";
    case RunMode::scan: return "scan";
  }
  return "?";
}

struct ScanSpec {
  double k_min = 0.0;
  double k_max = 0.0;
  int n_points = 0;
};

struct RunConfig {
  RunMode mode = RunMode::invert;
  std::vector<double> k_targets;

  // invert
  std::vector<double> unit_lengths;
  bool wall_terminated = false;
  TruncationPolicy truncation{};

  // optimize
  int n_barriers = 0;
  double total_length = 0.0;
  int restarts = 20;

  // baseline
  double length = 0.0;
  double eta_min = 0.0;
  double eta_max = 0.0;
  int slices = 1000;

  // scan replay
  std::string input_path;
  bool input_wall = false;

  ScanSpec scan;
  int resolution = 2000;
  std::uint64_t seed = 1;
  std::string out_dir = ".";
};

namespace detail {

inline std::string trim_ws(const std::string& s) {
  const auto a = s.find_first_not_of(" \t");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t");
  return s.substr(a, b - a + 1);
}

inline std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ',') {
      out.push_back(trim_ws(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(trim_ws(cur));
  return out;
}

inline double parse_double(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const double v = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config: bad number for '" + key + "': '" + value + "'");
  }
}

inline long long parse_int(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const long long v = std::stoll(value, &used);
    if (used != value.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config: bad integer for '" + key + "': '" + value + "'");
  }
}

inline bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true") return true;
  if (value == "false") return false;
  throw ConfigError("config: bad boolean for '" + key + "' (use true/false)");
}

struct RawConfig {
  // (section, key) -> value; top-level keys use section "".
  std::map<std::pair<std::string, std::string>, std::string> entries;

  bool has(const std::string& sec, const std::string& key) const {
    return entries.count({sec, key}) > 0;
  }
  std::string take(const std::string& sec, const std::string& key) {
    auto it = entries.find({sec, key});
    if (it == entries.end()) {
      throw ConfigError("config: missing required key '" + (sec.empty() ? key : sec + "." + key) +
                        "'");
    }
    std::string v = it->second;
    entries.erase(it);
    return v;
  }
  std::optional<std::string> take_opt(const std::string& sec, const std::string& key) {
    auto it = entries.find({sec, key});
    if (it == entries.end()) return std::nullopt;
    std::string v = it->second;
    entries.erase(it);
    return v;
  }
};

inline RawConfig parse_raw_config(const std::string& text) {
  RawConfig raw;
  std::istringstream in{text};
  std::string line;
  std::string section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim_ws(line);
    if (t.empty() || t.front() == '#') continue;
    if (t.front() == '[') {
      if (t.back() != ']') {
        throw ConfigError("config: malformed section header at line " + std::to_string(lineno));
      }
      section = trim_ws(t.substr(1, t.size() - 2));
      if (section.empty()) {
        throw ConfigError("config: empty section name at line " + std::to_string(lineno));
      }
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config: expected 'key = value' at line " + std::to_string(lineno));
    }
    const std::string key = trim_ws(t.substr(0, eq));
    const std::string value = trim_ws(t.substr(eq + 1));
    if (key.empty()) {
      throw ConfigError("config: empty key at line " + std::to_string(lineno));
    }
    if (!raw.entries.emplace(std::make_pair(section, key), value).second) {
      throw ConfigError("config: duplicate key '" + key + "' at line " + std::to_string(lineno));
    }
  }
  return raw;
}

}  // namespace detail

inline RunConfig parse_run_config(const std::string& text) {
  detail::RawConfig raw = detail::parse_raw_config(text);
  RunConfig cfg;

  const std::string mode_s = raw.take("", "mode");
  if (mode_s == "invert") {
    cfg.mode = RunMode::invert;
  } else if (mode_s == "optimize") {
    cfg.mode = RunMode::optimize;
  } else if (mode_s == "baseline") {
    cfg.mode = RunMode::baseline;
  } else if (mode_s == "scan") {
    cfg.mode = RunMode::scan;
  } else {
    throw ConfigError("config: unknown mode '" + mode_s + "'");
  }

  const auto parse_targets = [&](bool required) {
    std::optional<std::string> v = raw.take_opt("targets", "k");
    if (!v) {
      if (required) throw ConfigError("config: missing required key 'targets.k'");
      return;
    }
    for (const auto& item : detail::split_list(*v)) {
      cfg.k_targets.push_back(detail::parse_double("targets.k", item));
    }
    if (cfg.k_targets.empty()) throw ConfigError("config: targets.k is empty");
    for (std::size_t i = 0; i < cfg.k_targets.size(); ++i) {
      if (!(cfg.k_targets[i] > 0.0)) throw ConfigError("config: targets.k must be positive");
      for (std::size_t j = i + 1; j < cfg.k_targets.size(); ++j) {
        if (cfg.k_targets[i] == cfg.k_targets[j]) {
          throw ConfigError("config: targets.k entries must be distinct");
        }
      }
    }
  };

  switch (cfg.mode) {
    case RunMode::invert: {
      parse_targets(true);
      for (const auto& item : detail::split_list(raw.take("invert", "unit_lengths"))) {
        cfg.unit_lengths.push_back(detail::parse_double("invert.unit_lengths", item));
      }
      if (cfg.unit_lengths.size() != cfg.k_targets.size()) {
        throw ConfigError("config: invert.unit_lengths must match targets.k in length");
      }
      for (double l : cfg.unit_lengths) {
        if (!(l > 0.0)) throw ConfigError("config: invert.unit_lengths must be positive");
      }
      if (auto v = raw.take_opt("invert", "wall_terminated")) {
        cfg.wall_terminated = detail::parse_bool("invert.wall_terminated", *v);
      }
      if (auto v = raw.take_opt("invert", "cap")) {
        cfg.truncation.cap = detail::parse_double("invert.cap", *v);
        if (!(cfg.truncation.cap > 0.0)) throw ConfigError("config: invert.cap must be positive");
      }
      if (auto v = raw.take_opt("invert", "target_survival")) {
        const double t = detail::parse_double("invert.target_survival", *v);
        if (!(t > 0.0 && t < 1.0)) {
          throw ConfigError("config: invert.target_survival must lie in (0, 1)");
        }
        cfg.truncation.target_survival = t;
      }
      break;
    }
    case RunMode::optimize: {
      parse_targets(true);
      cfg.n_barriers = static_cast<int>(detail::parse_int("optimize.n_barriers",
                                                          raw.take("optimize", "n_barriers")));
      if (cfg.n_barriers < 1) throw ConfigError("config: optimize.n_barriers must be >= 1");
      cfg.total_length = detail::parse_double("optimize.total_length",
                                              raw.take("optimize", "total_length"));
      if (!(cfg.total_length > 0.0)) {
        throw ConfigError("config: optimize.total_length must be positive");
      }
      if (auto v = raw.take_opt("optimize", "restarts")) {
        cfg.restarts = static_cast<int>(detail::parse_int("optimize.restarts", *v));
        if (cfg.restarts < 1) throw ConfigError("config: optimize.restarts must be >= 1");
      }
      break;
    }
    case RunMode::baseline: {
      parse_targets(true);
      cfg.length = detail::parse_double("baseline.length", raw.take("baseline", "length"));
      if (!(cfg.length > 0.0)) throw ConfigError("config: baseline.length must be positive");
      cfg.eta_min = detail::parse_double("baseline.eta_min", raw.take("baseline", "eta_min"));
      cfg.eta_max = detail::parse_double("baseline.eta_max", raw.take("baseline", "eta_max"));
      if (!(cfg.eta_min >= 0.0) || !(cfg.eta_min < cfg.eta_max)) {
        throw ConfigError("config: need 0 <= baseline.eta_min < baseline.eta_max");
      }
      if (auto v = raw.take_opt("baseline", "slices")) {
        cfg.slices = static_cast<int>(detail::parse_int("baseline.slices", *v));
        if (cfg.slices < 100) throw ConfigError("config: baseline.slices must be >= 100");
      }
      break;
    }
    case RunMode::scan: {
      parse_targets(false);
      cfg.input_path = raw.take("input", "path");
      if (cfg.input_path.empty()) throw ConfigError("config: input.path is empty");
      if (auto v = raw.take_opt("input", "wall")) {
        cfg.input_wall = detail::parse_bool("input.wall", *v);
      }
      break;
    }
  }

  cfg.scan.k_min = detail::parse_double("scan.k_min", raw.take("scan", "k_min"));
  cfg.scan.k_max = detail::parse_double("scan.k_max", raw.take("scan", "k_max"));
  cfg.scan.n_points = static_cast<int>(detail::parse_int("scan.n_points",
                                                         raw.take("scan", "n_points")));
  if (!(cfg.scan.k_min > 0.0) || !(cfg.scan.k_min < cfg.scan.k_max)) {
    throw ConfigError("config: need 0 < scan.k_min < scan.k_max");
  }
  if (cfg.scan.n_points < 2) throw ConfigError("config: scan.n_points must be >= 2");

  if (auto v = raw.take_opt("run", "resolution")) {
    cfg.resolution = static_cast<int>(detail::parse_int("run.resolution", *v));
    if (cfg.resolution < 100) throw ConfigError("config: run.resolution must be >= 100");
  }
  if (auto v = raw.take_opt("run", "seed")) {
    cfg.seed = static_cast<std::uint64_t>(detail::parse_int("run.seed", *v));
  }
  if (auto v = raw.take_opt("run", "out_dir")) cfg.out_dir = *v;

  if (!raw.entries.empty()) {
    const auto& [where, value] = *raw.entries.begin();
    const std::string name =
        where.first.empty() ? where.second : where.first + "." + where.second;
    throw ConfigError("config: unknown key '" + name + "'");
  }
  return cfg;
}

inline RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in{path};
  if (!in) throw ConfigError("config: cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_run_config(buf.str());
}

}  // namespace cap1d
