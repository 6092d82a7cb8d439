#pragma once

// Batch front-end behind the CLI: executes a parsed RunConfig and emits the
// CSV/summary files. All results are computed before the first byte is
// written, so a failing run leaves no partial output.

#include <cstdio>
#include <filesystem>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "cap1d/baseline.hpp"
#include "cap1d/config.hpp"
#include "cap1d/core.hpp"
#include "cap1d/csv.hpp"
#include "cap1d/inversion.hpp"
#include "cap1d/optimize.hpp"
#include "cap1d/transfer.hpp"
#include "cap1d/version.hpp"

namespace cap1d {

struct CliOverrides {
  std::optional<std::string> out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<int> resolution;
  bool quiet = false;
};

namespace detail {

inline std::string error_name(const std::exception& e) {
  if (dynamic_cast<const SpectralSingularity*>(&e)) return "SpectralSingularity";
  if (dynamic_cast<const OverflowError*>(&e)) return "Overflow";
  if (dynamic_cast<const ResonanceDenominator*>(&e)) return "ResonanceDenominator";
  if (dynamic_cast<const DegenerateBacksolve*>(&e)) return "DegenerateBacksolve";
  if (dynamic_cast<const DuplicateWavenumber*>(&e)) return "DuplicateWavenumber";
  if (dynamic_cast<const NoFiniteStart*>(&e)) return "NoFiniteStart";
  if (dynamic_cast<const BracketTooNarrow*>(&e)) return "BracketTooNarrow";
  if (dynamic_cast<const ConfigError*>(&e)) return "ConfigError";
  if (dynamic_cast<const std::invalid_argument*>(&e)) return "InvalidArgument";
  return "Error";
}

inline std::vector<Wavenumber> to_wavenumbers(const std::vector<double>& ks) {
  std::vector<Wavenumber> out;
  out.reserve(ks.size());
  for (double k : ks) out.emplace_back(k);
  return out;
}

inline CsvTable scan_table(const BarrierChain& chain, bool wall, const ScanSpec& scan) {
  CsvTable t;
  t.columns = {"k", "survival", "refl_prob", "trans_prob"};
  t.rows.reserve(scan.n_points);
  for (int i = 0; i < scan.n_points; ++i) {
    const double k = scan.k_min + (scan.k_max - scan.k_min) * i / (scan.n_points - 1);
    double s, refl, trans;
    if (wall) {
      refl = std::norm(reflect_with_wall(chain, Wavenumber{k}));
      trans = 0.0;
      s = refl;
    } else {
      const ScatteringAmplitudes a = amplitudes(chain, Wavenumber{k});
      refl = std::norm(a.r_left);
      trans = std::norm(a.t_left);
      s = refl + trans;
    }
    t.rows.push_back({k, s, refl, trans});
  }
  return t;
}

inline double target_survival_of(const BarrierChain& chain, bool wall, double k) {
  if (wall) return std::norm(reflect_with_wall(chain, Wavenumber{k}));
  return survival(amplitudes(chain, Wavenumber{k}));
}

// Step-profile emission: one row per slab left edge plus a closing row at the
// right edge with V = 0, so the replay path recovers the exact boundaries.
inline CsvTable profile_table(const BarrierChain& chain) {
  CsvTable t;
  t.columns = {"x", "re_v", "im_v"};
  t.rows.reserve(chain.size() + 1);
  for (std::size_t i = 0; i < chain.size(); ++i) {
    t.rows.push_back({chain.edge(i), chain.height(i).real(), chain.height(i).imag()});
  }
  t.rows.push_back({chain.end(), 0.0, 0.0});
  return t;
}

inline BarrierChain chain_from_profile(const CsvTable& t) {
  if (t.columns != std::vector<std::string>{"x", "re_v", "im_v"}) {
    throw ConfigError("scan input: expected columns x,re_v,im_v");
  }
  if (t.rows.size() < 2) throw ConfigError("scan input: profile needs at least 2 rows");
  std::vector<double> cuts;
  std::vector<Complex> heights;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    cuts.push_back(t.rows[i][0]);
    if (i + 1 < t.rows.size()) heights.emplace_back(t.rows[i][1], t.rows[i][2]);
  }
  return BarrierChain::from_boundaries(std::move(cuts), std::move(heights));
}

inline CsvTable heights_table(const BarrierChain& chain) {
  CsvTable t;
  t.columns = {"index", "re_v", "im_v", "width"};
  for (std::size_t i = 0; i < chain.size(); ++i) {
    t.rows.push_back({static_cast<double>(i), chain.height(i).real(), chain.height(i).imag(),
                      chain.width(i)});
  }
  return t;
}

inline BarrierChain chain_from_heights(const CsvTable& t) {
  if (t.columns != std::vector<std::string>{"index", "re_v", "im_v", "width"}) {
    throw ConfigError("scan input: expected columns index,re_v,im_v,width");
  }
  if (t.rows.empty()) throw ConfigError("scan input: heights file is empty");
  BarrierChain chain{0.0};
  for (const auto& row : t.rows) {
    chain.append({row[3], Complex{row[1], row[2]}});
  }
  return chain;
}

class SummaryWriter {
 public:
  void line(const std::string& s) { out_ << s << '\n'; }
  void section(const std::string& name) { out_ << '[' << name << "]\n"; }
  void kv(const std::string& key, const std::string& value) {
    out_ << key << " = " << value << '\n';
  }
  void kv(const std::string& key, double value) { kv(key, format_full(value)); }
  void kv(const std::string& key, long long value) { kv(key, std::to_string(value)); }
  void kv_list(const std::string& key, const std::vector<double>& values) {
    std::string s;
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (i) s += ", ";
      s += format_full(values[i]);
    }
    kv(key, s);
  }
  std::string str() const { return out_.str(); }

 private:
  std::ostringstream out_;
};

inline void echo_common(SummaryWriter& w, const RunConfig& cfg) {
  w.line("# cap1d run summary");
  w.kv("version", std::string{kVersion});
  w.kv("mode", to_string(cfg.mode));
  if (!cfg.k_targets.empty()) {
    w.section("targets");
    w.kv_list("k", cfg.k_targets);
  }
}

inline void echo_run(SummaryWriter& w, const RunConfig& cfg) {
  w.section("scan");
  w.kv("k_min", cfg.scan.k_min);
  w.kv("k_max", cfg.scan.k_max);
  w.kv("n_points", static_cast<long long>(cfg.scan.n_points));
  w.section("run");
  w.kv("resolution", static_cast<long long>(cfg.resolution));
  w.kv("seed", static_cast<long long>(cfg.seed));
  w.kv("out_dir", cfg.out_dir);
}

inline void write_outputs(const RunConfig& cfg,
                          const std::vector<std::pair<std::string, std::string>>& files,
                          bool quiet) {
  const std::filesystem::path dir{cfg.out_dir};
  std::filesystem::create_directories(dir);
  for (const auto& [name, content] : files) {
    write_text_atomic(dir / name, content);
    if (!quiet) std::printf("wrote %s\n", (dir / name).string().c_str());
  }
}

inline std::string render_csv(const CsvTable& t) {
  std::ostringstream out;
  for (std::size_t i = 0; i < t.columns.size(); ++i) {
    if (i) out << ',';
    out << t.columns[i];
  }
  out << '\n';
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out << ',';
      out << format_full(row[i]);
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace detail

inline int run_invert(const RunConfig& cfg, bool quiet) {
  const BarrierChain chain =
      build_composite(detail::to_wavenumbers(cfg.k_targets), cfg.unit_lengths, cfg.resolution,
                      cfg.truncation, cfg.wall_terminated);
  std::vector<double> target_survivals;
  for (double k : cfg.k_targets) {
    target_survivals.push_back(detail::target_survival_of(chain, cfg.wall_terminated, k));
  }
  const CsvTable profile = detail::profile_table(chain);
  const CsvTable scan = detail::scan_table(chain, cfg.wall_terminated, cfg.scan);

  detail::SummaryWriter w;
  detail::echo_common(w, cfg);
  w.section("invert");
  w.kv_list("unit_lengths", cfg.unit_lengths);
  w.kv("wall_terminated", cfg.wall_terminated ? "true" : "false");
  w.kv("cap", cfg.truncation.cap);
  if (cfg.truncation.target_survival) w.kv("target_survival", *cfg.truncation.target_survival);
  detail::echo_run(w, cfg);
  w.section("results");
  w.kv("chain_slabs", static_cast<long long>(chain.size()));
  w.kv("total_length", chain.total_length());
  for (std::size_t i = 0; i < cfg.k_targets.size(); ++i) {
    w.kv("target_" + std::to_string(i + 1) + "_k", cfg.k_targets[i]);
    w.kv("target_" + std::to_string(i + 1) + "_survival", target_survivals[i]);
  }
  w.kv("files", "potential.csv, scan.csv");

  detail::write_outputs(cfg,
                        {{"potential.csv", detail::render_csv(profile)},
                         {"scan.csv", detail::render_csv(scan)},
                         {"summary.txt", w.str()}},
                        quiet);
  return 0;
}

inline int run_optimize(const RunConfig& cfg, bool quiet) {
  const ObjectiveSpec spec{detail::to_wavenumbers(cfg.k_targets)};
  OptimizeConfig ocfg{};
  ocfg.restarts = cfg.restarts;
  ocfg.seed = cfg.seed;
  const OptimizationResult result =
      optimize_barriers(static_cast<std::size_t>(cfg.n_barriers), cfg.total_length, spec, ocfg);
  const BarrierChain chain = result.best_params.to_chain();
  const CsvTable heights = detail::heights_table(chain);
  const CsvTable scan = detail::scan_table(chain, false, cfg.scan);

  detail::SummaryWriter w;
  detail::echo_common(w, cfg);
  w.section("optimize");
  w.kv("n_barriers", static_cast<long long>(cfg.n_barriers));
  w.kv("total_length", cfg.total_length);
  w.kv("restarts", static_cast<long long>(cfg.restarts));
  detail::echo_run(w, cfg);
  w.section("results");
  w.kv("best_f", result.best_f);
  w.kv_list("per_point_survivals", result.per_point_survivals);
  w.kv("restarts_used", static_cast<long long>(result.restarts_used));
  w.kv("converged", result.converged ? "true" : "false");
  w.kv("files", "heights.csv, scan.csv");

  detail::write_outputs(cfg,
                        {{"heights.csv", detail::render_csv(heights)},
                         {"scan.csv", detail::render_csv(scan)},
                         {"summary.txt", w.str()}},
                        quiet);
  return 0;
}

inline int run_baseline(const RunConfig& cfg, bool quiet) {
  const ObjectiveSpec spec{detail::to_wavenumbers(cfg.k_targets)};
  const EtaOptimum opt = optimize_eta(spec, cfg.length, {cfg.eta_min, cfg.eta_max}, cfg.slices);
  CsvTable eta_scan;
  eta_scan.columns = {"eta", "f"};
  for (const auto& [eta, f] : opt.evaluations) eta_scan.rows.push_back({eta, f});
  const BarrierChain chain = quadratic_absorber_chain({opt.eta, cfg.length, cfg.slices});
  const CsvTable scan = detail::scan_table(chain, false, cfg.scan);

  detail::SummaryWriter w;
  detail::echo_common(w, cfg);
  w.section("baseline");
  w.kv("length", cfg.length);
  w.kv("eta_min", cfg.eta_min);
  w.kv("eta_max", cfg.eta_max);
  w.kv("slices", static_cast<long long>(cfg.slices));
  detail::echo_run(w, cfg);
  w.section("results");
  w.kv("eta_star", opt.eta);
  w.kv("f_star", opt.f);
  for (std::size_t i = 0; i < cfg.k_targets.size(); ++i) {
    w.kv("target_" + std::to_string(i + 1) + "_k", cfg.k_targets[i]);
    w.kv("target_" + std::to_string(i + 1) + "_survival",
         baseline_survival({opt.eta, cfg.length, cfg.slices}, Wavenumber{cfg.k_targets[i]}));
  }
  w.kv("files", "eta_scan.csv, scan.csv");

  detail::write_outputs(cfg,
                        {{"eta_scan.csv", detail::render_csv(eta_scan)},
                         {"scan.csv", detail::render_csv(scan)},
                         {"summary.txt", w.str()}},
                        quiet);
  return 0;
}

inline int run_scan(const RunConfig& cfg, bool quiet) {
  const CsvTable input = read_csv(cfg.input_path);
  BarrierChain chain = [&] {
    if (input.columns.size() == 3) return detail::chain_from_profile(input);
    return detail::chain_from_heights(input);
  }();
  std::vector<double> target_survivals;
  for (double k : cfg.k_targets) {
    target_survivals.push_back(detail::target_survival_of(chain, cfg.input_wall, k));
  }
  const CsvTable scan = detail::scan_table(chain, cfg.input_wall, cfg.scan);

  detail::SummaryWriter w;
  detail::echo_common(w, cfg);
  w.section("input");
  w.kv("path", cfg.input_path);
  w.kv("wall", cfg.input_wall ? "true" : "false");
  detail::echo_run(w, cfg);
  w.section("results");
  w.kv("chain_slabs", static_cast<long long>(chain.size()));
  w.kv("total_length", chain.total_length());
  for (std::size_t i = 0; i < cfg.k_targets.size(); ++i) {
    w.kv("target_" + std::to_string(i + 1) + "_k", cfg.k_targets[i]);
    w.kv("target_" + std::to_string(i + 1) + "_survival", target_survivals[i]);
  }
  w.kv("files", "scan.csv");

  detail::write_outputs(
      cfg, {{"scan.csv", detail::render_csv(scan)}, {"summary.txt", w.str()}}, quiet);
  return 0;
}

// Loads the config, applies CLI overrides, dispatches, and maps failures to
// the documented exit codes: 0 ok, 2 config, 3 construction, 4 optimizer
// start failure, 5 baseline bracket failure.
inline int run_with_config(RunMode subcommand, const std::filesystem::path& config_path,
                           const CliOverrides& overrides) {
  try {
    RunConfig cfg = load_run_config(config_path);
    if (cfg.mode != subcommand) {
      throw ConfigError("config: mode '" + to_string(cfg.mode) + "' does not match subcommand '" +
                        to_string(subcommand) + "'");
    }
    if (overrides.out_dir) cfg.out_dir = *overrides.out_dir;
    if (overrides.seed) cfg.seed = *overrides.seed;
    if (overrides.resolution) {
      if (*overrides.resolution < 100) throw ConfigError("--resolution must be >= 100");
      cfg.resolution = *overrides.resolution;
    }
    switch (cfg.mode) {
      case RunMode::invert: return run_invert(cfg, overrides.quiet);
      case RunMode::optimize: return run_optimize(cfg, overrides.quiet);
      case RunMode::baseline: return run_baseline(cfg, overrides.quiet);
      case RunMode::scan: return run_scan(cfg, overrides.quiet);
    }
    return 3;
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "error (ConfigError): %s\n", e.what());
    return 2;
  } catch (const NoFiniteStart& e) {
    std::fprintf(stderr, "error (NoFiniteStart): %s\n", e.what());
    return 4;
  } catch (const BracketTooNarrow& e) {
    std::fprintf(stderr, "error (BracketTooNarrow): %s\n", e.what());
    return 5;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error (%s): %s\n", detail::error_name(e).c_str(), e.what());
    return 3;
  }
}

}  // namespace cap1d
