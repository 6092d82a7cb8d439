// cap1d command line: configuration-driven design runs, S(k) scans and file
// outputs for 1D complex absorbing potentials.

#include <CLI11.hpp>
#include <string>

#include "cap1d/runner.hpp"
#include "cap1d/version.hpp"

namespace {

struct SubArgs {
  std::string config;
  std::string out_dir;
  std::uint64_t seed = 0;
  int resolution = 0;
  bool quiet = false;
  bool seed_set = false;
  bool resolution_set = false;
  bool out_dir_set = false;
};

void add_common(CLI::App* sub, SubArgs& args) {
  sub->add_option("--config", args.config, "path to the run configuration file")
      ->required()
      ->check(CLI::ExistingFile);
  sub->add_option("--out-dir", args.out_dir, "output directory (overrides run.out_dir)")
      ->each([&args](const std::string&) { args.out_dir_set = true; });
  sub->add_option("--seed", args.seed, "random seed (overrides run.seed)")
      ->each([&args](const std::string&) { args.seed_set = true; });
  sub->add_option("--resolution", args.resolution,
                  "slices per unit length (overrides run.resolution)")
      ->each([&args](const std::string&) { args.resolution_set = true; });
  sub->add_flag("--quiet", args.quiet, "suppress progress output");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{std::string{"cap1d "} + std::string{cap1d::kVersion} +
               " - composite absorbing potential toolkit"};
  app.require_subcommand(1);

  SubArgs invert_args, optimize_args, baseline_args, scan_args;
  CLI::App* invert = app.add_subcommand(
      "invert", "build a perfectly absorbing composite potential (polynomial inversion)");
  add_common(invert, invert_args);
  CLI::App* optimize = app.add_subcommand(
      "optimize", "optimize N complex square barriers for minimal summed survival");
  add_common(optimize, optimize_args);
  CLI::App* baseline = app.add_subcommand(
      "baseline", "optimize the -i eta x^2 comparison absorber");
  add_common(baseline, baseline_args);
  CLI::App* scan = app.add_subcommand(
      "scan", "replay an emitted potential/heights CSV and scan S(k)");
  add_common(scan, scan_args);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  const auto dispatch = [](cap1d::RunMode mode, const SubArgs& args) {
    cap1d::CliOverrides ov;
    if (args.out_dir_set) ov.out_dir = args.out_dir;
    if (args.seed_set) ov.seed = args.seed;
    if (args.resolution_set) ov.resolution = args.resolution;
    ov.quiet = args.quiet;
    return cap1d::run_with_config(mode, args.config, ov);
  };

  if (invert->parsed()) return dispatch(cap1d::RunMode::invert, invert_args);
  if (optimize->parsed()) return dispatch(cap1d::RunMode::optimize, optimize_args);
  if (baseline->parsed()) return dispatch(cap1d::RunMode::baseline, baseline_args);
  if (scan->parsed()) return dispatch(cap1d::RunMode::scan, scan_args);
  return 2;
}
