// latinpgd: space-time LATIN-PGD and incremental reference runs of a damaging beam.
#include "latinpgd/io.hpp"
#include "latinpgd/run.hpp"

#include <CLI11.hpp>

#ifdef _OPENMP
#include <omp.h>
#endif

#include <iostream>
#include <optional>

using namespace latinpgd;

namespace {

struct Options {
  std::string config;
  std::string preset;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  int threads = 0;
  bool dump = false;
  CalibrateParams calibrate;
};

RunConfig load_config(const Options& o) {
  if (!o.config.empty() && !o.preset.empty()) throw ConfigError("--config and --preset are mutually exclusive");
  if (o.config.empty() && o.preset.empty()) throw ConfigError("one of --config or --preset is required");
  RunConfig c = o.config.empty() ? preset(o.preset) : parse_config_file(o.config);
  if (o.seed) c.solver.seed = *o.seed;
  if (!o.out_dir.empty()) c.output.directory = o.out_dir;
  return c;
}

void set_threads(int n) {
#ifdef _OPENMP
  if (n > 0) omp_set_num_threads(n);
  omp_set_dynamic(0);
#else
  (void)n;
#endif
}

void report(const RunOutcome& r, const RunConfig& c) {
  for (const auto& [k, v] : r.metrics) std::cout << k << " = " << format_number(v) << "\n";
  std::cout << "outputs: " << c.output.directory << " (" << r.files.size() << " files)\n";
  if (!r.converged) std::cout << "status: not converged\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"LATIN-PGD space-time solver for damaging concrete beams"};
  app.require_subcommand(1);
  Options o;

  auto add_common = [&o](CLI::App* sub) {
    sub->add_option("--config", o.config, "Configuration file")->check(CLI::ExistingFile);
    sub->add_option("--preset", o.preset, "Built-in configuration")->check(CLI::IsMember(preset_names()));
    sub->add_option("--out-dir", o.out_dir, "Output directory (overrides output.directory)");
    sub->add_option("--seed", o.seed, "Random seed (overrides solver.seed)");
    sub->add_option("--threads", o.threads, "Worker threads, 0 = auto, 1 = deterministic")->check(CLI::NonNegativeNumber);
  };

  struct Sub {
    CLI::App* app;
    RunOutcome (*fn)(const RunConfig&, const std::string&);
  };
  std::vector<Sub> subs = {
      {app.add_subcommand("run-latin", "LATIN-PGD run"), cmd_run_latin},
      {app.add_subcommand("run-newmark", "Incremental Newmark quasi-Newton reference run"), cmd_run_newmark},
      {app.add_subcommand("compare", "Both solvers and their comparison error"), cmd_compare},
      {app.add_subcommand("matpoint", "Single material point under a uniaxial strain drive"), cmd_matpoint},
      {app.add_subcommand("modal", "Lowest natural frequencies of the supported beam"), cmd_modal},
  };
  for (auto& s : subs) add_common(s.app);
  CLI::App* calibrate = app.add_subcommand("calibrate", "Scale the load amplitudes to a target max damage");
  add_common(calibrate);
  calibrate->add_option("--target", o.calibrate.target, "Target max damage at the monitored point")
      ->check(CLI::Range(0.0, 1.0));
  calibrate->add_option("--tolerance", o.calibrate.tolerance, "Absolute damage tolerance");
  CLI::App* show = app.add_subcommand("show-config", "Print the canonical configuration text");
  add_common(show);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInput;
  }

  RunConfig c;
  try {
    c = load_config(o);
  } catch (const ConfigError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInput;
  }
  set_threads(o.threads);

  try {
    if (show->parsed()) {
      std::cout << to_text(c);
      return kExitOk;
    }
    RunOutcome r;
    if (calibrate->parsed()) {
      r = cmd_calibrate(c, c.output.directory, o.calibrate);
    } else {
      for (auto& s : subs)
        if (s.app->parsed()) r = s.fn(c, c.output.directory);
    }
    report(r, c);
    return r.exit_code();
  } catch (const ConfigError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  }
}
