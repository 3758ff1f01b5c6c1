// magblock: steady-state magnon statistics of the driven qubit-magnon system.

#include <CLI11.hpp>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "magblock/config.hpp"
#include "magblock/model.hpp"
#include "magblock/observables.hpp"
#include "magblock/output.hpp"
#include "magblock/pipeline.hpp"
#include "magblock/sweep.hpp"
#include "magblock/trajectory.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace magblock;

namespace {

enum ExitCode : int { kOk = 0, kUsage = 1, kNoExcitation = 2, kTruncation = 3 };

constexpr const char* kExitCodes =
    "Exit codes:\n"
    "  0  success\n"
    "  1  invalid arguments, malformed configuration, or I/O failure\n"
    "  2  steady state carries no magnon excitation (g2 undefined)\n"
    "  3  Fock cutoff did not converge below the hard cap\n"
    "\n"
    "Environment:\n"
    "  MAGBLOCK_MAX_WORKERS  upper bound on worker threads";

struct CommonOptions {
  std::string config_path;
  std::vector<std::string> overrides;
  std::string cutoff;  // "auto" or integer
  std::optional<std::uint64_t> seed;
  int workers = 0;
};

void add_common(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("--config", o.config_path, "JSON configuration file")->check(CLI::ExistingFile);
  cmd->add_option("--param", o.overrides, "override a system parameter, e.g. delta=14.8")
      ->take_all();
  cmd->add_option("--cutoff", o.cutoff, "Fock cutoff: auto or an integer");
  cmd->add_option("--seed", o.seed, "trajectory RNG seed");
  cmd->add_option("--workers", o.workers, "worker threads (0: all cores)");
}

void apply_cutoff_flag(const CommonOptions& o, SweepSpec& spec) {
  if (o.cutoff.empty()) return;
  if (o.cutoff == "auto") {
    spec.cutoff.automatic = true;
    return;
  }
  try {
    std::size_t used = 0;
    spec.cutoff.fixed = std::stoi(o.cutoff, &used);
    if (used != o.cutoff.size()) throw std::invalid_argument(o.cutoff);
  } catch (const std::exception&) {
    throw ConfigError("--cutoff must be \"auto\" or an integer");
  }
  spec.cutoff.automatic = false;
  spec.base.n_max = spec.cutoff.fixed;
}

// Precedence: command line > config file > built-in defaults.
RunConfig resolve(const CommonOptions& o,
                  const SystemParams& defaults = SystemParams::paper_defaults()) {
  RunConfig cfg;
  if (o.config_path.empty()) {
    cfg.spec.base = defaults;
    cfg.spec.trajectory = TrajectoryConfig::defaults_for(defaults);
  } else {
    cfg = load_config(o.config_path, defaults);
  }
  for (const auto& a : o.overrides) apply_override(cfg.spec.base, a);
  apply_cutoff_flag(o, cfg.spec);
  if (o.seed) cfg.spec.trajectory.rng_seed = *o.seed;
  cfg.spec.trajectory.workers = o.workers;
  cfg.spec.base.validate();
  return cfg;
}

json classification_json(double g2, const ClassifyOptions& opts) {
  const Classification c = classify(g2, opts);
  return json{{"statistics", std::string(to_string(c.statistics))}, {"blockade", c.blockade}};
}

void emit(const json& record, const std::string& out_dir, const std::string& name) {
  std::cout << record.dump() << std::endl;
  if (!out_dir.empty()) {
    fs::create_directories(out_dir);
    std::ofstream out(fs::path(out_dir) / name);
    if (!out) throw Error("cannot write " + (fs::path(out_dir) / name).string());
    out << record.dump(2) << '\n';
  }
}

int cmd_g2(const CommonOptions& o, const std::string& out_dir) {
  const RunConfig cfg = resolve(o);
  const SweepSpec& spec = cfg.spec;
  CutoffOptions copts;
  copts.g2_tol = spec.cutoff.g2_tol;
  const PointSolution sol = spec.cutoff.automatic
                                ? solve_converged(spec.base, copts)
                                : solve_point(spec.base.with_cutoff(spec.cutoff.fixed));
  json record{{"g2", sol.g2},
              {"mean_number", sol.mean_number},
              {"cutoff_used", sol.cutoff},
              {"top_level_population", sol.top_population},
              {"classification", classification_json(sol.g2, cfg.classify)},
              {"solver",
               {{"method", "steady state, direct solve"},
                {"residual", sol.residual},
                {"cutoff_policy", spec.cutoff.automatic ? "auto" : "fixed"},
                {"g2_tol", spec.cutoff.g2_tol}}},
              {"params", to_json(spec.base.with_cutoff(sol.cutoff))},
              {"code_version", code_version()}};
  emit(record, out_dir, "g2.json");
  return kOk;
}

int cmd_spectrum(const CommonOptions& o) {
  SystemParams defaults = SystemParams::paper_defaults();
  defaults.omega_drive = 0.0;
  defaults.xi_probe = 0.0;
  defaults.n_max = 4;
  const RunConfig cfg = resolve(o, defaults);
  const SystemParams& p = cfg.spec.base;
  if (p.omega_drive != 0.0 || p.xi_probe != 0.0) {
    throw PreconditionError("spectrum requires omega_drive = 0 and xi_probe = 0");
  }
  const DressedSpectrum s = dressed_spectrum(p);
  std::cout << "# excitations energy_over_gamma\n";
  for (std::size_t i = 0; i < s.energies.size(); ++i) {
    std::cout << s.excitation_labels[i] << ' ' << format_double(s.energies[i]) << '\n';
  }
  std::cout << "# excitations splitting_over_gamma\n";
  for (int n = 1; n <= 2 && n <= p.n_max; ++n) {
    std::cout << n << ' ' << format_double(s.splitting(n)) << '\n';
  }
  return kOk;
}

struct FigureOptions {
  std::string name;
  std::string out_dir = ".";
  std::string format = "csv";
  bool plot_script = false;
};

int write_figure(const CommonOptions& o, const FigureOptions& f) {
  const DataFormat fmt = format_from_name(f.format);
  std::vector<std::string> panels{f.name};
  if (f.name == "fig5") panels.push_back("fig5_inset");

  // A config file may only re-range preset axes; figures keep their parameters.
  std::vector<Axis> ranges;
  if (!o.config_path.empty()) ranges = load_config(o.config_path).spec.axes;

  SweepOptions sopts;
  sopts.workers = o.workers;
  for (const std::string& panel : panels) {
    std::vector<WrittenCurve> written;
    for (FigureCurve& curve : figure_preset(panel)) {
      SweepSpec& spec = curve.spec;
      for (const Axis& r : ranges) {
        for (Axis& a : spec.axes) {
          if (a.param == r.param) a = r;
        }
      }
      for (const auto& a : o.overrides) apply_override(spec.base, a);
      apply_cutoff_flag(o, spec);
      if (o.seed) spec.trajectory.rng_seed = *o.seed;
      const SweepResult r = run_sweep(spec, sopts);
      written.push_back(write_result(f.out_dir, panel + "_" + curve.label, r, fmt, panel,
                                     curve.label));
      std::cerr << "wrote " << written.back().data_file.string() << '\n';
    }
    if (f.plot_script) {
      if (fmt != DataFormat::csv) {
        throw ConfigError("--plot-script requires --format csv");
      }
      const fs::path script = fs::path(f.out_dir) / (panel + ".gp");
      std::ofstream out(script);
      if (!out) throw Error("cannot write " + script.string());
      out << gnuplot_script(panel, written);
      std::cerr << "wrote " << script.string() << '\n';
    }
  }
  return kOk;
}

int cmd_sweep(const CommonOptions& o, const FigureOptions& f) {
  if (o.config_path.empty()) throw ConfigError("sweep requires --config with an \"axes\" block");
  RunConfig cfg = resolve(o);
  SweepOptions sopts;
  sopts.workers = o.workers;
  const SweepResult r = run_sweep(cfg.spec, sopts);
  const std::string stem = fs::path(o.config_path).stem().string();
  const DataFormat fmt = format_from_name(f.format);
  const WrittenCurve w = write_result(f.out_dir, stem, r, fmt, "", "");
  std::cerr << "wrote " << w.data_file.string() << '\n';
  if (f.plot_script && fmt == DataFormat::csv) {
    std::ofstream out(fs::path(f.out_dir) / (stem + ".gp"));
    out << gnuplot_script(stem, {w});
  }
  return kOk;
}

int cmd_trajectory(const CommonOptions& o, const std::string& out_dir, bool compare) {
  RunConfig cfg = resolve(o);
  const SweepSpec& spec = cfg.spec;
  const int cutoff = spec.cutoff.automatic ? converged_cutoff(spec.base, spec.cutoff.g2_tol)
                                           : spec.cutoff.fixed;
  const SystemParams p = spec.base.with_cutoff(cutoff);
  const TrajectoryEstimate est = ensemble_g2(p, spec.trajectory);
  json jumps = json::object();
  jumps["magnon_decay"] = est.jump_counts[0];
  jumps["magnon_heating"] = est.jump_counts[1];
  jumps["qubit_decay"] = est.jump_counts[2];
  json record{{"g2", est.g2_mean},
              {"g2_stderr", std::isfinite(est.g2_stderr) ? json(est.g2_stderr) : json("inf")},
              {"mean_number", est.n_mean},
              {"mean_number_stderr",
               std::isfinite(est.n_stderr) ? json(est.n_stderr) : json("inf")},
              {"jump_counts", jumps},
              {"sampled_time", est.sampled_time},
              {"cutoff_used", cutoff},
              {"classification", classification_json(est.g2_mean, cfg.classify)},
              {"trajectory", to_json(spec.trajectory)},
              {"rng_algorithm", std::string(kRngAlgorithm)},
              {"params", to_json(p)},
              {"code_version", code_version()}};
  if (compare) {
    const PointSolution det = solve_point(p);
    record["deterministic_g2"] = det.g2;
    record["deviation_in_stderr"] = std::abs(est.g2_mean - det.g2) / est.g2_stderr;
  }
  emit(record, out_dir, "trajectory.json");
  return kOk;
}

int cmd_nth(double omega_ghz, double temperature_mk) {
  if (!(omega_ghz > 0.0) || !(temperature_mk > 0.0)) {
    throw InvalidParameter("frequency and temperature must be > 0");
  }
  std::cout << format_double(thermal_occupation(omega_ghz * 1e9, temperature_mk * 1e-3)) << '\n';
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"magblock: magnon blockade in a driven qubit-magnon system"};
  app.footer(kExitCodes);
  app.require_subcommand(1);

  CommonOptions common;
  FigureOptions fig;
  std::string out_dir;
  bool compare = false;
  double omega_ghz = 8.5, temperature_mk = 20.0;

  auto* g2 = app.add_subcommand("g2", "g2(0) and occupation at one parameter point");
  add_common(g2, common);
  g2->add_option("--out", out_dir, "also write g2.json into this directory");

  auto* spectrum = app.add_subcommand("spectrum", "dressed levels of the undriven system");
  add_common(spectrum, common);

  auto* figure = app.add_subcommand("figure", "write the dataset of a figure preset");
  add_common(figure, common);
  figure->add_option("name", fig.name, "figure name")
      ->required()
      ->check(CLI::IsMember(figure_names()));
  figure->add_option("--out", fig.out_dir, "output directory");
  figure->add_option("--format", fig.format, "csv or ndjson")
      ->check(CLI::IsMember({"csv", "ndjson"}));
  figure->add_flag("--plot-script", fig.plot_script, "also write a gnuplot script");

  auto* sweep = app.add_subcommand("sweep", "run the sweep described in a config file");
  add_common(sweep, common);
  sweep->add_option("--out", fig.out_dir, "output directory");
  sweep->add_option("--format", fig.format, "csv or ndjson")
      ->check(CLI::IsMember({"csv", "ndjson"}));
  sweep->add_flag("--plot-script", fig.plot_script, "also write a gnuplot script");

  auto* traj = app.add_subcommand("trajectory", "Monte Carlo wave-function estimate of g2(0)");
  add_common(traj, common);
  traj->add_option("--out", out_dir, "also write trajectory.json into this directory");
  traj->add_flag("--compare", compare, "also report the deterministic g2 at the same cutoff");

  auto* nth = app.add_subcommand("nth", "thermal magnon occupation");
  nth->add_option("--omega-ghz", omega_ghz, "magnon frequency / 2 pi in GHz");
  nth->add_option("--temperature-mk", temperature_mk, "bath temperature in mK");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*g2) return cmd_g2(common, out_dir);
    if (*spectrum) return cmd_spectrum(common);
    if (*figure) return write_figure(common, fig);
    if (*sweep) return cmd_sweep(common, fig);
    if (*traj) return cmd_trajectory(common, out_dir, compare);
    if (*nth) return cmd_nth(omega_ghz, temperature_mk);
  } catch (const NoExcitation& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kNoExcitation;
  } catch (const TruncationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kTruncation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  }
  return kUsage;
}
