#include "magblock/sweep.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <exception>
#include <sstream>

#include "magblock/config.hpp"
#include "magblock/parallel.hpp"
#include "magblock/pipeline.hpp"

#ifndef MAGBLOCK_VERSION
#define MAGBLOCK_VERSION "unknown"
#endif

namespace magblock {

std::string code_version() { return MAGBLOCK_VERSION; }

void Axis::validate() const {
  if (count < 2) throw InvalidParameter("axis count must be >= 2");
  if (!std::isfinite(min) || !std::isfinite(max) || !(min < max)) {
    throw InvalidParameter("axis requires finite min < max");
  }
  if (spacing == Spacing::log && !(min > 0.0)) {
    throw InvalidParameter("log-spaced axis requires min > 0");
  }
}

std::vector<double> Axis::values() const {
  validate();
  std::vector<double> v(count);
  for (int i = 0; i < count; ++i) {
    const double frac = static_cast<double>(i) / (count - 1);
    if (spacing == Spacing::linear) {
      v[i] = min + (max - min) * frac;
    } else {
      v[i] = std::exp(std::log(min) + (std::log(max) - std::log(min)) * frac);
    }
  }
  v.front() = min;
  v.back() = max;
  return v;
}

void apply_axis(SystemParams& p, AxisParam param, double value) {
  switch (param) {
    case AxisParam::delta:
      p.set_common_detuning(value);
      break;
    case AxisParam::g_qm:
      p.g_qm = value;
      break;
    case AxisParam::omega_drive:
      p.omega_drive = value;
      break;
    case AxisParam::xi_probe:
      p.xi_probe = value;
      break;
    case AxisParam::n_th:
      p.n_th = value;
      break;
  }
}

std::string_view axis_name(AxisParam param) {
  switch (param) {
    case AxisParam::delta:
      return "delta";
    case AxisParam::g_qm:
      return "g_qm";
    case AxisParam::omega_drive:
      return "omega_drive";
    case AxisParam::xi_probe:
      return "xi_probe";
    case AxisParam::n_th:
      return "n_th";
  }
  return "";
}

std::string_view axis_column(AxisParam param) {
  switch (param) {
    case AxisParam::delta:
      return "delta_over_gamma";
    case AxisParam::g_qm:
      return "g_qm_over_gamma";
    case AxisParam::omega_drive:
      return "omega_over_gamma";
    case AxisParam::xi_probe:
      return "xi_over_gamma";
    case AxisParam::n_th:
      return "n_th";
  }
  return "";
}

AxisParam axis_from_name(std::string_view name) {
  for (AxisParam p : {AxisParam::delta, AxisParam::g_qm, AxisParam::omega_drive,
                      AxisParam::xi_probe, AxisParam::n_th}) {
    if (axis_name(p) == name) return p;
  }
  throw InvalidParameter("unknown axis parameter \"" + std::string(name) + "\"");
}

void SweepSpec::validate() const {
  base.validate();
  if (axes.empty() || axes.size() > 2) throw InvalidParameter("a sweep needs one or two axes");
  for (const Axis& a : axes) a.validate();
  if (axes.size() == 2 && axes[0].param == axes[1].param) {
    throw InvalidParameter("sweep axes must control different parameters");
  }
  if (cutoff.automatic && !(cutoff.g2_tol > 0.0)) throw InvalidParameter("g2_tol must be > 0");
  if (!cutoff.automatic && cutoff.fixed < 1) throw InvalidParameter("fixed cutoff must be >= 1");
  if (solver == SolverKind::trajectory) trajectory.validate();
}

std::vector<std::size_t> SweepSpec::shape() const {
  std::vector<std::size_t> s;
  for (const Axis& a : axes) s.push_back(static_cast<std::size_t>(a.count));
  return s;
}

std::size_t SweepSpec::point_count() const {
  std::size_t n = 1;
  for (const Axis& a : axes) n *= static_cast<std::size_t>(a.count);
  return n;
}

SystemParams SweepSpec::params_at(std::size_t flat) const {
  SystemParams p = base;
  if (!cutoff.automatic) p.n_max = cutoff.fixed;
  std::size_t rest = flat;
  for (std::size_t k = axes.size(); k-- > 0;) {
    const std::size_t count = static_cast<std::size_t>(axes[k].count);
    const std::size_t i = rest % count;
    rest /= count;
    apply_axis(p, axes[k].param, axes[k].values()[i]);
  }
  return p;
}

std::string_view to_string(PointStatus s) {
  switch (s) {
    case PointStatus::ok:
      return "ok";
    case PointStatus::no_excitation:
      return "no-excitation";
    case PointStatus::truncation_failed:
      return "truncation-failed";
    case PointStatus::solver_failed:
      return "solver-failed";
  }
  return "unknown";
}

SweepPoint evaluate_point(const SweepSpec& spec, const SystemParams& p, int inner_workers) {
  SweepPoint pt;
  try {
    if (spec.solver == SolverKind::deterministic) {
      CutoffOptions copts;
      copts.g2_tol = spec.cutoff.g2_tol;
      const PointSolution sol = spec.cutoff.automatic ? solve_converged(p, copts)
                                                      : solve_point(p.with_cutoff(spec.cutoff.fixed));
      pt.g2 = sol.g2;
      pt.mean_number = sol.mean_number;
      pt.cutoff_used = sol.cutoff;
      pt.uncertainty = sol.residual;
    } else {
      const int cutoff = spec.cutoff.automatic ? converged_cutoff(p, spec.cutoff.g2_tol)
                                               : spec.cutoff.fixed;
      TrajectoryConfig cfg = spec.trajectory;
      cfg.workers = inner_workers;
      const TrajectoryEstimate est = ensemble_g2(p.with_cutoff(cutoff), cfg);
      pt.g2 = est.g2_mean;
      pt.mean_number = est.n_mean;
      pt.cutoff_used = cutoff;
      pt.uncertainty = est.g2_stderr;
    }
  } catch (const NoExcitation& e) {
    pt = SweepPoint{};
    pt.status = PointStatus::no_excitation;
    pt.message = e.what();
  } catch (const TruncationError& e) {
    pt = SweepPoint{};
    pt.status = PointStatus::truncation_failed;
    pt.message = e.what();
  } catch (const Error& e) {
    pt = SweepPoint{};
    pt.status = PointStatus::solver_failed;
    pt.message = e.what();
  }
  return pt;
}

namespace {

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

SweepResult run_sweep(const SweepSpec& spec, const SweepOptions& opts) {
  spec.validate();
  SweepResult result;
  result.spec = spec;
  for (const Axis& a : spec.axes) result.axis_values.push_back(a.values());

  const std::size_t n = spec.point_count();
  std::vector<std::size_t> order = opts.evaluation_order;
  if (order.empty()) {
    order.resize(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
  }
  std::vector<bool> seen(n, false);
  for (std::size_t i : order) {
    if (i >= n || seen[i]) throw InvalidParameter("evaluation order must be a permutation of the grid");
    seen[i] = true;
  }
  if (order.size() != n) throw InvalidParameter("evaluation order must cover every grid point");

  result.points.resize(n);
  const int workers = resolve_workers(opts.workers);
  const long long total = static_cast<long long>(n);
#pragma omp parallel for schedule(dynamic) num_threads(workers)
  for (long long k = 0; k < total; ++k) {
    const std::size_t flat = order[static_cast<std::size_t>(k)];
    SweepPoint pt = evaluate_point(spec, spec.params_at(flat));
    std::size_t rest = flat;
    for (std::size_t a = spec.axes.size(); a-- > 0;) {
      const std::size_t count = result.axis_values[a].size();
      pt.coords[a] = result.axis_values[a][rest % count];
      rest /= count;
    }
    result.points[flat] = std::move(pt);
  }

  result.provenance.spec_hash = sha256_hex(canonical_json(spec));
  result.provenance.code_version = code_version();
  result.provenance.timestamp = utc_timestamp();
  result.provenance.seed = spec.trajectory.rng_seed;
  result.provenance.rng_algorithm = std::string(kRngAlgorithm);
  return result;
}

// ---------------------------------------------------------------------------
// Figure presets. The ranges cover the features of interest (+-14.8, +-21,
// thermal thresholds 1e-4..1e-2) with headroom.

namespace {

Axis delta_axis() { return {AxisParam::delta, -30.0, 30.0, 241, Spacing::linear}; }
Axis coupling_axis() { return {AxisParam::g_qm, 0.0, 30.0, 121, Spacing::linear}; }
Axis drive_axis() { return {AxisParam::omega_drive, 0.01, 20.0, 81, Spacing::log}; }
Axis probe_axis() { return {AxisParam::xi_probe, 1e-4, 2.0, 81, Spacing::log}; }
Axis thermal_axis() { return {AxisParam::n_th, 1e-9, 1e-1, 49, Spacing::log}; }

std::string label_number(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

SweepSpec base_spec(std::vector<Axis> axes) {
  SweepSpec s;
  s.base = SystemParams::paper_defaults();
  s.axes = std::move(axes);
  s.trajectory = TrajectoryConfig::defaults_for(s.base);
  return s;
}

}  // namespace

std::vector<std::string> figure_names() {
  return {"fig2a", "fig2b", "fig4a", "fig4b", "fig4c", "fig4d", "fig5", "fig5_inset"};
}

std::vector<FigureCurve> figure_preset(std::string_view name) {
  std::vector<FigureCurve> out;
  if (name == "fig2a") {
    out.push_back({"map", base_spec({delta_axis(), coupling_axis()})});
  } else if (name == "fig2b") {
    out.push_back({"map", base_spec({drive_axis(), probe_axis()})});
  } else if (name == "fig4a") {
    for (double omega : {0.1, 2.0, 10.0}) {
      SweepSpec s = base_spec({delta_axis()});
      s.base.omega_drive = omega;
      out.push_back({"omega_" + label_number(omega), s});
    }
  } else if (name == "fig4b") {
    for (double delta : {14.8, 0.0, 21.0}) {
      SweepSpec s = base_spec({drive_axis()});
      s.base.set_common_detuning(delta);
      out.push_back({"delta_" + label_number(delta), s});
    }
  } else if (name == "fig4c") {
    for (double xi : {0.033, 0.06, 1.0}) {
      SweepSpec s = base_spec({delta_axis()});
      s.base.xi_probe = xi;
      out.push_back({"xi_" + label_number(xi), s});
    }
  } else if (name == "fig4d") {
    for (double delta : {14.8, 0.0, 21.0}) {
      SweepSpec s = base_spec({probe_axis()});
      s.base.set_common_detuning(delta);
      out.push_back({"delta_" + label_number(delta), s});
    }
  } else if (name == "fig5") {
    for (double nth : {0.0, 1e-4, 1e-3}) {
      SweepSpec s = base_spec({coupling_axis()});
      s.base.n_th = nth;
      out.push_back({"nth_" + label_number(nth), s});
    }
  } else if (name == "fig5_inset") {
    out.push_back({"inset", base_spec({thermal_axis()})});
  } else {
    throw InvalidParameter("unknown figure \"" + std::string(name) + "\"");
  }
  return out;
}

}  // namespace magblock
