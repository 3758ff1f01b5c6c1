#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "magblock/model.hpp"
#include "magblock/trajectory.hpp"

namespace magblock {

enum class AxisParam { delta, g_qm, omega_drive, xi_probe, n_th };
enum class Spacing { linear, log };

struct Axis {
  AxisParam param = AxisParam::delta;
  double min = 0.0;
  double max = 1.0;
  int count = 2;
  Spacing spacing = Spacing::linear;

  void validate() const;
  /// Grid values; the first is exactly min and the last exactly max.
  std::vector<double> values() const;

  friend bool operator==(const Axis&, const Axis&) = default;
};

/// Sets the parameter an axis controls; `delta` moves both detunings.
void apply_axis(SystemParams& p, AxisParam param, double value);

std::string_view axis_name(AxisParam param);     ///< config key, e.g. "delta"
std::string_view axis_column(AxisParam param);   ///< data column, e.g. "delta_over_gamma"
AxisParam axis_from_name(std::string_view name);

enum class SolverKind { deterministic, trajectory };

struct CutoffPolicy {
  bool automatic = true;
  int fixed = 10;         ///< used when !automatic
  double g2_tol = 1e-3;   ///< used when automatic

  friend bool operator==(const CutoffPolicy&, const CutoffPolicy&) = default;
};

struct SweepSpec {
  SystemParams base = SystemParams::paper_defaults();
  std::vector<Axis> axes;
  SolverKind solver = SolverKind::deterministic;
  TrajectoryConfig trajectory;
  CutoffPolicy cutoff;

  void validate() const;
  std::vector<std::size_t> shape() const;
  std::size_t point_count() const;
  /// Parameters of the flat (row-major, first axis slowest) grid index.
  SystemParams params_at(std::size_t flat) const;
};

enum class PointStatus { ok, no_excitation, truncation_failed, solver_failed };
std::string_view to_string(PointStatus s);

struct SweepPoint {
  std::array<double, 2> coords{};
  double g2 = 0.0;
  double mean_number = 0.0;
  int cutoff_used = 0;
  double uncertainty = 0.0;  ///< steady-state residual, or g2 stderr for trajectories
  PointStatus status = PointStatus::ok;
  std::string message;       ///< failure detail, empty when ok
};

struct Provenance {
  std::string spec_hash;     ///< sha256 of the canonical spec JSON
  std::string code_version;
  std::string timestamp;     ///< UTC, ISO 8601
  std::uint64_t seed = 0;
  std::string rng_algorithm;
};

struct SweepResult {
  SweepSpec spec;
  std::vector<std::vector<double>> axis_values;
  std::vector<SweepPoint> points;  ///< row-major, first axis slowest
  Provenance provenance;
};

/// Evaluates one parameter point with the spec's solver and cutoff policy.
/// Failures are reported through the status field.
SweepPoint evaluate_point(const SweepSpec& spec, const SystemParams& p, int inner_workers = 1);

struct SweepOptions {
  int workers = 0;                          ///< 0: all available cores
  std::vector<std::size_t> evaluation_order;  ///< empty: natural order
};

SweepResult run_sweep(const SweepSpec& spec, const SweepOptions& opts = {});

struct FigureCurve {
  std::string label;
  SweepSpec spec;
};

std::vector<std::string> figure_names();

/// Parameter bindings of one figure panel, one spec per curve.
std::vector<FigureCurve> figure_preset(std::string_view name);

std::string code_version();

}  // namespace magblock
