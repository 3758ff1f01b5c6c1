#include "magblock/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <unsupported/Eigen/MatrixFunctions>

#include "magblock/observables.hpp"
#include "magblock/parallel.hpp"

namespace magblock {

namespace {

constexpr double kBisectionTol = 1e-10;
constexpr double kNormUnderflow = 1e-250;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Uniform on the open interval (0, 1) from the top 53 bits.
double open_unit(std::mt19937_64& rng) {
  return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

}  // namespace

void TrajectoryConfig::validate() const {
  if (n_trajectories < 1) throw InvalidParameter("n_trajectories must be >= 1");
  if (!(t_burn_in > 0.0) || !(t_sample > 0.0) || !(sample_interval > 0.0) || !(dt_max > 0.0)) {
    throw InvalidParameter("trajectory durations must be > 0");
  }
  if (sample_interval > t_sample) {
    throw InvalidParameter("sample_interval must not exceed t_sample");
  }
  if (bootstrap_resamples < 1) throw InvalidParameter("bootstrap_resamples must be >= 1");
}

TrajectoryConfig TrajectoryConfig::defaults_for(const SystemParams& p) {
  TrajectoryConfig cfg;
  double slowest = p.kappa_m;
  if (p.kappa_q > 0.0) slowest = std::min(slowest, p.kappa_q);
  cfg.t_burn_in = 20.0 / slowest;
  return cfg;
}

std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t index) {
  return splitmix64(splitmix64(seed) ^ splitmix64(~index));
}

JumpPropagator::JumpPropagator(const Operator& h, std::span<const CollapseOp> collapse_ops)
    : dims_(h.dims()) {
  const int d = dims_.total();
  ComplexMatrix decay = ComplexMatrix::Zero(d, d);
  int id = 0;
  for (const CollapseOp& c : collapse_ops) {
    if (!(c.op.dims() == dims_)) {
      throw DimensionMismatch("collapse operator and Hamiltonian act on different spaces");
    }
    const int channel = id++;
    if (c.rate < 0.0) throw InvalidParameter("collapse rate must be >= 0");
    if (c.rate == 0.0) continue;
    const ComplexMatrix cm = c.scaled().matrix();
    decay += cm.adjoint() * cm;
    jump_ops_.push_back(cm);
    channel_ids_.push_back(channel);
  }
  const Complex i_unit(0.0, 1.0);
  h_eff_ = -i_unit * h.matrix() - 0.5 * decay;

  number_diag_.resize(d);
  pair_diag_.resize(d);
  for (int q = 0; q < 2; ++q) {
    for (int n = 0; n < dims_.magnon_dim(); ++n) {
      const int k = dims_.index(static_cast<QubitLevel>(q), n);
      number_diag_(k) = n;
      pair_diag_(k) = static_cast<double>(n) * (n - 1);
    }
  }
}

ComplexMatrix JumpPropagator::propagator(double tau) const {
  return (tau * h_eff_).exp();
}

JumpPropagator::StepTable JumpPropagator::step_table(const TrajectoryConfig& cfg) const {
  cfg.validate();
  StepTable table;
  const int substeps = static_cast<int>(std::ceil(cfg.sample_interval / cfg.dt_max - 1e-12));
  table.step = cfg.sample_interval / substeps;
  table.substeps = substeps;
  table.levels = std::max(1, static_cast<int>(std::ceil(std::log2(table.step / kBisectionTol))));
  table.levels = std::min(table.levels, 62);
  table.powers.reserve(table.levels + 1);
  for (int k = 0; k <= table.levels; ++k) table.powers.push_back(propagator(std::ldexp(table.step, -k)));
  return table;
}

TrajectorySample JumpPropagator::run(const StateVector& psi0, const TrajectoryConfig& cfg,
                                     std::uint64_t traj_index) const {
  return run(psi0, cfg, traj_index, step_table(cfg));
}

TrajectorySample JumpPropagator::run(const StateVector& psi0, const TrajectoryConfig& cfg,
                                     std::uint64_t traj_index, const StepTable& table) const {
  cfg.validate();
  if (!(psi0.dims() == dims_)) {
    throw DimensionMismatch("initial state and propagator act on different spaces");
  }

  const double h = table.step;
  const int substeps = table.substeps;
  const int levels = table.levels;
  // Time inside a step is counted in units of h / 2^levels.
  const std::uint64_t units_per_step = std::uint64_t{1} << levels;
  const double unit = std::ldexp(h, -levels);
  const long burn_steps = static_cast<long>(std::ceil(cfg.t_burn_in / h - 1e-12));
  const long samples = static_cast<long>(std::floor(cfg.t_sample / cfg.sample_interval + 1e-9));
  const long total_steps = burn_steps + samples * substeps;
  const double t_window_start = burn_steps * h;

  // Exact propagation over `units` units by binary decomposition.
  auto advance = [&](const ComplexVector& v, std::uint64_t units) {
    ComplexVector out = v;
    for (int k = 0; k <= levels; ++k) {
      if (units & (std::uint64_t{1} << (levels - k))) out = table.powers[k] * out;
    }
    return out;
  };

  std::mt19937_64 rng(stream_seed(cfg.rng_seed, traj_index));

  TrajectorySample out;
  ComplexVector psi = psi0.vector() / psi0.norm();
  double r = open_unit(rng);
  double sum_n = 0.0, sum_pair = 0.0;
  long taken = 0;

  auto sample = [&] {
    const Eigen::VectorXd prob = psi.cwiseAbs2();
    const double norm2 = prob.sum();
    sum_n += prob.dot(number_diag_) / norm2;
    sum_pair += prob.dot(pair_diag_) / norm2;
    ++taken;
  };

  auto jump = [&](double when) {
    std::vector<double> weights(jump_ops_.size());
    double total = 0.0;
    for (std::size_t k = 0; k < jump_ops_.size(); ++k) {
      weights[k] = (jump_ops_[k] * psi).squaredNorm();
      total += weights[k];
    }
    if (!(total > 0.0)) {
      throw IntegratorError("norm decayed but no jump channel is active");
    }
    const double pick = open_unit(rng) * total;
    std::size_t k = 0;
    double acc = weights[0];
    while (k + 1 < weights.size() && pick > acc) acc += weights[++k];
    psi = jump_ops_[k] * psi;
    psi /= psi.norm();
    out.jumps.push_back({when, channel_ids_[k]});
    if (when > t_window_start) ++out.jumps_in_window[channel_ids_[k]];
    r = open_unit(rng);
  };

  for (long s = 0; s < total_steps; ++s) {
    const double t_step = s * h;
    std::uint64_t pos = 0;
    ComplexVector next = table.powers[0] * psi;
    while (next.squaredNorm() <= r) {
      // ||psi(tau)||^2 is non-increasing, so bisection reduces to picking the
      // largest dyadic offset that stays above r.
      const std::uint64_t left = units_per_step - pos;
      std::uint64_t lo = 0;
      for (int k = 1; k <= levels; ++k) {
        const std::uint64_t span = std::uint64_t{1} << (levels - k);
        if (lo + span >= left) continue;
        ComplexVector trial = table.powers[k] * psi;
        if (trial.squaredNorm() > r) {
          psi = std::move(trial);
          lo += span;
        }
      }
      // Crossing lies within one unit after lo.
      psi = table.powers[levels] * psi;
      pos += lo + 1;
      if (!psi.allFinite() || psi.squaredNorm() < kNormUnderflow) {
        throw IntegratorError("state norm underflow while resolving a jump");
      }
      jump(t_step + pos * unit);
      next = pos < units_per_step ? advance(psi, units_per_step - pos) : psi;
    }
    psi = std::move(next);
    if (!psi.allFinite() || psi.squaredNorm() < kNormUnderflow) {
      throw IntegratorError("state norm underflow without a resolved jump");
    }
    const long done = s + 1;
    // Sample points t_window_start + k * sample_interval, k = 1..samples.
    if (done > burn_steps && (done - burn_steps) % substeps == 0) sample();
  }

  out.mean_number = taken > 0 ? sum_n / taken : 0.0;
  out.mean_pair = taken > 0 ? sum_pair / taken : 0.0;
  out.sampled_time = samples * cfg.sample_interval;
  out.final_norm_squared = psi.squaredNorm();
  return out;
}

TrajectorySample run_trajectory(const SystemParams& p, const TrajectoryConfig& cfg,
                                std::uint64_t traj_index) {
  const auto cs = build_collapse_ops(p);
  const JumpPropagator prop(build_hamiltonian(p), cs);
  return prop.run(StateVector::basis(p.dims(), QubitLevel::ground, 0), cfg, traj_index);
}

TrajectoryEstimate reduce_samples(std::span<const TrajectorySample> samples, std::uint64_t seed,
                                  int bootstrap_resamples) {
  const std::size_t count = samples.size();
  if (count == 0) throw InvalidParameter("no trajectory samples to reduce");

  TrajectoryEstimate est;
  est.n_trajectories = static_cast<int>(count);
  double sum_n = 0.0, sum_pair = 0.0;
  for (const auto& s : samples) {
    sum_n += s.mean_number;
    sum_pair += s.mean_pair;
    est.sampled_time += s.sampled_time;
    for (int k = 0; k < channel_count; ++k) est.jump_counts[k] += s.jumps_in_window[k];
  }
  est.n_mean = sum_n / count;
  if (est.n_mean < kOccupationFloor) {
    throw NoExcitation("trajectory ensemble carries no magnon excitation");
  }
  est.g2_mean = (sum_pair / count) / (est.n_mean * est.n_mean);

  if (count == 1) {
    est.g2_stderr = std::numeric_limits<double>::infinity();
    est.n_stderr = std::numeric_limits<double>::infinity();
    return est;
  }

  double var_n = 0.0;
  for (const auto& s : samples) var_n += (s.mean_number - est.n_mean) * (s.mean_number - est.n_mean);
  est.n_stderr = std::sqrt(var_n / (count - 1) / count);

  std::mt19937_64 rng(stream_seed(seed, 0xB007'5742'0000'0000ULL));
  std::uniform_int_distribution<std::size_t> pick(0, count - 1);
  double acc = 0.0, acc2 = 0.0;
  for (int b = 0; b < bootstrap_resamples; ++b) {
    double bn = 0.0, bp = 0.0;
    for (std::size_t i = 0; i < count; ++i) {
      const auto& s = samples[pick(rng)];
      bn += s.mean_number;
      bp += s.mean_pair;
    }
    bn /= count;
    bp /= count;
    const double g = bn > 0.0 ? bp / (bn * bn) : 0.0;
    acc += g;
    acc2 += g * g;
  }
  const double mean_b = acc / bootstrap_resamples;
  est.g2_stderr =
      std::sqrt(std::max(0.0, acc2 / bootstrap_resamples - mean_b * mean_b) *
                bootstrap_resamples / std::max(1, bootstrap_resamples - 1));
  return est;
}

TrajectoryEstimate ensemble_g2(const SystemParams& p, const TrajectoryConfig& cfg) {
  cfg.validate();
  const auto cs = build_collapse_ops(p);
  const JumpPropagator prop(build_hamiltonian(p), cs);
  const StateVector vacuum = StateVector::basis(p.dims(), QubitLevel::ground, 0);
  const JumpPropagator::StepTable table = prop.step_table(cfg);

  std::vector<TrajectorySample> samples(cfg.n_trajectories);
  const int workers = resolve_workers(cfg.workers);
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic) num_threads(workers)
  for (int i = 0; i < cfg.n_trajectories; ++i) {
    try {
      samples[i] = prop.run(vacuum, cfg, static_cast<std::uint64_t>(i), table);
    } catch (...) {
#pragma omp critical
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return reduce_samples(samples, cfg.rng_seed, cfg.bootstrap_resamples);
}

}  // namespace magblock
