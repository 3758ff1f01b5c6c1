#pragma once

// Monte Carlo wave-function (quantum-jump) unraveling of the master equation.
//
// Between jumps the unnormalized state evolves under
// H_nh = H - (i/2) sum_k C_k^dag C_k. Because H_nh is time independent the
// propagation over each step is exact (matrix exponential); a jump fires when
// ||psi||^2 falls to a uniform draw r, with the crossing time located by
// bisection over precomputed dyadic sub-step propagators.

#include <array>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "magblock/hilbert.hpp"
#include "magblock/model.hpp"

namespace magblock {

/// Frozen generator choice, echoed in run metadata.
inline constexpr std::string_view kRngAlgorithm =
    "mt19937_64 per trajectory, seeded with splitmix64(seed, trajectory index)";

struct TrajectoryConfig {
  int n_trajectories = 500;
  double t_burn_in = 20.0;
  double t_sample = 200.0;
  double sample_interval = 0.5;
  std::uint64_t rng_seed = 12345;
  double dt_max = 0.5;
  int workers = 0;  ///< 0: all available cores
  int bootstrap_resamples = 1000;

  void validate() const;

  /// Burn-in of 20 / min(positive damping rates); other fields default.
  static TrajectoryConfig defaults_for(const SystemParams& p);
};

/// 64-bit seed of trajectory `index` in the stream family `seed`.
std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t index);

struct JumpRecord {
  double time = 0.0;
  int channel = 0;
};

struct TrajectorySample {
  double mean_number = 0.0;  ///< time-averaged <m^dag m>
  double mean_pair = 0.0;    ///< time-averaged <m^dag m^dag m m>
  std::array<long, channel_count> jumps_in_window{};
  std::vector<JumpRecord> jumps;  ///< every jump, burn-in included
  double sampled_time = 0.0;
  double final_norm_squared = 1.0;  ///< ||psi||^2 at the end of the run
};

/// Precomputed non-Hermitian evolution for one (H, collapse set).
class JumpPropagator {
 public:
  JumpPropagator(const Operator& h, std::span<const CollapseOp> collapse_ops);

  /// Exact propagators over one step h and its dyadic fractions h / 2^k,
  /// k = 0..levels, with h / 2^levels below the jump-time tolerance.
  struct StepTable {
    double step = 0.0;
    int substeps = 1;  ///< steps per sample interval
    int levels = 0;
    std::vector<ComplexMatrix> powers;
  };

  StepTable step_table(const TrajectoryConfig& cfg) const;

  TrajectorySample run(const StateVector& psi0, const TrajectoryConfig& cfg,
                       std::uint64_t traj_index) const;
  TrajectorySample run(const StateVector& psi0, const TrajectoryConfig& cfg,
                       std::uint64_t traj_index, const StepTable& table) const;

  int channels() const { return static_cast<int>(jump_ops_.size()); }

 private:
  ComplexMatrix propagator(double tau) const;

  SpaceDims dims_;
  ComplexMatrix h_eff_;  ///< -i H_nh
  std::vector<ComplexMatrix> jump_ops_;
  std::vector<int> channel_ids_;
  Eigen::VectorXd number_diag_;
  Eigen::VectorXd pair_diag_;
};

/// One trajectory from the vacuum |g,0> under the model of p.
TrajectorySample run_trajectory(const SystemParams& p, const TrajectoryConfig& cfg,
                                std::uint64_t traj_index);

struct TrajectoryEstimate {
  double g2_mean = 0.0;
  double g2_stderr = 0.0;  ///< bootstrap; +inf for a single trajectory
  double n_mean = 0.0;
  double n_stderr = 0.0;
  std::array<long, channel_count> jump_counts{};  ///< within sampling windows
  double sampled_time = 0.0;                      ///< summed over trajectories
  int n_trajectories = 0;

  double jump_rate(Channel c) const {
    return sampled_time > 0.0 ? jump_counts[static_cast<int>(c)] / sampled_time : 0.0;
  }
};

/// Reduces per-trajectory samples in index order. Throws NoExcitation when
/// the mean occupation is below kOccupationFloor.
TrajectoryEstimate reduce_samples(std::span<const TrajectorySample> samples,
                                  std::uint64_t seed, int bootstrap_resamples);

TrajectoryEstimate ensemble_g2(const SystemParams& p, const TrajectoryConfig& cfg);

}  // namespace magblock
