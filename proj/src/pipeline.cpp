#include "magblock/pipeline.hpp"

#include <cmath>
#include <optional>
#include <sstream>

namespace magblock {

PointSolution solve_point(const SystemParams& p) {
  p.validate();
  SteadyStateInfo info;
  DensityMatrix rho = steady_state(build_liouvillian(p), {}, &info);
  const MagnonStats stats = magnon_stats(rho);
  return PointSolution{p.n_max,          std::move(rho),             stats.g2_zero,
                       stats.mean_number, stats.top_level_population, info.residual};
}

PointSolution solve_converged(const SystemParams& p, const CutoffOptions& opts) {
  if (!(opts.g2_tol > 0.0)) {
    throw PreconditionError("cutoff convergence tolerance must be > 0");
  }
  if (opts.start < 1 || opts.step < 1 || opts.start + opts.step > opts.cap) {
    throw PreconditionError("invalid cutoff ladder");
  }
  std::optional<PointSolution> current = solve_point(p.with_cutoff(opts.start));
  double last_change = 0.0;
  for (int n = opts.start; n + opts.step <= opts.cap; n += opts.step) {
    PointSolution next = solve_point(p.with_cutoff(n + opts.step));
    last_change = std::abs(current->g2 - next.g2) / next.g2;
    if (last_change < opts.g2_tol && current->top_population < opts.top_population_tol) {
      return std::move(*current);
    }
    current = std::move(next);
  }
  std::ostringstream msg;
  msg << "g2 not converged at cutoff cap " << opts.cap << " (relative change " << last_change
      << ") for delta_q=" << p.delta_q << " delta_m=" << p.delta_m << " g_qm=" << p.g_qm
      << " omega_drive=" << p.omega_drive << " xi_probe=" << p.xi_probe << " n_th=" << p.n_th;
  throw TruncationError(msg.str());
}

int converged_cutoff(const SystemParams& p, double g2_tol) {
  CutoffOptions opts;
  opts.g2_tol = g2_tol;
  return solve_converged(p, opts).cutoff;
}

}  // namespace magblock
