#pragma once

// Parameters -> steady state -> magnon statistics, at a fixed Fock cutoff or
// with automatic cutoff escalation.

#include "magblock/liouville.hpp"
#include "magblock/model.hpp"
#include "magblock/observables.hpp"

namespace magblock {

struct PointSolution {
  int cutoff = 0;
  DensityMatrix rho;
  double g2 = 0.0;
  double mean_number = 0.0;
  double top_population = 0.0;
  double residual = 0.0;
};

/// Steady state and g2 at p.n_max. Throws NoExcitation when g2 is undefined.
PointSolution solve_point(const SystemParams& p);

struct CutoffOptions {
  double g2_tol = 1e-3;
  int start = 4;
  int step = 4;
  int cap = 40;  ///< largest cutoff ever solved, reference solves included
  double top_population_tol = 1e-8;
};

/// Escalates the cutoff start, start + step, ... until g2 moves by less than
/// g2_tol (relative) against the next rung and the top Fock level is empty.
/// The returned solution is the one at the accepted (smaller) cutoff.
PointSolution solve_converged(const SystemParams& p, const CutoffOptions& opts = {});

int converged_cutoff(const SystemParams& p, double g2_tol);

}  // namespace magblock
