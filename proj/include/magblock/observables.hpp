#pragma once

#include <string_view>
#include <vector>

#include "magblock/hilbert.hpp"

namespace magblock {

/// Below this mean magnon number g2 is reported as undefined.
inline constexpr double kOccupationFloor = 1e-12;

/// <m^dag m^dag m m> / <m^dag m>^2 of the magnon mode.
double g2_zero(const DensityMatrix& rho);

double mean_magnon_number(const DensityMatrix& rho);

/// Fock populations of the magnon after tracing out the qubit.
std::vector<double> magnon_marginal(const DensityMatrix& rho);

struct MagnonStats {
  double g2_zero = 0.0;
  double mean_number = 0.0;
  std::vector<double> fock_populations;
  double top_level_population = 0.0;
};

MagnonStats magnon_stats(const DensityMatrix& rho);

enum class Statistics { bunching, antibunching, poissonian };

struct Classification {
  Statistics statistics = Statistics::poissonian;
  bool blockade = false;
};

struct ClassifyOptions {
  double poisson_band = 1e-6;
  double blockade_threshold = 1e-2;
};

Classification classify(double g2, const ClassifyOptions& opts = {});

std::string_view to_string(Statistics s);

}  // namespace magblock
