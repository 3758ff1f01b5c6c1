#include "magblock/observables.hpp"

#include <cmath>
#include <sstream>
#include <string>

#include "magblock/model.hpp"

namespace magblock {

namespace {

constexpr double kImagTol = 1e-10;
constexpr double kNegativeNumeratorTol = -1e-12;

double real_checked(Complex v, const char* what) {
  if (std::abs(v.imag()) > kImagTol) {
    throw PositivityError(std::string(what) + " has imaginary part " + format_number(v.imag()));
  }
  return v.real();
}

}  // namespace

double mean_magnon_number(const DensityMatrix& rho) {
  const ModelOperators ops(rho.dims());
  return real_checked(expectation(rho, ops.number), "<m^dag m>");
}

double g2_zero(const DensityMatrix& rho) {
  const ModelOperators ops(rho.dims());
  const double n = real_checked(expectation(rho, ops.number), "<m^dag m>");
  if (n < kOccupationFloor) {
    std::ostringstream msg;
    msg << "steady state carries no magnon excitation (<m^dag m> = " << n << ")";
    throw NoExcitation(msg.str());
  }
  const double pair = real_checked(expectation(rho, ops.pair), "<m^dag m^dag m m>");
  if (pair < kNegativeNumeratorTol) {
    throw PositivityError("<m^dag m^dag m m> is negative: " + format_number(pair));
  }
  return std::max(pair, 0.0) / (n * n);
}

std::vector<double> magnon_marginal(const DensityMatrix& rho) {
  const SpaceDims dims = rho.dims();
  std::vector<double> pops(dims.magnon_dim(), 0.0);
  for (int n = 0; n < dims.magnon_dim(); ++n) {
    for (QubitLevel q : {QubitLevel::ground, QubitLevel::excited}) {
      const int k = dims.index(q, n);
      pops[n] += rho.matrix()(k, k).real();
    }
  }
  return pops;
}

MagnonStats magnon_stats(const DensityMatrix& rho) {
  MagnonStats s;
  s.fock_populations = magnon_marginal(rho);
  s.top_level_population = s.fock_populations.back();
  s.mean_number = mean_magnon_number(rho);
  s.g2_zero = g2_zero(rho);
  return s;
}

Classification classify(double g2, const ClassifyOptions& opts) {
  if (!(g2 >= 0.0)) {
    throw InvalidParameter("classify: g2 must be >= 0");
  }
  Classification c;
  if (g2 > 1.0 + opts.poisson_band) {
    c.statistics = Statistics::bunching;
  } else if (g2 < 1.0 - opts.poisson_band) {
    c.statistics = Statistics::antibunching;
  } else {
    c.statistics = Statistics::poissonian;
  }
  c.blockade = g2 < opts.blockade_threshold;
  return c;
}

std::string_view to_string(Statistics s) {
  switch (s) {
    case Statistics::bunching:
      return "bunching";
    case Statistics::antibunching:
      return "antibunching";
    case Statistics::poissonian:
      return "poissonian";
  }
  return "unknown";
}

}  // namespace magblock
