#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numbers>

#include "magblock/model.hpp"

using namespace magblock;

namespace {

SystemParams zero_params(int n_max) {
  SystemParams p;
  p.kappa_m = 1.0;
  p.n_max = n_max;
  return p;
}

std::vector<double> eigenvalues(const Operator& h) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(h.matrix(), Eigen::EigenvaluesOnly);
  std::vector<double> v(es.eigenvalues().data(), es.eigenvalues().data() + h.size());
  std::sort(v.begin(), v.end());
  return v;
}

SystemParams undriven(double delta_q, double delta_m, double g, int n_max = 4) {
  SystemParams p = zero_params(n_max);
  p.delta_q = delta_q;
  p.delta_m = delta_m;
  p.g_qm = g;
  return p;
}

}  // namespace

TEST_CASE("Hamiltonian vanishes when every term does") {
  const Operator h = build_hamiltonian(zero_params(3));
  CHECK(h.matrix().cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("single-excitation Jaynes-Cummings doublet") {
  SystemParams p = zero_params(1);
  p.g_qm = 21.0;
  const auto ev = eigenvalues(build_hamiltonian(p));
  std::vector<double> nonzero;
  for (double e : ev) {
    if (std::abs(e) > 1e-12) nonzero.push_back(e);
  }
  REQUIRE(nonzero.size() == 2);
  CHECK(nonzero[0] == doctest::Approx(-21.0));
  CHECK(nonzero[1] == doctest::Approx(21.0));
}

TEST_CASE("working-point Hamiltonian") {
  const SystemParams p = SystemParams::paper_defaults();
  const Operator h = build_hamiltonian(p);
  CHECK(h.hermiticity_error() < 1e-14);
  const SpaceDims dims = p.dims();
  const int g0 = dims.index(QubitLevel::ground, 0);
  CHECK(h(g0, g0).real() == doctest::Approx(-10.5));
  // Drive couplings land where the ladder algebra puts them.
  const int e0 = dims.index(QubitLevel::excited, 0);
  const int g1 = dims.index(QubitLevel::ground, 1);
  CHECK(h(e0, g0).real() == doctest::Approx(0.1));
  CHECK(h(g1, g0).real() == doctest::Approx(0.001));
  CHECK(h(e0, g1).real() == doctest::Approx(21.0));
}

TEST_CASE("Hamiltonian is Hermitian across parameter space") {
  for (double delta : {-30.0, -3.3, 0.0, 14.8, 29.0}) {
    for (double omega : {0.0, 0.1, 10.0}) {
      SystemParams p = SystemParams::paper_defaults();
      p.delta_q = delta;
      p.delta_m = -0.5 * delta;
      p.omega_drive = omega;
      p.xi_probe = 1.0;
      p.n_max = 6;
      CHECK(build_hamiltonian(p).hermiticity_error() < 1e-14);
    }
  }
}

TEST_CASE("undriven Hamiltonian conserves the excitation number") {
  for (double g : {0.0, 3.0, 21.0}) {
    const SystemParams p = undriven(21.0, 17.0, g, 6);
    const ModelOperators ops(p.dims());
    const Operator nex = dagger(ops.sigma_minus) * ops.sigma_minus + ops.number;
    const Operator h = build_hamiltonian(p);
    CHECK(commutator(h, nex).matrix().cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("parameter validation") {
  SystemParams p = SystemParams::paper_defaults();
  CHECK_NOTHROW(p.validate());
  auto bad = [&](auto mutate) {
    SystemParams q = p;
    mutate(q);
    CHECK_THROWS_AS(build_hamiltonian(q), InvalidParameter);
  };
  bad([](SystemParams& q) { q.kappa_m = 0.0; });
  bad([](SystemParams& q) { q.kappa_q = -1.0; });
  bad([](SystemParams& q) { q.g_qm = -1.0; });
  bad([](SystemParams& q) { q.omega_drive = -0.1; });
  bad([](SystemParams& q) { q.xi_probe = -0.1; });
  bad([](SystemParams& q) { q.n_th = -1e-3; });
  bad([](SystemParams& q) { q.n_max = 0; });
  bad([](SystemParams& q) { q.delta_q = std::nan(""); });
}

TEST_CASE("collapse channels") {
  SystemParams p = SystemParams::paper_defaults();
  auto cs = build_collapse_ops(p);
  REQUIRE(cs.size() == 3);
  CHECK(cs[static_cast<int>(Channel::magnon_heating)].rate == 0.0);
  CHECK(cs[static_cast<int>(Channel::qubit_decay)].rate == doctest::Approx(1.2));

  p.n_th = 1e-3;
  cs = build_collapse_ops(p);
  CHECK(cs[0].rate == doctest::Approx(1.4014).epsilon(1e-14));
  CHECK(cs[1].rate == doctest::Approx(1.4e-3).epsilon(1e-14));
  CHECK(cs[2].rate == doctest::Approx(1.2));

  // The channel operators are m, m^dag and sigma_minus.
  const ModelOperators ops(p.dims());
  CHECK((cs[0].op.matrix() - ops.m.matrix()).cwiseAbs().maxCoeff() == 0.0);
  CHECK((cs[1].op.matrix() - ops.m.matrix().adjoint()).cwiseAbs().maxCoeff() == 0.0);
  CHECK((cs[2].op.matrix() - ops.sigma_minus.matrix()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("thermal channels obey detailed balance") {
  for (double nth : {1e-9, 1e-4, 0.37, 5.0}) {
    SystemParams p = SystemParams::paper_defaults();
    p.n_th = nth;
    const auto cs = build_collapse_ops(p);
    CHECK(cs[1].rate / cs[0].rate == doctest::Approx(nth / (nth + 1.0)).epsilon(1e-15));
  }
}

TEST_CASE("thermal occupation") {
  // Reference digits from direct evaluation of 1/(exp(h f / kB T) - 1).
  CHECK(thermal_occupation(8.5e9, 0.020) == doctest::Approx(1.3860843763692788e-09).epsilon(1e-12));
  CHECK(thermal_occupation(8.5e9, 0.045) == doctest::Approx(1.1562928611027848e-04).epsilon(1e-12));
  CHECK(thermal_occupation(8.5e9, 0.060) == doctest::Approx(1.1162146496478456e-03).epsilon(1e-12));
  CHECK(thermal_occupation(8.5e9, 0.100) == doctest::Approx(1.7209503563818958e-02).epsilon(1e-12));

  // Rayleigh-Jeans limit.
  const double hbar = 6.62607015e-34 / (2.0 * std::numbers::pi);
  const double rj = 1.380649e-23 * 300.0 / (hbar * 2.0 * std::numbers::pi * 1e9);
  CHECK(std::abs(thermal_occupation(1e9, 300.0) / rj - 1.0) < 1e-3);

  CHECK_THROWS_AS(thermal_occupation(0.0, 0.02), InvalidParameter);
  CHECK_THROWS_AS(thermal_occupation(8.5e9, 0.0), InvalidParameter);
  CHECK_THROWS_AS(thermal_occupation(-1.0, 0.02), InvalidParameter);
}

TEST_CASE("thermal occupation is monotone") {
  double prev = 0.0;
  for (double t = 0.01; t < 1.0; t *= 1.3) {
    const double n = thermal_occupation(8.5e9, t);
    CHECK(n > prev);
    prev = n;
  }
  prev = std::numeric_limits<double>::infinity();
  for (double f = 1e9; f < 2e10; f *= 1.3) {
    const double n = thermal_occupation(f, 0.05);
    CHECK(n < prev);
    prev = n;
  }
}

TEST_CASE("effective coupling") {
  CHECK(effective_coupling(2.0, 3.0, 6.0) == doctest::Approx(1.0));
  CHECK(effective_coupling(7.5, 7.5, 7.5) == doctest::Approx(7.5));
  CHECK(effective_coupling(2.0, 3.0, -6.0) == doctest::Approx(-1.0));
  CHECK_THROWS_AS(effective_coupling(2.0, 3.0, 0.0), InvalidParameter);
}

TEST_CASE("drive strength from power") {
  const double omega = drive_strength_from_power(3.7e-5, kDriveParameter);
  CHECK(omega == doctest::Approx(2.0 * std::numbers::pi * 0.1).epsilon(0.01));
  CHECK(omega / (2.0 * std::numbers::pi) == doctest::Approx(0.1).epsilon(0.01));
  CHECK(drive_strength_from_power(0.0, kDriveParameter) == 0.0);
  for (double p : {1e-9, 3.7e-5, 0.5, 12.0}) {
    const double back = power_from_drive_strength(drive_strength_from_power(p, 103.0), 103.0);
    CHECK(std::abs(back / p - 1.0) < 1e-12);
  }
  CHECK_THROWS_AS(drive_strength_from_power(-1e-6, kDriveParameter), InvalidParameter);
}

TEST_CASE("dressed spectrum at resonance") {
  const double g = 21.0;
  const DressedSpectrum s = dressed_spectrum(undriven(5.0, 5.0, g));
  CHECK(s.splitting(1) == doctest::Approx(2.0 * g).epsilon(1e-12));
  CHECK(s.splitting(2) == doctest::Approx(2.0 * std::sqrt(2.0) * g).epsilon(1e-12));
  CHECK(0.5 * s.splitting(2) == doctest::Approx(29.698484809834994).epsilon(1e-10));
  CHECK(s.splitting(0) == 0.0);
  CHECK(std::is_sorted(s.energies.begin(), s.energies.end()));
  CHECK(s.energies.size() == static_cast<std::size_t>(SpaceDims(4).total()));
  CHECK_FALSE(s.blocks.back().complete);
  CHECK_THROWS_AS(s.splitting(5), PreconditionError);
}

TEST_CASE("dressed spectrum without coupling is bare") {
  const DressedSpectrum s = dressed_spectrum(undriven(7.0, 7.0, 0.0));
  for (int n = 0; n <= 4; ++n) CHECK(s.splitting(n) == doctest::Approx(0.0));
}

TEST_CASE("dressed splittings scale linearly in the coupling") {
  const auto s1 = dressed_spectrum(undriven(21.0, 21.0, 4.0));
  const auto s2 = dressed_spectrum(undriven(21.0, 21.0, 12.0));
  for (int n : {1, 2, 3}) CHECK(s2.splitting(n) == doctest::Approx(3.0 * s1.splitting(n)));
}

TEST_CASE("off-resonant splittings follow the generalized Rabi formula") {
  const double dq = 25.0, dm = 18.0, g = 21.0;
  const auto s = dressed_spectrum(undriven(dq, dm, g));
  const auto resonant = dressed_spectrum(undriven(dm, dm, g));
  for (int n : {1, 2, 3}) {
    const double expected = std::sqrt((dq - dm) * (dq - dm) + 4.0 * n * g * g);
    CHECK(s.splitting(n) == doctest::Approx(expected).epsilon(1e-12));
    CHECK(s.splitting(n) > resonant.splitting(n));
  }
}

TEST_CASE("dressed spectrum rejects drives") {
  SystemParams p = undriven(21.0, 21.0, 21.0);
  p.omega_drive = 0.1;
  CHECK_THROWS_AS(dressed_spectrum(p), PreconditionError);
  p.omega_drive = 0.0;
  p.xi_probe = 1e-3;
  CHECK_THROWS_AS(dressed_spectrum(p), PreconditionError);
}
