#include "magblock/model.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

namespace magblock {

namespace {

// CODATA 2018 exact values.
constexpr double kPlanck = 6.62607015e-34;        // J s
constexpr double kBoltzmann = 1.380649e-23;       // J / K
constexpr double kHbar = kPlanck / (2.0 * std::numbers::pi);

void require(bool ok, const std::string& what) {
  if (!ok) throw InvalidParameter(what);
}

bool finite_all(const SystemParams& p) {
  for (double v : {p.delta_q, p.delta_m, p.g_qm, p.omega_drive, p.xi_probe, p.kappa_m, p.kappa_q,
                   p.n_th}) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

}  // namespace

SystemParams SystemParams::paper_defaults() {
  SystemParams p;
  p.set_common_detuning(21.0);
  p.g_qm = 21.0;
  p.omega_drive = 0.1;
  p.xi_probe = 0.001;
  p.kappa_m = 1.4;
  p.kappa_q = 1.2;
  p.n_th = 0.0;
  p.n_max = 10;
  return p;
}

void SystemParams::validate() const {
  require(finite_all(*this), "system parameters must be finite");
  require(kappa_m > 0.0, "kappa_m must be > 0");
  require(kappa_q >= 0.0, "kappa_q must be >= 0");
  require(g_qm >= 0.0, "g_qm must be >= 0");
  require(omega_drive >= 0.0, "omega_drive must be >= 0");
  require(xi_probe >= 0.0, "xi_probe must be >= 0");
  require(n_th >= 0.0, "n_th must be >= 0");
  require(n_max >= 1, "n_max must be >= 1");
}

ModelOperators::ModelOperators(SpaceDims dims)
    : m(embed(annihilation(dims.magnon_cutoff), Factor::magnon, dims)),
      sigma_minus(embed(qubit_ops().sigma_minus, Factor::qubit, dims)),
      sigma_z(embed(qubit_ops().sigma_z, Factor::qubit, dims)),
      number(dagger(m) * m),
      pair(dagger(m) * dagger(m) * m * m) {}

Operator build_hamiltonian(const SystemParams& p) {
  p.validate();
  const ModelOperators ops(p.dims());
  const Operator md = dagger(ops.m);
  const Operator sp = dagger(ops.sigma_minus);
  const Operator h = (0.5 * p.delta_q) * ops.sigma_z + p.delta_m * ops.number +
                     p.g_qm * (sp * ops.m + ops.sigma_minus * md) +
                     p.omega_drive * (sp + ops.sigma_minus) + p.xi_probe * (md + ops.m);
  // Remove round-off asymmetry so downstream checks see an exactly Hermitian H.
  const ComplexMatrix herm = 0.5 * (h.matrix() + h.matrix().adjoint());
  return Operator(h.dims(), herm);
}

std::vector<CollapseOp> build_collapse_ops(const SystemParams& p) {
  p.validate();
  const ModelOperators ops(p.dims());
  std::vector<CollapseOp> out;
  out.reserve(channel_count);
  out.push_back({ops.m, p.kappa_m * (p.n_th + 1.0)});
  out.push_back({dagger(ops.m), p.kappa_m * p.n_th});
  out.push_back({ops.sigma_minus, p.kappa_q});
  return out;
}

double thermal_occupation(double omega_m_hz, double temperature_k) {
  if (!(omega_m_hz > 0.0) || !(temperature_k > 0.0)) {
    throw InvalidParameter("thermal_occupation: frequency and temperature must be > 0");
  }
  const double omega = 2.0 * std::numbers::pi * omega_m_hz;
  const double x = kHbar * omega / (kBoltzmann * temperature_k);
  return 1.0 / std::expm1(x);
}

double effective_coupling(double g_q, double g_m, double photon_detuning) {
  if (photon_detuning == 0.0) {
    throw InvalidParameter("effective_coupling: photon detuning must be nonzero");
  }
  return g_q * g_m / photon_detuning;
}

double drive_strength_from_power(double power_mw, double k_param) {
  if (power_mw < 0.0) {
    throw InvalidParameter("drive power must be >= 0");
  }
  return k_param * std::sqrt(power_mw);
}

double power_from_drive_strength(double omega_angular_mhz, double k_param) {
  if (omega_angular_mhz < 0.0 || k_param <= 0.0) {
    throw InvalidParameter("drive strength must be >= 0 and K > 0");
  }
  const double root = omega_angular_mhz / k_param;
  return root * root;
}

double ExcitationBlock::splitting() const {
  if (energies.empty()) return 0.0;
  const auto [lo, hi] = std::minmax_element(energies.begin(), energies.end());
  return *hi - *lo;
}

double DressedSpectrum::splitting(int n) const {
  if (n < 0 || n >= static_cast<int>(blocks.size()) || !blocks[n].complete) {
    throw PreconditionError("excitation block " + std::to_string(n) +
                            " is not fully represented at this cutoff");
  }
  return blocks[n].splitting();
}

DressedSpectrum dressed_spectrum(const SystemParams& p) {
  if (p.omega_drive != 0.0 || p.xi_probe != 0.0) {
    throw PreconditionError("dressed_spectrum requires omega_drive = xi_probe = 0");
  }
  const Operator h = build_hamiltonian(p);
  const SpaceDims dims = p.dims();
  const int n_max = dims.magnon_cutoff;

  DressedSpectrum out;
  // Block n holds |g,n> and |e,n-1>; block n_max + 1 keeps only |e,n_max>.
  for (int n = 0; n <= n_max + 1; ++n) {
    std::vector<int> members;
    if (n <= n_max) members.push_back(dims.index(QubitLevel::ground, n));
    if (n >= 1) members.push_back(dims.index(QubitLevel::excited, n - 1));
    const int k = static_cast<int>(members.size());
    ComplexMatrix sub(k, k);
    for (int i = 0; i < k; ++i) {
      for (int j = 0; j < k; ++j) sub(i, j) = h(members[i], members[j]);
    }
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(sub, Eigen::EigenvaluesOnly);
    ExcitationBlock block;
    block.excitations = n;
    block.complete = n <= n_max;
    for (int i = 0; i < k; ++i) block.energies.push_back(es.eigenvalues()(i));
    out.blocks.push_back(std::move(block));
  }

  std::vector<std::pair<double, int>> all;
  for (const auto& b : out.blocks) {
    for (double e : b.energies) all.emplace_back(e, b.excitations);
  }
  std::sort(all.begin(), all.end());
  for (const auto& [e, n] : all) {
    out.energies.push_back(e);
    out.excitation_labels.push_back(n);
  }
  return out;
}

}  // namespace magblock
