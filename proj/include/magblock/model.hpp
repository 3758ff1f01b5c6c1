#pragma once

// Driven-dissipative qubit-magnon model in the frame rotating at the drive
// frequency. Every rate and detuning is expressed in units of
// gamma = 2 pi x 1 MHz; time is in units of 1/gamma.

#include <vector>

#include "magblock/hilbert.hpp"

namespace magblock {

struct SystemParams {
  double delta_q = 0.0;      ///< qubit-drive detuning
  double delta_m = 0.0;      ///< magnon-drive detuning
  double g_qm = 0.0;         ///< effective qubit-magnon coupling
  double omega_drive = 0.0;  ///< qubit drive strength
  double xi_probe = 0.0;     ///< magnon probe strength
  double kappa_m = 1.0;      ///< magnon damping rate, must be > 0
  double kappa_q = 0.0;      ///< qubit decay rate
  double n_th = 0.0;         ///< thermal magnon occupation
  int n_max = 10;            ///< Fock cutoff

  /// Parameters of the blockade working point: Delta = g = 21, Omega = 0.1,
  /// xi = 0.001, kappa_m = 1.4, kappa_q = 1.2, n_th = 0.
  static SystemParams paper_defaults();

  void set_common_detuning(double delta) { delta_q = delta_m = delta; }

  SystemParams with_cutoff(int n) const {
    SystemParams p = *this;
    p.n_max = n;
    return p;
  }

  SpaceDims dims() const { return SpaceDims(n_max); }

  /// Throws InvalidParameter on the first violated constraint.
  void validate() const;

  friend bool operator==(const SystemParams&, const SystemParams&) = default;
};

/// Dissipation channel C with rate r; the Lindblad term uses sqrt(r) * C.
struct CollapseOp {
  Operator op;
  double rate = 0.0;

  Operator scaled() const { return std::sqrt(rate) * op; }
};

/// Index of each channel in the list returned by build_collapse_ops.
enum class Channel : int { magnon_decay = 0, magnon_heating = 1, qubit_decay = 2 };
inline constexpr int channel_count = 3;

struct ModelOperators {
  Operator m;
  Operator sigma_minus;
  Operator sigma_z;
  Operator number;  ///< m^dag m
  Operator pair;    ///< m^dag m^dag m m

  explicit ModelOperators(SpaceDims dims);
};

/// H = Dq/2 sz + Dm m^dag m + g (s+ m + s- m^dag) + Omega (s+ + s-) + xi (m^dag + m)
Operator build_hamiltonian(const SystemParams& p);

/// {sqrt(km (nth+1)) m, sqrt(km nth) m^dag, sqrt(kq) s-}, zero-rate channels kept.
std::vector<CollapseOp> build_collapse_ops(const SystemParams& p);

/// Bose-Einstein occupation 1 / (exp(hbar w / kB T) - 1) of a mode whose
/// ordinary frequency w / 2 pi is given in Hz.
double thermal_occupation(double omega_m_hz, double temperature_k);

/// g_q g_m / Delta for a dispersive (virtual-photon) coupling.
double effective_coupling(double g_q, double g_m, double photon_detuning);

/// Omega = K sqrt(P). With K in MHz/mW^(1/2) the result is an angular rate in
/// Mrad/s, so Omega / gamma = result / (2 pi).
double drive_strength_from_power(double power_mw, double k_param);
double power_from_drive_strength(double omega_angular_mhz, double k_param);

/// Drive coupling constant of the qubit drive line, MHz/mW^(1/2).
inline constexpr double kDriveParameter = 103.0;

struct ExcitationBlock {
  int excitations = 0;
  bool complete = true;  ///< false for the block clipped by the Fock cutoff
  std::vector<double> energies;

  double splitting() const;
};

struct DressedSpectrum {
  std::vector<double> energies;          ///< sorted ascending
  std::vector<int> excitation_labels;    ///< block of each sorted energy
  std::vector<ExcitationBlock> blocks;   ///< indexed by excitation number

  /// Spread of the dressed doublet with n excitations; requires a complete block.
  double splitting(int n) const;
};

/// Eigenvalues of the undriven Hamiltonian grouped by the conserved
/// excitation number sigma+ sigma- + m^dag m.
DressedSpectrum dressed_spectrum(const SystemParams& p);

}  // namespace magblock
