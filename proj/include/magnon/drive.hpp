#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "magnon/dynamics.hpp"
#include "magnon/errors.hpp"
#include "magnon/lattice.hpp"

namespace magnon {

/// Location of the maximum of J1 and first zeros of J0 and J1.
inline constexpr double kBesselJ1ArgMax = 1.8411837813406593;
inline constexpr double kBesselJ1Max = 0.58186522428159;
inline constexpr double kBesselJ0FirstZero = 2.404825557695773;
inline constexpr double kBesselJ1FirstZero = 3.8317059702075125;

inline constexpr double kBesselWindow = 20.0;

/// Bessel function of the first kind, orders 0 and 1, |x| <= 20.
/// Power series below |x| = 8, normalized backward recurrence above.
template <typename Real>
Real bessel_j(int m, Real x) {
  if (m != 0 && m != 1) throw DomainError("bessel_j: only orders 0 and 1 are supported");
  if (!(std::abs(x) <= Real(kBesselWindow))) {
    throw DomainError("bessel_j: |x| must not exceed 20");
  }
  const Real ax = std::abs(x);
  const Real sign = (m == 1 && x < 0) ? Real(-1) : Real(1);
  if (ax < Real(8)) {
    const Real half = ax / 2;
    const Real q = -half * half;
    Real term = (m == 0) ? Real(1) : half;
    Real sum = term;
    for (int k = 1; k < 200; ++k) {
      term *= q / (Real(k) * Real(k + m));
      sum += term;
      if (std::abs(term) < std::numeric_limits<Real>::epsilon() * Real(1e-3) * std::abs(sum)) break;
    }
    return sign * sum;
  }
  // Miller: J_{k-1} = (2k/x) J_k - J_{k+1} from far above, normalized with
  // J_0 + 2 sum J_{2k} = 1.
  const int start = 2 * (static_cast<int>(ax) + 40);
  Real next = 0;
  Real current = Real(1e-30);
  Real j0 = 0;
  Real j1 = 0;
  Real norm = 0;
  for (int k = start; k >= 1; --k) {
    const Real prev = Real(2 * k) / ax * current - next;
    next = current;
    current = prev;
    if (k - 1 == 1) j1 = current;
    if ((k - 1) % 2 == 0 && k - 1 > 0) norm += 2 * current;
    if (std::abs(current) > Real(1e200)) {
      current *= Real(1e-200);
      next *= Real(1e-200);
      j1 *= Real(1e-200);
      norm *= Real(1e-200);
    }
  }
  j0 = current;
  norm += j0;
  return sign * ((m == 0 ? j0 : j1) / norm);
}

/// One sinusoidal flux tone: omega(t) += epsilon sin(2 pi mu t + phi).
struct ModulationTone {
  double epsilon_mhz = 0.0;
  double mu_mhz = 0.0;
  double phi_rad = 0.0;

  double alpha() const noexcept { return mu_mhz > 0.0 ? epsilon_mhz / mu_mhz : 0.0; }
};

/// Per-qubit drive: mean operating frequency plus zero or more tones.
struct DriveSpec {
  double omega_o_ghz = 0.0;
  std::vector<ModulationTone> tones;

  static DriveSpec unmodulated(double omega_o_ghz) { return {omega_o_ghz, {}}; }
  static DriveSpec modulated(double omega_o_ghz, double epsilon_mhz, double mu_mhz, double phi_rad = 0.0) {
    return {omega_o_ghz, {{epsilon_mhz, mu_mhz, phi_rad}}};
  }

  /// Throws ConfigurationError on epsilon < 0 or epsilon > 0 with mu <= 0.
  void validate() const;

  /// Instantaneous frequency in MHz.
  double frequency_mhz(double t_us) const;
};

enum class BondKind { Intracell, Intercell };

struct EffectiveCoupling {
  double magnitude_mhz = 0.0;
  double phase_rad = 0.0;
  BondKind kind = BondKind::Intracell;
  /// Resonant tone on the modulated qubit (index into its tone list).
  int resonant_tone = -1;
  double detuning_mhz = 0.0;
  /// An argument lies past the first zero of its Bessel factor.
  bool sign_inverted = false;

  Complex value() const { return std::polar(magnitude_mhz, phase_rad); }
};

inline constexpr double kDefaultResonanceToleranceMhz = 0.5;

/// g J1(alpha_modulated) J0(alpha_spectator) with the resonance-dependent
/// phase: phi + pi/2 for an intracell bond, -(phi - pi/2) for an intercell one.
EffectiveCoupling effective_coupling(double g_mhz, const DriveSpec& modulated, const DriveSpec& spectator,
                                     BondKind kind,
                                     double resonance_tolerance_mhz = kDefaultResonanceToleranceMhz);

/// Modulation amplitude epsilon (MHz) that yields |J| = j_target on the
/// rising branch of J1.
double solve_amplitude_for_coupling(double g_mhz, double mu_mhz, double spectator_alpha, double j_target_mhz);

struct RwaValidation {
  double extracted_mhz = 0.0;
  double predicted_mhz = 0.0;
  double relative_error = 0.0;
  double transfer_time_us = 0.0;
  double peak_population = 0.0;
};

/// Integrates the two-qubit single-excitation problem with the full
/// modulated frequencies and compares the transfer rate with the
/// effective-coupling prediction. Qubit `first` starts excited.
RwaValidation validate_rwa(double g_mhz, const DriveSpec& first, const DriveSpec& second, double window_us,
                           double dt_us, double resonance_tolerance_mhz = kDefaultResonanceToleranceMhz);

/// Bond pattern from static couplings and per-qubit drives. Each bond uses
/// whichever of its two qubits carries the resonant tone.
BondPattern bonds_from_drive(const std::vector<double>& g_mhz, const std::vector<DriveSpec>& qubits,
                             double resonance_tolerance_mhz = kDefaultResonanceToleranceMhz);

struct QubitDeviceParams {
  std::string label;
  double readout_frequency_ghz = 0.0;
  double sweet_spot_frequency_ghz = 0.0;
  double t1_us = 0.0;
  double t2star_us = 0.0;
  double anharmonicity_mhz = 0.0;
  double dispersive_shift_mhz = 0.0;
  double readout_decay_mhz = 0.0;
};

/// One experiment's parametric-modulation settings. Qubits without a drive
/// have an empty tone list.
struct ModulationSet {
  std::string experiment;
  std::vector<double> operating_frequency_ghz;
  std::vector<double> center_frequency_ghz;
  std::vector<std::vector<ModulationTone>> tones;
};

struct HardwarePreset {
  std::vector<QubitDeviceParams> qubits;
  std::vector<double> coupling_g_mhz;
  std::vector<ModulationSet> modulations;

  NoiseModel sweet_spot_noise() const;
  const ModulationSet& modulation(const std::string& experiment) const;
};

/// Device and modulation tables of the five-qubit chain a1 b1 a2 b2 a3.
HardwarePreset device_hardware_preset();

}  // namespace magnon
