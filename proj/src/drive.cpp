#include "magnon/drive.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace magnon {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kMhzPerGhz = 1000.0;

struct ResonantTone {
  int index = -1;
  double detuning_mhz = std::numeric_limits<double>::infinity();
};

// Tone on `modulated` whose frequency best matches the bond's operating
// frequency difference.
ResonantTone find_resonant_tone(const DriveSpec& modulated, const DriveSpec& spectator) {
  const double gap = std::abs(modulated.omega_o_ghz - spectator.omega_o_ghz) * kMhzPerGhz;
  ResonantTone best;
  best.detuning_mhz = gap;
  for (std::size_t i = 0; i < modulated.tones.size(); ++i) {
    const double detuning = std::abs(modulated.tones[i].mu_mhz - gap);
    if (best.index < 0 || detuning < best.detuning_mhz) {
      best.index = static_cast<int>(i);
      best.detuning_mhz = detuning;
    }
  }
  return best;
}

double spectator_factor(const DriveSpec& spectator, bool& inverted) {
  double factor = 1.0;
  for (const auto& tone : spectator.tones) {
    const double a = tone.alpha();
    if (a > kBesselJ0FirstZero) inverted = true;
    factor *= bessel_j(0, a);
  }
  return factor;
}

}  // namespace

void DriveSpec::validate() const {
  for (const auto& tone : tones) {
    if (tone.epsilon_mhz < 0.0) throw ConfigurationError("modulation amplitude must be >= 0");
    if (tone.epsilon_mhz > 0.0 && !(tone.mu_mhz > 0.0)) {
      throw ConfigurationError("modulation frequency must be > 0 when the amplitude is nonzero");
    }
  }
}

double DriveSpec::frequency_mhz(double t_us) const {
  double f = omega_o_ghz * kMhzPerGhz;
  for (const auto& tone : tones) {
    f += tone.epsilon_mhz * std::sin(kTwoPi * tone.mu_mhz * t_us + tone.phi_rad);
  }
  return f;
}

EffectiveCoupling effective_coupling(double g_mhz, const DriveSpec& modulated, const DriveSpec& spectator,
                                     BondKind kind, double resonance_tolerance_mhz) {
  modulated.validate();
  spectator.validate();
  const ResonantTone res = find_resonant_tone(modulated, spectator);
  if (res.index < 0 || res.detuning_mhz > resonance_tolerance_mhz) {
    throw DetunedDriveError("modulation is detuned from the bond resonance by " +
                                std::to_string(res.detuning_mhz) + " MHz",
                            res.detuning_mhz);
  }
  const ModulationTone& tone = modulated.tones[static_cast<std::size_t>(res.index)];

  EffectiveCoupling c;
  c.kind = kind;
  c.resonant_tone = res.index;
  c.detuning_mhz = res.detuning_mhz;
  const double a = tone.alpha();
  c.sign_inverted = a > kBesselJ1FirstZero;
  const double signed_mag = g_mhz * bessel_j(1, a) * spectator_factor(spectator, c.sign_inverted);

  c.phase_rad = kind == BondKind::Intracell ? tone.phi_rad + std::numbers::pi / 2
                                            : -(tone.phi_rad - std::numbers::pi / 2);
  c.magnitude_mhz = std::abs(signed_mag);
  if (signed_mag < 0.0) c.phase_rad += std::numbers::pi;
  return c;
}

double solve_amplitude_for_coupling(double g_mhz, double mu_mhz, double spectator_alpha, double j_target_mhz) {
  if (!(mu_mhz > 0.0)) throw ConfigurationError("modulation frequency must be positive");
  if (!(g_mhz > 0.0)) throw ConfigurationError("static coupling must be positive");
  const double spectator = bessel_j(0, spectator_alpha);
  const double reachable = g_mhz * kBesselJ1Max * spectator;
  if (j_target_mhz < 0.0 || j_target_mhz > reachable) {
    throw RangeError("target coupling " + std::to_string(j_target_mhz) + " MHz outside [0, " +
                         std::to_string(std::max(reachable, 0.0)) + "] MHz",
                     std::max(reachable, 0.0));
  }
  if (j_target_mhz == 0.0) return 0.0;

  const double target = j_target_mhz / (g_mhz * spectator);
  double lo = 0.0;
  double hi = kBesselJ1ArgMax;
  while (hi - lo > 1e-15 * hi) {
    const double mid = 0.5 * (lo + hi);
    if (bessel_j(1, mid) < target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi) * mu_mhz;
}

RwaValidation validate_rwa(double g_mhz, const DriveSpec& first, const DriveSpec& second, double window_us,
                           double dt_us, double resonance_tolerance_mhz) {
  if (!(window_us > 0.0) || !(dt_us > 0.0)) {
    throw ConfigurationError("validate_rwa: window and step must be positive");
  }
  first.validate();
  second.validate();

  // Which qubit carries the resonant sideband, if any.
  const double gap = std::abs(first.omega_o_ghz - second.omega_o_ghz) * kMhzPerGhz;
  auto driven = [](const DriveSpec& d) {
    return std::any_of(d.tones.begin(), d.tones.end(), [](const ModulationTone& t) { return t.epsilon_mhz > 0.0; });
  };

  RwaValidation out;
  double sample_period = dt_us;
  if (gap <= resonance_tolerance_mhz && !driven(first) && !driven(second)) {
    out.predicted_mhz = g_mhz;
  } else {
    const ResonantTone r1 = find_resonant_tone(first, second);
    const ResonantTone r2 = find_resonant_tone(second, first);
    const bool use_first = r1.index >= 0 && (r2.index < 0 || r1.detuning_mhz <= r2.detuning_mhz);
    const DriveSpec& modulated = use_first ? first : second;
    const DriveSpec& spectator = use_first ? second : first;
    const EffectiveCoupling c =
        effective_coupling(g_mhz, modulated, spectator, BondKind::Intracell, resonance_tolerance_mhz);
    out.predicted_mhz = c.magnitude_mhz;
    // Stroboscopic sampling at the resonant tone's period removes the
    // micromotion riding on the slow transfer.
    sample_period = 1.0 / modulated.tones[static_cast<std::size_t>(c.resonant_tone)].mu_mhz;
  }

  const double reference = first.omega_o_ghz * kMhzPerGhz;
  auto hamiltonian = [&](double t) {
    SingleExcitationHamiltonian h(2, 2);
    h << first.frequency_mhz(t) - reference, g_mhz, g_mhz, second.frequency_mhz(t) - reference;
    return h;
  };

  double fastest = 1.0 / sample_period;
  for (const auto* d : {&first, &second}) {
    for (const auto& t : d->tones) fastest = std::max(fastest, t.mu_mhz + t.epsilon_mhz);
  }
  fastest = std::max({fastest, gap + g_mhz, 2.0 * g_mhz});
  const double step = std::min(dt_us, 1.0 / (256.0 * fastest));

  const auto samples = static_cast<std::size_t>(std::floor(window_us / sample_period)) + 1;
  std::vector<double> times(samples);
  for (std::size_t i = 0; i < samples; ++i) times[i] = static_cast<double>(i) * sample_period;
  DenseVector<Complex> psi0(2);
  psi0 << 1.0, 0.0;
  const auto states = evolve_time_dependent(hamiltonian, psi0, times, step);

  std::vector<double> p(samples);
  for (std::size_t i = 0; i < samples; ++i) p[i] = std::norm(states[i](1));

  for (std::size_t k = 1; k + 1 < samples; ++k) {
    if (p[k] >= 0.5 && p[k] >= p[k - 1] && p[k] > p[k + 1]) {
      const double y0 = p[k - 1];
      const double y1 = p[k];
      const double y2 = p[k + 1];
      const double curvature = y0 - 2.0 * y1 + y2;
      const double shift = curvature != 0.0 ? 0.5 * (y0 - y2) / curvature : 0.0;
      out.transfer_time_us = times[k] + shift * sample_period;
      out.peak_population = std::min(1.0, y1 - 0.25 * (y0 - y2) * shift);
      // Generalized Rabi: P_max sin^2(2 pi Omega t), |J| = sqrt(P_max) Omega.
      out.extracted_mhz = std::sqrt(out.peak_population) / (4.0 * out.transfer_time_us);
      out.relative_error = std::abs(out.extracted_mhz - out.predicted_mhz) / out.predicted_mhz;
      return out;
    }
  }
  throw InconclusiveWindowError("no population transfer peak within " + std::to_string(window_us) + " us");
}

BondPattern bonds_from_drive(const std::vector<double>& g_mhz, const std::vector<DriveSpec>& qubits,
                             double resonance_tolerance_mhz) {
  if (qubits.size() < 2 || g_mhz.size() != qubits.size() - 1) {
    throw ConfigurationError("drive-derived bonds need n qubits and n-1 static couplings");
  }
  std::vector<double> mags(g_mhz.size());
  std::vector<double> phases(g_mhz.size());
  for (std::size_t i = 0; i < g_mhz.size(); ++i) {
    const DriveSpec& left = qubits[i];
    const DriveSpec& right = qubits[i + 1];
    // Site i+1 (1-based) is an a-site when i is even: bond a_x-b_x is intracell.
    const BondKind kind = i % 2 == 0 ? BondKind::Intracell : BondKind::Intercell;
    const ResonantTone rl = find_resonant_tone(left, right);
    const ResonantTone rr = find_resonant_tone(right, left);
    const bool right_modulated = rr.index >= 0 && (rl.index < 0 || rr.detuning_mhz <= rl.detuning_mhz);
    const EffectiveCoupling c =
        right_modulated ? effective_coupling(g_mhz[i], right, left, kind, resonance_tolerance_mhz)
                        : effective_coupling(g_mhz[i], left, right, kind, resonance_tolerance_mhz);
    mags[i] = c.magnitude_mhz;
    phases[i] = c.phase_rad;
  }
  return BondPattern(std::move(mags), std::move(phases));
}

NoiseModel HardwarePreset::sweet_spot_noise() const {
  std::vector<double> t1;
  std::vector<double> t2;
  for (const auto& q : qubits) {
    t1.push_back(q.t1_us);
    t2.push_back(q.t2star_us);
  }
  return NoiseModel(std::move(t1), std::move(t2));
}

const ModulationSet& HardwarePreset::modulation(const std::string& experiment) const {
  for (const auto& m : modulations) {
    if (m.experiment == experiment) return m;
  }
  throw ConfigurationError("no modulation set named '" + experiment + "'");
}

HardwarePreset device_hardware_preset() {
  HardwarePreset p;
  p.qubits = {
      {"a1", 6.839, 4.811, 20.0, 18.5, 199.70, 0.17, 0.88},
      {"b1", 6.864, 5.156, 17.0, 16.0, 181.53, 0.26, 1.06},
      {"a2", 6.879, 4.901, 14.8, 17.0, 196.77, 0.20, 1.23},
      {"b2", 6.901, 5.183, 17.9, 15.0, 212.05, 0.20, 0.88},
      {"a3", 6.919, 4.602, 20.0, 19.9, 188.13, 0.12, 0.85},
  };
  p.coupling_g_mhz = {16.70, 17.50, 17.50, 16.85};

  const std::vector<double> operating = {4.811, 5.120, 4.901, 4.680, 4.602};
  const std::vector<double> center = {4.760, 4.940, 4.830, 4.680, 4.602};
  using Tones = std::vector<std::vector<ModulationTone>>;
  p.modulations = {
      {"defect", operating, center,
       Tones{{}, {{131.52, 181.19, 0.0}}, {{14.73, 107.16, 0.0}, {38.38, 162.23, 0.0}}, {{38.17, 70.71, 0.0}}, {}}},
      {"edge-trivial", operating, center,
       Tones{{{34.82, 171.04, 0.0}}, {{77.33, 100.62, 0.0}}, {{40.03, 161.66, 0.0}}, {{49.17, 71.10, 0.0}}, {}}},
      {"edge-nontrivial", operating, center,
       Tones{{{35.02, 171.38, 0.0}}, {{76.83, 100.92, 0.0}}, {{40.48, 161.71, 0.0}}, {{49.17, 71.75, 0.0}}, {}}},
      {"winding-nontrivial", operating, center,
       Tones{{{37.03, 171.59, 0.0}}, {{77.02, 102.57, 0.0}}, {{36.30, 160.92, 0.0}}, {}, {}}},
      {"winding-trivial", {4.811, 5.128, 4.901, 5.183}, {4.780, 4.930, 4.830, 4.990},
       Tones{{}, {{140.65, 156.18, 0.0}}, {{17.72, 108.74, 0.0}}, {{129.12, 172.71, 0.0}}}},
  };
  return p;
}

}  // namespace magnon
