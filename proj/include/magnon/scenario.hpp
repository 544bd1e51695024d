#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "magnon/drive.hpp"
#include "magnon/dynamics.hpp"
#include "magnon/lattice.hpp"
#include "magnon/readout.hpp"
#include "magnon/topology.hpp"

namespace magnon {

enum class ScenarioMode { Dynamics, Spectrum, Rwa };

struct DimerizedChain {
  double j1_mhz = 0.0;
  double j2_mhz = 0.0;
};

struct DriveChain {
  std::vector<double> g_mhz;
  std::vector<DriveSpec> qubits;
  double resonance_tolerance_mhz = kDefaultResonanceToleranceMhz;
};

struct RwaCheck {
  double g_mhz = 17.5;
  DriveSpec first;
  DriveSpec second;
  double window_us = 0.5;
  double dt_us = 1e-4;
};

/// A sweep value is a scalar or, for the bonds axis, a whole pattern.
using SweepValue = std::variant<double, std::vector<double>>;

struct SweepSpec {
  std::string axis;
  std::vector<SweepValue> values;
};

/// Everything a run needs. Exactly one bond source is active: explicit
/// `bonds`, `dimerized` (with n_qubits), or `drive`.
struct ScenarioConfig {
  std::string name = "custom";
  ScenarioMode mode = ScenarioMode::Dynamics;

  int n_qubits = 0;
  BondPattern bonds;
  std::optional<DimerizedChain> dimerized;
  std::optional<DriveChain> drive;

  int initial_site = 1;
  double t_max_us = 1.0;
  double dt_us = 1e-3;
  double integrator_step_us = 1e-3;

  bool noise_enabled = false;
  /// Per-qubit T1 / T2*; empty means the device sweet-spot table.
  std::vector<double> t1_us;
  std::vector<double> t2star_us;

  int shots = 0;
  std::vector<QubitReadoutError> readout;  ///< empty: uniform default error

  std::optional<RwaCheck> rwa;
  std::optional<SweepSpec> sweep;

  std::uint64_t seed = 0;
  std::filesystem::path output_dir = "out";
  bool write_heatmap = true;

  /// Bonds after resolving dimerized or drive sources.
  BondPattern resolved_bonds() const;
  /// Chain length implied by the bond source.
  int resolved_n_qubits() const;
  NoiseModel resolved_noise() const;
  ReadoutCalibration resolved_calibration() const;

  /// Throws ConfigurationError with an actionable message.
  void validate() const;
};

struct ScenarioPreset {
  std::string name;
  std::string description;
  ScenarioConfig config;
};

const std::vector<ScenarioPreset>& scenario_presets();
ScenarioConfig preset_config(const std::string& name);

struct ScenarioSummary {
  std::string scenario;
  int n_qubits = 0;
  std::vector<double> bonds_mhz;
  int initial_site = 0;
  bool noise_enabled = false;

  std::optional<double> time_averaged_cd;
  std::optional<double> winding_estimate;
  std::optional<WindingResult> analytic_winding;

  std::vector<double> spectrum_mhz;
  std::vector<double> in_gap_energies_mhz;
  /// Splitting of the two in-gap modes (even chains only).
  std::optional<double> edge_gap_mhz;
  double min_abs_energy_mhz = 0.0;

  std::optional<RwaValidation> rwa;
};

struct ScenarioResult {
  ScenarioSummary summary;
  std::optional<Trajectory> trajectory;
  std::optional<ShotRecord> shots;
  std::optional<CorrectedProbabilities> corrected;
};

/// Runs the computation in memory, writing nothing.
ScenarioResult simulate(const ScenarioConfig& config);

struct OutputBundle {
  ScenarioSummary summary;
  std::filesystem::path trajectory_csv;
  std::filesystem::path summary_json;
  std::optional<std::filesystem::path> shots_csv;
  std::optional<std::filesystem::path> heatmap;
};

/// simulate() plus the trajectory CSV, summary JSON, optional shot CSV and
/// population heatmap under config.output_dir.
OutputBundle run_scenario(const ScenarioConfig& config);

struct SweepRow {
  std::string value;
  ScenarioSummary summary;
};

/// One summary per value, computed on a worker pool; row order follows `values`.
std::vector<SweepRow> run_sweep(const ScenarioConfig& base, const std::string& axis,
                                const std::vector<SweepValue>& values, unsigned workers = 0);

/// Base config with `axis` set to `value`.
ScenarioConfig apply_sweep_value(const ScenarioConfig& base, const std::string& axis, const SweepValue& value);

}  // namespace magnon
