#include "magnon/scenario.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <thread>

#include "magnon/io.hpp"

namespace magnon {

namespace {

// Published averages used for qubits beyond the five tabulated ones.
constexpr double kAverageT1Us = 18.0;
constexpr double kAverageT2StarUs = 17.0;

ScenarioConfig explicit_chain(const std::string& name, std::vector<double> bonds, int initial_site,
                              bool noise = false) {
  ScenarioConfig c;
  c.name = name;
  c.n_qubits = static_cast<int>(bonds.size()) + 1;
  c.bonds = BondPattern(std::move(bonds));
  c.initial_site = initial_site;
  c.noise_enabled = noise;
  return c;
}

ScenarioConfig with_bond_sweep(ScenarioConfig c, std::vector<std::vector<double>> patterns) {
  SweepSpec s;
  s.axis = "bonds_mhz";
  for (auto& p : patterns) s.values.emplace_back(std::move(p));
  c.sweep = std::move(s);
  return c;
}

std::vector<ScenarioPreset> make_presets() {
  std::vector<ScenarioPreset> p;
  p.push_back({"winding-trivial", "4 qubits, 5-1-5 MHz, b1 excited",
               explicit_chain("winding-trivial", {5, 1, 5}, 2)});
  p.push_back({"winding-nontrivial", "4 qubits, 1-5-1 MHz, b1 excited",
               explicit_chain("winding-nontrivial", {1, 5, 1}, 2)});
  p.push_back({"edge-trivial",
               "5 qubits, 5-1-5-1 MHz, a1 excited (the device ran the mirrored labelling, exciting a3)",
               explicit_chain("edge-trivial", {5, 1, 5, 1}, 1)});
  p.push_back({"edge-nontrivial", "5 qubits, 1-5-1-5 MHz, a1 excited",
               explicit_chain("edge-nontrivial", {1, 5, 1, 5}, 1)});
  p.push_back({"hybridization-4q", "4 qubits, 1-5-1.1 MHz, a1 excited",
               explicit_chain("hybridization-4q", {1, 5, 1.1}, 1)});
  p.push_back({"defect", "5 qubits, 4-1-1-4 MHz, a2 excited", explicit_chain("defect", {4, 1, 1, 4}, 3)});

  {
    ScenarioConfig c;
    c.name = "spectrum-size";
    c.mode = ScenarioMode::Spectrum;
    c.dimerized = DimerizedChain{1.0, 5.0};
    c.n_qubits = 4;
    SweepSpec s;
    s.axis = "n_qubits";
    for (int n = 4; n <= 41; ++n) s.values.emplace_back(static_cast<double>(n));
    c.sweep = std::move(s);
    p.push_back({"spectrum-size", "spectrum versus chain length at J1 = 1, J2 = 5 MHz", c});
  }
  {
    ScenarioConfig c;
    c.name = "rwa-check";
    c.mode = ScenarioMode::Rwa;
    RwaCheck r;
    r.g_mhz = 17.5;
    r.first = DriveSpec::unmodulated(4.800);
    r.second = DriveSpec::modulated(4.800 + 0.221, 0.589 * 221.0, 221.0);
    r.window_us = 0.5;
    r.dt_us = 1e-4;
    c.rwa = r;
    p.push_back({"rwa-check", "two-qubit sideband coupling, g = 17.5 MHz, alpha = 0.589, mu = 221 MHz", c});
  }

  for (const auto& [tag, bonds] : std::vector<std::pair<std::string, std::vector<double>>>{
           {"3-1-3", {3, 1, 3}}, {"1-3-1", {1, 3, 1}}, {"7-1-7", {7, 1, 7}}, {"1-7-1", {1, 7, 1}}}) {
    p.push_back({"winding-" + tag, "4 qubits, " + tag + " MHz, b1 excited, with decoherence",
                 explicit_chain("winding-" + tag, bonds, 2, true)});
  }
  for (const auto& [tag, bonds] : std::vector<std::pair<std::string, std::vector<double>>>{
           {"3-1-3-1", {3, 1, 3, 1}}, {"1-3-1-3", {1, 3, 1, 3}}, {"7-1-7-1", {7, 1, 7, 1}}, {"1-7-1-7", {1, 7, 1, 7}}}) {
    p.push_back({"edge-" + tag, "5 qubits, " + tag + " MHz, a1 excited, with decoherence",
                 explicit_chain("edge-" + tag, bonds, 1, true)});
  }
  for (const auto& [tag, bonds] : std::vector<std::pair<std::string, std::vector<double>>>{
           {"3-1-1-3", {3, 1, 1, 3}}, {"7-1-1-7", {7, 1, 1, 7}}}) {
    p.push_back({"defect-" + tag, "5 qubits, " + tag + " MHz, a2 excited, with decoherence",
                 explicit_chain("defect-" + tag, bonds, 3, true)});
  }

  p.push_back({"winding-family", "winding protocol over 3-1-3, 1-3-1, 7-1-7, 1-7-1 MHz, with decoherence",
               with_bond_sweep(explicit_chain("winding-family", {3, 1, 3}, 2, true),
                               {{3, 1, 3}, {1, 3, 1}, {7, 1, 7}, {1, 7, 1}})});
  p.push_back({"edge-family", "edge protocol over 3-1-3-1, 1-3-1-3, 7-1-7-1, 1-7-1-7 MHz, with decoherence",
               with_bond_sweep(explicit_chain("edge-family", {3, 1, 3, 1}, 1, true),
                               {{3, 1, 3, 1}, {1, 3, 1, 3}, {7, 1, 7, 1}, {1, 7, 1, 7}})});
  return p;
}

int bond_sources(const ScenarioConfig& c) {
  return (c.bonds.size() > 0 ? 1 : 0) + (c.dimerized ? 1 : 0) + (c.drive ? 1 : 0);
}

std::string sweep_label(const SweepValue& v) {
  if (const auto* d = std::get_if<double>(&v)) return format_number(*d);
  const auto& list = std::get<std::vector<double>>(v);
  std::string s;
  for (std::size_t i = 0; i < list.size(); ++i) {
    if (i > 0) s += '-';
    s += format_number(list[i]);
  }
  return s;
}

double scalar_value(const std::string& axis, const SweepValue& v) {
  const auto* d = std::get_if<double>(&v);
  if (!d) throw ConfigurationError("sweep axis '" + axis + "' takes numbers, got a list");
  return *d;
}

int integer_value(const std::string& axis, const SweepValue& v) {
  const double d = scalar_value(axis, v);
  if (d != std::floor(d)) throw ConfigurationError("sweep axis '" + axis + "' takes integers");
  return static_cast<int>(d);
}

}  // namespace

BondPattern ScenarioConfig::resolved_bonds() const {
  if (dimerized) return BondPattern::dimerized(dimerized->j1_mhz, dimerized->j2_mhz, n_qubits);
  if (drive) return bonds_from_drive(drive->g_mhz, drive->qubits, drive->resonance_tolerance_mhz);
  return bonds;
}

int ScenarioConfig::resolved_n_qubits() const {
  if (dimerized) return n_qubits;
  if (drive) return static_cast<int>(drive->qubits.size());
  return static_cast<int>(bonds.size()) + 1;
}

NoiseModel ScenarioConfig::resolved_noise() const {
  const int n = resolved_n_qubits();
  if (!noise_enabled) return NoiseModel::ideal(n);
  if (!t1_us.empty()) {
    return NoiseModel(std::vector<double>(t1_us.begin(), t1_us.begin() + n),
                      std::vector<double>(t2star_us.begin(), t2star_us.begin() + n));
  }
  const NoiseModel table = device_hardware_preset().sweet_spot_noise();
  std::vector<double> t1;
  std::vector<double> t2;
  for (int q = 0; q < n; ++q) {
    t1.push_back(q < table.n_qubits() ? table.t1_us(q) : kAverageT1Us);
    t2.push_back(q < table.n_qubits() ? table.t2star_us(q) : kAverageT2StarUs);
  }
  return NoiseModel(std::move(t1), std::move(t2));
}

ReadoutCalibration ScenarioConfig::resolved_calibration() const {
  if (readout.empty()) return ReadoutCalibration::uniform(resolved_n_qubits());
  return ReadoutCalibration(readout);
}

void ScenarioConfig::validate() const {
  if (mode == ScenarioMode::Rwa) {
    if (!rwa) throw ConfigurationError("mode 'rwa' needs an 'rwa' section");
    if (!(rwa->g_mhz > 0.0)) throw ConfigurationError("rwa.g_mhz must be positive");
    if (!(rwa->window_us > 0.0) || !(rwa->dt_us > 0.0)) {
      throw ConfigurationError("rwa.window_us and rwa.dt_us must be positive");
    }
    return;
  }
  const int sources = bond_sources(*this);
  if (sources != 1) {
    throw ConfigurationError("chain needs exactly one of 'bonds_mhz', 'dimerized', 'drive' (found " +
                             std::to_string(sources) + ")");
  }
  if (dimerized) {
    if (n_qubits < 2) throw ConfigurationError("chain.n_qubits must be >= 2 for a dimerized chain");
    if (dimerized->j1_mhz < 0.0 || dimerized->j2_mhz < 0.0) {
      throw ConfigurationError("dimerized couplings must be non-negative");
    }
  }
  if (bonds.size() > 0 && n_qubits != 0 && n_qubits != static_cast<int>(bonds.size()) + 1) {
    throw ConfigurationError("chain.n_qubits = " + std::to_string(n_qubits) + " but bonds_mhz has " +
                             std::to_string(bonds.size()) + " entries (needs n_qubits - 1)");
  }
  if (drive) {
    if (drive->qubits.size() < 2 || drive->g_mhz.size() + 1 != drive->qubits.size()) {
      throw ConfigurationError("chain.drive needs n qubits and n - 1 static couplings");
    }
    for (const auto& q : drive->qubits) q.validate();
  }
  const int n = resolved_n_qubits();
  if (n < 2) throw ConfigurationError("chain needs at least 2 qubits");
  if (mode == ScenarioMode::Spectrum) return;

  if (initial_site < 1 || initial_site > n) {
    throw ConfigurationError("initial_site = " + std::to_string(initial_site) + " outside 1.." +
                             std::to_string(n));
  }
  if (!(t_max_us > 0.0)) throw ConfigurationError("evolution.t_max_us must be positive");
  if (!(dt_us > 0.0) || dt_us > t_max_us) {
    throw ConfigurationError("evolution.dt_us must be positive and not exceed t_max_us");
  }
  if (!(integrator_step_us > 0.0)) throw ConfigurationError("evolution.integrator_step_us must be positive");
  if (t1_us.size() != t2star_us.size()) throw ConfigurationError("noise.t1_us and noise.t2star_us differ in length");
  if (!t1_us.empty() && static_cast<int>(t1_us.size()) < n) {
    throw ConfigurationError("noise tables cover " + std::to_string(t1_us.size()) + " qubits, chain has " +
                             std::to_string(n));
  }
  if (shots < 0) throw ConfigurationError("readout.shots must be >= 0");
  if (!readout.empty() && static_cast<int>(readout.size()) != n) {
    throw ConfigurationError("readout calibration covers " + std::to_string(readout.size()) +
                             " qubits, chain has " + std::to_string(n));
  }
}

const std::vector<ScenarioPreset>& scenario_presets() {
  static const std::vector<ScenarioPreset> presets = make_presets();
  return presets;
}

ScenarioConfig preset_config(const std::string& name) {
  for (const auto& p : scenario_presets()) {
    if (p.name == name) return p.config;
  }
  std::string known;
  for (const auto& p : scenario_presets()) known += (known.empty() ? "" : ", ") + p.name;
  throw ConfigurationError("unknown scenario '" + name + "'; known scenarios: " + known);
}

ScenarioResult simulate(const ScenarioConfig& config) {
  config.validate();
  ScenarioResult result;
  ScenarioSummary& s = result.summary;
  s.scenario = config.name;

  if (config.mode == ScenarioMode::Rwa) {
    const RwaCheck& r = *config.rwa;
    s.n_qubits = 2;
    s.rwa = validate_rwa(r.g_mhz, r.first, r.second, r.window_us, r.dt_us);
    return result;
  }

  const int n = config.resolved_n_qubits();
  const BondPattern bonds = config.resolved_bonds();
  const SingleExcitationHamiltonian h = build_hamiltonian(n, bonds);
  s.n_qubits = n;
  s.initial_site = config.initial_site;
  s.noise_enabled = config.noise_enabled;
  for (std::size_t i = 0; i < bonds.size(); ++i) s.bonds_mhz.push_back(std::abs(bonds.bond(i)));

  const std::vector<Eigenmode> modes = spectrum(h);
  for (const auto& m : modes) s.spectrum_mhz.push_back(m.energy_mhz);
  s.min_abs_energy_mhz = std::abs(zero_mode(modes).energy_mhz);
  if (bonds.size() >= 2) {
    const double j1 = std::abs(bonds.bond(0));
    const double j2 = std::abs(bonds.bond(1));
    if (j1 != j2) {
      for (const auto& m : in_gap_modes(modes, in_gap_window(j1, j2))) s.in_gap_energies_mhz.push_back(m.energy_mhz);
      s.analytic_winding = winding_number(j1, j2);
    }
  }
  if (n % 2 == 0) s.edge_gap_mhz = edge_mode_splitting(bonds);

  if (config.mode == ScenarioMode::Spectrum) return result;

  const std::vector<double> grid = uniform_grid(config.t_max_us, config.dt_us);
  const SingleExcitationState psi0 = SingleExcitationState::excited_site(n, config.initial_site);
  if (config.noise_enabled) {
    LindbladOptions opts;
    opts.max_step_us = config.integrator_step_us;
    result.trajectory = evolve_lindblad(h, config.resolved_noise(), density_matrix(psi0), grid, opts).trajectory;
  } else {
    result.trajectory = evolve_unitary(h, psi0, grid);
  }
  s.time_averaged_cd = time_averaged_cd(*result.trajectory);
  s.winding_estimate = 2.0 * *s.time_averaged_cd;

  if (config.shots > 0) {
    const ReadoutCalibration cal = config.resolved_calibration();
    const Eigen::MatrixXd p = result.trajectory->populations.cwiseMax(0.0).cwiseMin(1.0);
    result.shots = sample_shots(p, config.shots, cal, config.seed);
    result.corrected = bayes_correct(*result.shots, cal);
  }
  return result;
}

OutputBundle run_scenario(const ScenarioConfig& config) {
  const ScenarioResult result = simulate(config);
  const auto& dir = config.output_dir;
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir)) {
    throw OutputError("cannot create output directory '" + dir.string() + "': " +
                      (ec ? ec.message() : std::string("not a directory")));
  }

  OutputBundle bundle;
  bundle.summary = result.summary;
  bundle.summary_json = dir / "summary.json";
  write_atomic(bundle.summary_json, summary_json(result.summary));
  if (result.trajectory) {
    bundle.trajectory_csv = dir / "trajectory.csv";
    write_atomic(bundle.trajectory_csv, trajectory_csv(*result.trajectory));
    if (config.write_heatmap) {
      bundle.heatmap = dir / "heatmap.txt";
      write_atomic(*bundle.heatmap, heatmap_text(*result.trajectory));
    }
  }
  if (result.shots) {
    bundle.shots_csv = dir / "shots.csv";
    write_atomic(*bundle.shots_csv, shots_csv(*result.trajectory, *result.shots, *result.corrected));
  }
  return bundle;
}

ScenarioConfig apply_sweep_value(const ScenarioConfig& base, const std::string& axis, const SweepValue& value) {
  ScenarioConfig c = base;
  c.sweep.reset();
  if (axis == "n_qubits") {
    if (!c.dimerized) throw ConfigurationError("sweep axis 'n_qubits' needs a dimerized chain");
    c.n_qubits = integer_value(axis, value);
  } else if (axis == "j1_mhz" || axis == "j2_mhz") {
    if (!c.dimerized) throw ConfigurationError("sweep axis '" + axis + "' needs a dimerized chain");
    (axis == "j1_mhz" ? c.dimerized->j1_mhz : c.dimerized->j2_mhz) = scalar_value(axis, value);
  } else if (axis == "bonds_mhz") {
    const auto* list = std::get_if<std::vector<double>>(&value);
    if (!list) throw ConfigurationError("sweep axis 'bonds_mhz' takes bond lists");
    c.bonds = BondPattern(*list);
    c.dimerized.reset();
    c.drive.reset();
    c.n_qubits = static_cast<int>(list->size()) + 1;
  } else if (axis == "t_max_us") {
    c.t_max_us = scalar_value(axis, value);
  } else if (axis == "dt_us") {
    c.dt_us = scalar_value(axis, value);
  } else if (axis == "integrator_step_us") {
    c.integrator_step_us = scalar_value(axis, value);
  } else if (axis == "initial_site") {
    c.initial_site = integer_value(axis, value);
  } else if (axis == "seed") {
    c.seed = static_cast<std::uint64_t>(integer_value(axis, value));
  } else if (axis == "shots") {
    c.shots = integer_value(axis, value);
  } else {
    throw ConfigurationError("sweep axis '" + axis +
                             "' is not a numeric config field (use n_qubits, j1_mhz, j2_mhz, bonds_mhz, "
                             "t_max_us, dt_us, integrator_step_us, initial_site, seed, shots)");
  }
  return c;
}

std::vector<SweepRow> run_sweep(const ScenarioConfig& base, const std::string& axis,
                                const std::vector<SweepValue>& values, unsigned workers) {
  std::vector<ScenarioConfig> configs;
  configs.reserve(values.size());
  for (const auto& v : values) {
    configs.push_back(apply_sweep_value(base, axis, v));
    configs.back().validate();
  }

  std::vector<SweepRow> rows(values.size());
  std::vector<std::exception_ptr> errors(values.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < configs.size(); i = next++) {
      try {
        rows[i].value = sweep_label(values[i]);
        rows[i].summary = simulate(configs[i]).summary;
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(1, configs.size())));
  std::vector<std::thread> pool;
  for (unsigned w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return rows;
}

}  // namespace magnon
