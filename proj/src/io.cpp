#include "magnon/io.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <initializer_list>
#include <set>
#include <sstream>

#include "json.hpp"

#include "magnon/errors.hpp"

namespace magnon {

namespace {

using json = nlohmann::json;

std::string join_path(const std::string& parent, const std::string& key) {
  return parent.empty() ? key : parent + "." + key;
}

void require_object(const json& j, const std::string& where) {
  if (!j.is_object()) throw ConfigurationError("'" + (where.empty() ? "<root>" : where) + "' must be an object");
}

void check_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& where) {
  require_object(j, where);
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, value] : j.items()) {
    if (!ok.count(key)) {
      std::string list;
      for (const auto& a : ok) list += (list.empty() ? "" : ", ") + a;
      throw ConfigurationError("unknown key '" + join_path(where, key) + "' (allowed: " + list + ")");
    }
  }
}

double as_number(const json& j, const std::string& where) {
  if (!j.is_number()) throw ConfigurationError("'" + where + "' must be a number");
  return j.get<double>();
}

int as_int(const json& j, const std::string& where) {
  if (!j.is_number_integer()) throw ConfigurationError("'" + where + "' must be an integer");
  return j.get<int>();
}

bool as_bool(const json& j, const std::string& where) {
  if (!j.is_boolean()) throw ConfigurationError("'" + where + "' must be true or false");
  return j.get<bool>();
}

std::string as_string(const json& j, const std::string& where) {
  if (!j.is_string()) throw ConfigurationError("'" + where + "' must be a string");
  return j.get<std::string>();
}

std::vector<double> as_numbers(const json& j, const std::string& where) {
  if (!j.is_array()) throw ConfigurationError("'" + where + "' must be an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(as_number(j[i], where + "[" + std::to_string(i) + "]"));
  return out;
}

DriveSpec parse_drive(const json& j, const std::string& where) {
  check_keys(j, {"omega_o_ghz", "tones"}, where);
  if (!j.contains("omega_o_ghz")) throw ConfigurationError("'" + where + ".omega_o_ghz' is required");
  DriveSpec d;
  d.omega_o_ghz = as_number(j["omega_o_ghz"], where + ".omega_o_ghz");
  if (j.contains("tones")) {
    const auto& tones = j["tones"];
    if (!tones.is_array()) throw ConfigurationError("'" + where + ".tones' must be an array");
    for (std::size_t i = 0; i < tones.size(); ++i) {
      const std::string w = where + ".tones[" + std::to_string(i) + "]";
      check_keys(tones[i], {"epsilon_mhz", "mu_mhz", "phi_rad"}, w);
      ModulationTone t;
      if (tones[i].contains("epsilon_mhz")) t.epsilon_mhz = as_number(tones[i]["epsilon_mhz"], w + ".epsilon_mhz");
      if (tones[i].contains("mu_mhz")) t.mu_mhz = as_number(tones[i]["mu_mhz"], w + ".mu_mhz");
      if (tones[i].contains("phi_rad")) t.phi_rad = as_number(tones[i]["phi_rad"], w + ".phi_rad");
      d.tones.push_back(t);
    }
  }
  return d;
}

std::vector<QubitReadoutError> parse_readout_qubits(const json& j, const std::string& where) {
  if (!j.is_array()) throw ConfigurationError("'" + where + "' must be an array");
  std::vector<QubitReadoutError> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string w = where + "[" + std::to_string(i) + "]";
    check_keys(j[i], {"p_e_given_g", "p_g_given_e"}, w);
    QubitReadoutError e;
    if (j[i].contains("p_e_given_g")) e.p_e_given_g = as_number(j[i]["p_e_given_g"], w + ".p_e_given_g");
    if (j[i].contains("p_g_given_e")) e.p_g_given_e = as_number(j[i]["p_g_given_e"], w + ".p_g_given_e");
    out.push_back(e);
  }
  return out;
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& file) {
  std::filesystem::path p(file);
  return p.is_absolute() || base.empty() ? p : base / p;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigurationError("cannot read '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json parse_json(std::string_view text, const std::string& what) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ConfigurationError(what + " is not valid JSON: " + e.what());
  }
}

void parse_chain(const json& j, ScenarioConfig& c) {
  check_keys(j, {"n_qubits", "bonds_mhz", "dimerized", "drive"}, "chain");
  if (j.contains("bonds_mhz") || j.contains("dimerized") || j.contains("drive")) {
    c.bonds = BondPattern();
    c.dimerized.reset();
    c.drive.reset();
    c.n_qubits = 0;
  }
  if (j.contains("n_qubits")) c.n_qubits = as_int(j["n_qubits"], "chain.n_qubits");
  if (j.contains("bonds_mhz")) c.bonds = BondPattern(as_numbers(j["bonds_mhz"], "chain.bonds_mhz"));
  if (j.contains("dimerized")) {
    const auto& d = j["dimerized"];
    check_keys(d, {"j1_mhz", "j2_mhz"}, "chain.dimerized");
    if (!d.contains("j1_mhz") || !d.contains("j2_mhz")) {
      throw ConfigurationError("'chain.dimerized' needs both j1_mhz and j2_mhz");
    }
    c.dimerized = DimerizedChain{as_number(d["j1_mhz"], "chain.dimerized.j1_mhz"),
                                 as_number(d["j2_mhz"], "chain.dimerized.j2_mhz")};
  }
  if (j.contains("drive")) {
    const auto& d = j["drive"];
    check_keys(d, {"g_mhz", "qubits", "resonance_tolerance_mhz"}, "chain.drive");
    DriveChain dc;
    if (d.contains("g_mhz")) dc.g_mhz = as_numbers(d["g_mhz"], "chain.drive.g_mhz");
    if (d.contains("qubits")) {
      if (!d["qubits"].is_array()) throw ConfigurationError("'chain.drive.qubits' must be an array");
      for (std::size_t i = 0; i < d["qubits"].size(); ++i) {
        dc.qubits.push_back(parse_drive(d["qubits"][i], "chain.drive.qubits[" + std::to_string(i) + "]"));
      }
    }
    if (d.contains("resonance_tolerance_mhz")) {
      dc.resonance_tolerance_mhz = as_number(d["resonance_tolerance_mhz"], "chain.drive.resonance_tolerance_mhz");
    }
    c.drive = std::move(dc);
  }
}

SweepValue parse_sweep_value(const json& j, const std::string& where) {
  if (j.is_array()) return as_numbers(j, where);
  if (!j.is_number()) throw ConfigurationError("'" + where + "' must be a number or an array of numbers");
  return j.get<double>();
}

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::string format_optional(const std::optional<double>& v) { return v ? format_number(*v) : std::string(); }

}  // namespace

ScenarioConfig parse_config(std::string_view json_text, const std::filesystem::path& base_dir) {
  const json root = parse_json(json_text, "config");
  check_keys(root,
             {"preset", "name", "mode", "chain", "initial_site", "evolution", "noise", "readout", "rwa", "sweep",
              "seed", "output"},
             "");

  ScenarioConfig c;
  if (root.contains("preset")) c = preset_config(as_string(root["preset"], "preset"));
  if (root.contains("name")) c.name = as_string(root["name"], "name");
  if (root.contains("mode")) {
    const std::string m = as_string(root["mode"], "mode");
    if (m == "dynamics") {
      c.mode = ScenarioMode::Dynamics;
    } else if (m == "spectrum") {
      c.mode = ScenarioMode::Spectrum;
    } else if (m == "rwa") {
      c.mode = ScenarioMode::Rwa;
    } else {
      throw ConfigurationError("'mode' must be one of dynamics, spectrum, rwa (got '" + m + "')");
    }
  }
  if (root.contains("chain")) parse_chain(root["chain"], c);
  if (root.contains("initial_site")) c.initial_site = as_int(root["initial_site"], "initial_site");

  if (root.contains("evolution")) {
    const auto& e = root["evolution"];
    check_keys(e, {"t_max_us", "dt_us", "integrator_step_us"}, "evolution");
    if (e.contains("t_max_us")) c.t_max_us = as_number(e["t_max_us"], "evolution.t_max_us");
    if (e.contains("dt_us")) c.dt_us = as_number(e["dt_us"], "evolution.dt_us");
    if (e.contains("integrator_step_us")) {
      c.integrator_step_us = as_number(e["integrator_step_us"], "evolution.integrator_step_us");
    }
  }

  if (root.contains("noise")) {
    const auto& n = root["noise"];
    check_keys(n, {"enabled", "t1_us", "t2star_us"}, "noise");
    if (n.contains("enabled")) c.noise_enabled = as_bool(n["enabled"], "noise.enabled");
    if (n.contains("t1_us")) c.t1_us = as_numbers(n["t1_us"], "noise.t1_us");
    if (n.contains("t2star_us")) c.t2star_us = as_numbers(n["t2star_us"], "noise.t2star_us");
  }

  if (root.contains("readout")) {
    const auto& r = root["readout"];
    check_keys(r, {"shots", "qubits", "calibration_file"}, "readout");
    if (r.contains("shots")) c.shots = as_int(r["shots"], "readout.shots");
    if (r.contains("qubits") && r.contains("calibration_file")) {
      throw ConfigurationError("'readout' takes either 'qubits' or 'calibration_file', not both");
    }
    if (r.contains("qubits")) c.readout = parse_readout_qubits(r["qubits"], "readout.qubits");
    if (r.contains("calibration_file")) {
      const auto cal = load_calibration(resolve(base_dir, as_string(r["calibration_file"], "readout.calibration_file")));
      c.readout.clear();
      for (int q = 0; q < cal.n_qubits(); ++q) c.readout.push_back(cal.qubit(q));
    }
  }

  if (root.contains("rwa")) {
    const auto& r = root["rwa"];
    check_keys(r, {"g_mhz", "first", "second", "window_us", "dt_us"}, "rwa");
    RwaCheck rc = c.rwa.value_or(RwaCheck{});
    if (r.contains("g_mhz")) rc.g_mhz = as_number(r["g_mhz"], "rwa.g_mhz");
    if (r.contains("first")) rc.first = parse_drive(r["first"], "rwa.first");
    if (r.contains("second")) rc.second = parse_drive(r["second"], "rwa.second");
    if (r.contains("window_us")) rc.window_us = as_number(r["window_us"], "rwa.window_us");
    if (r.contains("dt_us")) rc.dt_us = as_number(r["dt_us"], "rwa.dt_us");
    c.rwa = rc;
  }

  if (root.contains("sweep")) {
    const auto& s = root["sweep"];
    check_keys(s, {"axis", "values"}, "sweep");
    if (!s.contains("axis") || !s.contains("values")) throw ConfigurationError("'sweep' needs 'axis' and 'values'");
    SweepSpec spec;
    spec.axis = as_string(s["axis"], "sweep.axis");
    if (!s["values"].is_array()) throw ConfigurationError("'sweep.values' must be an array");
    for (std::size_t i = 0; i < s["values"].size(); ++i) {
      spec.values.push_back(parse_sweep_value(s["values"][i], "sweep.values[" + std::to_string(i) + "]"));
    }
    c.sweep = std::move(spec);
  }

  if (root.contains("seed")) {
    const auto& s = root["seed"];
    if (!s.is_number_unsigned()) throw ConfigurationError("'seed' must be a non-negative integer");
    c.seed = s.get<std::uint64_t>();
  }

  if (root.contains("output")) {
    const auto& o = root["output"];
    check_keys(o, {"dir", "heatmap"}, "output");
    if (o.contains("dir")) c.output_dir = as_string(o["dir"], "output.dir");
    if (o.contains("heatmap")) c.write_heatmap = as_bool(o["heatmap"], "output.heatmap");
  }

  c.validate();
  return c;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  return parse_config(read_file(path), path.parent_path());
}

HardwarePreset load_hardware_preset(const std::filesystem::path& path) {
  const json root = parse_json(read_file(path), "'" + path.string() + "'");
  check_keys(root, {"qubits", "coupling_g_mhz", "modulations"}, "");
  HardwarePreset p;
  if (root.contains("qubits")) {
    const auto& qs = root["qubits"];
    if (!qs.is_array()) throw ConfigurationError("'qubits' must be an array");
    for (std::size_t i = 0; i < qs.size(); ++i) {
      const std::string w = "qubits[" + std::to_string(i) + "]";
      check_keys(qs[i],
                 {"label", "readout_frequency_ghz", "sweet_spot_frequency_ghz", "t1_us", "t2star_us",
                  "anharmonicity_mhz", "dispersive_shift_mhz", "readout_decay_mhz"},
                 w);
      QubitDeviceParams q;
      q.label = as_string(qs[i].value("label", json("")), w + ".label");
      auto num = [&](const char* key, double& out) {
        if (qs[i].contains(key)) out = as_number(qs[i][key], w + "." + key);
      };
      num("readout_frequency_ghz", q.readout_frequency_ghz);
      num("sweet_spot_frequency_ghz", q.sweet_spot_frequency_ghz);
      num("t1_us", q.t1_us);
      num("t2star_us", q.t2star_us);
      num("anharmonicity_mhz", q.anharmonicity_mhz);
      num("dispersive_shift_mhz", q.dispersive_shift_mhz);
      num("readout_decay_mhz", q.readout_decay_mhz);
      p.qubits.push_back(q);
    }
  }
  if (root.contains("coupling_g_mhz")) p.coupling_g_mhz = as_numbers(root["coupling_g_mhz"], "coupling_g_mhz");
  if (root.contains("modulations")) {
    const auto& ms = root["modulations"];
    if (!ms.is_array()) throw ConfigurationError("'modulations' must be an array");
    for (std::size_t i = 0; i < ms.size(); ++i) {
      const std::string w = "modulations[" + std::to_string(i) + "]";
      check_keys(ms[i], {"experiment", "operating_frequency_ghz", "center_frequency_ghz", "tones"}, w);
      ModulationSet m;
      m.experiment = as_string(ms[i].value("experiment", json("")), w + ".experiment");
      m.operating_frequency_ghz =
          as_numbers(ms[i].value("operating_frequency_ghz", json::array()), w + ".operating_frequency_ghz");
      m.center_frequency_ghz =
          as_numbers(ms[i].value("center_frequency_ghz", json::array()), w + ".center_frequency_ghz");
      const json tones = ms[i].value("tones", json::array());
      if (!tones.is_array()) throw ConfigurationError("'" + w + ".tones' must be an array");
      for (std::size_t q = 0; q < tones.size(); ++q) {
        json wrapped = {{"omega_o_ghz", 0.0}, {"tones", tones[q]}};
        m.tones.push_back(parse_drive(wrapped, w + ".tones[" + std::to_string(q) + "]").tones);
      }
      p.modulations.push_back(std::move(m));
    }
  }
  return p;
}

ReadoutCalibration load_calibration(const std::filesystem::path& path) {
  const json root = parse_json(read_file(path), "'" + path.string() + "'");
  check_keys(root, {"qubits"}, "");
  if (!root.contains("qubits")) throw ConfigurationError("'" + path.string() + "' has no 'qubits' array");
  try {
    return ReadoutCalibration(parse_readout_qubits(root["qubits"], "qubits"));
  } catch (const CalibrationError& e) {
    throw ConfigurationError(path.string() + ": " + e.what());
  }
}

std::filesystem::path data_dir() {
  if (const char* env = std::getenv("MAGNON_DATA_DIR"); env && *env) return env;
  return MAGNON_DATA_DIR;
}

std::string format_number(double value) {
  if (value == 0.0) return "0";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::general, 9);
  return std::string(buf, res.ptr);
}

std::string trajectory_csv(const Trajectory& traj) {
  std::string out = "time_us";
  const int n = traj.n_qubits();
  for (int j = 1; j <= n; ++j) out += ",p_site_" + std::to_string(j);
  out += ",p_vacuum,cd\n";
  for (std::size_t t = 0; t < traj.size(); ++t) {
    const auto i = static_cast<Eigen::Index>(t);
    out += format_number(traj.times_us[t]);
    for (int j = 0; j < n; ++j) out += "," + format_number(traj.populations(i, j));
    out += "," + format_number(traj.vacuum(i)) + "," + format_number(traj.cd(i)) + "\n";
  }
  return out;
}

std::string heatmap_text(const Trajectory& traj) {
  std::string out = "# rows: sites 1.." + std::to_string(traj.n_qubits()) + "; columns: time_us";
  for (double t : traj.times_us) out += " " + format_number(t);
  out += "\n";
  for (int j = 0; j < traj.n_qubits(); ++j) {
    for (std::size_t t = 0; t < traj.size(); ++t) {
      if (t > 0) out += " ";
      out += format_number(traj.populations(static_cast<Eigen::Index>(t), j));
    }
    out += "\n";
  }
  return out;
}

std::string shots_csv(const Trajectory& traj, const ShotRecord& record, const CorrectedProbabilities& corrected) {
  const int n = traj.n_qubits();
  std::string out = "time_us";
  for (int j = 1; j <= n; ++j) out += ",count_e_site_" + std::to_string(j);
  for (int j = 1; j <= n; ++j) out += ",p_raw_site_" + std::to_string(j);
  for (int j = 1; j <= n; ++j) out += ",p_corrected_site_" + std::to_string(j);
  out += ",clamped\n";
  const Eigen::MatrixXd raw = record.frequencies();
  for (std::size_t t = 0; t < traj.size(); ++t) {
    const auto i = static_cast<Eigen::Index>(t);
    out += format_number(traj.times_us[t]);
    for (int j = 0; j < n; ++j) out += "," + std::to_string(record.counts(i, j));
    for (int j = 0; j < n; ++j) out += "," + format_number(raw(i, j));
    for (int j = 0; j < n; ++j) out += "," + format_number(corrected.probabilities(i, j));
    out += "," + std::to_string(corrected.clamped.row(i).count()) + "\n";
  }
  return out;
}

std::string summary_json(const ScenarioSummary& s) {
  nlohmann::ordered_json j;
  j["scenario"] = s.scenario;
  j["n_qubits"] = s.n_qubits;
  j["bonds_mhz"] = s.bonds_mhz;
  j["initial_site"] = s.initial_site;
  j["noise_enabled"] = s.noise_enabled;
  j["time_averaged_cd"] = optional_number(s.time_averaged_cd);
  j["winding_estimate"] = optional_number(s.winding_estimate);
  if (s.analytic_winding) {
    j["analytic_winding"] = s.analytic_winding->nu;
    j["analytic_winding_integral"] = s.analytic_winding->raw_integral;
  } else {
    j["analytic_winding"] = nullptr;
    j["analytic_winding_integral"] = nullptr;
  }
  j["spectrum_mhz"] = s.spectrum_mhz;
  j["in_gap_energies_mhz"] = s.in_gap_energies_mhz;
  j["edge_gap_mhz"] = optional_number(s.edge_gap_mhz);
  j["min_abs_energy_mhz"] = s.min_abs_energy_mhz;
  if (s.rwa) {
    j["rwa"] = {{"extracted_mhz", s.rwa->extracted_mhz},
                {"predicted_mhz", s.rwa->predicted_mhz},
                {"relative_error", s.rwa->relative_error},
                {"transfer_time_us", s.rwa->transfer_time_us},
                {"peak_population", s.rwa->peak_population}};
  }
  return j.dump(2) + "\n";
}

std::string sweep_csv(const std::string& axis, const std::vector<SweepRow>& rows) {
  const bool by_length = axis == "n_qubits";
  std::string out = axis + std::string(by_length ? "" : ",n_qubits") +
                    ",in_gap_count,edge_gap_mhz,min_abs_energy_mhz,time_averaged_cd,winding_estimate,"
                    "analytic_winding\n";
  for (const auto& r : rows) {
    const auto& s = r.summary;
    out += r.value + (by_length ? std::string() : "," + std::to_string(s.n_qubits)) + "," + std::to_string(s.in_gap_energies_mhz.size()) + "," +
           format_optional(s.edge_gap_mhz) + "," + format_number(s.min_abs_energy_mhz) + "," +
           format_optional(s.time_averaged_cd) + "," + format_optional(s.winding_estimate) + "," +
           (s.analytic_winding ? std::to_string(s.analytic_winding->nu) : std::string()) + "\n";
  }
  return out;
}

void write_atomic(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw OutputError("cannot open '" + tmp.string() + "' for writing");
    out << content;
    out.flush();
    if (!out) throw OutputError("write to '" + tmp.string() + "' failed");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw OutputError("cannot move '" + tmp.string() + "' to '" + path.string() + "'");
  }
}

}  // namespace magnon
