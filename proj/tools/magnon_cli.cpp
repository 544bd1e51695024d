// Command-line front end: runs named scenarios or JSON configs and writes
// CSV / JSON / matrix outputs.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#include "CLI11.hpp"
#include "magnon/errors.hpp"
#include "magnon/io.hpp"
#include "magnon/scenario.hpp"

namespace {

using namespace magnon;

struct GlobalOptions {
  std::string config;
  std::string scenario;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<double> dt;
  std::optional<double> t_max;
  std::optional<int> shots;
  std::optional<bool> noise;
};

ScenarioConfig resolve_config(const GlobalOptions& g, const std::string& fallback_preset) {
  if (!g.config.empty() && !g.scenario.empty()) {
    throw ConfigurationError("pass either --config or --scenario, not both");
  }
  ScenarioConfig c;
  if (!g.config.empty()) {
    c = load_config(g.config);
  } else if (!g.scenario.empty()) {
    c = preset_config(g.scenario);
  } else if (!fallback_preset.empty()) {
    c = preset_config(fallback_preset);
  } else {
    throw ConfigurationError("no scenario given; use --config FILE or --scenario NAME (see 'magnon list')");
  }
  if (!g.out.empty()) c.output_dir = g.out;
  if (g.seed) c.seed = *g.seed;
  if (g.dt) c.dt_us = *g.dt;
  if (g.t_max) c.t_max_us = *g.t_max;
  if (g.shots) c.shots = *g.shots;
  if (g.noise) c.noise_enabled = *g.noise;
  c.validate();
  return c;
}

std::string fmt(const std::optional<double>& v) { return v ? format_number(*v) : "n/a"; }

void print_summary(const ScenarioSummary& s) {
  std::cout << "scenario            " << s.scenario << "\n"
            << "qubits              " << s.n_qubits << "\n"
            << "time-averaged CD    " << fmt(s.time_averaged_cd) << "\n"
            << "winding estimate    " << fmt(s.winding_estimate) << "\n"
            << "analytic winding    "
            << (s.analytic_winding ? std::to_string(s.analytic_winding->nu) : std::string("n/a")) << "\n"
            << "in-gap modes        " << s.in_gap_energies_mhz.size() << "\n"
            << "edge gap (MHz)      " << fmt(s.edge_gap_mhz) << "\n";
}

std::vector<SweepValue> parse_values(const std::vector<std::string>& raw) {
  std::vector<SweepValue> out;
  for (const auto& item : raw) {
    if (item.find('-', 1) != std::string::npos && item.find('e') == std::string::npos) {
      std::vector<double> list;
      std::stringstream ss(item);
      std::string part;
      while (std::getline(ss, part, '-')) list.push_back(std::stod(part));
      out.emplace_back(std::move(list));
    } else {
      std::size_t used = 0;
      const double v = std::stod(item, &used);
      if (used != item.size()) throw ConfigurationError("sweep value '" + item + "' is not a number");
      out.emplace_back(v);
    }
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Single-excitation SSH qubit-chain simulator"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOptions g;
  app.add_option("--config", g.config, "JSON scenario config");
  app.add_option("--scenario", g.scenario, "built-in scenario name");
  app.add_option("--out", g.out, "output directory");
  app.add_option("--seed", g.seed, "master seed for shot sampling");
  app.add_option("--dt", g.dt, "sample spacing (us)");
  app.add_option("--t-max", g.t_max, "evolution window (us)");
  app.add_option("--shots", g.shots, "shots per time point (0: exact populations)");
  app.add_flag("--noise{true},--no-noise{false}", g.noise, "toggle T1 / T2* decoherence");

  auto* run = app.add_subcommand("run", "simulate one scenario and write its outputs");

  auto* sweep = app.add_subcommand("sweep", "run a scenario over a list of values of one field");
  std::string axis;
  std::vector<std::string> values;
  unsigned workers = 0;
  sweep->add_option("--axis", axis, "config field to vary");
  sweep->add_option("--values", values, "values; bond patterns as 1-5-1")->delimiter(',');
  sweep->add_option("--workers", workers, "worker threads (0: all cores)");

  auto* spec = app.add_subcommand("spectrum", "eigenvalues of a chain");
  std::optional<double> sj1;
  std::optional<double> sj2;
  std::optional<int> sn;
  spec->add_option("--j1", sj1, "intracell coupling (MHz)");
  spec->add_option("--j2", sj2, "intercell coupling (MHz)");
  spec->add_option("-n,--qubits", sn, "chain length");

  auto* wind = app.add_subcommand("winding", "analytic winding number and chiral displacement");
  double wj1 = 1.0;
  double wj2 = 5.0;
  std::optional<double> window;
  wind->add_option("--j1", wj1, "intracell coupling (MHz)")->capture_default_str();
  wind->add_option("--j2", wj2, "intercell coupling (MHz)")->capture_default_str();
  wind->add_option("--window", window, "averaging window T (us) for the CD estimate");

  auto* rwa = app.add_subcommand("rwa-check", "compare full modulated dynamics with the effective coupling");

  app.add_subcommand("list", "list built-in scenarios");

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand("list")) {
      for (const auto& p : scenario_presets()) std::printf("%-20s %s\n", p.name.c_str(), p.description.c_str());
      return 0;
    }

    if (run->parsed()) {
      const ScenarioConfig c = resolve_config(g, "");
      const OutputBundle b = run_scenario(c);
      print_summary(b.summary);
      std::cout << "wrote               " << c.output_dir.string() << "\n";
      return 0;
    }

    if (sweep->parsed()) {
      const ScenarioConfig c = resolve_config(g, "");
      std::string ax = axis;
      std::vector<SweepValue> vals;
      if (!values.empty()) vals = parse_values(values);
      if (ax.empty() && c.sweep) ax = c.sweep->axis;
      if (values.empty() && c.sweep) vals = c.sweep->values;
      if (ax.empty()) throw ConfigurationError("no sweep axis; pass --axis or add a 'sweep' section to the config");
      const auto rows = run_sweep(c, ax, vals, workers);
      std::error_code ec;
      std::filesystem::create_directories(c.output_dir, ec);
      if (ec) throw OutputError("cannot create output directory '" + c.output_dir.string() + "': " + ec.message());
      const auto path = c.output_dir / "sweep.csv";
      write_atomic(path, sweep_csv(ax, rows));
      std::cout << rows.size() << " rows written to " << path.string() << "\n";
      return 0;
    }

    if (spec->parsed()) {
      ScenarioConfig c;
      if (sj1 || sj2 || sn) {
        c.name = "spectrum";
        c.dimerized = DimerizedChain{sj1.value_or(1.0), sj2.value_or(5.0)};
        c.n_qubits = sn.value_or(10);
      } else {
        c = resolve_config(g, "spectrum-size");
      }
      c.mode = ScenarioMode::Spectrum;
      const ScenarioSummary s = simulate(c).summary;
      std::cout << "index,energy_mhz\n";
      for (std::size_t i = 0; i < s.spectrum_mhz.size(); ++i) {
        std::cout << i << "," << format_number(s.spectrum_mhz[i]) << "\n";
      }
      std::cerr << s.in_gap_energies_mhz.size() << " in-gap mode(s)";
      if (s.edge_gap_mhz) std::cerr << ", edge gap " << format_number(*s.edge_gap_mhz) << " MHz";
      std::cerr << "\n";
      return 0;
    }

    if (wind->parsed()) {
      const WindingResult w = winding_number(wj1, wj2);
      std::cout << "nu                  " << w.nu << "\n"
                << "integral            " << format_number(w.raw_integral) << "\n"
                << "k points            " << w.k_points << "\n";
      if (window) {
        std::cout << "CD-average estimate " << format_number(winding_from_cd_average(wj1, wj2, *window)) << "\n";
      }
      return 0;
    }

    if (rwa->parsed()) {
      ScenarioConfig c = resolve_config(g, "rwa-check");
      if (c.mode != ScenarioMode::Rwa) throw ConfigurationError("rwa-check needs a config with mode 'rwa'");
      const RwaValidation r = *simulate(c).summary.rwa;
      std::cout << "predicted |J| (MHz) " << format_number(r.predicted_mhz) << "\n"
                << "extracted |J| (MHz) " << format_number(r.extracted_mhz) << "\n"
                << "relative error      " << format_number(r.relative_error) << "\n"
                << "transfer time (us)  " << format_number(r.transfer_time_us) << "\n";
      return 0;
    }
  } catch (const ConfigurationError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const OutputError& e) {
    std::cerr << "output error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
