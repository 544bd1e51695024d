// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "magnon/drive.hpp"
#include "magnon/dynamics.hpp"
#include "magnon/io.hpp"
#include "magnon/lattice.hpp"
#include "magnon/readout.hpp"
#include "magnon/scenario.hpp"
#include "magnon/topology.hpp"

using namespace magnon;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void check(bool ok, const std::string& what) {
    pass = pass && ok;
    if (!detail.empty()) detail += "; ";
    detail += what + (ok ? "" : " [miss]");
  }
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

double elapsed_ms(const std::chrono::steady_clock::time_point& t0) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

Trajectory ideal_run(const std::vector<double>& bonds, int site, double t_max, double dt) {
  const int n = static_cast<int>(bonds.size()) + 1;
  const auto grid = uniform_grid(t_max, dt);
  return evolve_unitary(build_hamiltonian(n, BondPattern(bonds)), SingleExcitationState::excited_site(n, site), grid);
}

Trajectory noisy_run(const std::vector<double>& bonds, int site, double t_max, double dt) {
  ScenarioConfig c;
  c.bonds = BondPattern(bonds);
  c.n_qubits = static_cast<int>(bonds.size()) + 1;
  c.noise_enabled = true;
  const auto grid = uniform_grid(t_max, dt);
  const auto h = build_hamiltonian(c.n_qubits, c.bonds);
  return evolve_lindblad(h, c.resolved_noise(), density_matrix(SingleExcitationState::excited_site(c.n_qubits, site)),
                         grid)
      .trajectory;
}

double column_mean(const Trajectory& t, int site) {
  const Eigen::VectorXd col = t.populations.col(site - 1);
  double s = 0.0;
  for (std::size_t i = 1; i < t.size(); ++i) {
    s += 0.5 * (col(static_cast<Eigen::Index>(i)) + col(static_cast<Eigen::Index>(i - 1))) *
         (t.times_us[i] - t.times_us[i - 1]);
  }
  return s / (t.times_us.back() - t.times_us.front());
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome winding_numbers() {
  Outcome o;
  auto t0 = std::chrono::steady_clock::now();
  const auto top = winding_number(1, 5);
  const double ms_top = elapsed_ms(t0);
  t0 = std::chrono::steady_clock::now();
  const auto triv = winding_number(5, 1);
  const double ms_triv = elapsed_ms(t0);
  o.check(top.nu == 1 && top.residual < 1e-6, "nu(1,5)=" + std::to_string(top.nu) + fmt(" res %.1e", top.residual));
  o.check(triv.nu == 0 && triv.residual < 1e-6,
          "nu(5,1)=" + std::to_string(triv.nu) + fmt(" res %.1e", triv.residual));
  o.check(ms_top < 10.0 && ms_triv < 10.0, fmt("%.2f ms", std::max(ms_top, ms_triv)));
  return o;
}

Outcome dynamic_winding() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  const double top = time_averaged_cd(ideal_run({1, 5, 1}, 2, 1.0, 1e-3));
  const double triv = time_averaged_cd(ideal_run({5, 1, 5}, 2, 1.0, 1e-3));
  const double ms = elapsed_ms(t0);
  o.check(std::abs(top - 0.378) <= 0.01, fmt("CD avg 1-5-1 = %.4f (target 0.378 +- 0.01)", top));
  o.check(std::abs(triv) <= 0.02, fmt("5-1-5 = %.4f", triv));
  o.check(ms < 1000.0, fmt("%.1f ms", ms));
  return o;
}

Outcome decoherent_winding() {
  Outcome o;
  const double cd = time_averaged_cd(noisy_run({1, 5, 1}, 2, 1.0, 1e-3));
  o.check(cd >= 0.34 && cd <= 0.38, fmt("noisy CD avg = %.4f (target [0.34, 0.38])", cd));
  return o;
}

Outcome long_time_convergence() {
  Outcome o;
  const double analytic = winding_from_cd_average(1, 5, 20.0);
  o.check(std::abs(analytic - 1.0) <= 0.02, fmt("analytic T=20: %.4f", analytic));
  const int n = 40;
  const int site = 20;
  Trajectory t = ideal_run(BondPattern::dimerized(1, 5, n).couplings_mhz, site, 5.0, 1e-3);
  t.cd = chiral_displacement(t, ChainSpec(n), ChainSpec::cell_of(site));
  const double est = winding_estimate(t);
  o.check(std::abs(est - 1.0) <= 0.05, fmt("40 qubits, b10 start, T=5: %.4f", est));
  return o;
}

Outcome spectrum_structure() {
  Outcome o;
  bool counts_ok = true;
  bool zero_ok = true;
  bool even_shape = true;
  bool odd_shape = true;
  for (int n = 4; n <= 41; ++n) {
    const auto modes = spectrum(build_hamiltonian(n, BondPattern::dimerized(1, 5, n)));
    const auto gap = in_gap_modes(modes, in_gap_window(1, 5));
    if (n % 2 == 0) {
      counts_ok = counts_ok && gap.size() == 2;
      for (const auto& m : gap) even_shape = even_shape && m.profile.density(1) > 0.3 && m.profile.density(n) > 0.3;
    } else {
      counts_ok = counts_ok && gap.size() == 1;
      if (gap.size() != 1) continue;
      zero_ok = zero_ok && std::abs(gap[0].energy_mhz) < 1e-9;
      const Eigen::VectorXd d = gap[0].profile.densities();
      double b_weight = 0.0;
      for (int s = 2; s <= n; s += 2) b_weight += d(s - 1);
      bool decaying = true;
      for (int s = 3; s <= n; s += 2) decaying = decaying && d(s - 1) < d(s - 3);
      odd_shape = odd_shape && b_weight < 1e-12 && d(0) > 0.9 && decaying;
    }
  }
  o.check(counts_ok, "in-gap counts 2 (even) / 1 (odd)");
  o.check(zero_ok, "odd zero mode |E| < 1e-9");
  o.check(even_shape, "even modes on both ends");
  o.check(odd_shape, "odd mode on left a-sites");
  return o;
}

Outcome hybridization_check() {
  Outcome o;
  const Trajectory t = ideal_run({1, 5, 1.1}, 1, 2.0, 1e-3);
  double best = 0.0;
  double when = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t.populations(static_cast<Eigen::Index>(i), 3) > best) {
      best = t.populations(static_cast<Eigen::Index>(i), 3);
      when = t.times_us[i];
    }
  }
  o.check(best >= 0.8, fmt("max P_b2 = %.3f", best) + fmt(" at %.3f us", when));
  double worst = 0.0;
  for (int cells = 10; cells <= 20; ++cells) {
    const auto r = hybridization(1, 5, cells);
    worst = std::max(worst, std::abs(r.numeric_gap_mhz - 2.0 * std::abs(r.t_e_mhz)) / r.numeric_gap_mhz);
  }
  o.check(worst <= 0.05, fmt("gap vs 2|t_e| worst %.2e (20-40 qubits)", worst));
  return o;
}

Outcome critical_size() {
  Outcome o;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int m = 0;
  for (int n = 4; n <= 40; n += 2) {
    const double x = n / 2;
    const double y = std::log(edge_mode_splitting(BondPattern::dimerized(1, 5, n)));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++m;
  }
  const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  const double ratio = slope / std::log(0.2);
  o.check(std::abs(ratio - 1.0) <= 0.02, fmt("slope/ln(1/5) = %.4f", ratio));
  const int nc = critical_chain_length(1, 5);
  o.check(nc == 86, "critical length " + std::to_string(nc));
  return o;
}

Outcome edge_localization() {
  Outcome o;
  const Trajectory top = ideal_run({1, 5, 1, 5}, 1, 1.0, 1e-3);
  const Trajectory triv = ideal_run({5, 1, 5, 1}, 1, 1.0, 1e-3);
  const double a1 = top.populations.col(0).minCoeff();
  const double b = std::max(top.populations.col(1).maxCoeff(), top.populations.col(3).maxCoeff());
  o.check(a1 >= 0.8, fmt("min P_a1 = %.3f", a1));
  o.check(b <= 0.15, fmt("max P_b = %.3f", b));
  const double a1_triv = triv.populations.col(0).minCoeff();
  o.check(a1_triv <= 0.1, fmt("trivial min P_a1 = %.2e", a1_triv));
  return o;
}

Outcome defect_trapping() {
  Outcome o;
  const Trajectory t = ideal_run({4, 1, 1, 4}, 3, 1.0, 1e-3);
  std::vector<double> avg;
  for (int s = 1; s <= 5; ++s) avg.push_back(column_mean(t, s));
  const bool a2_max = std::max_element(avg.begin(), avg.end()) - avg.begin() == 2;
  o.check(a2_max, fmt("avg P_a2 = %.3f is the largest", avg[2]));
  o.check(avg[1] <= 0.1 && avg[3] <= 0.1, fmt("b-site avg max %.3f", std::max(avg[1], avg[3])));
  return o;
}

Outcome rwa_validation() {
  Outcome o;
  const double g = 17.5;
  auto run = [&](double alpha, double mu) {
    return validate_rwa(g, DriveSpec::unmodulated(4.8), DriveSpec::modulated(4.8 + mu / 1000.0, alpha * mu, mu), 0.5,
                        1e-4);
  };
  double worst = 0.0;
  for (double alpha : {0.3, 0.589, 1.0}) {
    for (double mu : {20.0 * g, 30.0 * g}) worst = std::max(worst, run(alpha, mu).relative_error);
  }
  o.check(worst <= 0.05, fmt("worst error %.3f (alpha <= 1, mu >= 20g)", worst));
  const double e1 = run(0.589, 221.0).relative_error;
  const double e2 = run(0.589, 442.0).relative_error;
  const double e3 = run(0.589, 884.0).relative_error;
  o.check(e1 > e2 && e2 > e3, fmt("mu sweep %.4f", e1) + fmt(" > %.4f", e2) + fmt(" > %.4f", e3));
  return o;
}

Outcome property_suites() {
  Outcome o;
  double pairing = 0.0;
  for (const auto& bonds : std::vector<std::vector<double>>{{1, 5, 1, 5, 1}, {4, 1, 1, 4}, {1, 5, 1.1}, {2.2, 0.7, 3.1}}) {
    const auto modes = spectrum(build_hamiltonian(static_cast<int>(bonds.size()) + 1, BondPattern(bonds)));
    for (std::size_t i = 0; i < modes.size(); ++i) {
      pairing = std::max(pairing, std::abs(modes[i].energy_mhz + modes[modes.size() - 1 - i].energy_mhz));
    }
  }
  o.check(pairing <= 1e-9, fmt("chiral pairing %.1e", pairing));

  const Trajectory u = ideal_run(BondPattern::dimerized(1, 5, 21).couplings_mhz, 11, 10.0, 1e-2);
  const double norm_err = (u.populations.rowwise().sum().array() - 1.0).abs().maxCoeff();
  o.check(norm_err <= 1e-10, fmt("unitary norm %.1e", norm_err));

  ScenarioConfig c = preset_config("edge-nontrivial");
  const auto grid = uniform_grid(2.0, 1e-2);
  LindbladOptions opts;
  opts.keep_states = true;
  const auto lr = evolve_lindblad(build_hamiltonian(5, c.bonds), device_hardware_preset().sweet_spot_noise(),
                                  density_matrix(SingleExcitationState::excited_site(5, 1)), grid, opts);
  double trace_rate = 0.0;
  double min_eig = 0.0;
  for (std::size_t i = 0; i < lr.states.size(); ++i) {
    const double drift = std::abs(lr.states[i].trace().real() - 1.0);
    if (grid[i] > 0.0) trace_rate = std::max(trace_rate, drift / grid[i]);
    Eigen::SelfAdjointEigenSolver<DensityMatrix> es(lr.states[i]);
    min_eig = std::min(min_eig, es.eigenvalues().minCoeff());
  }
  o.check(trace_rate <= 1e-8, fmt("trace drift %.1e /us", trace_rate));
  o.check(min_eig >= -1e-9, fmt("min eigenvalue %.1e", min_eig));

  const int shots = 1'000'000;
  Eigen::MatrixXd p(1, 4);
  p << 0.0, 0.27, 0.64, 1.0;
  const auto cal = ReadoutCalibration::uniform(4);
  const auto corr = bayes_correct(sample_shots(p, shots, cal, 17), cal);
  double worst_sigma = 0.0;
  for (Eigen::Index q = 0; q < 4; ++q) {
    const double read = p(0, q) * 0.95 + (1.0 - p(0, q)) * 0.05;
    const double sigma = std::sqrt(read * (1.0 - read) / shots) / 0.9;
    worst_sigma = std::max(worst_sigma, std::abs(corr.unclamped(0, q) - p(0, q)) / sigma);
  }
  o.check(worst_sigma <= 3.0, fmt("Bayes round trip %.2f sigma", worst_sigma));

  const fs::path root = fs::temp_directory_path() / "magnon_acceptance_rerun";
  fs::remove_all(root);
  ScenarioConfig r = preset_config("winding-nontrivial");
  r.shots = 500;
  r.seed = 2024;
  bool identical = true;
  std::vector<std::string> first;
  for (const char* sub : {"a", "b"}) {
    r.output_dir = root / sub;
    const OutputBundle b = run_scenario(r);
    std::vector<std::string> files = {slurp(b.trajectory_csv), slurp(b.summary_json), slurp(*b.shots_csv),
                                      slurp(*b.heatmap)};
    if (first.empty()) {
      first = files;
    } else {
      identical = files == first;
    }
  }
  fs::remove_all(root);
  o.check(identical, "byte-identical reruns");
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"winding numbers", winding_numbers},
      {"dynamic winding, ideal", dynamic_winding},
      {"dynamic winding, decoherent", decoherent_winding},
      {"long-time convergence", long_time_convergence},
      {"spectrum structure", spectrum_structure},
      {"hybridization", hybridization_check},
      {"critical size", critical_size},
      {"edge localization", edge_localization},
      {"defect trapping", defect_trapping},
      {"rwa validation", rwa_validation},
      {"property suites", property_suites},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("threw: ") + e.what();
    }
    failed += o.pass ? 0 : 1;
    std::printf("%s %2zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(), o.detail.c_str());
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
