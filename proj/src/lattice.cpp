#include "magnon/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace magnon {

namespace {

void require_topological(double j1, double j2, const char* what) {
  if (j1 < 0.0 || j2 <= 0.0) {
    throw ConfigurationError(std::string(what) + ": couplings must satisfy J1 >= 0, J2 > 0");
  }
  if (j1 == j2) {
    throw GapClosureError(std::string(what) + ": J1 == J2 closes the bulk gap");
  }
  if (j1 > j2) {
    throw RegimeError(std::string(what) + ": requires J1 < J2 (got J1 = " + std::to_string(j1) +
                      ", J2 = " + std::to_string(j2) + ")");
  }
}

}  // namespace

ChainSpec::ChainSpec(int n_qubits) : n_qubits_(n_qubits) {
  if (n_qubits < 2) {
    throw ConfigurationError("chain needs at least 2 qubits, got " + std::to_string(n_qubits));
  }
}

BondPattern::BondPattern(std::vector<double> couplings, std::vector<double> phases)
    : couplings_mhz(std::move(couplings)), phases_rad(std::move(phases)) {
  if (!phases_rad.empty() && phases_rad.size() != couplings_mhz.size()) {
    throw ConfigurationError("bond phase list length differs from coupling list length");
  }
}

BondPattern BondPattern::dimerized(double j1, double j2, int n_qubits) {
  if (n_qubits < 2) {
    throw ConfigurationError("chain needs at least 2 qubits");
  }
  std::vector<double> c(static_cast<std::size_t>(n_qubits - 1));
  for (std::size_t i = 0; i < c.size(); ++i) c[i] = (i % 2 == 0) ? j1 : j2;
  return BondPattern(std::move(c));
}

bool BondPattern::has_phases() const noexcept {
  return std::any_of(phases_rad.begin(), phases_rad.end(), [](double p) { return p != 0.0; });
}

Complex BondPattern::bond(std::size_t i) const {
  const double phase = phases_rad.empty() ? 0.0 : phases_rad.at(i);
  if (phase == 0.0) return {couplings_mhz.at(i), 0.0};
  return std::polar(couplings_mhz.at(i), phase);
}

StateProfile StateProfile::normalized(DenseVector<Complex> amps) {
  const double norm = amps.norm();
  if (norm == 0.0) throw InputError("cannot normalize a zero amplitude vector");
  amps /= norm;
  return StateProfile(std::move(amps));
}

Eigen::VectorXd chiral_signs(int n_qubits) {
  Eigen::VectorXd s(n_qubits);
  for (int j = 0; j < n_qubits; ++j) s(j) = (j % 2 == 0) ? 1.0 : -1.0;
  return s;
}

double in_gap_window(double j1, double j2) { return std::abs(j2 - j1) / 2.0; }

std::vector<Eigenmode> in_gap_modes(const std::vector<Eigenmode>& modes, double window_mhz) {
  std::vector<Eigenmode> out;
  std::copy_if(modes.begin(), modes.end(), std::back_inserter(out),
               [&](const Eigenmode& m) { return std::abs(m.energy_mhz) < window_mhz; });
  return out;
}

const Eigenmode& zero_mode(const std::vector<Eigenmode>& modes) {
  if (modes.empty()) throw InputError("empty spectrum");
  constexpr double kTie = 1e-12;
  const Eigenmode* best = &modes.front();
  auto terminal_weight = [](const Eigenmode& m) {
    const int n = static_cast<int>(m.profile.size());
    return m.profile.density(1) + m.profile.density(n);
  };
  for (const auto& m : modes) {
    const double e = std::abs(m.energy_mhz);
    const double b = std::abs(best->energy_mhz);
    if (e < b - kTie || (std::abs(e - b) <= kTie && terminal_weight(m) > terminal_weight(*best))) {
      best = &m;
    }
  }
  return *best;
}

StateProfile analytic_edge_state(double j1, double j2, int n_cells, Side side) {
  require_topological(j1, j2, "analytic_edge_state");
  if (n_cells < 1) throw ConfigurationError("analytic_edge_state: n_cells must be >= 1");
  const double ratio = -j1 / j2;
  DenseVector<Complex> amps = DenseVector<Complex>::Zero(2 * n_cells);
  for (int x = 1; x <= n_cells; ++x) {
    if (side == Side::Left) {
      amps(2 * x - 2) = std::pow(ratio, x - 1);
    } else {
      amps(2 * x - 1) = std::pow(ratio, n_cells - x);
    }
  }
  return StateProfile::normalized(std::move(amps));
}

StateProfile analytic_defect_state(double j1, double j2, int n_cells, int x_e) {
  require_topological(j1, j2, "analytic_defect_state");
  if (x_e < 1 || x_e > n_cells) {
    throw BoundsError("analytic_defect_state: interface cell " + std::to_string(x_e) +
                      " outside 1.." + std::to_string(n_cells));
  }
  const double ratio = -j1 / j2;
  DenseVector<Complex> amps = DenseVector<Complex>::Zero(2 * n_cells - 1);
  for (int x = 1; x <= n_cells; ++x) {
    amps(2 * x - 2) = std::pow(ratio, std::abs(x - x_e));
  }
  return StateProfile::normalized(std::move(amps));
}

double bidiagonal_min_singular_value(const Eigen::VectorXd& d, const Eigen::VectorXd& e) {
  const Eigen::Index n = d.size();
  if (n == 0 || e.size() != n - 1) {
    throw InputError("bidiagonal: subdiagonal must be one shorter than the diagonal");
  }
  if ((d.array() == 0.0).any()) return 0.0;

  // Inverse iteration on B^T B. Forward and back substitution on a
  // bidiagonal are componentwise backward stable, so tiny singular values
  // keep full relative accuracy.
  auto solve_lower = [&](const Eigen::VectorXd& b) {
    Eigen::VectorXd y(n);
    y(0) = b(0) / d(0);
    for (Eigen::Index i = 1; i < n; ++i) y(i) = (b(i) - e(i - 1) * y(i - 1)) / d(i);
    return y;
  };
  auto solve_upper_transposed = [&](const Eigen::VectorXd& b) {
    Eigen::VectorXd z(n);
    z(n - 1) = b(n - 1) / d(n - 1);
    for (Eigen::Index i = n - 2; i >= 0; --i) z(i) = (b(i) - e(i) * z(i + 1)) / d(i);
    return z;
  };

  Eigen::VectorXd x = Eigen::VectorXd::Ones(n).normalized();
  double sigma = 0.0;
  for (int iter = 0; iter < 200; ++iter) {
    Eigen::VectorXd y = solve_lower(x);
    const double ny = y.norm();
    const double next = 1.0 / ny;
    y /= ny;
    x = solve_upper_transposed(y);
    x.normalize();
    if (iter > 1 && std::abs(next - sigma) <= 4e-16 * next) {
      sigma = next;
      break;
    }
    sigma = next;
  }
  return sigma;
}

double edge_mode_splitting(const BondPattern& bonds) {
  const std::size_t n = bonds.size() + 1;
  if (n % 2 != 0) throw ConfigurationError("edge_mode_splitting: chain length must be even");
  const Eigen::Index cells = static_cast<Eigen::Index>(n / 2);
  // Rows a_x, columns b_y: B(x,x) = |a_x - b_x|, B(x+1,x) = |b_x - a_{x+1}|.
  // Phases are a diagonal unitary gauge on an open chain and drop out.
  Eigen::VectorXd d(cells);
  Eigen::VectorXd e(cells - 1);
  for (Eigen::Index x = 0; x < cells; ++x) d(x) = std::abs(bonds.bond(2 * x));
  for (Eigen::Index x = 0; x + 1 < cells; ++x) e(x) = std::abs(bonds.bond(2 * x + 1));
  return 2.0 * bidiagonal_min_singular_value(d, e);
}

HybridizationReport hybridization(double j1, double j2, int n_cells) {
  require_topological(j1, j2, "hybridization");
  if (n_cells < 1) throw ConfigurationError("hybridization: n_cells must be >= 1");
  const int n = 2 * n_cells;
  const BondPattern bonds = BondPattern::dimerized(j1, j2, n);
  const SingleExcitationHamiltonian h = build_hamiltonian(n, bonds);

  const StateProfile left = analytic_edge_state(j1, j2, n_cells, Side::Left);
  const StateProfile right = analytic_edge_state(j1, j2, n_cells, Side::Right);

  HybridizationReport report;
  report.t_e_mhz = left.amplitudes.dot(h * right.amplitudes).real();
  report.numeric_gap_mhz = edge_mode_splitting(bonds);

  std::vector<Eigenmode> modes = spectrum(h);
  std::sort(modes.begin(), modes.end(), [](const Eigenmode& a, const Eigenmode& b) {
    return std::abs(a.energy_mhz) < std::abs(b.energy_mhz);
  });
  report.in_gap.assign(modes.begin(), modes.begin() + std::min<std::size_t>(2, modes.size()));
  std::sort(report.in_gap.begin(), report.in_gap.end(),
            [](const Eigenmode& a, const Eigenmode& b) { return a.energy_mhz < b.energy_mhz; });

  report.hybridized = report.in_gap.size() == 2 &&
                      std::all_of(report.in_gap.begin(), report.in_gap.end(), [n](const Eigenmode& m) {
                        const double l = m.profile.density(1);
                        const double r = m.profile.density(n);
                        return std::max(l, r) > 0.0 && std::min(l, r) / std::max(l, r) >= 0.5;
                      });
  return report;
}

int critical_chain_length(double j1, double j2, double gap_threshold_mhz, int max_qubits) {
  if (!(gap_threshold_mhz > 0.0)) {
    throw ConfigurationError("critical_chain_length: gap threshold must be positive");
  }
  require_topological(j1, j2, "critical_chain_length");
  auto gap = [&](int n) { return edge_mode_splitting(BondPattern::dimerized(j1, j2, n)); };
  auto below = [&](int n) { return gap(n) < gap_threshold_mhz; };

  // The splitting decays exponentially with length: gallop, then bisect
  // over even counts.
  int lo = 0;
  int hi = 2;
  while (!below(hi)) {
    lo = hi;
    hi *= 2;
    if (hi > max_qubits) {
      hi = max_qubits - max_qubits % 2;
      if (hi <= lo || !below(hi)) {
        throw ConfigurationError("critical_chain_length: splitting stays above threshold up to " +
                                 std::to_string(max_qubits) + " qubits");
      }
      break;
    }
  }
  while (hi - lo > 2) {
    int mid = lo + (hi - lo) / 2;
    mid -= mid % 2;
    if (below(mid)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

}  // namespace magnon
