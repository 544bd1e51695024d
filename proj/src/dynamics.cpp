#include "magnon/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace magnon {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void require_time_grid(std::span<const double> times) {
  if (times.empty()) throw InputError("time grid is empty");
  if (times.front() != 0.0) throw InputError("time grid must start at 0");
  for (std::size_t i = 1; i < times.size(); ++i) {
    if (!(times[i] > times[i - 1])) throw InputError("time grid must be strictly increasing");
  }
}

int substeps(double span, double max_step) {
  return std::max(1, static_cast<int>(std::ceil(span / max_step - 1e-9)));
}

Eigen::VectorXd cd_weights(Eigen::Index n, int origin_cell) {
  Eigen::VectorXd w(n);
  for (int site = 1; site <= n; ++site) {
    const double x = ChainSpec::cell_of(site) - origin_cell;
    w(site - 1) = ChainSpec::sublattice(site) == Sublattice::A ? x : -x;
  }
  return w;
}

// RK4 step that keeps every Liouvillian frequency below 0.01 rad per step,
// which holds the global error near 1e-10 over a microsecond.
double lindblad_step_cap(const SingleExcitationHamiltonian& h, const NoiseModel& noise) {
  double radius = 0.0;
  for (Eigen::Index i = 0; i < h.rows(); ++i) radius = std::max(radius, h.row(i).cwiseAbs().sum());
  double decay = 0.0;
  for (int q = 0; q < noise.n_qubits(); ++q) {
    decay = std::max(decay, 2.0 * noise.relaxation_rate(q) + 2.0 * noise.dephasing_rate(q));
  }
  const double rate = 2.0 * kTwoPi * radius + decay;
  return rate > 0.0 ? 0.01 / rate : std::numeric_limits<double>::infinity();
}

}  // namespace

SingleExcitationState SingleExcitationState::excited_site(int n_qubits, int site) {
  if (site < 1 || site > n_qubits) {
    throw BoundsError("excited site " + std::to_string(site) + " outside 1.." +
                      std::to_string(n_qubits));
  }
  SingleExcitationState s;
  s.amplitudes = DenseVector<Complex>::Zero(n_qubits);
  s.amplitudes(site - 1) = 1.0;
  return s;
}

DensityMatrix density_matrix(const SingleExcitationState& psi) {
  const Eigen::Index n = psi.size();
  DenseVector<Complex> full = DenseVector<Complex>::Zero(n + 1);
  full.tail(n) = psi.amplitudes;
  return full * full.adjoint();
}

NoiseModel::NoiseModel(std::vector<double> t1_us, std::vector<double> t2star_us)
    : t1_(std::move(t1_us)), t2_(std::move(t2star_us)) {
  if (t1_.size() != t2_.size()) {
    throw NoiseModelError("T1 and T2* lists differ in length");
  }
  for (std::size_t q = 0; q < t1_.size(); ++q) {
    if (!(t1_[q] > 0.0) || !(t2_[q] > 0.0)) {
      throw NoiseModelError("qubit " + std::to_string(q + 1) + ": T1 and T2* must be positive");
    }
    if (t2_[q] > 2.0 * t1_[q]) {
      throw NoiseModelError("qubit " + std::to_string(q + 1) + ": T2* = " + std::to_string(t2_[q]) +
                            " exceeds 2 T1 = " + std::to_string(2.0 * t1_[q]) +
                            " (negative pure dephasing)");
    }
  }
}

NoiseModel NoiseModel::ideal(int n_qubits) {
  const double inf = std::numeric_limits<double>::infinity();
  return NoiseModel(std::vector<double>(static_cast<std::size_t>(n_qubits), inf),
                    std::vector<double>(static_cast<std::size_t>(n_qubits), inf));
}

double NoiseModel::relaxation_rate(int q) const { return 1.0 / t1_us(q); }

double NoiseModel::dephasing_rate(int q) const {
  return 1.0 / t2star_us(q) - 0.5 / t1_us(q);
}

NoiseModel NoiseModel::truncated(int n_qubits) const {
  if (n_qubits > this->n_qubits()) {
    throw NoiseModelError("noise table has " + std::to_string(this->n_qubits()) +
                          " qubits, chain needs " + std::to_string(n_qubits));
  }
  return NoiseModel(std::vector<double>(t1_.begin(), t1_.begin() + n_qubits),
                    std::vector<double>(t2_.begin(), t2_.begin() + n_qubits));
}

std::vector<double> uniform_grid(double t_max_us, double dt_us) {
  if (!(dt_us > 0.0) || !(t_max_us >= 0.0)) {
    throw ConfigurationError("time grid needs dt > 0 and t_max >= 0");
  }
  const auto steps = static_cast<std::size_t>(std::llround(t_max_us / dt_us));
  std::vector<double> grid(steps + 1);
  for (std::size_t i = 0; i <= steps; ++i) grid[i] = static_cast<double>(i) * dt_us;
  return grid;
}

Eigen::VectorXd chiral_displacement(const Trajectory& traj, const ChainSpec& chain, int origin_cell) {
  const int n = chain.n_qubits();
  if (traj.populations.cols() != n) {
    throw InputError("trajectory has " + std::to_string(traj.populations.cols()) +
                     " sites, chain has " + std::to_string(n));
  }
  return traj.populations * cd_weights(n, origin_cell);
}

double time_averaged_cd(const Trajectory& traj) {
  const std::size_t m = traj.size();
  if (m < 2) throw InputError("time average needs at least two samples");
  double integral = 0.0;
  for (std::size_t i = 1; i < m; ++i) {
    integral += 0.5 * (traj.cd(static_cast<Eigen::Index>(i)) + traj.cd(static_cast<Eigen::Index>(i - 1))) *
                (traj.times_us[i] - traj.times_us[i - 1]);
  }
  return integral / (traj.times_us.back() - traj.times_us.front());
}

Trajectory evolve_unitary(const SingleExcitationHamiltonian& h, const SingleExcitationState& psi0,
                          std::span<const double> times_us) {
  const Eigen::Index n = h.rows();
  if (h.cols() != n || psi0.size() != n) {
    throw InputError("Hamiltonian and initial state dimensions differ");
  }
  if (std::abs(psi0.amplitudes.squaredNorm() - 1.0) > 1e-10) {
    throw InputError("initial state is not normalized (norm^2 = " +
                     std::to_string(psi0.amplitudes.squaredNorm()) + ")");
  }
  require_time_grid(times_us);

  Eigen::SelfAdjointEigenSolver<SingleExcitationHamiltonian> solver(h);
  const auto& vecs = solver.eigenvectors();
  const Eigen::VectorXd& energies = solver.eigenvalues();
  const DenseVector<Complex> coeffs = vecs.adjoint() * psi0.amplitudes;

  Trajectory traj;
  traj.times_us.assign(times_us.begin(), times_us.end());
  traj.populations.resize(static_cast<Eigen::Index>(times_us.size()), n);
  traj.vacuum = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(times_us.size()));
  DenseVector<Complex> phased(n);
  for (std::size_t i = 0; i < times_us.size(); ++i) {
    for (Eigen::Index k = 0; k < n; ++k) {
      phased(k) = coeffs(k) * std::polar(1.0, -kTwoPi * energies(k) * times_us[i]);
    }
    traj.populations.row(static_cast<Eigen::Index>(i)) = (vecs * phased).cwiseAbs2().transpose();
  }
  traj.cd = traj.populations * cd_weights(n, 0);
  return traj;
}

DensityMatrix lindblad_rhs(const SingleExcitationHamiltonian& h, const NoiseModel& noise,
                           const DensityMatrix& rho) {
  const Eigen::Index n = h.rows();
  const Eigen::Index dim = n + 1;
  // Coherent part, with the vacuum row and column of H identically zero.
  DensityMatrix drho = DensityMatrix::Zero(dim, dim);
  const Complex minus_i_two_pi(0.0, -kTwoPi);
  drho.bottomRightCorner(n, n).noalias() = h * rho.bottomRightCorner(n, n);
  drho.bottomRightCorner(n, n).noalias() -= rho.bottomRightCorner(n, n) * h;
  drho.bottomLeftCorner(n, 1).noalias() = h * rho.bottomLeftCorner(n, 1);
  drho.topRightCorner(1, n).noalias() = -(rho.topRightCorner(1, n) * h);
  drho *= minus_i_two_pi;

  // Dissipators in closed form: coherence (i, k) decays at c_i + c_k with
  // c_j = 1/(2 T1_j) + gamma_phi_j and c_vacuum = 0; populations relax into
  // the vacuum at 1/T1_j.
  Eigen::VectorXd c = Eigen::VectorXd::Zero(dim);
  Eigen::VectorXd gamma1 = Eigen::VectorXd::Zero(dim);
  for (Eigen::Index j = 1; j < dim; ++j) {
    gamma1(j) = noise.relaxation_rate(static_cast<int>(j - 1));
    c(j) = 0.5 * gamma1(j) + noise.dephasing_rate(static_cast<int>(j - 1));
  }
  for (Eigen::Index k = 0; k < dim; ++k) {
    for (Eigen::Index i = 0; i < dim; ++i) {
      if (i == k) continue;
      drho(i, k) -= (c(i) + c(k)) * rho(i, k);
    }
  }
  for (Eigen::Index j = 1; j < dim; ++j) {
    drho(j, j) -= gamma1(j) * rho(j, j);
    drho(0, 0) += gamma1(j) * rho(j, j);
  }
  return drho;
}

LindbladResult evolve_lindblad(const SingleExcitationHamiltonian& h, const NoiseModel& noise,
                               const DensityMatrix& rho0, std::span<const double> times_us,
                               const LindbladOptions& options) {
  const Eigen::Index n = h.rows();
  if (noise.n_qubits() != n) {
    throw NoiseModelError("noise model covers " + std::to_string(noise.n_qubits()) +
                          " qubits, Hamiltonian has " + std::to_string(n));
  }
  if (rho0.rows() != n + 1 || rho0.cols() != n + 1) {
    throw InputError("initial density matrix must be (n+1)x(n+1) over {vacuum, sites}");
  }
  if ((rho0 - rho0.adjoint()).cwiseAbs().maxCoeff() > 1e-10) {
    throw InputError("initial density matrix is not Hermitian");
  }
  if (std::abs(rho0.trace().real() - 1.0) > 1e-10) {
    throw InputError("initial density matrix does not have unit trace");
  }
  if (Eigen::SelfAdjointEigenSolver<DensityMatrix>(rho0, Eigen::EigenvaluesOnly).eigenvalues().minCoeff() <
      -1e-10) {
    throw InputError("initial density matrix is not positive semidefinite");
  }
  if (!(options.max_step_us > 0.0)) throw ConfigurationError("integration step must be positive");
  require_time_grid(times_us);

  const auto samples = static_cast<Eigen::Index>(times_us.size());
  LindbladResult result;
  Trajectory& traj = result.trajectory;
  traj.times_us.assign(times_us.begin(), times_us.end());
  traj.populations.resize(samples, n);
  traj.vacuum.resize(samples);

  auto rhs = [&](double, const DensityMatrix& r) { return lindblad_rhs(h, noise, r); };
  auto record = [&](Eigen::Index i, const DensityMatrix& r) {
    const Eigen::VectorXd diag = r.diagonal().real();
    traj.vacuum(i) = diag(0);
    traj.populations.row(i) = diag.tail(n).transpose();
    if (options.keep_states) result.states.push_back(r);
  };

  const double max_step = std::min(options.max_step_us, lindblad_step_cap(h, noise));
  DensityMatrix rho = rho0;
  record(0, rho);
  for (Eigen::Index i = 1; i < samples; ++i) {
    const double t0 = times_us[static_cast<std::size_t>(i - 1)];
    const double span = times_us[static_cast<std::size_t>(i)] - t0;
    const int steps = substeps(span, max_step);
    const double step = span / steps;
    for (int s = 0; s < steps; ++s) rho = rk4_step(rhs, t0 + s * step, rho, step);
    record(i, rho);
  }
  traj.cd = traj.populations * cd_weights(n, 0);
  return result;
}

std::vector<DenseVector<Complex>> evolve_time_dependent(const TimeDependentHamiltonian& h,
                                                        const DenseVector<Complex>& psi0,
                                                        std::span<const double> times_us,
                                                        double max_step_us) {
  require_time_grid(times_us);
  if (!(max_step_us > 0.0)) throw ConfigurationError("integration step must be positive");
  const Complex minus_i_two_pi(0.0, -kTwoPi);
  auto rhs = [&](double t, const DenseVector<Complex>& psi) -> DenseVector<Complex> {
    return minus_i_two_pi * (h(t) * psi);
  };
  std::vector<DenseVector<Complex>> out;
  out.reserve(times_us.size());
  DenseVector<Complex> psi = psi0;
  out.push_back(psi);
  for (std::size_t i = 1; i < times_us.size(); ++i) {
    const double t0 = times_us[i - 1];
    const double span = times_us[i] - t0;
    const int steps = substeps(span, max_step_us);
    const double step = span / steps;
    for (int s = 0; s < steps; ++s) psi = rk4_step(rhs, t0 + s * step, psi, step);
    out.push_back(psi);
  }
  return out;
}

}  // namespace magnon
