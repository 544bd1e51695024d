#pragma once

#include <Eigen/Dense>
#include <functional>
#include <span>
#include <vector>

#include "magnon/lattice.hpp"

namespace magnon {

/// One excitation shared over the chain; amplitude j-1 belongs to site j.
struct SingleExcitationState {
  DenseVector<Complex> amplitudes;

  static SingleExcitationState excited_site(int n_qubits, int site);
  Eigen::Index size() const noexcept { return amplitudes.size(); }
};

/// Density matrix over {vacuum, site 1, ..., site n}; index 0 is the vacuum.
using DensityMatrix = DenseMatrix<Complex>;

DensityMatrix density_matrix(const SingleExcitationState& psi);

/// Per-qubit relaxation and Ramsey times in us. Infinite values disable the
/// corresponding channel.
class NoiseModel {
 public:
  NoiseModel(std::vector<double> t1_us, std::vector<double> t2star_us);

  static NoiseModel ideal(int n_qubits);

  int n_qubits() const noexcept { return static_cast<int>(t1_.size()); }
  double t1_us(int q) const { return t1_.at(static_cast<std::size_t>(q)); }
  double t2star_us(int q) const { return t2_.at(static_cast<std::size_t>(q)); }

  /// 1 / T1, per us.
  double relaxation_rate(int q) const;
  /// 1 / T2* - 1 / (2 T1), per us.
  double dephasing_rate(int q) const;

  /// First n entries of a longer per-qubit table.
  NoiseModel truncated(int n_qubits) const;

 private:
  std::vector<double> t1_;
  std::vector<double> t2_;
};

/// Sampled populations on a time grid. populations(t, j-1) is P_j^e(t).
struct Trajectory {
  std::vector<double> times_us;
  Eigen::MatrixXd populations;
  Eigen::VectorXd vacuum;
  Eigen::VectorXd cd;

  int n_qubits() const noexcept { return static_cast<int>(populations.cols()); }
  std::size_t size() const noexcept { return times_us.size(); }
};

/// 0, dt, 2 dt, ..., t_max (inclusive, rounded to the nearest whole step).
std::vector<double> uniform_grid(double t_max_us, double dt_us);

/// Exact propagation through the eigendecomposition of h, phases exp(-i 2 pi E t).
Trajectory evolve_unitary(const SingleExcitationHamiltonian& h, const SingleExcitationState& psi0,
                          std::span<const double> times_us);

struct LindbladOptions {
  /// Upper bound on the RK4 step; stiffer Hamiltonians get a finer step.
  double max_step_us = 1e-3;
  bool keep_states = false;
};

struct LindbladResult {
  Trajectory trajectory;
  std::vector<DensityMatrix> states;
};

/// d rho/dt = -i 2pi [H, rho] + sum_j (1/T1_j) D[|G><j|] rho + sum_j 2 gamma_phi_j D[|j><j|] rho,
/// fixed-step RK4.
LindbladResult evolve_lindblad(const SingleExcitationHamiltonian& h, const NoiseModel& noise,
                               const DensityMatrix& rho0, std::span<const double> times_us,
                               const LindbladOptions& options = {});

/// Right-hand side of the master equation above, exposed for cross-checks.
DensityMatrix lindblad_rhs(const SingleExcitationHamiltonian& h, const NoiseModel& noise,
                           const DensityMatrix& rho);

/// Classic RK4 step for a linear or nonlinear first-order system.
template <typename State, typename Rhs>
State rk4_step(const Rhs& rhs, double t, const State& y, double h) {
  const State k1 = rhs(t, y);
  const State k2 = rhs(t + 0.5 * h, State(y + (0.5 * h) * k1));
  const State k3 = rhs(t + 0.5 * h, State(y + (0.5 * h) * k2));
  const State k4 = rhs(t + h, State(y + h * k3));
  return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

using TimeDependentHamiltonian = std::function<SingleExcitationHamiltonian(double t_us)>;

/// Fixed-step RK4 for i d psi/dt = 2 pi H(t) psi; returns the state at each
/// requested time.
std::vector<DenseVector<Complex>> evolve_time_dependent(const TimeDependentHamiltonian& h,
                                                        const DenseVector<Complex>& psi0,
                                                        std::span<const double> times_us,
                                                        double max_step_us);

/// sum_x (x - origin_cell) (P(a_x) - P(b_x)) per time point; a trailing
/// a-site without a partner contributes only its own term. Evolution fills
/// Trajectory::cd with origin_cell = 0.
Eigen::VectorXd chiral_displacement(const Trajectory& traj, const ChainSpec& chain, int origin_cell = 0);

/// Trapezoid time average of traj.cd over its window.
double time_averaged_cd(const Trajectory& traj);

inline double winding_estimate(const Trajectory& traj) { return 2.0 * time_averaged_cd(traj); }

}  // namespace magnon
