#pragma once

#include <Eigen/Dense>
#include <complex>
#include <type_traits>
#include <vector>

#include "magnon/errors.hpp"

namespace magnon {

using Complex = std::complex<double>;

template <typename Scalar>
using DenseMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using DenseVector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// Hopping matrix of the single-excitation sector, MHz. Complex so that
/// drive-engineered bond phases survive.
using SingleExcitationHamiltonian = DenseMatrix<Complex>;

enum class Sublattice { A, B };
enum class Side { Left, Right };

/// Open chain of qubits a1 b1 a2 b2 ... Sites are 1-based; cell x holds
/// sites 2x-1 (a) and 2x (b).
class ChainSpec {
 public:
  explicit ChainSpec(int n_qubits);

  int n_qubits() const noexcept { return n_qubits_; }
  int n_cells() const noexcept { return (n_qubits_ + 1) / 2; }

  static Sublattice sublattice(int site) noexcept {
    return site % 2 == 1 ? Sublattice::A : Sublattice::B;
  }
  static int cell_of(int site) noexcept { return (site + 1) / 2; }

 private:
  int n_qubits_;
};

/// Nearest-neighbour couplings in MHz (linear frequency). Bond i joins
/// sites i and i+1. Phases, when present, sit on the upper diagonal.
struct BondPattern {
  std::vector<double> couplings_mhz;
  std::vector<double> phases_rad;

  BondPattern() = default;
  explicit BondPattern(std::vector<double> couplings, std::vector<double> phases = {});

  /// J1 J2 J1 J2 ... with n_qubits - 1 entries.
  static BondPattern dimerized(double j1, double j2, int n_qubits);

  std::size_t size() const noexcept { return couplings_mhz.size(); }
  bool has_phases() const noexcept;
  Complex bond(std::size_t i) const;
};

template <typename Scalar = Complex>
DenseMatrix<Scalar> build_hamiltonian(const ChainSpec& chain, const BondPattern& bonds) {
  const int n = chain.n_qubits();
  if (bonds.size() != static_cast<std::size_t>(n - 1)) {
    throw ConfigurationError("bond pattern has " + std::to_string(bonds.size()) +
                             " entries, chain of " + std::to_string(n) + " qubits needs " +
                             std::to_string(n - 1));
  }
  DenseMatrix<Scalar> h = DenseMatrix<Scalar>::Zero(n, n);
  for (int i = 0; i + 1 < n; ++i) {
    const Complex b = bonds.bond(static_cast<std::size_t>(i));
    if constexpr (std::is_same_v<Scalar, Complex>) {
      h(i, i + 1) = b;
      h(i + 1, i) = std::conj(b);
    } else {
      if (b.imag() != 0.0) {
        throw ConfigurationError("complex bond phases require a complex Hamiltonian");
      }
      h(i, i + 1) = static_cast<Scalar>(b.real());
      h(i + 1, i) = static_cast<Scalar>(b.real());
    }
  }
  return h;
}

inline SingleExcitationHamiltonian build_hamiltonian(int n_qubits, const BondPattern& bonds) {
  return build_hamiltonian<Complex>(ChainSpec(n_qubits), bonds);
}

/// Normalized single-excitation amplitudes over sites.
struct StateProfile {
  DenseVector<Complex> amplitudes;

  StateProfile() = default;
  explicit StateProfile(DenseVector<Complex> amps) : amplitudes(std::move(amps)) {}

  /// Normalizes in place of an unnormalized amplitude vector.
  static StateProfile normalized(DenseVector<Complex> amps);

  Eigen::Index size() const noexcept { return amplitudes.size(); }
  double density(int site) const { return std::norm(amplitudes(site - 1)); }
  Eigen::VectorXd densities() const { return amplitudes.cwiseAbs2(); }
};

struct Eigenmode {
  double energy_mhz;
  StateProfile profile;
};

/// Dense Hermitian eigensolve, ascending energies.
template <typename Derived>
std::vector<Eigenmode> spectrum(const Eigen::MatrixBase<Derived>& h) {
  using Plain = typename Derived::PlainObject;
  Eigen::SelfAdjointEigenSolver<Plain> solver(h.derived());
  std::vector<Eigenmode> modes;
  modes.reserve(static_cast<std::size_t>(h.rows()));
  for (Eigen::Index k = 0; k < h.rows(); ++k) {
    DenseVector<Complex> v = solver.eigenvectors().col(k).template cast<Complex>();
    modes.push_back({solver.eigenvalues()(k), StateProfile(std::move(v))});
  }
  return modes;
}

/// Chiral operator diag(+1 on a-sites, -1 on b-sites).
Eigen::VectorXd chiral_signs(int n_qubits);

/// Half the bulk gap, |J2 - J1| / 2.
double in_gap_window(double j1, double j2);

std::vector<Eigenmode> in_gap_modes(const std::vector<Eigenmode>& modes, double window_mhz);

/// Eigenmode closest to zero energy; near-ties go to the mode with more
/// weight on the two terminal sites.
const Eigenmode& zero_mode(const std::vector<Eigenmode>& modes);

/// Left edge: (-J1/J2)^(x-1) on a_x. Right edge: (-J1/J2)^(N-x) on b_x.
/// Profile spans 2 * n_cells sites.
StateProfile analytic_edge_state(double j1, double j2, int n_cells, Side side);

/// Zero mode pinned at a_{x_e}: (-J1/J2)^|x - x_e| on a-sites. The chain ends
/// on a-sites at both sides, so the profile spans 2 * n_cells - 1 sites.
StateProfile analytic_defect_state(double j1, double j2, int n_cells, int x_e);

/// Smallest singular value of the lower-bidiagonal matrix with the given
/// diagonal and subdiagonal, computed to high relative accuracy.
double bidiagonal_min_singular_value(const Eigen::VectorXd& diagonal,
                                     const Eigen::VectorXd& subdiagonal);

/// Splitting of the two in-gap modes of an even chain, 2 * sigma_min of the
/// a-to-b coupling block. Resolves gaps far below double-precision eigensolver
/// noise.
double edge_mode_splitting(const BondPattern& bonds);

struct HybridizationReport {
  double t_e_mhz = 0.0;
  double numeric_gap_mhz = 0.0;
  std::vector<Eigenmode> in_gap;
  bool hybridized = false;
};

HybridizationReport hybridization(double j1, double j2, int n_cells);

/// Calibrated so that J1 = 1, J2 = 5 MHz yields 86 qubits.
inline constexpr double kCriticalGapThresholdMhz = 2e-29;

/// Smallest even qubit count whose edge splitting drops below the threshold.
int critical_chain_length(double j1, double j2,
                          double gap_threshold_mhz = kCriticalGapThresholdMhz,
                          int max_qubits = 20000);

}  // namespace magnon
