#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

namespace magnon {

/// Assignment errors of one qubit's single-shot readout.
struct QubitReadoutError {
  double p_e_given_g = 0.0;  ///< read e while in g
  double p_g_given_e = 0.0;  ///< read g while in e

  /// Columns are the true state (g, e), rows the outcome (g, e).
  Eigen::Matrix2d confusion() const;
};

inline constexpr double kDefaultAssignmentError = 0.05;

class ReadoutCalibration {
 public:
  explicit ReadoutCalibration(std::vector<QubitReadoutError> qubits);

  static ReadoutCalibration uniform(int n_qubits, double p_e_given_g = kDefaultAssignmentError,
                                    double p_g_given_e = kDefaultAssignmentError);
  static ReadoutCalibration perfect(int n_qubits) { return uniform(n_qubits, 0.0, 0.0); }

  int n_qubits() const noexcept { return static_cast<int>(qubits_.size()); }
  const QubitReadoutError& qubit(int q) const { return qubits_.at(static_cast<std::size_t>(q)); }
  Eigen::Matrix2d confusion(int q) const { return qubit(q).confusion(); }

 private:
  std::vector<QubitReadoutError> qubits_;
};

/// Excited-outcome counts; counts(t, q) out of `shots` for time point t.
struct ShotRecord {
  int shots = 0;
  std::uint64_t seed = 0;
  Eigen::MatrixXi counts;

  Eigen::MatrixXd frequencies() const { return counts.cast<double>() / static_cast<double>(shots); }
};

/// Independent stream seed for (time point, qubit), derived from the master seed.
std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t time_index, std::uint64_t qubit);

/// Draws `shots` Bernoulli outcomes per entry of `true_probabilities`
/// (rows: time points, columns: qubits) through the readout channel.
ShotRecord sample_shots(const Eigen::MatrixXd& true_probabilities, int shots, const ReadoutCalibration& cal,
                        std::uint64_t seed);

struct CorrectedProbabilities {
  /// Clamped to [0, 1].
  Eigen::MatrixXd probabilities;
  /// Before clamping.
  Eigen::MatrixXd unclamped;
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> clamped;

  bool any_clamped() const { return clamped.any(); }
};

/// Applies each qubit's inverse confusion matrix to its empirical
/// (g, e) frequency vector.
CorrectedProbabilities bayes_correct(const ShotRecord& record, const ReadoutCalibration& cal);

}  // namespace magnon
