#include "magnon/readout.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "magnon/errors.hpp"

namespace magnon {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// 53-bit uniform in [0, 1), fixed across standard library implementations.
double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

}  // namespace

Eigen::Matrix2d QubitReadoutError::confusion() const {
  Eigen::Matrix2d m;
  m << 1.0 - p_e_given_g, p_g_given_e,
       p_e_given_g, 1.0 - p_g_given_e;
  return m;
}

ReadoutCalibration::ReadoutCalibration(std::vector<QubitReadoutError> qubits) : qubits_(std::move(qubits)) {
  for (std::size_t q = 0; q < qubits_.size(); ++q) {
    const auto& e = qubits_[q];
    if (!(e.p_e_given_g >= 0.0 && e.p_e_given_g <= 1.0 && e.p_g_given_e >= 0.0 && e.p_g_given_e <= 1.0)) {
      throw CalibrationError("qubit " + std::to_string(q + 1) + ": assignment probabilities must lie in [0, 1]");
    }
  }
}

ReadoutCalibration ReadoutCalibration::uniform(int n_qubits, double p_e_given_g, double p_g_given_e) {
  return ReadoutCalibration(
      std::vector<QubitReadoutError>(static_cast<std::size_t>(n_qubits), {p_e_given_g, p_g_given_e}));
}

std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t time_index, std::uint64_t qubit) {
  return splitmix64(splitmix64(splitmix64(seed) ^ time_index) ^ qubit);
}

ShotRecord sample_shots(const Eigen::MatrixXd& true_probabilities, int shots, const ReadoutCalibration& cal,
                        std::uint64_t seed) {
  if (shots <= 0) throw InputError("shot count must be positive");
  if (true_probabilities.cols() != cal.n_qubits()) {
    throw InputError("calibration covers " + std::to_string(cal.n_qubits()) + " qubits, data has " +
                     std::to_string(true_probabilities.cols()));
  }
  if ((true_probabilities.array() < 0.0).any() || (true_probabilities.array() > 1.0).any()) {
    throw InputError("true excited-state probabilities must lie in [0, 1]");
  }
  ShotRecord rec;
  rec.shots = shots;
  rec.seed = seed;
  rec.counts.resize(true_probabilities.rows(), true_probabilities.cols());
  for (Eigen::Index t = 0; t < true_probabilities.rows(); ++t) {
    for (Eigen::Index q = 0; q < true_probabilities.cols(); ++q) {
      const auto& err = cal.qubit(static_cast<int>(q));
      const double p = true_probabilities(t, q);
      const double p_read_e = p * (1.0 - err.p_g_given_e) + (1.0 - p) * err.p_e_given_g;
      std::mt19937_64 rng(stream_seed(seed, static_cast<std::uint64_t>(t), static_cast<std::uint64_t>(q)));
      int count = 0;
      for (int s = 0; s < shots; ++s) count += uniform01(rng) < p_read_e ? 1 : 0;
      rec.counts(t, q) = count;
    }
  }
  return rec;
}

CorrectedProbabilities bayes_correct(const ShotRecord& record, const ReadoutCalibration& cal) {
  if (record.shots <= 0) throw InputError("shot record has no shots");
  if (record.counts.cols() != cal.n_qubits()) {
    throw InputError("calibration and shot record disagree on the qubit count");
  }
  const Eigen::Index rows = record.counts.rows();
  const Eigen::Index cols = record.counts.cols();
  CorrectedProbabilities out;
  out.probabilities.resize(rows, cols);
  out.unclamped.resize(rows, cols);
  out.clamped.resize(rows, cols);

  const Eigen::MatrixXd freq = record.frequencies();
  for (Eigen::Index q = 0; q < cols; ++q) {
    const Eigen::Matrix2d m = cal.confusion(static_cast<int>(q));
    if (std::abs(m.determinant()) < 1e-12) {
      throw CalibrationError("qubit " + std::to_string(q + 1) + ": confusion matrix is singular");
    }
    const Eigen::Matrix2d inv = m.inverse();
    for (Eigen::Index t = 0; t < rows; ++t) {
      const Eigen::Vector2d observed(1.0 - freq(t, q), freq(t, q));
      const double p = (inv * observed)(1);
      out.unclamped(t, q) = p;
      out.clamped(t, q) = p < 0.0 || p > 1.0;
      out.probabilities(t, q) = std::clamp(p, 0.0, 1.0);
    }
  }
  return out;
}

}  // namespace magnon
