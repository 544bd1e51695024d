#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "magnon/errors.hpp"
#include "magnon/readout.hpp"

using namespace magnon;

namespace {

Eigen::MatrixXd row(std::initializer_list<double> v) {
  Eigen::MatrixXd m(1, static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) m(0, i++) = x;
  return m;
}

// Standard error of the corrected estimate for true P, readout errors (a, b) and N shots.
double corrected_sigma(double p, double a, double b, int n) {
  const double q = p * (1.0 - b) + (1.0 - p) * a;
  return std::sqrt(q * (1.0 - q) / n) / (1.0 - a - b);
}

}  // namespace

TEST(Calibration, ConfusionColumnsSumToOne) {
  const QubitReadoutError e{0.03, 0.08};
  const Eigen::Matrix2d m = e.confusion();
  EXPECT_DOUBLE_EQ(m(0, 0) + m(1, 0), 1.0);
  EXPECT_DOUBLE_EQ(m(0, 1) + m(1, 1), 1.0);
  EXPECT_DOUBLE_EQ(m(1, 0), 0.03);
  EXPECT_DOUBLE_EQ(m(0, 1), 0.08);
}

TEST(Calibration, Defaults) {
  const auto cal = ReadoutCalibration::uniform(3);
  ASSERT_EQ(cal.n_qubits(), 3);
  EXPECT_EQ(cal.qubit(2).p_e_given_g, 0.05);
  EXPECT_EQ(cal.qubit(2).p_g_given_e, 0.05);
}

TEST(Calibration, RejectsOutOfRange) {
  EXPECT_THROW(ReadoutCalibration({{-0.1, 0.0}}), CalibrationError);
  EXPECT_THROW(ReadoutCalibration({{0.0, 1.5}}), CalibrationError);
  EXPECT_THROW(ReadoutCalibration({{std::nan(""), 0.0}}), CalibrationError);
}

TEST(SampleShots, PerfectCalibrationDeterministicOutcomes) {
  const auto rec = sample_shots(row({1.0, 0.0}), 5000, ReadoutCalibration::perfect(2), 11);
  EXPECT_EQ(rec.counts(0, 0), 5000);
  EXPECT_EQ(rec.counts(0, 1), 0);
}

TEST(SampleShots, FalsePositiveRate) {
  const int n = 1'000'000;
  const auto rec = sample_shots(row({0.0}), n, ReadoutCalibration::uniform(1, 0.05, 0.05), 3);
  const double f = rec.counts(0, 0) / static_cast<double>(n);
  EXPECT_NEAR(f, 0.05, 3.0 * std::sqrt(0.05 * 0.95 / n));
}

TEST(SampleShots, SeedDeterminismAndSensitivity) {
  Eigen::MatrixXd p(4, 3);
  p << 0.1, 0.5, 0.9, 0.2, 0.3, 0.4, 0.7, 0.6, 0.0, 1.0, 0.25, 0.75;
  const auto cal = ReadoutCalibration::uniform(3);
  const auto a = sample_shots(p, 777, cal, 2024);
  const auto b = sample_shots(p, 777, cal, 2024);
  const auto c = sample_shots(p, 777, cal, 2025);
  EXPECT_EQ(a.counts, b.counts);
  EXPECT_NE(a.counts, c.counts);
  EXPECT_TRUE((a.counts.array() >= 0).all() && (a.counts.array() <= 777).all());
}

TEST(SampleShots, StreamsAreDistinct) {
  std::set<std::uint64_t> seeds;
  for (std::uint64_t t = 0; t < 50; ++t)
    for (std::uint64_t q = 0; q < 10; ++q) seeds.insert(stream_seed(9, t, q));
  EXPECT_EQ(seeds.size(), 500u);
  EXPECT_NE(stream_seed(9, 1, 0), stream_seed(9, 0, 1));
}

TEST(SampleShots, Errors) {
  const auto cal = ReadoutCalibration::uniform(1);
  EXPECT_THROW(sample_shots(row({0.5}), 0, cal, 1), InputError);
  EXPECT_THROW(sample_shots(row({1.2}), 10, cal, 1), InputError);
  EXPECT_THROW(sample_shots(row({-0.01}), 10, cal, 1), InputError);
  EXPECT_THROW(sample_shots(row({0.5, 0.5}), 10, cal, 1), InputError);
}

TEST(BayesCorrect, IdentityCalibrationReturnsFrequencies) {
  ShotRecord rec;
  rec.shots = 8;
  rec.counts.resize(2, 2);
  rec.counts << 0, 3, 8, 5;
  const auto out = bayes_correct(rec, ReadoutCalibration::perfect(2));
  EXPECT_EQ(out.probabilities(0, 1), 3.0 / 8.0);
  EXPECT_EQ(out.probabilities(1, 0), 1.0);
  EXPECT_EQ(out.probabilities(1, 1), 5.0 / 8.0);
  EXPECT_FALSE(out.any_clamped());
}

TEST(BayesCorrect, HandWorkedInversion) {
  // observed e fraction f, errors (a, b): p = (f - a) / (1 - a - b)
  ShotRecord rec;
  rec.shots = 1000;
  rec.counts.resize(1, 1);
  rec.counts << 400;
  const auto out = bayes_correct(rec, ReadoutCalibration({{0.04, 0.10}}));
  EXPECT_NEAR(out.probabilities(0, 0), (0.4 - 0.04) / (1.0 - 0.14), 1e-14);
}

TEST(BayesCorrect, ClampsBelowFalsePositiveRateWithFlag) {
  ShotRecord rec;
  rec.shots = 1000;
  rec.counts.resize(1, 2);
  rec.counts << 30, 990;
  const auto out = bayes_correct(rec, ReadoutCalibration::uniform(2));
  EXPECT_EQ(out.probabilities(0, 0), 0.0);
  EXPECT_LT(out.unclamped(0, 0), 0.0);
  EXPECT_TRUE(out.clamped(0, 0));
  EXPECT_EQ(out.probabilities(0, 1), 1.0);
  EXPECT_GT(out.unclamped(0, 1), 1.0);
  EXPECT_TRUE(out.clamped(0, 1));
  EXPECT_TRUE(out.any_clamped());
}

TEST(BayesCorrect, SingularCalibration) {
  ShotRecord rec;
  rec.shots = 10;
  rec.counts = Eigen::MatrixXi::Constant(1, 1, 5);
  EXPECT_THROW(bayes_correct(rec, ReadoutCalibration({{0.5, 0.5}})), CalibrationError);
  EXPECT_THROW(bayes_correct(rec, ReadoutCalibration::uniform(2)), InputError);
}

TEST(BayesCorrect, RoundTripUnbiasedAtMillionShots) {
  const int n = 1'000'000;
  const Eigen::MatrixXd p = row({0.0, 0.12, 0.5, 0.83, 1.0});
  const ReadoutCalibration cal({{0.05, 0.05}, {0.02, 0.09}, {0.05, 0.05}, {0.11, 0.03}, {0.05, 0.05}});
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const auto out = bayes_correct(sample_shots(p, n, cal, seed), cal);
    for (Eigen::Index q = 0; q < p.cols(); ++q) {
      const auto& e = cal.qubit(static_cast<int>(q));
      const double sigma = corrected_sigma(p(0, q), e.p_e_given_g, e.p_g_given_e, n);
      EXPECT_NEAR(out.unclamped(0, q), p(0, q), 3.0 * sigma) << "seed " << seed << " qubit " << q;
    }
  }
}

TEST(BayesCorrect, MeanOverSeedsIsUnbiased) {
  // Averaging 40 independent 10^4-shot runs shrinks the error bar by sqrt(40).
  const int n = 10'000;
  const int runs = 40;
  const double p = 0.3;
  const auto cal = ReadoutCalibration::uniform(1);
  double sum = 0.0;
  for (int r = 0; r < runs; ++r) sum += bayes_correct(sample_shots(row({p}), n, cal, 100 + r), cal).unclamped(0, 0);
  EXPECT_NEAR(sum / runs, p, 3.0 * corrected_sigma(p, 0.05, 0.05, n) / std::sqrt(runs));
}
