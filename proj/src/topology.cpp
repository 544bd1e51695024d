#include "magnon/topology.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "magnon/errors.hpp"

namespace magnon {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr int kMaxKPoints = 1 << 24;
constexpr double kQuadratureTolerance = 1e-12;

void require_open_gap(double j1, double j2) {
  if (j1 == j2) {
    throw GapClosureError("J1 == J2: the bulk gap closes at k = pi, winding undefined");
  }
}

double band_energy(double j1, double j2, double k) {
  return std::sqrt(j1 * j1 + j2 * j2 + 2.0 * j1 * j2 * std::cos(k));
}

struct Quadrature {
  double value;
  int points;
};

// Periodic trapezoid over [-pi, pi), doubling the grid (reusing previous
// nodes) until two successive estimates agree.
template <typename F>
Quadrature periodic_trapezoid(F&& f) {
  int m = kDefaultKPoints;
  double h = kTwoPi / m;
  double sum = 0.0;
  for (int i = 0; i < m; ++i) sum += f(-std::numbers::pi + i * h);
  double estimate = sum * h;
  while (m < kMaxKPoints) {
    double mid = 0.0;
    for (int i = 0; i < m; ++i) mid += f(-std::numbers::pi + (i + 0.5) * h);
    sum += mid;
    m *= 2;
    h /= 2.0;
    const double refined = sum * h;
    const bool converged = std::abs(refined - estimate) <= kQuadratureTolerance * std::max(1.0, std::abs(refined));
    estimate = refined;
    if (converged) break;
  }
  return {estimate / kTwoPi, m};
}

}  // namespace

BlochVector bloch_vector(double j1, double j2, double k) {
  BlochVector b;
  b.k = k;
  b.d_x = j1 + j2 * std::cos(k);
  b.d_y = j2 * std::sin(k);
  const double norm = std::hypot(b.d_x, b.d_y);
  // Rounding in sin(pi) leaves |d| at a few ulps of the coupling scale.
  if (norm <= 8.0 * std::numeric_limits<double>::epsilon() * (std::abs(j1) + std::abs(j2))) {
    throw GapClosureError("Bloch vector vanishes at k = " + std::to_string(k) + " (J1 = J2)");
  }
  b.n_x = b.d_x / norm;
  b.n_y = b.d_y / norm;
  return b;
}

double winding_density(double j1, double j2, double k) {
  const double c = std::cos(k);
  const double s = std::sin(k);
  const double dx = j1 + j2 * c;
  const double dy = j2 * s;
  const double ddx = -j2 * s;
  const double ddy = j2 * c;
  return (dx * ddy - dy * ddx) / (dx * dx + dy * dy);
}

WindingResult winding_number(double j1, double j2) {
  require_open_gap(j1, j2);
  const Quadrature q = periodic_trapezoid([&](double k) { return winding_density(j1, j2, k); });
  WindingResult r;
  r.raw_integral = q.value;
  r.nu = static_cast<int>(std::lround(q.value));
  r.residual = std::abs(q.value - r.nu);
  r.k_points = q.points;
  return r;
}

double winding_integral(double j1, double j2, int k_points) {
  require_open_gap(j1, j2);
  if (k_points < 1) throw ConfigurationError("winding_integral: need at least one k point");
  const double h = kTwoPi / k_points;
  double sum = 0.0;
  for (int i = 0; i < k_points; ++i) sum += winding_density(j1, j2, -std::numbers::pi + i * h);
  return sum * h / kTwoPi;
}

double analytic_cd(double j1, double j2, double t_us) {
  require_open_gap(j1, j2);
  // nu/2 - (1/4pi) int cos(2 * 2pi d_t t) w(k) dk; the nu term uses the same
  // quadrature so the t = 0 value cancels exactly.
  const double nu = periodic_trapezoid([&](double k) { return winding_density(j1, j2, k); }).value;
  const double oscillating = periodic_trapezoid([&](double k) {
                               return std::cos(2.0 * kTwoPi * band_energy(j1, j2, k) * t_us) *
                                      winding_density(j1, j2, k);
                             }).value;
  return 0.5 * nu - 0.5 * oscillating;
}

double winding_from_cd_average(double j1, double j2, double t_window_us) {
  require_open_gap(j1, j2);
  if (!(t_window_us > 0.0)) {
    throw ConfigurationError("winding_from_cd_average: window must be positive");
  }
  // Time integral of cos(4 pi d_t t) over [0, T] taken in closed form.
  const double nu = periodic_trapezoid([&](double k) { return winding_density(j1, j2, k); }).value;
  const double residue = periodic_trapezoid([&](double k) {
                           const double phase = 2.0 * kTwoPi * band_energy(j1, j2, k) * t_window_us;
                           return std::sin(phase) / phase * winding_density(j1, j2, k);
                         }).value;
  return nu - residue;
}

}  // namespace magnon
