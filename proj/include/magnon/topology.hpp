#pragma once

namespace magnon {

/// h(k) = d_x tau_x + d_y tau_y for the two-site unit cell, MHz.
struct BlochVector {
  double k = 0.0;
  double d_x = 0.0;
  double d_y = 0.0;
  double n_x = 0.0;
  double n_y = 0.0;
};

BlochVector bloch_vector(double j1, double j2, double k);

/// n x dn/dk, evaluated from the analytic derivative of d(k).
double winding_density(double j1, double j2, double k);

struct WindingResult {
  int nu = 0;
  double raw_integral = 0.0;
  double residual = 0.0;
  int k_points = 0;
};

/// Default periodic trapezoid resolution; doubled until converged.
inline constexpr int kDefaultKPoints = 4096;

WindingResult winding_number(double j1, double j2);

/// (1/2pi) integral of the winding density on a fixed uniform k grid.
double winding_integral(double j1, double j2, int k_points);

/// Momentum-space chiral displacement of a bulk excitation at time t (us).
double analytic_cd(double j1, double j2, double t_us);

/// (2/T) * integral_0^T analytic_cd dt. Tends to the winding number as T grows.
double winding_from_cd_average(double j1, double j2, double t_window_us);

}  // namespace magnon
