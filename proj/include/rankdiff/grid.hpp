#pragma once

#include <cstddef>
#include <vector>

namespace rankdiff {

/// CDF-valued function on a uniform spatial grid. Values live in [0,1] and
/// are nondecreasing; the domain must be wide enough that the boundary
/// values are pinned (values[0] <= 1e-6, values[last] >= 1 - 1e-6).
struct GridProfile {
  double x_min = 0.0;
  double h = 0.0;
  std::vector<double> values;
  double time = 0.0;

  std::size_t size() const { return values.size(); }
  double x_max() const { return x_min + h * static_cast<double>(values.size() - 1); }
  double x_at(std::size_t i) const { return x_min + h * static_cast<double>(i); }

  // Linear interpolation, clamped to 0 left of the domain and 1 right of it.
  double interpolate(double x) const;

  // Throws if the CDF invariants are violated.
  void validate() const;

  // Density by central differencing of the CDF (one-sided at the ends).
  std::vector<double> density() const;

  // Mean of the underlying measure: x_min plus the trapezoid integral of
  // (1-F) over the grid (exact up to the 1e-6 boundary tails).
  double mean() const;
};

// F0 = Phi((x - mu)/sd) sampled on [center - half_width, center + half_width].
GridProfile gaussian_profile(double mu, double sd, double x_lo, double x_hi, double h);

// Uniform[a,b] CDF on the given domain.
GridProfile uniform_profile(double a, double b, double x_lo, double x_hi, double h);

// Trapezoid value of integral (p - p_inf)^2 / p_inf dx on a shared grid.
// Throws if p_inf <= 0 at an interior node.
double chi_square_distance(const std::vector<double>& p, const std::vector<double>& p_inf,
                           double h);

}  // namespace rankdiff
