#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "rankdiff/flux.hpp"
#include "rankdiff/grid.hpp"

namespace rankdiff {

enum class ClosedForm { BurgersLogistic, CubicForm };

/// Stationary CDF/density pair (F_inf, p_inf), translated so the mean of the
/// density equals x_bar. density[i] = -(2/sigma^2) A(cdf[i]) by construction.
struct StationaryProfile {
  GridProfile cdf;
  std::vector<double> density;
  double x_bar = 0.0;
  std::optional<ClosedForm> closed_form;
  bool spectral_gap_guarantee = true;  // false when A'(0) = 0 or A'(1) = 0
};

// Integrates phi' = -(2/sigma^2) A(phi) from phi(0) = 1/2 by RK4 in both
// directions until the 1e-10 tails, then translates so the profile mean is
// x_bar. Throws, naming the violated clause, when A fails the existence
// condition (A(1) = 0 and A < 0 on (0,1)).
StationaryProfile solve_stationary_ode(const FluxFunction& flux, double sigma, double x_bar,
                                       double step = -1.0);

// Closed forms for the built-in fluxes (anchored at mean x_bar).
double burgers_logistic_cdf(double x, double sigma, double x_bar);
double burgers_logistic_density(double x, double sigma, double x_bar);
double cubic_closed_form_cdf(double x, double sigma);      // 1/sqrt(1+e^{-4x/sigma^2})
double cubic_closed_form_density(double x, double sigma);

/// Exact sampler for the invariant law of the reordered projected system:
/// gaps between consecutive ordered particles are independent exponentials
/// with rates 2 beta_n(i)/sigma^2, beta_n(i) = -n A((i-1)/n).
struct InvariantSampler {
  int n = 0;
  double x_bar = 0.0;
  std::vector<double> beta;  // beta[i-2] = beta_n(i), i = 2..n
};

InvariantSampler make_invariant_sampler(const FluxFunction& flux, int n, double x_bar);

// One draw: a nondecreasing vector of n reals summing to n*x_bar, distributed
// as the reordered invariant density. Deterministic in (seed, draw_index).
std::vector<double> sample_invariant_reordered(const InvariantSampler& sampler, double sigma,
                                               std::uint64_t seed, std::uint64_t draw_index = 0);

}  // namespace rankdiff
