#include "rankdiff/stationary.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "rankdiff/rng.hpp"

namespace rankdiff {
namespace {

double rk4_step(const FluxFunction& flux, double sigma, double phi, double ds) {
  const double c = -2.0 / (sigma * sigma);
  const auto rhs = [&](double p) { return c * flux.a(p); };
  const double k1 = rhs(phi);
  const double k2 = rhs(phi + 0.5 * ds * k1);
  const double k3 = rhs(phi + 0.5 * ds * k2);
  const double k4 = rhs(phi + ds * k3);
  return phi + ds / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

constexpr double kTail = 1e-10;
constexpr long kMaxNodes = 50'000'000;

}  // namespace

StationaryProfile solve_stationary_ode(const FluxFunction& flux, double sigma, double x_bar,
                                       double step) {
  if (sigma <= 0.0) throw std::invalid_argument("solve_stationary_ode: sigma > 0");
  if (std::abs(flux.a(1.0)) > 1e-12)
    throw std::invalid_argument("solve_stationary_ode: existence condition violated, A(1) != 0");
  for (int i = 1; i < 1000; ++i) {
    const double u = i / 1000.0;
    if (flux.a(u) >= 0.0)
      throw std::invalid_argument(
          "solve_stationary_ode: existence condition violated, A(u) >= 0 at u = " +
          std::to_string(u));
  }

  const double ds = step > 0.0 ? step : 1e-3 * sigma * sigma;

  std::vector<double> right{0.5};
  for (double phi = 0.5; phi < 1.0 - kTail;) {
    phi = rk4_step(flux, sigma, phi, ds);
    right.push_back(std::min(phi, 1.0));
    if (static_cast<long>(right.size()) > kMaxNodes)
      throw std::runtime_error("solve_stationary_ode: right tail did not close");
  }
  std::vector<double> left;
  for (double phi = 0.5; phi > kTail;) {
    phi = rk4_step(flux, sigma, phi, -ds);
    left.push_back(std::max(phi, 0.0));
    if (static_cast<long>(left.size()) > kMaxNodes)
      throw std::runtime_error("solve_stationary_ode: left tail did not close");
  }

  StationaryProfile prof;
  prof.cdf.h = ds;
  prof.cdf.values.reserve(left.size() + right.size());
  prof.cdf.values.assign(left.rbegin(), left.rend());
  prof.cdf.values.insert(prof.cdf.values.end(), right.begin(), right.end());
  prof.cdf.x_min = -ds * static_cast<double>(left.size());

  // Mean via E(X) = x_min + integral of (1 - F); then translate (the mean is
  // affine in the shift, so one pass is exact).
  double tail_mass = 0.0;
  for (std::size_t i = 0; i < prof.cdf.size(); ++i) {
    const double w = (i == 0 || i + 1 == prof.cdf.size()) ? 0.5 : 1.0;
    tail_mass += w * (1.0 - prof.cdf.values[i]);
  }
  const double m0 = prof.cdf.x_min + tail_mass * ds;
  prof.cdf.x_min += x_bar - m0;
  prof.x_bar = x_bar;

  prof.density.resize(prof.cdf.size());
  const double c = -2.0 / (sigma * sigma);
  for (std::size_t i = 0; i < prof.cdf.size(); ++i)
    prof.density[i] = c * flux.a(prof.cdf.values[i]);

  if (flux.kind() == FluxKind::Burgers) prof.closed_form = ClosedForm::BurgersLogistic;
  if (flux.kind() == FluxKind::Cubic) prof.closed_form = ClosedForm::CubicForm;
  prof.spectral_gap_guarantee = flux.a_prime(0.0) < -1e-12 && flux.a_prime(1.0) > 1e-12;
  prof.cdf.validate();
  return prof;
}

double burgers_logistic_cdf(double x, double sigma, double x_bar) {
  return 1.0 / (1.0 + std::exp(-(x - x_bar) / (sigma * sigma)));
}

double burgers_logistic_density(double x, double sigma, double x_bar) {
  const double s2 = sigma * sigma;
  const double ch = std::cosh((x - x_bar) / (2.0 * s2));
  return 1.0 / (4.0 * s2 * ch * ch);
}

double cubic_closed_form_cdf(double x, double sigma) {
  return 1.0 / std::sqrt(1.0 + std::exp(-4.0 * x / (sigma * sigma)));
}

double cubic_closed_form_density(double x, double sigma) {
  const double s2 = sigma * sigma;
  const double e = std::exp(-4.0 * x / s2);
  return 2.0 * e / (s2 * std::pow(1.0 + e, 1.5));
}

InvariantSampler make_invariant_sampler(const FluxFunction& flux, int n, double x_bar) {
  if (n < 2) throw std::invalid_argument("make_invariant_sampler: n >= 2");
  InvariantSampler s;
  s.n = n;
  s.x_bar = x_bar;
  s.beta.resize(static_cast<std::size_t>(n) - 1);
  for (int i = 2; i <= n; ++i) {
    const double b = -n * flux.a(static_cast<double>(i - 1) / n);
    if (b <= 0.0)
      throw std::invalid_argument("make_invariant_sampler: beta_n(" + std::to_string(i) +
                                  ") <= 0, flux not admissible");
    s.beta[static_cast<std::size_t>(i) - 2] = b;
  }
  return s;
}

std::vector<double> sample_invariant_reordered(const InvariantSampler& sampler, double sigma,
                                               std::uint64_t seed, std::uint64_t draw_index) {
  const int n = sampler.n;
  const std::uint64_t key = rng::stream_key(seed, draw_index);
  std::vector<double> x(static_cast<std::size_t>(n));
  x[0] = 0.0;
  for (int i = 2; i <= n; ++i) {
    const double rate = 2.0 * sampler.beta[static_cast<std::size_t>(i) - 2] / (sigma * sigma);
    x[static_cast<std::size_t>(i) - 1] =
        x[static_cast<std::size_t>(i) - 2] +
        rng::exponential(key, static_cast<std::uint64_t>(i), rate);
  }
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= n;
  for (double& v : x) v += sampler.x_bar - mean;
  return x;
}

}  // namespace rankdiff
