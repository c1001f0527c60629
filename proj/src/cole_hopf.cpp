#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "rankdiff/pde.hpp"

namespace rankdiff {
namespace {

// Cumulative integral of the initial CDF, extended linearly outside the grid
// (F ~ 0 on the left, F ~ 1 on the right). Exact for piecewise-linear F.
class CdfIntegral {
 public:
  explicit CdfIntegral(const GridProfile& f0) : f_(&f0) {
    cum_.resize(f0.size(), 0.0);
    for (std::size_t i = 1; i < f0.size(); ++i)
      cum_[i] = cum_[i - 1] + 0.5 * (f0.values[i] + f0.values[i - 1]) * f0.h;
  }

  double operator()(double y) const {
    const GridProfile& f = *f_;
    if (y <= f.x_min) return f.values.front() * (y - f.x_min);
    if (y >= f.x_max()) return cum_.back() + (y - f.x_max());
    const double s = (y - f.x_min) / f.h;
    const auto i = static_cast<std::size_t>(s);
    const double d = y - f.x_at(i);
    const double slope = (f.values[i + 1] - f.values[i]) / f.h;
    return cum_[i] + f.values[i] * d + 0.5 * slope * d * d;
  }

 private:
  const GridProfile* f_;
  std::vector<double> cum_;
};

struct Quotients {
  double cdf = 0.0;
  double density = 0.0;
};

// Gaussian-convolution quotient, computed with a log-space max shift so the
// exp((1/sigma^2) int F0) weight never overflows.
Quotients cole_hopf_quotients(const GridProfile& f0, double sigma, double t, double x,
                              const CdfIntegral& integral) {
  const double s2 = sigma * sigma;
  const double c = x - 0.5 * t;
  const double spread = 12.0 * sigma * std::sqrt(t) + 1.0;
  const double lo = c - spread;
  const double hi = c + t + spread;

  const auto log_weight = [&](double y) {
    const double d = y - c;
    return -d * d / (2.0 * s2 * t) + integral(y) / s2;
  };

  double prev_cdf = -1.0, prev_density = 0.0, last_delta = 1.0;
  for (int n = 2048; n <= (1 << 20); n *= 2) {
    const double step = (hi - lo) / n;
    double m = -1e300;
    // Two passes: locate the max of the log weight, then accumulate.
    for (int i = 0; i <= n; ++i) m = std::max(m, log_weight(lo + step * i));
    double den = 0.0, num = 0.0, num_d = 0.0;
    for (int i = 0; i <= n; ++i) {
      const double y = lo + step * i;
      const double w = (i == 0 || i == n) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
      const double g = w * std::exp(log_weight(y) - m);
      const double f0y = f0.interpolate(y);
      den += g;
      num += g * f0y;
      num_d += g * f0y * (y + 0.5 * t - x) / (s2 * t);
    }
    const double cdf = num / den;
    const double density = num_d / den - cdf * cdf / s2;
    last_delta = std::abs(cdf - prev_cdf);
    if (prev_cdf >= 0.0 && last_delta < 1e-11 && std::abs(density - prev_density) < 1e-11) {
      Quotients q;
      q.cdf = std::clamp(cdf, 0.0, 1.0);
      q.density = density;
      return q;
    }
    prev_cdf = cdf;
    prev_density = density;
  }
  throw std::runtime_error("cole_hopf: quadrature failed to converge, last cdf delta = " +
                           std::to_string(last_delta));
}

}  // namespace

double cole_hopf_cdf(const GridProfile& f0, double sigma, double t, double x) {
  if (t <= 0.0 || sigma <= 0.0) throw std::invalid_argument("cole_hopf_cdf: t > 0, sigma > 0");
  const CdfIntegral integral(f0);
  return cole_hopf_quotients(f0, sigma, t, x, integral).cdf;
}

double cole_hopf_density(const GridProfile& f0, double sigma, double t, double x) {
  if (t <= 0.0 || sigma <= 0.0) throw std::invalid_argument("cole_hopf_density: t > 0, sigma > 0");
  const CdfIntegral integral(f0);
  return cole_hopf_quotients(f0, sigma, t, x, integral).density;
}

GridProfile cole_hopf_profile(const GridProfile& f0, double sigma, double t, double x_lo,
                              double x_hi, double h) {
  const CdfIntegral integral(f0);
  GridProfile g;
  g.x_min = x_lo;
  g.h = h;
  g.time = f0.time + t;
  const auto n = static_cast<std::size_t>(std::round((x_hi - x_lo) / h)) + 1;
  g.values.resize(n);
#pragma omp parallel for schedule(dynamic, 16)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i)
    g.values[i] = cole_hopf_quotients(f0, sigma, t, g.x_at(i), integral).cdf;
  return g;
}

ColeHopfSolution cole_hopf_solve(const GridProfile& f0, double sigma, double t, double x_lo,
                                 double x_hi, double h) {
  const CdfIntegral integral(f0);
  ColeHopfSolution sol;
  sol.cdf.x_min = x_lo;
  sol.cdf.h = h;
  sol.cdf.time = f0.time + t;
  const auto n = static_cast<std::size_t>(std::round((x_hi - x_lo) / h)) + 1;
  sol.cdf.values.resize(n);
  sol.density.resize(n);
#pragma omp parallel for schedule(dynamic, 16)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) {
    const Quotients q = cole_hopf_quotients(f0, sigma, t, sol.cdf.x_at(i), integral);
    sol.cdf.values[i] = q.cdf;
    sol.density[i] = q.density;
  }
  return sol;
}

}  // namespace rankdiff
