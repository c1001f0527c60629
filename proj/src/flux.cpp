#include "rankdiff/flux.hpp"

#include <cmath>
#include <stdexcept>

namespace rankdiff {
namespace {

std::vector<double> differentiate(const std::vector<double>& c) {
  std::vector<double> d;
  for (std::size_t k = 1; k < c.size(); ++k) d.push_back(static_cast<double>(k) * c[k]);
  if (d.empty()) d.push_back(0.0);
  return d;
}

double horner(const std::vector<double>& c, double x) {
  double v = 0.0;
  for (std::size_t k = c.size(); k-- > 0;) v = v * x + c[k];
  return v;
}

}  // namespace

FluxFunction::FluxFunction(FluxKind kind, std::vector<double> coeffs)
    : kind_(kind), coeffs_(std::move(coeffs)) {
  if (coeffs_.empty()) coeffs_.push_back(0.0);
  if (coeffs_[0] != 0.0)
    throw std::invalid_argument("flux: A(0) must be 0 (constant coefficient nonzero)");
  d1_ = differentiate(coeffs_);
  d2_ = differentiate(d1_);
  // K = sup |A''| and alpha = inf A'' on a fine grid; exact for the
  // built-in quadratic/cubic cases.
  const int kGrid = 10001;
  double sup = 0.0, inf = horner(d2_, 0.0);
  for (int i = 0; i < kGrid; ++i) {
    const double u = static_cast<double>(i) / (kGrid - 1);
    const double s = horner(d2_, u);
    sup = std::max(sup, std::abs(s));
    inf = std::min(inf, s);
  }
  lipschitz_k_ = sup;
  convex_ = inf >= -1e-12;
  alpha_ = inf > 1e-12 ? inf : 0.0;
}

double FluxFunction::a(double u) const { return horner(coeffs_, u); }
double FluxFunction::a_prime(double u) const { return horner(d1_, u); }
double FluxFunction::a_second(double u) const { return horner(d2_, u); }

FluxFunction FluxFunction::burgers() {
  return FluxFunction(FluxKind::Burgers, {0.0, -0.5, 0.5});
}

FluxFunction FluxFunction::cubic() {
  return FluxFunction(FluxKind::Cubic, {0.0, -1.0, 0.0, 1.0});
}

FluxFunction FluxFunction::polynomial(std::vector<double> coeffs) {
  return FluxFunction(FluxKind::Polynomial, std::move(coeffs));
}

FluxFunction make_builtin_flux(FluxKind kind) {
  switch (kind) {
    case FluxKind::Burgers:
      return FluxFunction::burgers();
    case FluxKind::Cubic:
      return FluxFunction::cubic();
    default:
      throw std::invalid_argument("make_builtin_flux: kind must be Burgers or Cubic");
  }
}

HypothesisReport check_hypothesis_h(const FluxFunction& flux, int grid_points) {
  if (grid_points < 3) throw std::invalid_argument("check_hypothesis_h: grid_points >= 3");
  HypothesisReport r;
  const double a0 = flux.a(0.0), a1 = flux.a(1.0);
  const double ap0 = flux.a_prime(0.0), ap1 = flux.a_prime(1.0);
  for (double v : {a0, a1, ap0, ap1})
    if (!std::isfinite(v)) throw std::runtime_error("check_hypothesis_h: non-finite flux value");

  r.a0_zero = std::abs(a0) <= 1e-12;
  r.a1_zero = std::abs(a1) <= 1e-12;
  r.ap0_negative = ap0 < 0.0;
  r.ap1_positive = ap1 > 0.0;
  r.negative_interior = true;
  for (int i = 1; i + 1 < grid_points; ++i) {
    const double u = static_cast<double>(i) / (grid_points - 1);
    const double v = flux.a(u);
    if (!std::isfinite(v)) throw std::runtime_error("check_hypothesis_h: non-finite flux value");
    if (v >= 0.0) {
      r.negative_interior = false;
      r.violations.push_back("A(u) >= 0 at u = " + std::to_string(u));
      break;
    }
  }
  if (!r.a0_zero) r.violations.push_back("A(0) != 0");
  if (!r.a1_zero) r.violations.push_back("A(1) != 0");
  if (!r.ap0_negative) r.violations.push_back("A'(0) >= 0");
  if (!r.ap1_positive) r.violations.push_back("A'(1) <= 0");
  r.h_holds = r.a0_zero && r.a1_zero && r.ap0_negative && r.ap1_positive && r.negative_interior;
  return r;
}

std::vector<double> drift_coefficients(const FluxFunction& flux, int n) {
  if (n < 1) throw std::invalid_argument("drift_coefficients: n >= 1");
  std::vector<double> a(n);
  double prev = flux.a(0.0);
  for (int i = 1; i <= n; ++i) {
    const double cur = flux.a(static_cast<double>(i) / n);
    a[i - 1] = n * (cur - prev);
    prev = cur;
  }
  return a;
}

}  // namespace rankdiff
