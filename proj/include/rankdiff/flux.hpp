#pragma once

#include <string>
#include <vector>

namespace rankdiff {

enum class FluxKind { Burgers, Cubic, Polynomial };

/// Polynomial flux primitive A on [0,1] with A(0) = 0, together with the
/// structural constants the rest of the library dispatches on:
///   lipschitz_k : Lipschitz constant of A' (sup of |A''| on [0,1])
///   alpha       : uniform convexity constant (inf of A'' on [0,1], clamped
///                 to 0 when A is not uniformly convex)
/// Coefficients are stored in ascending powers; derivatives are exact.
/// Immutable after construction, safe to share across threads.
class FluxFunction {
 public:
  static FluxFunction burgers();                               // A(x) = x(x-1)/2
  static FluxFunction cubic();                                 // A(x) = x^3 - x
  static FluxFunction polynomial(std::vector<double> coeffs);  // ascending powers

  double a(double u) const;
  double a_prime(double u) const;
  double a_second(double u) const;

  double lipschitz_k() const { return lipschitz_k_; }
  double alpha() const { return alpha_; }
  FluxKind kind() const { return kind_; }
  const std::vector<double>& coeffs() const { return coeffs_; }

  bool is_convex() const { return alpha_ >= 0.0 && convex_; }

 private:
  FluxFunction(FluxKind kind, std::vector<double> coeffs);

  FluxKind kind_;
  std::vector<double> coeffs_;
  std::vector<double> d1_;  // coefficients of A'
  std::vector<double> d2_;  // coefficients of A''
  double lipschitz_k_ = 0.0;
  double alpha_ = 0.0;
  bool convex_ = false;
};

FluxFunction make_builtin_flux(FluxKind kind);

struct HypothesisReport {
  bool h_holds = false;
  bool a0_zero = false;       // A(0) = 0
  bool a1_zero = false;       // A(1) = 0
  bool ap0_negative = false;  // A'(0) < 0
  bool ap1_positive = false;  // A'(1) > 0
  bool negative_interior = false;  // A(u) < 0 on the interior grid
  std::vector<std::string> violations;
};

// Checks hypothesis (H) clause by clause on a uniform grid.
HypothesisReport check_hypothesis_h(const FluxFunction& flux, int grid_points = 10001);

// a_n(i) = n (A(i/n) - A((i-1)/n)) for i = 1..n. Nondecreasing for convex
// flux; the sum telescopes to n A(1).
std::vector<double> drift_coefficients(const FluxFunction& flux, int n);

}  // namespace rankdiff
