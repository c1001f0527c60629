#include <cmath>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "rankdiff/stationary.hpp"
#include "rankdiff/stats.hpp"

using namespace rankdiff;

TEST_CASE("burgers stationary profile matches the logistic closed form") {
  const StationaryProfile p = solve_stationary_ode(FluxFunction::burgers(), 1.0, 0.0);
  double cdf_err = 0.0, den_err = 0.0;
  for (std::size_t i = 0; i < p.cdf.size(); ++i) {
    const double x = p.cdf.x_at(i);
    cdf_err = std::max(cdf_err, std::abs(p.cdf.values[i] - burgers_logistic_cdf(x, 1.0, 0.0)));
    den_err = std::max(den_err, std::abs(p.density[i] - burgers_logistic_density(x, 1.0, 0.0)));
  }
  CHECK(cdf_err < 1e-8);
  CHECK(den_err < 1e-8);
  CHECK(p.spectral_gap_guarantee);
  CHECK(p.closed_form == ClosedForm::BurgersLogistic);
}

TEST_CASE("profile mean equals the requested anchor") {
  const StationaryProfile p = solve_stationary_ode(FluxFunction::burgers(), 0.7, 1.3);
  CHECK(std::abs(p.cdf.mean() - 1.3) < 1e-9);
}

TEST_CASE("translation family: shifting the anchor shifts the profile") {
  const StationaryProfile a = solve_stationary_ode(FluxFunction::cubic(), 1.0, 0.0);
  const StationaryProfile b = solve_stationary_ode(FluxFunction::cubic(), 1.0, 2.0);
  for (double x : {-4.0, -1.0, 0.0, 0.5, 3.0})
    CHECK(std::abs(b.cdf.interpolate(x + 2.0) - a.cdf.interpolate(x)) < 1e-7);
}

TEST_CASE("density is -(2/sigma^2) A(F) and integrates to one") {
  const double sigma = 1.5;
  const FluxFunction flux = FluxFunction::burgers();
  const StationaryProfile p = solve_stationary_ode(flux, sigma, 0.0);
  for (std::size_t i = 0; i < p.cdf.size(); i += 1000)
    CHECK(std::abs(p.density[i] - (-2.0 / (sigma * sigma) * flux.a(p.cdf.values[i]))) < 1e-14);
  double mass = 0.0;
  for (std::size_t i = 0; i < p.density.size(); ++i) {
    const double w = (i == 0 || i + 1 == p.density.size()) ? 0.5 : 1.0;
    mass += w * p.density[i];
  }
  CHECK(std::abs(mass * p.cdf.h - 1.0) < 1e-8);
}

TEST_CASE("existence condition failures name the violated clause") {
  // A(1) != 0.
  CHECK_THROWS_WITH_AS(solve_stationary_ode(FluxFunction::polynomial({0.0, 0.0, 1.0}), 1.0, 0.0),
                       doctest::Contains("A(1)"), std::invalid_argument);
  // A > 0 on the interior (A = x - x^2).
  CHECK_THROWS_AS(solve_stationary_ode(FluxFunction::polynomial({0.0, 1.0, -1.0}), 1.0, 0.0),
                  std::invalid_argument);
}

TEST_CASE("exponential-rate flag holds for both builtins") {
  // Both builtins have A'(0) < 0 < A'(1), so the exponential tail criterion
  // applies. A flux with A'(0) = 0 has an algebraic tail that never reaches
  // the 1e-10 threshold; the solver reports that as a tail-closure error.
  CHECK(solve_stationary_ode(FluxFunction::cubic(), 1.0, 0.0).spectral_gap_guarantee);
  CHECK_THROWS_AS(solve_stationary_ode(FluxFunction::polynomial({0.0, 0.0, -1.0, 1.0}), 1.0, 0.0),
                  std::runtime_error);
}

TEST_CASE("invariant sampler: exact beta coefficients") {
  const InvariantSampler s2 = make_invariant_sampler(FluxFunction::burgers(), 2, 0.0);
  REQUIRE(s2.beta.size() == 1);
  CHECK(std::abs(s2.beta[0] - 0.25) < 1e-15);  // -2 A(1/2) = 1/4
  const InvariantSampler s3 = make_invariant_sampler(FluxFunction::burgers(), 3, 0.0);
  REQUIRE(s3.beta.size() == 2);
  CHECK(std::abs(s3.beta[0] - 1.0 / 3.0) < 1e-15);  // -3 A(1/3)
  CHECK(std::abs(s3.beta[1] - 1.0 / 3.0) < 1e-15);  // -3 A(2/3)
}

TEST_CASE("sampler draws: sorted, centered, reproducible, right gap law") {
  const InvariantSampler s = make_invariant_sampler(FluxFunction::burgers(), 5, 0.4);
  const auto d1 = sample_invariant_reordered(s, 1.0, 42, 3);
  const auto d2 = sample_invariant_reordered(s, 1.0, 42, 3);
  CHECK(d1 == d2);
  double sum = 0.0;
  for (std::size_t i = 0; i < d1.size(); ++i) {
    sum += d1[i];
    if (i > 0) CHECK(d1[i] >= d1[i - 1]);
  }
  CHECK(std::abs(sum - 5 * 0.4) < 1e-12);

  // n = 2, sigma = 1: the gap is Exponential(rate 2 beta / sigma^2 = 1/2).
  const InvariantSampler s2 = make_invariant_sampler(FluxFunction::burgers(), 2, 0.0);
  std::vector<double> gaps(5000);
  for (std::size_t r = 0; r < gaps.size(); ++r) {
    const auto d = sample_invariant_reordered(s2, 1.0, 7, r);
    gaps[r] = d[1] - d[0];
  }
  const double ks =
      stats::ks_statistic(gaps, [](double z) { return z <= 0.0 ? 0.0 : 1.0 - std::exp(-0.5 * z); });
  CHECK(ks < 0.025);
}

TEST_CASE("sampler rejects fluxes with nonpositive beta") {
  CHECK_THROWS_AS(make_invariant_sampler(FluxFunction::polynomial({0.0, 1.0, -1.0}), 4, 0.0),
                  std::invalid_argument);
}

TEST_CASE("cubic closed form solves the same ODE") {
  // d/dx (1 + e^{-4x/s^2})^{-1/2} should equal -(2/s^2) A(F) with A = F^3 - F.
  const double sigma = 1.3, s2 = sigma * sigma;
  const FluxFunction flux = FluxFunction::cubic();
  for (double x : {-2.0, -0.4, 0.0, 0.9, 3.1}) {
    const double f = cubic_closed_form_cdf(x, sigma);
    CHECK(cubic_closed_form_density(x, sigma) ==
          doctest::Approx(-2.0 / s2 * flux.a(f)).epsilon(1e-12));
  }
}
