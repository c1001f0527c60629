#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "rankdiff/flux.hpp"

using namespace rankdiff;

TEST_CASE("burgers flux values and constants") {
  const FluxFunction f = FluxFunction::burgers();
  CHECK(f.a(0.0) == 0.0);
  CHECK(std::abs(f.a(1.0)) < 1e-15);
  CHECK(std::abs(f.a(0.5) - (-0.125)) < 1e-15);
  CHECK(std::abs(f.a_prime(0.0) - (-0.5)) < 1e-15);
  CHECK(std::abs(f.a_prime(1.0) - 0.5) < 1e-15);
  CHECK(std::abs(f.a_second(0.3) - 1.0) < 1e-15);
  CHECK(std::abs(f.lipschitz_k() - 1.0) < 1e-15);
  CHECK(std::abs(f.alpha() - 1.0) < 1e-15);
  CHECK(f.is_convex());
  CHECK(f.kind() == FluxKind::Burgers);
}

TEST_CASE("cubic flux: convex but not uniformly convex") {
  const FluxFunction f = FluxFunction::cubic();
  CHECK(std::abs(f.a(1.0)) < 1e-15);
  CHECK(std::abs(f.a(0.5) - (0.125 - 0.5)) < 1e-15);
  CHECK(std::abs(f.a_prime(0.0) - (-1.0)) < 1e-15);
  CHECK(std::abs(f.a_prime(1.0) - 2.0) < 1e-15);
  CHECK(std::abs(f.lipschitz_k() - 6.0) < 1e-15);  // sup |A''| = A''(1) = 6
  CHECK(f.alpha() == 0.0);                         // inf A'' = A''(0) = 0
  CHECK(f.is_convex());
}

TEST_CASE("polynomial flux must vanish at 0") {
  CHECK_THROWS_AS(FluxFunction::polynomial({0.5, 1.0}), std::invalid_argument);
  const FluxFunction f = FluxFunction::polynomial({0.0, -1.5, 1.5});
  CHECK(std::abs(f.a(1.0)) < 1e-15);
  CHECK(std::abs(f.a(0.5) - (-0.375)) < 1e-15);
}

TEST_CASE("hypothesis (H) holds for the builtins, clause-wise otherwise") {
  CHECK(check_hypothesis_h(FluxFunction::burgers()).h_holds);
  CHECK(check_hypothesis_h(FluxFunction::cubic()).h_holds);
  // A(x) = x^2 - x^3 is positive on the interior with A'(0) = 0.
  const auto rep = check_hypothesis_h(FluxFunction::polynomial({0.0, 0.0, 1.0, -1.0}));
  CHECK_FALSE(rep.h_holds);
  CHECK(rep.a0_zero);
  CHECK(rep.a1_zero);
  CHECK_FALSE(rep.ap0_negative);
  CHECK_FALSE(rep.negative_interior);
  CHECK_FALSE(rep.violations.empty());
}

TEST_CASE("drift coefficients for burgers, n = 4") {
  // a_4(i) = 4 (A(i/4) - A((i-1)/4)) with A(x) = x(x-1)/2.
  const auto a = drift_coefficients(FluxFunction::burgers(), 4);
  REQUIRE(a.size() == 4);
  CHECK(std::abs(a[0] - (-0.375)) < 1e-15);
  CHECK(std::abs(a[1] - (-0.125)) < 1e-15);
  CHECK(std::abs(a[2] - 0.125) < 1e-15);
  CHECK(std::abs(a[3] - 0.375) < 1e-15);
}

TEST_CASE("drift coefficients: telescoping sum and convex spacing") {
  for (const auto& f : {FluxFunction::burgers(), FluxFunction::cubic(),
                        FluxFunction::polynomial({0.0, 0.25, -1.0, 0.75})}) {
    for (int n : {2, 3, 17, 100, 10000}) {
      const auto a = drift_coefficients(f, n);
      double sum = 0.0;
      for (double v : a) sum += v;
      CHECK(std::abs(sum - n * f.a(1.0)) < 1e-9 * n);
      if (f.is_convex()) {
        for (std::size_t i = 1; i < a.size(); ++i)
          CHECK(a[i] - a[i - 1] >= f.alpha() / n - 1e-12);
      }
    }
  }
}
