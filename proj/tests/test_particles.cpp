#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "rankdiff/particles.hpp"
#include "rankdiff/rng.hpp"

using namespace rankdiff;

TEST_CASE("ranks are a permutation, ties broken by index") {
  const std::vector<double> pos{1.0, 1.0, 0.0, 2.5, 1.0};
  const auto r = ranks(pos);
  CHECK(r == std::vector<int>{2, 3, 1, 5, 4});

  std::vector<int> sorted = r;
  std::sort(sorted.begin(), sorted.end());
  for (int i = 0; i < 5; ++i) CHECK(sorted[static_cast<std::size_t>(i)] == i + 1);
}

TEST_CASE("one Euler step matches the white-box update rule") {
  const FluxFunction flux = FluxFunction::burgers();
  const std::vector<double> x0{0.7, -0.2, 1.4};
  const double sigma = 0.8, dt = 1e-2;
  const std::uint64_t seed = 99;
  ParticleEnsemble e = make_ensemble(x0, sigma, flux, seed);
  step(e, dt);

  const auto a = drift_coefficients(flux, 3);
  const auto r0 = ranks(x0);
  for (std::size_t i = 0; i < 3; ++i) {
    const double xi = rng::normal(rng::stream_key(seed, i), 0);
    const double expected =
        x0[i] + sigma * std::sqrt(dt) * xi - a[static_cast<std::size_t>(r0[i] - 1)] * dt;
    CHECK(std::abs((e.positions[i]) - (expected)) < 1e-15);
  }
  CHECK(e.step_index == 1);
  CHECK(std::abs(e.time - dt) < 1e-15);
}

TEST_CASE("trajectories are reproducible from (seed, parameters)") {
  const FluxFunction flux = FluxFunction::cubic();
  std::vector<double> x0(40);
  for (std::size_t i = 0; i < x0.size(); ++i) x0[i] = 0.1 * static_cast<double>(i) - 2.0;
  ParticleEnsemble a = make_ensemble(x0, 1.0, flux, 7);
  ParticleEnsemble b = make_ensemble(x0, 1.0, flux, 7);
  for (int k = 0; k < 50; ++k) step(a, 1e-3);
  for (int k = 0; k < 50; ++k) step(b, 1e-3);
  CHECK(a.positions == b.positions);

  ParticleEnsemble c = make_ensemble(x0, 1.0, flux, 8);
  for (int k = 0; k < 50; ++k) step(c, 1e-3);
  CHECK(a.positions != c.positions);
}

TEST_CASE("projection fixes the mean exactly") {
  const FluxFunction flux = FluxFunction::burgers();
  ParticleEnsemble e = make_ensemble({1.0, 2.0, 4.5, -3.0}, 1.0, flux, 1);
  const ParticleEnsemble p = project_to_mean_hyperplane(e, 0.25);
  const double m = std::accumulate(p.positions.begin(), p.positions.end(), 0.0) / 4.0;
  CHECK(std::abs(m - 0.25) < 1e-14);
  // Gaps are untouched.
  for (std::size_t i = 1; i < 4; ++i)
    CHECK(std::abs((p.positions[i] - p.positions[i - 1]) - (e.positions[i] - e.positions[i - 1])) < 1e-14);
}

TEST_CASE("coupled twins with identical starts stay identical") {
  const FluxFunction flux = FluxFunction::burgers();
  const std::vector<double> x0{0.0, 1.0, -1.0, 0.5};
  CoupledEnsembles pair = make_coupled(make_ensemble(x0, 1.0, flux, 5), x0);
  for (int k = 0; k < 100; ++k) step_coupled(pair, 1e-3);
  CHECK(pair.primary.positions == pair.twin.positions);
}

TEST_CASE("coupled order preservation and L2 contraction") {
  const FluxFunction flux = FluxFunction::burgers();
  const double k_lip = flux.lipschitz_k();
  const int n = 32;
  const double dt = 1e-3;
  for (std::uint64_t run = 0; run < 10; ++run) {
    std::vector<double> x0(n), y0(n);
    const std::uint64_t key = rng::stream_key(1234, run);
    for (int i = 0; i < n; ++i)
      x0[static_cast<std::size_t>(i)] = rng::normal(key, static_cast<std::uint64_t>(i));
    std::sort(x0.begin(), x0.end());
    for (int i = 0; i < n; ++i)
      y0[static_cast<std::size_t>(i)] =
          x0[static_cast<std::size_t>(i)] +
          0.3 * rng::uniform01(key, 1000 + static_cast<std::uint64_t>(i));
    std::sort(y0.begin(), y0.end());

    CoupledEnsembles pair = make_coupled(make_ensemble(x0, 1.0, flux, 77 + run), y0);
    double dist = 0.0;
    for (int i = 0; i < n; ++i) {
      const double d = y0[static_cast<std::size_t>(i)] - x0[static_cast<std::size_t>(i)];
      dist += d * d;
    }
    for (int k = 0; k < 200; ++k) {
      step_coupled(pair, dt);
      auto xs = pair.primary.positions, ys = pair.twin.positions;
      std::sort(xs.begin(), xs.end());
      std::sort(ys.begin(), ys.end());
      for (int i = 0; i < n; ++i)
        CHECK(xs[static_cast<std::size_t>(i)] <= ys[static_cast<std::size_t>(i)] + 1e-12);
      double next = 0.0;
      for (int i = 0; i < n; ++i) {
        const double d = pair.twin.positions[static_cast<std::size_t>(i)] -
                         pair.primary.positions[static_cast<std::size_t>(i)];
        next += d * d;
      }
      CHECK(next <= dist + dt * dt * n * k_lip * k_lip + 1e-12);
      dist = next;
    }
  }
}

TEST_CASE("rearrangement inequality on random sorted pairs") {
  for (std::uint64_t run = 0; run < 200; ++run) {
    const std::uint64_t key = rng::stream_key(555, run);
    const int n = 2 + static_cast<int>(rng::draw_bits(key, 0) % 30);
    std::vector<double> a(static_cast<std::size_t>(n)), b(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      a[static_cast<std::size_t>(i)] = rng::normal(key, 10 + static_cast<std::uint64_t>(i));
      b[static_cast<std::size_t>(i)] = rng::normal(key, 500 + static_cast<std::uint64_t>(i));
    }
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    // Random permutation via counter-based draws (Fisher-Yates).
    std::vector<int> tau(static_cast<std::size_t>(n));
    std::iota(tau.begin(), tau.end(), 0);
    for (int i = n - 1; i > 0; --i)
      std::swap(tau[static_cast<std::size_t>(i)],
                tau[rng::draw_bits(key, 1000 + static_cast<std::uint64_t>(i)) %
                    static_cast<std::uint64_t>(i + 1)]);
    CHECK(check_rearrangement(a, b, tau));
  }
  CHECK_THROWS_AS(check_rearrangement(std::vector<double>{1.0, 0.0}, std::vector<double>{0.0, 1.0},
                                      std::vector<int>{0, 1}),
                  std::invalid_argument);
}

TEST_CASE("invalid inputs are rejected") {
  const FluxFunction flux = FluxFunction::burgers();
  CHECK_THROWS_AS(make_ensemble({}, 1.0, flux, 0), std::invalid_argument);
  CHECK_THROWS_AS(make_ensemble({0.0}, 0.0, flux, 0), std::invalid_argument);
  ParticleEnsemble e = make_ensemble({0.0, 1.0}, 1.0, flux, 0);
  CHECK_THROWS_AS(step(e, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(make_coupled(e, {0.0}), std::invalid_argument);
}
