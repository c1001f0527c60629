#include "rankdiff/particles.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "rankdiff/rng.hpp"

namespace rankdiff {

ParticleEnsemble make_ensemble(std::vector<double> positions, double sigma,
                               const FluxFunction& flux, std::uint64_t seed) {
  if (positions.empty()) throw std::invalid_argument("make_ensemble: empty ensemble");
  if (sigma <= 0.0) throw std::invalid_argument("make_ensemble: sigma > 0 required");
  ParticleEnsemble e;
  e.drift_coeffs = drift_coefficients(flux, static_cast<int>(positions.size()));
  e.positions = std::move(positions);
  e.sigma = sigma;
  e.seed = seed;
  return e;
}

std::vector<int> ranks(std::span<const double> positions) {
  const std::size_t n = positions.size();
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int i, int j) {
    if (positions[i] != positions[j]) return positions[i] < positions[j];
    return i < j;  // tie rule: lower index counts as <=
  });
  std::vector<int> r(n);
  for (std::size_t k = 0; k < n; ++k) r[order[k]] = static_cast<int>(k) + 1;
  return r;
}

namespace {

void step_with_noise(ParticleEnsemble& e, double dt, std::uint64_t noise_seed,
                     std::uint64_t counter) {
  const auto r = ranks(e.positions);
  const double sdt = e.sigma * std::sqrt(dt);
  const std::size_t n = e.size();
#pragma omp parallel for if (n >= 4096)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) {
    const double xi = rng::normal(rng::stream_key(noise_seed, static_cast<std::uint64_t>(i)), counter);
    e.positions[i] += sdt * xi - e.drift_coeffs[r[i] - 1] * dt;
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(e.positions[i]))
      throw std::runtime_error("step: non-finite position, particle " + std::to_string(i) +
                               ", step " + std::to_string(counter));
  }
  e.time += dt;
  e.step_index = counter + 1;
}

}  // namespace

void step(ParticleEnsemble& ensemble, double dt) {
  if (dt <= 0.0) throw std::invalid_argument("step: dt > 0 required");
  if (ensemble.drift_coeffs.size() != ensemble.size())
    throw std::invalid_argument("step: drift_coeffs size mismatch");
  step_with_noise(ensemble, dt, ensemble.seed, ensemble.step_index);
}

ParticleEnsemble project_to_mean_hyperplane(const ParticleEnsemble& ensemble, double x_bar) {
  ParticleEnsemble out = ensemble;
  double mean = 0.0;
  for (double x : ensemble.positions) mean += x;
  mean /= static_cast<double>(ensemble.size());
  for (double& x : out.positions) x += x_bar - mean;
  return out;
}

CoupledEnsembles make_coupled(ParticleEnsemble primary, std::vector<double> twin_positions) {
  if (twin_positions.size() != primary.size())
    throw std::invalid_argument("make_coupled: size mismatch");
  CoupledEnsembles pair;
  pair.twin = primary;
  pair.twin.positions = std::move(twin_positions);
  pair.primary = std::move(primary);
  return pair;
}

void step_coupled(CoupledEnsembles& pair, double dt) {
  if (pair.primary.seed != pair.twin.seed || pair.primary.step_index != pair.twin.step_index)
    throw std::invalid_argument("step_coupled: ensembles lost noise synchronization");
  step(pair.primary, dt);
  step_with_noise(pair.twin, dt, pair.twin.seed, pair.twin.step_index);
}

bool check_rearrangement(std::span<const double> a, std::span<const double> b,
                         std::span<const int> tau) {
  const std::size_t n = a.size();
  if (b.size() != n || tau.size() != n)
    throw std::invalid_argument("check_rearrangement: length mismatch");
  for (std::size_t i = 1; i < n; ++i)
    if (a[i] < a[i - 1] || b[i] < b[i - 1])
      throw std::invalid_argument("check_rearrangement: inputs must be nondecreasing");
  double lhs = 0.0, rhs = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    lhs += a[i] * b[tau[i]];
    rhs += a[i] * b[i];
  }
  return lhs <= rhs + 1e-12 * (1.0 + std::abs(rhs));
}

}  // namespace rankdiff
