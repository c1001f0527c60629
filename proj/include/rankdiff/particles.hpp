#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "rankdiff/flux.hpp"

namespace rankdiff {

/// State of the n-particle rank-interacting system. Particle i consumes the
/// counter-based stream (seed, i); given (seed, parameters, step count) the
/// trajectory is bit-identical regardless of thread count.
struct ParticleEnsemble {
  std::vector<double> positions;
  double time = 0.0;
  double sigma = 1.0;
  std::vector<double> drift_coeffs;  // a_n(1..n)
  std::uint64_t seed = 0;
  std::uint64_t step_index = 0;  // Gaussian counter, shared by coupled twins

  std::size_t size() const { return positions.size(); }
};

ParticleEnsemble make_ensemble(std::vector<double> positions, double sigma,
                               const FluxFunction& flux, std::uint64_t seed);

// rank_i = #{j : x_j <= x_i}, ties broken by particle index so the result is
// always a permutation of 1..n. One sort per call.
std::vector<int> ranks(std::span<const double> positions);

// One Euler-Maruyama step: x_i += sigma sqrt(dt) xi_i - a_n(rank_i) dt.
// Throws on non-finite output, naming the particle and step.
void step(ParticleEnsemble& ensemble, double dt);

// Y_i = x_bar + X_i - mean(X); output coordinates sum to n x_bar.
ParticleEnsemble project_to_mean_hyperplane(const ParticleEnsemble& ensemble, double x_bar);

/// Twin ensembles driven by the identical Gaussian increments each step.
struct CoupledEnsembles {
  ParticleEnsemble primary;
  ParticleEnsemble twin;
};

CoupledEnsembles make_coupled(ParticleEnsemble primary, std::vector<double> twin_positions);

void step_coupled(CoupledEnsembles& pair, double dt);

// Rearrangement inequality oracle: sum a(i) b(tau(i)) <= sum a(i) b(i) for
// nondecreasing a, b. Rejects non-nondecreasing inputs.
bool check_rearrangement(std::span<const double> a, std::span<const double> b,
                         std::span<const int> tau);

}  // namespace rankdiff
