#include "rankdiff/pde.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "rankdiff/rng.hpp"

namespace rankdiff {

double cfl_max_dt(const GridProfile& profile, const FluxFunction& flux, double sigma) {
  double max_ap = 0.0;
  const int kGrid = 1001;
  for (int i = 0; i < kGrid; ++i)
    max_ap = std::max(max_ap, std::abs(flux.a_prime(static_cast<double>(i) / (kGrid - 1))));
  return profile.h * profile.h / (sigma * sigma + profile.h * max_ap);
}

void evolve_pde(GridProfile& profile, const FluxFunction& flux, double sigma, double dt,
                int n_steps) {
  profile.validate();
  if (dt <= 0.0 || n_steps < 1) throw std::invalid_argument("evolve_pde: dt > 0, n_steps >= 1");
  const double dt_max = cfl_max_dt(profile, flux, sigma);
  if (dt > dt_max * (1.0 + 1e-12))
    throw std::invalid_argument("evolve_pde: CFL violation, max admissible dt = " +
                                std::to_string(dt_max));

  const std::size_t n = profile.size();
  const double h = profile.h;
  const double lam = 0.5 * sigma * sigma * dt / (h * h);
  const double mu = 0.5 * dt / h;
  std::vector<double> a_of_f(n), next(n);
  for (int s = 0; s < n_steps; ++s) {
    auto& f = profile.values;
    for (std::size_t i = 0; i < n; ++i) a_of_f[i] = flux.a(f[i]);
    next[0] = 0.0;
    next[n - 1] = 1.0;
    for (std::size_t i = 1; i + 1 < n; ++i) {
      next[i] = f[i] + lam * (f[i + 1] - 2.0 * f[i] + f[i - 1]) +
                mu * (a_of_f[i + 1] - a_of_f[i - 1]);
      if (!std::isfinite(next[i]))
        throw std::runtime_error("evolve_pde: non-finite node " + std::to_string(i) + " at step " +
                                 std::to_string(s));
      next[i] = std::clamp(next[i], 0.0, 1.0);
    }
    profile.values.swap(next);
    profile.time += dt;
  }
  for (std::size_t i = 1; i < n; ++i)
    if (profile.values[i] < profile.values[i - 1] - 1e-10)
      throw std::runtime_error("evolve_pde: monotonicity lost at node " + std::to_string(i));
}

PdeSchedule::PdeSchedule(GridProfile f0, const FluxFunction& flux, double sigma, double dt,
                         int n_steps)
    : dt_(dt) {
  f0.validate();
  const double dt_max = cfl_max_dt(f0, flux, sigma);
  const int sub = std::max(1, static_cast<int>(std::ceil(dt / dt_max)));
  profiles_.reserve(static_cast<std::size_t>(n_steps) + 1);
  profiles_.push_back(f0);
  for (int k = 0; k < n_steps; ++k) {
    evolve_pde(f0, flux, sigma, dt / sub, sub);
    profiles_.push_back(f0);
  }
}

double PdeSchedule::flux_integral(const FluxFunction& flux, int k) const {
  const GridProfile& g = at(k);
  double acc = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double w = (i == 0 || i + 1 == g.size()) ? 0.5 : 1.0;
    acc += w * flux.a(g.values[i]);
  }
  return acc * g.h;
}

void simulate_nonlinear_step(NonlinearPath& path, const GridProfile& f_now,
                             const FluxFunction& flux, double sigma, double dt) {
  const double xi = rng::normal(path.rng_key, path.step_index);
  const double drift = flux.a_prime(f_now.interpolate(path.position));
  path.position += sigma * std::sqrt(dt) * xi - drift * dt;
  if (!std::isfinite(path.position))
    throw std::runtime_error("simulate_nonlinear_step: non-finite position at step " +
                             std::to_string(path.step_index));
  path.time += dt;
  ++path.step_index;
}

}  // namespace rankdiff
