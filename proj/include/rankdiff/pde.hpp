#pragma once

#include <cstdint>
#include <vector>

#include "rankdiff/flux.hpp"
#include "rankdiff/grid.hpp"

namespace rankdiff {

// Largest stable explicit step for the given grid/flux.
double cfl_max_dt(const GridProfile& profile, const FluxFunction& flux, double sigma);

// Advances dF/dt = (sigma^2/2) F_xx + (A(F))_x with central differences and
// Dirichlet boundaries F(x_min)=0, F(x_max)=1. Refuses to run if dt violates
// the CFL bound; aborts on a non-finite node. Values are clamped to [0,1];
// non-monotonicity beyond 1e-10 fails the run (a monotone scheme should not
// need repair).
void evolve_pde(GridProfile& profile, const FluxFunction& flux, double sigma, double dt,
                int n_steps);

// Exact Burgers solution via the Cole-Hopf quotient of Gaussian convolutions.
// The integrand is evaluated in log space with a max-shift so no exponential
// overflows; quadrature is composite Simpson refined to convergence.
double cole_hopf_cdf(const GridProfile& f0, double sigma, double t, double x);
double cole_hopf_density(const GridProfile& f0, double sigma, double t, double x);

// Whole-profile Cole-Hopf evaluation on the given grid.
GridProfile cole_hopf_profile(const GridProfile& f0, double sigma, double t, double x_lo,
                              double x_hi, double h);

/// CDF and density from a single pass over the grid (each quotient yields
/// both, so this halves the quadrature cost versus two separate calls).
struct ColeHopfSolution {
  GridProfile cdf;
  std::vector<double> density;
};
ColeHopfSolution cole_hopf_solve(const GridProfile& f0, double sigma, double t, double x_lo,
                                 double x_hi, double h);

/// Precomputed F_t on the step times of an SDE run: schedule[k] is the
/// profile at time k*dt, k = 0..n_steps. Shared grid for all times.
class PdeSchedule {
 public:
  PdeSchedule(GridProfile f0, const FluxFunction& flux, double sigma, double dt, int n_steps);

  const GridProfile& at(int k) const { return profiles_[static_cast<std::size_t>(k)]; }
  int steps() const { return static_cast<int>(profiles_.size()) - 1; }
  double dt() const { return dt_; }

  // Trapezoid value of integral A(F_s(x)) dx over the grid at step k.
  double flux_integral(const FluxFunction& flux, int k) const;

 private:
  std::vector<GridProfile> profiles_;
  double dt_;
};

/// Single path of the nonlinear (McKean-Vlasov) process; drift evaluated
/// against a precomputed CDF schedule.
struct NonlinearPath {
  double position = 0.0;
  double time = 0.0;
  std::uint64_t rng_key = 0;
  std::uint64_t step_index = 0;
};

// One Euler-Maruyama step of dX = sigma dB - A'(F(X)) dt with F interpolated
// from f_now (the profile at the path's current time).
void simulate_nonlinear_step(NonlinearPath& path, const GridProfile& f_now,
                             const FluxFunction& flux, double sigma, double dt);

}  // namespace rankdiff
