// Command-line front end: simulation, PDE solving, stationary profiles,
// invariant sampling, spectral checks, and the experiment harness.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "CLI11.hpp"
#include "rankdiff/experiments.hpp"
#include "rankdiff/flux.hpp"
#include "rankdiff/grid.hpp"
#include "rankdiff/particles.hpp"
#include "rankdiff/pde.hpp"
#include "rankdiff/rng.hpp"
#include "rankdiff/spectral.hpp"
#include "rankdiff/stationary.hpp"
#include "rankdiff/stats.hpp"
#include "rankdiff/table.hpp"

namespace {

using namespace rankdiff;

std::string g17(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

FluxFunction flux_from(const std::string& kind, const std::vector<double>& coeffs) {
  if (kind == "burgers") return FluxFunction::burgers();
  if (kind == "cubic") return FluxFunction::cubic();
  if (kind == "poly" || kind == "polynomial") return FluxFunction::polynomial(coeffs);
  throw CLI::ValidationError("--flux", "expected burgers|cubic|poly");
}

struct InitSpec {
  std::string kind;  // gaussian | uniform | file
  double a = 0.0, b = 1.0;
  std::string path;
};

InitSpec parse_init(const std::string& text) {
  InitSpec spec;
  const auto colon = text.find(':');
  spec.kind = text.substr(0, colon);
  const std::string rest = colon == std::string::npos ? "" : text.substr(colon + 1);
  if (spec.kind == "gaussian" || spec.kind == "uniform") {
    if (spec.kind == "gaussian") {
      spec.a = 0.0;
      spec.b = 1.0;
    }
    if (!rest.empty()) {
      const auto comma = rest.find(',');
      if (comma == std::string::npos)
        throw CLI::ValidationError("--init", "expected kind:a,b");
      spec.a = std::stod(rest.substr(0, comma));
      spec.b = std::stod(rest.substr(comma + 1));
    } else if (spec.kind == "uniform") {
      spec.a = 0.0;
      spec.b = 1.0;
    }
  } else if (spec.kind == "file") {
    if (rest.empty()) throw CLI::ValidationError("--init", "file:path needs a path");
    spec.path = rest;
  } else {
    throw CLI::ValidationError("--init", "expected gaussian:mu,sd | uniform:a,b | file:path");
  }
  return spec;
}

GridProfile profile_from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::vector<double> xs, fs;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || !(std::isdigit(line[0]) || line[0] == '-' || line[0] == '+')) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw std::runtime_error("expected x,F rows in " + path);
    xs.push_back(std::stod(line.substr(0, comma)));
    fs.push_back(std::stod(line.substr(comma + 1)));
  }
  if (xs.size() < 3) throw std::runtime_error("too few rows in " + path);
  GridProfile g;
  g.x_min = xs.front();
  g.h = (xs.back() - xs.front()) / static_cast<double>(xs.size() - 1);
  for (std::size_t i = 0; i < xs.size(); ++i)
    if (std::abs(xs[i] - (g.x_min + g.h * static_cast<double>(i))) > 1e-9 * (1.0 + std::abs(xs[i])))
      throw std::runtime_error("grid in " + path + " is not uniform");
  g.values = fs;
  g.validate();
  return g;
}

GridProfile initial_profile(const InitSpec& spec, const FluxFunction& flux, double sigma,
                            double t_end, double h) {
  if (spec.kind == "file") return profile_from_file(spec.path);
  double max_ap = 0.0;
  for (int i = 0; i <= 1000; ++i)
    max_ap = std::max(max_ap, std::abs(flux.a_prime(i / 1000.0)));
  if (spec.kind == "gaussian") {
    const double sd_t = std::sqrt(spec.b * spec.b + sigma * sigma * t_end);
    const double r = 6.0 * sd_t + max_ap * t_end + 1.0;
    return gaussian_profile(spec.a, spec.b, spec.a - r, spec.a + r, h);
  }
  const double sd_t = sigma * std::sqrt(t_end);
  const double r = 6.0 * sd_t + max_ap * t_end + 1.0;
  return uniform_profile(spec.a, spec.b, spec.a - r, spec.b + r, h);
}

// Inverse-CDF draw from a grid profile (binary search + linear inverse).
double quantile_of_profile(const GridProfile& g, double u) {
  std::size_t lo = 0, hi = g.size() - 1;
  while (hi - lo > 1) {
    const std::size_t mid = (lo + hi) / 2;
    (g.values[mid] < u ? lo : hi) = mid;
  }
  const double f0 = g.values[lo], f1 = g.values[hi];
  if (f1 <= f0) return g.x_at(lo);
  return g.x_at(lo) + g.h * (u - f0) / (f1 - f0);
}

std::vector<double> draw_initial_positions(const InitSpec& spec, int n, std::uint64_t key) {
  std::vector<double> x(static_cast<std::size_t>(n));
  GridProfile file_profile;
  if (spec.kind == "file") file_profile = profile_from_file(spec.path);
  for (int i = 0; i < n; ++i) {
    const auto c = static_cast<std::uint64_t>(i);
    if (spec.kind == "gaussian")
      x[static_cast<std::size_t>(i)] = spec.a + spec.b * rng::normal(key, c);
    else if (spec.kind == "uniform")
      x[static_cast<std::size_t>(i)] = spec.a + (spec.b - spec.a) * rng::uniform01(key, c);
    else
      x[static_cast<std::size_t>(i)] = quantile_of_profile(file_profile, rng::uniform01(key, c));
  }
  return x;
}

void write_xfp(const std::string& path, const GridProfile& g, const std::vector<double>& p) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << "x,F,p\n";
  for (std::size_t i = 0; i < g.size(); ++i)
    out << g17(g.x_at(i)) << ',' << g17(g.values[i]) << ',' << g17(p[i]) << '\n';
}

void set_threads(int threads) {
#ifdef _OPENMP
  if (threads > 0) omp_set_num_threads(threads);
#else
  (void)threads;
#endif
}

int cmd_simulate(const std::string& flux_kind, const std::vector<double>& coeffs, double sigma,
                 int n, double dt, double t_end, std::uint64_t seed, const std::string& init,
                 const std::string& out_path, bool summary, int record_every) {
  const FluxFunction flux = flux_from(flux_kind, coeffs);
  const InitSpec spec = parse_init(init);
  auto positions = draw_initial_positions(spec, n, rng::stream_key(seed, 0x696e6974ull));
  ParticleEnsemble ensemble = make_ensemble(std::move(positions), sigma, flux, seed);
  const int steps = static_cast<int>(std::llround(t_end / dt));

  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + out_path);
  out << (summary ? "time,mean,var,min,max\n" : "time,particle_index,position\n");
  const auto record = [&]() {
    if (summary) {
      double m = 0.0, lo = ensemble.positions[0], hi = ensemble.positions[0];
      for (double x : ensemble.positions) {
        m += x;
        lo = std::min(lo, x);
        hi = std::max(hi, x);
      }
      m /= static_cast<double>(n);
      double v = 0.0;
      for (double x : ensemble.positions) v += (x - m) * (x - m);
      v /= static_cast<double>(n - 1);
      out << g17(ensemble.time) << ',' << g17(m) << ',' << g17(v) << ',' << g17(lo) << ','
          << g17(hi) << '\n';
    } else {
      for (int i = 0; i < n; ++i)
        out << g17(ensemble.time) << ',' << i + 1 << ','
            << g17(ensemble.positions[static_cast<std::size_t>(i)]) << '\n';
    }
  };
  record();
  for (int k = 1; k <= steps; ++k) {
    step(ensemble, dt);
    if (k % record_every == 0 || k == steps) record();
  }
  return 0;
}

int cmd_solve_pde(const std::string& flux_kind, const std::vector<double>& coeffs, double sigma,
                  const std::string& init, double t_end, double h, double dt,
                  const std::string& out_path) {
  const FluxFunction flux = flux_from(flux_kind, coeffs);
  GridProfile g = initial_profile(parse_init(init), flux, sigma, t_end, h);
  const double dt_max = cfl_max_dt(g, flux, sigma);
  double step_dt = dt > 0.0 ? dt : dt_max;
  const int steps = std::max(1, static_cast<int>(std::ceil(t_end / step_dt)));
  step_dt = t_end / steps;
  if (step_dt > dt_max)
    throw std::runtime_error("dt violates the CFL bound, max admissible = " + g17(dt_max));
  evolve_pde(g, flux, sigma, step_dt, steps);
  write_xfp(out_path, g, g.density());
  return 0;
}

int cmd_cole_hopf(double sigma, double t, const std::string& init, const std::string& x_grid,
                  const std::string& out_path) {
  const FluxFunction flux = FluxFunction::burgers();
  const GridProfile f0 = initial_profile(parse_init(init), flux, sigma, t, 0.01);
  double lo = f0.x_min, hi = f0.x_max(), h = f0.h;
  if (!x_grid.empty()) {
    std::istringstream ss(x_grid);
    char c1 = 0, c2 = 0;
    if (!(ss >> lo >> c1 >> hi >> c2 >> h) || c1 != ':' || c2 != ':')
      throw CLI::ValidationError("--x-grid", "expected lo:hi:h");
  }
  const ColeHopfSolution sol = cole_hopf_solve(f0, sigma, t, lo, hi, h);
  write_xfp(out_path, sol.cdf, sol.density);
  return 0;
}

int cmd_stationary(const std::string& flux_kind, const std::vector<double>& coeffs, double sigma,
                   double mean, const std::string& out_path) {
  const FluxFunction flux = flux_from(flux_kind, coeffs);
  const StationaryProfile prof = solve_stationary_ode(flux, sigma, mean);
  write_xfp(out_path, prof.cdf, prof.density);
  if (!prof.spectral_gap_guarantee)
    std::cerr << "note: A'(0) or A'(1) vanishes; no exponential-rate guarantee\n";
  return 0;
}

int cmd_sample_invariant(const std::string& flux_kind, const std::vector<double>& coeffs, int n,
                         double sigma, int count, std::uint64_t seed, double mean,
                         const std::string& out_path) {
  const FluxFunction flux = flux_from(flux_kind, coeffs);
  const InvariantSampler sampler = make_invariant_sampler(flux, n, mean);
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + out_path);
  for (int r = 0; r < count; ++r) {
    const auto draw = sample_invariant_reordered(sampler, sigma, seed, static_cast<std::uint64_t>(r));
    for (std::size_t i = 0; i < draw.size(); ++i) out << (i ? "," : "") << g17(draw[i]);
    out << '\n';
  }
  return 0;
}

int cmd_spectral(int n_max, const std::string& out_path) {
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + out_path);
  out << "n,lambda_tilde,bound_ok\n";
  std::vector<int> ns;
  for (int n = 2; n <= n_max; ++n) ns.push_back(n);
  bool all_ok = true;
  for (const auto& rep : verify_lambda_bound(ns)) {
    out << rep.n << ',' << g17(rep.lambda_tilde) << ',' << (rep.bound_ok ? 1 : 0) << '\n';
    all_ok = all_ok && rep.bound_ok;
  }
  return all_ok ? 0 : 1;
}

int cmd_spectral_identities(int n) {
  const IdentityReport rep = verify_matrix_identities(n);
  std::cout << "n=" << rep.n << " MR=L:" << rep.mr_equals_l << " detM=n:" << rep.det_m_is_n
            << " M*Minv=I:" << rep.m_inverse_ok << " (NtN)L=I:" << rep.ntn_inverse_is_l
            << " max_error=" << g17(rep.max_error) << '\n';
  const bool ok = rep.mr_equals_l && rep.det_m_is_n && rep.m_inverse_ok && rep.ntn_inverse_is_l;
  return ok ? 0 : 1;
}

int cmd_experiment(const std::string& name, const std::string& config_path,
                   const std::string& out_dir) {
  ExperimentConfig cfg =
      config_path.empty() ? ExperimentConfig{} : load_config_file(config_path);
  cfg.experiment = experiment_kind_from_string(name);
  const ResultTable table = run_experiment(cfg);
  std::string path = cfg.out;
  if (path.empty()) path = (out_dir.empty() ? "." : out_dir) + "/" + name + ".csv";
  emit(table, path);
  const auto violations = invariant_violations(table);
  for (const auto& v : violations) std::cerr << "invariant violation: " << v << '\n';
  std::cout << "wrote " << path << " (" << table.rows.size() << " rows)\n";
  return violations.empty() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"rank-interacting diffusions: simulation, PDE limits, invariants"};
  app.require_subcommand(1);
  int threads = 0;
  app.add_option("--threads", threads, "worker thread count (0 = runtime default)");

  std::string flux_kind = "burgers", init = "gaussian:0,1", out_path = "out.csv";
  std::vector<double> coeffs;
  double sigma = 1.0, dt = 1e-3, t_end = 1.0, h = 0.01, mean = 0.0, t_probe = 1.0;
  std::uint64_t seed = 42;
  int n = 1000, count = 10000, n_max = 5000, record_every = 1;
  bool summary = false;
  std::string x_grid, config_path, out_dir;

  auto add_flux = [&](CLI::App* cmd) {
    cmd->add_option("--flux", flux_kind, "burgers|cubic|poly");
    cmd->add_option("--coeffs", coeffs, "ascending-power coefficients (poly flux)")->delimiter(',');
  };

  auto* sim = app.add_subcommand("simulate", "run the n-particle system");
  add_flux(sim);
  sim->add_option("--sigma", sigma);
  sim->add_option("--n", n);
  sim->add_option("--dt", dt);
  sim->add_option("--t-end", t_end);
  sim->add_option("--seed", seed);
  sim->add_option("--init", init, "gaussian:mu,sd | uniform:a,b | file:path");
  sim->add_option("--out", out_path)->required();
  sim->add_flag("--summary", summary, "emit time,mean,var,min,max instead of full positions");
  sim->add_option("--record-every", record_every)->check(CLI::PositiveNumber);

  auto* pde = app.add_subcommand("solve-pde", "finite-difference conservation-law solver");
  pde->set_help_flag("--help", "print help");  // frees -h for the grid spacing
  add_flux(pde);
  pde->add_option("--sigma", sigma);
  pde->add_option("--init", init);
  pde->add_option("--t-end", t_end);
  pde->add_option("--h", h);
  double pde_dt = -1.0;
  pde->add_option("--dt", pde_dt, "time step (default: CFL maximum)");
  pde->add_option("--out", out_path)->required();

  auto* ch = app.add_subcommand("cole-hopf", "exact Burgers solution");
  ch->add_option("--sigma", sigma);
  ch->add_option("--t", t_probe)->required();
  ch->add_option("--init", init);
  ch->add_option("--x-grid", x_grid, "lo:hi:h (default: the initial grid)");
  ch->add_option("--out", out_path)->required();

  auto* st = app.add_subcommand("stationary", "stationary profile by RK4 shooting");
  add_flux(st);
  st->add_option("--sigma", sigma);
  st->add_option("--mean", mean);
  st->add_option("--out", out_path)->required();

  auto* si = app.add_subcommand("sample-invariant", "exact draws from the invariant law");
  add_flux(si);
  si->add_option("--n", n);
  si->add_option("--sigma", sigma);
  si->add_option("--count", count);
  si->add_option("--seed", seed);
  si->add_option("--mean", mean);
  si->add_option("--out", out_path)->required();

  auto* sp = app.add_subcommand("spectral", "eigenvalue sweep of Q^n");
  sp->add_option("--n-max", n_max);
  sp->add_option("--out", out_path);
  auto* spi = sp->add_subcommand("identities", "dense matrix identity checks");
  int id_n = 50;
  spi->add_option("--n", id_n);

  auto* ex = app.add_subcommand("experiment", "run a named experiment from a config file");
  std::string ex_name;
  ex->add_option("name", ex_name, "chaos|projected-chaos|ordering|mean-conservation|longtime|invariant|spectral")
      ->required();
  ex->add_option("--config", config_path, "flat key=value config file");
  ex->add_option("--out", out_dir, "output directory");

  CLI11_PARSE(app, argc, argv);
  set_threads(threads);

  try {
    if (sim->parsed())
      return cmd_simulate(flux_kind, coeffs, sigma, n, dt, t_end, seed, init, out_path, summary,
                          record_every);
    if (pde->parsed())
      return cmd_solve_pde(flux_kind, coeffs, sigma, init, t_end, h, pde_dt, out_path);
    if (ch->parsed()) return cmd_cole_hopf(sigma, t_probe, init, x_grid, out_path);
    if (st->parsed()) return cmd_stationary(flux_kind, coeffs, sigma, mean, out_path);
    if (si->parsed())
      return cmd_sample_invariant(flux_kind, coeffs, n, sigma, count, seed, mean, out_path);
    if (sp->parsed()) {
      if (spi->parsed()) return cmd_spectral_identities(id_n);
      return cmd_spectral(n_max, out_path);
    }
    if (ex->parsed()) return cmd_experiment(ex_name, config_path, out_dir);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
