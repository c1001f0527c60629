#include "rankdiff/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "rankdiff/grid.hpp"
#include "rankdiff/particles.hpp"
#include "rankdiff/pde.hpp"
#include "rankdiff/rng.hpp"
#include "rankdiff/spectral.hpp"
#include "rankdiff/stationary.hpp"
#include "rankdiff/stats.hpp"
#include "rankdiff/table.hpp"

namespace rankdiff {

namespace {

std::string fmt(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

std::string fmt_full(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

double max_a_prime(const FluxFunction& flux) {
  double m = 0.0;
  for (int i = 0; i <= 1000; ++i) m = std::max(m, std::abs(flux.a_prime(i / 1000.0)));
  return m;
}

// Domain wide enough for a Gaussian start evolved for time t: diffusion
// widens the law, the drift translates it by at most max|A'| t.
std::pair<double, double> schedule_domain(const ExperimentConfig& cfg, const FluxFunction& flux,
                                          double t) {
  const double sd_t = std::sqrt(cfg.init_sd * cfg.init_sd + cfg.sigma * cfg.sigma * t);
  const double r = 6.0 * sd_t + max_a_prime(flux) * t + 1.0;
  return {cfg.init_mu - r, cfg.init_mu + r};
}

ResultTable make_table(const ExperimentConfig& cfg) {
  ResultTable t;
  t.seed = cfg.seed;
  t.config_dump = cfg.dump();
  return t;
}

// Collects the first error thrown inside a parallel loop; OpenMP regions must
// not let exceptions escape.
struct ErrorOnce {
  std::string message;
  bool failed = false;

  void capture(const std::exception& e) {
#pragma omp critical(rankdiff_error_once)
    {
      if (!failed) {
        failed = true;
        message = e.what();
      }
    }
  }
  void rethrow() const {
    if (failed) throw std::runtime_error(message);
  }
};

// Per-replication statistics of the particle/nonlinear coupling.
struct CouplingStats {
  double mean_sup_sq = 0.0;    // mean_i sup_k (X^{i,n}_k - X^i_k)^2
  double projected_final = 0.0;  // (1/n) sum_i (Y^i_T - X^i_T)^2
};

CouplingStats run_coupled_replication(const ExperimentConfig& cfg, const FluxFunction& flux,
                                      const PdeSchedule& schedule, int n,
                                      std::uint64_t rep_seed) {
  const std::uint64_t init_key = rng::stream_key(rep_seed, 0x696e6974ull);
  std::vector<double> positions(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    positions[static_cast<std::size_t>(i)] =
        cfg.init_mu + cfg.init_sd * rng::normal(init_key, static_cast<std::uint64_t>(i));

  ParticleEnsemble ensemble = make_ensemble(positions, cfg.sigma, flux, rep_seed);
  std::vector<NonlinearPath> paths(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    auto& p = paths[static_cast<std::size_t>(i)];
    p.position = positions[static_cast<std::size_t>(i)];
    p.rng_key = rng::stream_key(rep_seed, static_cast<std::uint64_t>(i));
  }

  std::vector<double> sup_sq(static_cast<std::size_t>(n), 0.0);
  for (int k = 0; k < schedule.steps(); ++k) {
    const GridProfile& f_now = schedule.at(k);
    step(ensemble, cfg.dt);
    for (int i = 0; i < n; ++i) {
      auto& p = paths[static_cast<std::size_t>(i)];
      simulate_nonlinear_step(p, f_now, flux, cfg.sigma, cfg.dt);
      const double d = ensemble.positions[static_cast<std::size_t>(i)] - p.position;
      auto& s = sup_sq[static_cast<std::size_t>(i)];
      s = std::max(s, d * d);
    }
  }

  CouplingStats out;
  out.mean_sup_sq =
      std::accumulate(sup_sq.begin(), sup_sq.end(), 0.0) / static_cast<double>(n);
  const ParticleEnsemble projected = project_to_mean_hyperplane(ensemble, cfg.init_mu);
  double acc = 0.0;
  for (int i = 0; i < n; ++i) {
    const double d =
        projected.positions[static_cast<std::size_t>(i)] - paths[static_cast<std::size_t>(i)].position;
    acc += d * d;
  }
  out.projected_final = acc / static_cast<double>(n);
  return out;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

ExperimentKind experiment_kind_from_string(const std::string& name) {
  if (name == "chaos") return ExperimentKind::ChaosRate;
  if (name == "projected-chaos") return ExperimentKind::ProjectedChaos;
  if (name == "ordering") return ExperimentKind::Ordering;
  if (name == "mean-conservation") return ExperimentKind::MeanConservation;
  if (name == "longtime") return ExperimentKind::LongTimePDE;
  if (name == "invariant") return ExperimentKind::InvariantAgreement;
  if (name == "spectral") return ExperimentKind::SpectralSweep;
  throw std::invalid_argument("unknown experiment '" + name + "'");
}

std::string to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::ChaosRate: return "chaos";
    case ExperimentKind::ProjectedChaos: return "projected-chaos";
    case ExperimentKind::Ordering: return "ordering";
    case ExperimentKind::MeanConservation: return "mean-conservation";
    case ExperimentKind::LongTimePDE: return "longtime";
    case ExperimentKind::InvariantAgreement: return "invariant";
    case ExperimentKind::SpectralSweep: return "spectral";
  }
  throw std::logic_error("to_string(ExperimentKind)");
}

FluxFunction ExperimentConfig::build_flux() const {
  if (flux_kind == "burgers") return FluxFunction::burgers();
  if (flux_kind == "cubic") return FluxFunction::cubic();
  if (flux_kind == "polynomial") return FluxFunction::polynomial(flux_coeffs);
  throw std::invalid_argument("unknown flux kind '" + flux_kind + "'");
}

void ExperimentConfig::validate() const {
  if (replications < 1) throw std::invalid_argument("config: replications >= 1");
  if (!(dt > 0.0)) throw std::invalid_argument("config: dt > 0");
  if (t_end < dt) throw std::invalid_argument("config: t_end >= dt");
  if (!(sigma > 0.0)) throw std::invalid_argument("config: sigma > 0");
  if (!(grid_h > 0.0)) throw std::invalid_argument("config: grid_h > 0");
  if (!(init_sd > 0.0)) throw std::invalid_argument("config: init_sd > 0");
  if (n_list.empty()) throw std::invalid_argument("config: n_list nonempty");
  for (int n : n_list)
    if (n < 2) throw std::invalid_argument("config: every n >= 2");
  if (start_mode != "spread" && start_mode != "sampler")
    throw std::invalid_argument("config: start_mode is spread|sampler");
}

std::string ExperimentConfig::dump() const {
  std::ostringstream os;
  os << "experiment=" << to_string(experiment) << '\n';
  os << "flux_kind=" << flux_kind << '\n';
  os << "flux_coeffs=";
  for (std::size_t i = 0; i < flux_coeffs.size(); ++i)
    os << (i ? "," : "") << fmt_full(flux_coeffs[i]);
  os << '\n';
  os << "sigma=" << fmt_full(sigma) << '\n';
  os << "n_list=";
  for (std::size_t i = 0; i < n_list.size(); ++i) os << (i ? "," : "") << n_list[i];
  os << '\n';
  os << "dt=" << fmt_full(dt) << '\n';
  os << "t_end=" << fmt_full(t_end) << '\n';
  os << "replications=" << replications << '\n';
  os << "seed=" << seed << '\n';
  os << "out=" << out << '\n';
  os << "init_mu=" << fmt_full(init_mu) << '\n';
  os << "init_sd=" << fmt_full(init_sd) << '\n';
  os << "grid_h=" << fmt_full(grid_h) << '\n';
  os << "start_mode=" << start_mode << '\n';
  os << "perturbation=" << fmt_full(perturbation) << '\n';
  return os.str();
}

ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig cfg;
  std::istringstream lines(text);
  std::string line;
  int line_no = 0;
  while (std::getline(lines, line)) {
    ++line_no;
    const std::string stripped = trim(line);
    if (stripped.empty() || stripped[0] == '#') continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line " + std::to_string(line_no) + ": expected key=value");
    const std::string key = trim(stripped.substr(0, eq));
    const std::string value = trim(stripped.substr(eq + 1));
    if (key == "experiment") {
      cfg.experiment = experiment_kind_from_string(value);
    } else if (key == "flux_kind") {
      cfg.flux_kind = value;
    } else if (key == "flux_coeffs") {
      cfg.flux_coeffs.clear();
      if (!value.empty())
        for (const auto& tok : split(value, ',')) cfg.flux_coeffs.push_back(std::stod(trim(tok)));
    } else if (key == "sigma") {
      cfg.sigma = std::stod(value);
    } else if (key == "n_list") {
      cfg.n_list.clear();
      for (const auto& tok : split(value, ',')) cfg.n_list.push_back(std::stoi(trim(tok)));
    } else if (key == "dt") {
      cfg.dt = std::stod(value);
    } else if (key == "t_end") {
      cfg.t_end = std::stod(value);
    } else if (key == "replications") {
      cfg.replications = std::stoi(value);
    } else if (key == "seed") {
      cfg.seed = std::stoull(value);
    } else if (key == "out") {
      cfg.out = value;
    } else if (key == "init_mu") {
      cfg.init_mu = std::stod(value);
    } else if (key == "init_sd") {
      cfg.init_sd = std::stod(value);
    } else if (key == "grid_h") {
      cfg.grid_h = std::stod(value);
    } else if (key == "start_mode") {
      cfg.start_mode = value;
    } else if (key == "perturbation") {
      cfg.perturbation = std::stod(value);
    } else {
      throw std::invalid_argument("config line " + std::to_string(line_no) + ": unknown key '" +
                                  key + "'");
    }
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open config file " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

ResultTable run_experiment(const ExperimentConfig& config) {
  switch (config.experiment) {
    case ExperimentKind::ChaosRate: return run_chaos_experiment(config);
    case ExperimentKind::ProjectedChaos: return run_projected_chaos(config);
    case ExperimentKind::Ordering: return run_ordering(config);
    case ExperimentKind::MeanConservation: return run_mean_conservation(config);
    case ExperimentKind::LongTimePDE: return run_longtime(config);
    case ExperimentKind::InvariantAgreement: return run_invariant_agreement(config);
    case ExperimentKind::SpectralSweep: return run_spectral_sweep(config);
  }
  throw std::logic_error("run_experiment: bad kind");
}

ResultTable run_chaos_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const FluxFunction flux = cfg.build_flux();
  if (!flux.is_convex()) throw std::invalid_argument("chaos experiment requires a convex flux");
  const double k_lip = flux.lipschitz_k();
  const int steps = static_cast<int>(std::llround(cfg.t_end / cfg.dt));
  const auto [lo, hi] = schedule_domain(cfg, flux, cfg.t_end);
  const PdeSchedule schedule(gaussian_profile(cfg.init_mu, cfg.init_sd, lo, hi, cfg.grid_h), flux,
                             cfg.sigma, cfg.dt, steps);

  ResultTable table = make_table(cfg);
  std::vector<double> log_n, log_est;
  for (std::size_t ni = 0; ni < cfg.n_list.size(); ++ni) {
    const int n = cfg.n_list[ni];
    std::vector<double> sup_means(static_cast<std::size_t>(cfg.replications));
    ErrorOnce err;
#pragma omp parallel for schedule(dynamic)
    for (int r = 0; r < cfg.replications; ++r) {
      try {
        const std::uint64_t rep_seed =
            rng::stream_key(cfg.seed, 0xc0 + ni, static_cast<std::uint64_t>(r));
        sup_means[static_cast<std::size_t>(r)] =
            run_coupled_replication(cfg, flux, schedule, n, rep_seed).mean_sup_sq;
      } catch (const std::exception& e) {
        err.capture(e);
      }
    }
    err.rethrow();
    const auto ms = stats::mean_se(sup_means);
    const double bound = k_lip * k_lip * cfg.t_end * cfg.t_end / (6.0 * n);
    const std::string params = "n=" + std::to_string(n) + ";t=" + fmt(cfg.t_end);
    table.add("chaos", params, "sup_sq_estimate", ms.mean, ms.se);
    table.add("chaos", params, "bound", bound);
    table.add("chaos", params, "ratio_to_bound", ms.mean / bound);
    log_n.push_back(std::log(static_cast<double>(n)));
    log_est.push_back(std::log(std::max(ms.mean, 1e-300)));
  }
  if (log_n.size() >= 2) {
    const auto fit = stats::fit_line(log_n, log_est);
    const std::string params = "t=" + fmt(cfg.t_end);
    table.add("chaos", params, "loglog_slope", fit.slope);
    table.add("chaos", params, "loglog_r_squared", fit.r_squared);
  }
  return table;
}

ResultTable run_projected_chaos(const ExperimentConfig& cfg) {
  cfg.validate();
  const FluxFunction flux = cfg.build_flux();
  if (!flux.is_convex())
    throw std::invalid_argument("projected chaos experiment requires a convex flux");
  if (std::abs(flux.a(1.0)) > 1e-12)
    throw std::invalid_argument("projected chaos experiment requires A(1) = 0");
  const double k_lip = flux.lipschitz_k();
  const int steps = static_cast<int>(std::llround(cfg.t_end / cfg.dt));
  const auto [lo, hi] = schedule_domain(cfg, flux, cfg.t_end);
  const PdeSchedule schedule(gaussian_profile(cfg.init_mu, cfg.init_sd, lo, hi, cfg.grid_h), flux,
                             cfg.sigma, cfg.dt, steps);

  // Trapezoid in time over the schedule's trapezoid-in-space integrals.
  double double_integral = 0.0;
  for (int k = 0; k <= steps; ++k) {
    const double w = (k == 0 || k == steps) ? 0.5 : 1.0;
    double_integral += w * schedule.flux_integral(flux, k) * cfg.dt;
  }

  ResultTable table = make_table(cfg);
  const std::string tparams = "t=" + fmt(cfg.t_end);
  const double second_moment = cfg.init_sd * cfg.init_sd;
  const double bound_sum = k_lip * k_lip * cfg.t_end * cfg.t_end / 6.0 + second_moment +
                           cfg.sigma * cfg.sigma * cfg.t_end + 2.0 * double_integral;
  table.add("projected-chaos", tparams, "bound_k2t2_over_6",
            k_lip * k_lip * cfg.t_end * cfg.t_end / 6.0);
  table.add("projected-chaos", tparams, "bound_second_moment", second_moment);
  table.add("projected-chaos", tparams, "bound_sigma2_t", cfg.sigma * cfg.sigma * cfg.t_end);
  table.add("projected-chaos", tparams, "bound_flux_double_integral", 2.0 * double_integral);

  for (std::size_t ni = 0; ni < cfg.n_list.size(); ++ni) {
    const int n = cfg.n_list[ni];
    std::vector<double> finals(static_cast<std::size_t>(cfg.replications));
    ErrorOnce err;
#pragma omp parallel for schedule(dynamic)
    for (int r = 0; r < cfg.replications; ++r) {
      try {
        const std::uint64_t rep_seed =
            rng::stream_key(cfg.seed, 0xd0 + ni, static_cast<std::uint64_t>(r));
        finals[static_cast<std::size_t>(r)] =
            run_coupled_replication(cfg, flux, schedule, n, rep_seed).projected_final;
      } catch (const std::exception& e) {
        err.capture(e);
      }
    }
    err.rethrow();
    const auto ms = stats::mean_se(finals);
    const std::string params = "n=" + std::to_string(n) + ";t=" + fmt(cfg.t_end);
    table.add("projected-chaos", params, "estimate", ms.mean, ms.se);
    table.add("projected-chaos", params, "bound", bound_sum / n);
    table.add("projected-chaos", params, "ratio_to_bound", ms.mean / (bound_sum / n));
  }
  return table;
}

ResultTable run_ordering(const ExperimentConfig& cfg) {
  cfg.validate();
  const FluxFunction flux = cfg.build_flux();
  const int steps = static_cast<int>(std::llround(cfg.t_end / cfg.dt));
  const auto [lo, hi] = schedule_domain(cfg, flux, cfg.t_end);

  // Second initial law: the push-forward of m under the increasing map
  // g(x) = x + 0.2 + 0.3 Phi(x), so g(X) > X gives genuine (non-translate)
  // stochastic domination. Its CDF is m's CDF at g^{-1}(y), by bisection.
  const auto g_map = [](double x) { return x + 0.2 + 0.3 * stats::norm_cdf(x); };
  const double shift_hi = 0.5;
  GridProfile f0 = gaussian_profile(cfg.init_mu, cfg.init_sd, lo, hi + shift_hi, cfg.grid_h);
  GridProfile g0 = f0;
  for (std::size_t i = 0; i < g0.size(); ++i) {
    const double y = g0.x_at(i);
    double a = y - shift_hi - 1e-9, b = y - 0.2 + 1e-9;
    for (int it = 0; it < 80; ++it) {
      const double m = 0.5 * (a + b);
      (g_map(m) < y ? a : b) = m;
    }
    g0.values[i] = stats::norm_cdf((0.5 * (a + b) - cfg.init_mu) / cfg.init_sd);
  }
  g0.validate();
  const PdeSchedule sched_x(f0, flux, cfg.sigma, cfg.dt, steps);
  const PdeSchedule sched_y(g0, flux, cfg.sigma, cfg.dt, steps);

  const int kRecorded = 5;
  std::vector<int> record_steps(kRecorded);
  for (int j = 0; j < kRecorded; ++j) record_steps[j] = steps * j / (kRecorded - 1);

  std::vector<std::vector<double>> abs_gap(kRecorded,
                                           std::vector<double>(cfg.replications));
  std::vector<std::vector<double>> ordered(kRecorded,
                                           std::vector<double>(cfg.replications));
  ErrorOnce err;
#pragma omp parallel for schedule(dynamic)
  for (int r = 0; r < cfg.replications; ++r) {
    try {
      const std::uint64_t quantile_key = rng::stream_key(cfg.seed, 0xe0);
      const double u = rng::uniform01(quantile_key, static_cast<std::uint64_t>(r));
      const double x0 = cfg.init_mu + cfg.init_sd * stats::norm_quantile(u);
      NonlinearPath px{x0, 0.0, rng::stream_key(cfg.seed, 0xe1, static_cast<std::uint64_t>(r)), 0};
      NonlinearPath py{g_map(x0), 0.0, px.rng_key, 0};  // same key: shared Brownian increments
      int rec = 0;
      for (int k = 0; k <= steps; ++k) {
        if (rec < kRecorded && k == record_steps[rec]) {
          abs_gap[static_cast<std::size_t>(rec)][static_cast<std::size_t>(r)] =
              std::abs(py.position - px.position);
          ordered[static_cast<std::size_t>(rec)][static_cast<std::size_t>(r)] =
              px.position <= py.position ? 1.0 : 0.0;
          ++rec;
        }
        if (k == steps) break;
        simulate_nonlinear_step(px, sched_x.at(k), flux, cfg.sigma, cfg.dt);
        py.step_index = px.step_index - 1;  // replay the increment px just consumed
        simulate_nonlinear_step(py, sched_y.at(k), flux, cfg.sigma, cfg.dt);
      }
    } catch (const std::exception& e) {
      err.capture(e);
    }
  }
  err.rethrow();

  ResultTable table = make_table(cfg);
  double m0 = 0.0, se0 = 0.0, max_z = 0.0, min_ordered = 1.0;
  for (int j = 0; j < kRecorded; ++j) {
    const double t = record_steps[j] * cfg.dt;
    const auto ms = stats::mean_se(abs_gap[static_cast<std::size_t>(j)]);
    const auto frac = stats::mean_se(ordered[static_cast<std::size_t>(j)]);
    const std::string params = "t=" + fmt(t);
    table.add("ordering", params, "abs_gap_mean", ms.mean, ms.se);
    table.add("ordering", params, "ordered_fraction", frac.mean);
    if (j == 0) {
      m0 = ms.mean;
      se0 = ms.se;
    } else {
      const double z = std::abs(ms.mean - m0) / std::sqrt(ms.se * ms.se + se0 * se0 + 1e-300);
      max_z = std::max(max_z, z);
    }
    min_ordered = std::min(min_ordered, frac.mean);
  }
  table.add("ordering", "summary", "max_constancy_z", max_z);
  table.add("ordering", "summary", "min_ordered_fraction", min_ordered);
  return table;
}

ResultTable run_mean_conservation(const ExperimentConfig& cfg) {
  cfg.validate();
  const FluxFunction flux = cfg.build_flux();
  const int n = cfg.n_list.front();
  const int steps = static_cast<int>(std::llround(cfg.t_end / cfg.dt));

  const std::uint64_t init_key = rng::stream_key(cfg.seed, 0xf0);
  std::vector<double> positions(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    positions[static_cast<std::size_t>(i)] =
        cfg.init_mu + cfg.init_sd * rng::normal(init_key, static_cast<std::uint64_t>(i));
  ParticleEnsemble ensemble = make_ensemble(positions, cfg.sigma, flux, cfg.seed);

  const auto mean_of = [](const std::vector<double>& v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  };
  std::vector<double> increments(static_cast<std::size_t>(steps));
  double prev = mean_of(ensemble.positions);
  for (int k = 0; k < steps; ++k) {
    step(ensemble, cfg.dt);
    const double cur = mean_of(ensemble.positions);
    increments[static_cast<std::size_t>(k)] = (cur - prev) / cfg.dt;
    prev = cur;
  }

  const auto ms = stats::mean_se(increments);
  const double expected = -flux.a(1.0);
  ResultTable table = make_table(cfg);
  const std::string params = "n=" + std::to_string(n) + ";t=" + fmt(cfg.t_end);
  table.add("mean-conservation", params, "measured_drift", ms.mean, ms.se);
  table.add("mean-conservation", params, "expected_drift", expected);
  table.add("mean-conservation", params, "a_at_1", flux.a(1.0));
  table.add("mean-conservation", params, "deviation_in_se",
            std::abs(ms.mean - expected) / (ms.se + 1e-300));
  return table;
}

ResultTable run_longtime(const ExperimentConfig& cfg) {
  cfg.validate();
  const FluxFunction flux = cfg.build_flux();
  if (flux.kind() != FluxKind::Burgers)
    throw std::invalid_argument("longtime experiment needs the exact Burgers evolution");
  const double sigma = cfg.sigma;
  const double s2 = sigma * sigma;
  const double x_bar = cfg.init_mu;
  const double delta = cfg.perturbation < 0.0 ? 0.1 * s2 : cfg.perturbation;

  // Grid covers the region where the stationary density exceeds 1e-9; beyond
  // that the chi^2 integrand falls below the quadrature noise floor.
  const double half_width = 2.0 * s2 * std::acosh(1.0 / (2.0 * sigma * std::sqrt(1e-9))) + delta;
  const double lo = x_bar - half_width, hi = x_bar + half_width;
  const double h = cfg.grid_h;
  const auto n_nodes = static_cast<std::size_t>(std::llround((hi - lo) / h)) + 1;

  // Mean-preserving two-sided mixture of translates of F_inf. A single
  // translate is itself stationary, so it cannot exhibit any decay; the
  // symmetric mixture keeps the mean at x_bar and chi^2 small of order
  // delta^4.
  GridProfile f0;
  f0.x_min = lo;
  f0.h = h;
  f0.values.resize(n_nodes);
  std::vector<double> p_inf(n_nodes), f_inf(n_nodes), p0(n_nodes);
  for (std::size_t i = 0; i < n_nodes; ++i) {
    const double x = f0.x_at(i);
    f0.values[i] = 0.5 * (burgers_logistic_cdf(x - delta, sigma, x_bar) +
                          burgers_logistic_cdf(x + delta, sigma, x_bar));
    p0[i] = 0.5 * (burgers_logistic_density(x - delta, sigma, x_bar) +
                   burgers_logistic_density(x + delta, sigma, x_bar));
    f_inf[i] = burgers_logistic_cdf(x, sigma, x_bar);
    p_inf[i] = burgers_logistic_density(x, sigma, x_bar);
  }
  f0.validate();

  ResultTable table = make_table(cfg);
  table.add("longtime", "t=0", "chi2", chi_square_distance(p0, p_inf, h));

  const int t_count = std::max(1, static_cast<int>(std::llround(cfg.t_end)));
  std::vector<double> times, log_chi2;
  double prev_chi2 = -1.0;
  bool decreasing = true, gsup_ok = true;
  for (int k = 1; k <= t_count; ++k) {
    const double t = static_cast<double>(k);
    const ColeHopfSolution sol = cole_hopf_solve(f0, sigma, t, lo, hi, h);
    const double chi2 = chi_square_distance(sol.density, p_inf, h);
    double gsup = 0.0;
    for (std::size_t i = 0; i < n_nodes; ++i)
      gsup = std::max(gsup, std::abs(sol.cdf.values[i] - f_inf[i]));
    const std::string params = "t=" + fmt(t);
    table.add("longtime", params, "chi2", chi2);
    table.add("longtime", params, "gsup_sq", gsup * gsup);
    if (gsup * gsup > chi2 * (1.0 + 1e-9)) gsup_ok = false;
    if (prev_chi2 >= 0.0 && chi2 >= prev_chi2) decreasing = false;
    prev_chi2 = chi2;
    times.push_back(t);
    log_chi2.push_back(std::log(std::max(chi2, 1e-300)));
  }
  table.add("longtime", "summary", "strictly_decreasing", decreasing ? 1.0 : 0.0);
  table.add("longtime", "summary", "gsup_le_chi2", gsup_ok ? 1.0 : 0.0);
  if (times.size() >= 2) {
    const auto fit = stats::fit_line(times, log_chi2);
    table.add("longtime", "summary", "decay_rate", -fit.slope);
    table.add("longtime", "summary", "r_squared", fit.r_squared);
  }
  return table;
}

ResultTable run_invariant_agreement(const ExperimentConfig& cfg) {
  cfg.validate();
  const FluxFunction flux = cfg.build_flux();
  const double x_bar = cfg.init_mu;
  const int steps = static_cast<int>(std::llround(cfg.t_end / cfg.dt));
  const int reps = cfg.replications;

  ResultTable table = make_table(cfg);
  for (int n : cfg.n_list) {
    const InvariantSampler sampler = make_invariant_sampler(flux, n, x_bar);
    const std::uint64_t oracle_seed = rng::stream_key(cfg.seed, 0xa0, static_cast<std::uint64_t>(n));
    const std::uint64_t start_seed = rng::stream_key(cfg.seed, 0xa1, static_cast<std::uint64_t>(n));

    std::vector<std::vector<double>> oracle(static_cast<std::size_t>(reps));
    std::vector<std::vector<double>> simulated(static_cast<std::size_t>(reps));
    ErrorOnce err;
#pragma omp parallel for schedule(dynamic)
    for (int r = 0; r < reps; ++r) {
      try {
        oracle[static_cast<std::size_t>(r)] =
            sample_invariant_reordered(sampler, cfg.sigma, oracle_seed, static_cast<std::uint64_t>(r));
        std::vector<double> positions;
        if (cfg.start_mode == "sampler") {
          positions = sample_invariant_reordered(sampler, cfg.sigma, start_seed,
                                                 static_cast<std::uint64_t>(r));
        } else {
          const std::uint64_t init_key = rng::stream_key(start_seed, static_cast<std::uint64_t>(r));
          positions.resize(static_cast<std::size_t>(n));
          for (int i = 0; i < n; ++i)
            positions[static_cast<std::size_t>(i)] =
                x_bar + cfg.init_sd * rng::normal(init_key, static_cast<std::uint64_t>(i));
        }
        const std::uint64_t rep_seed =
            rng::stream_key(cfg.seed, 0xa2 + static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(r));
        ParticleEnsemble ensemble = make_ensemble(positions, cfg.sigma, flux, rep_seed);
        for (int k = 0; k < steps; ++k) step(ensemble, cfg.dt);
        ParticleEnsemble projected = project_to_mean_hyperplane(ensemble, x_bar);
        std::sort(projected.positions.begin(), projected.positions.end());
        simulated[static_cast<std::size_t>(r)] = std::move(projected.positions);
      } catch (const std::exception& e) {
        err.capture(e);
      }
    }
    err.rethrow();

    double max_ks = 0.0;
    for (int i = 0; i < n; ++i) {
      std::vector<double> a(static_cast<std::size_t>(reps)), b(static_cast<std::size_t>(reps));
      for (int r = 0; r < reps; ++r) {
        a[static_cast<std::size_t>(r)] = simulated[static_cast<std::size_t>(r)][static_cast<std::size_t>(i)];
        b[static_cast<std::size_t>(r)] = oracle[static_cast<std::size_t>(r)][static_cast<std::size_t>(i)];
      }
      const double ks = stats::ks_two_sample(std::move(a), std::move(b));
      table.add("invariant", "n=" + std::to_string(n) + ";coord=" + std::to_string(i + 1),
                "coordinate_ks", ks);
      max_ks = std::max(max_ks, ks);
    }
    table.add("invariant", "n=" + std::to_string(n), "max_coordinate_ks", max_ks);

    if (n == 2) {
      const auto a2 = drift_coefficients(flux, 2);
      const double rate = (a2[1] - a2[0]) / (cfg.sigma * cfg.sigma);
      std::vector<double> gaps(static_cast<std::size_t>(reps));
      for (int r = 0; r < reps; ++r)
        gaps[static_cast<std::size_t>(r)] =
            simulated[static_cast<std::size_t>(r)][1] - simulated[static_cast<std::size_t>(r)][0];
      const double ks = stats::ks_statistic(
          std::move(gaps), [rate](double z) { return z <= 0.0 ? 0.0 : 1.0 - std::exp(-rate * z); });
      table.add("invariant", "n=2", "gap_ks", ks);
      table.add("invariant", "n=2", "gap_rate", rate);
    }
  }
  return table;
}

ResultTable run_spectral_sweep(const ExperimentConfig& cfg) {
  cfg.validate();
  const FluxFunction flux = cfg.build_flux();
  std::vector<int> ns;
  if (cfg.n_list.size() == 1) {
    for (int n = 2; n <= cfg.n_list.front(); ++n) ns.push_back(n);
  } else {
    ns = cfg.n_list;
  }
  const auto reports = verify_lambda_bound(ns, flux.alpha(), cfg.sigma);

  ResultTable table = make_table(cfg);
  double min_lambda = 1e300;
  bool all_ok = true;
  for (const auto& rep : reports) {
    const std::string params = "n=" + std::to_string(rep.n);
    table.add("spectral", params, "lambda_tilde", rep.lambda_tilde);
    table.add("spectral", params, "lambda_lower", rep.lambda_lower);
    table.add("spectral", params, "bound_ok", rep.bound_ok ? 1.0 : 0.0);
    min_lambda = std::min(min_lambda, rep.lambda_tilde);
    all_ok = all_ok && rep.bound_ok;
  }
  table.add("spectral", "summary", "min_lambda_tilde", min_lambda);
  table.add("spectral", "summary", "all_bounds_ok", all_ok ? 1.0 : 0.0);
  return table;
}

std::vector<std::string> invariant_violations(const ResultTable& table) {
  std::vector<std::string> out;
  const auto find = [&](const std::string& params, const std::string& stat) -> const ResultRow* {
    for (const auto& r : table.rows)
      if (r.params == params && r.statistic == stat) return &r;
    return nullptr;
  };

  for (const auto& r : table.rows) {
    if (r.statistic == "sup_sq_estimate") {
      // Proved bound plus the 0.1 discretization margin and 3 SE of noise.
      const ResultRow* bound = find(r.params, "bound");
      if (bound && r.value > bound->value * 1.1 + 3.0 * r.std_error)
        out.push_back("chaos bound violated at " + r.params);
    } else if (r.statistic == "estimate" && r.experiment == "projected-chaos") {
      const ResultRow* bound = find(r.params, "bound");
      if (bound && r.value > bound->value + 3.0 * r.std_error)
        out.push_back("projected chaos bound violated at " + r.params);
    } else if (r.statistic == "loglog_slope") {
      if (r.value < -1.4 || r.value > -0.6)
        out.push_back("chaos log-log slope " + fmt(r.value) + " outside [-1.4, -0.6]");
    } else if (r.statistic == "max_constancy_z") {
      if (r.value > 3.0)
        out.push_back("ordering: mean |Y-X| drifts by " + fmt(r.value) + " SE");
    } else if (r.statistic == "min_ordered_fraction") {
      if (r.value < 1.0) out.push_back("ordering violated in some replication");
    } else if (r.statistic == "strictly_decreasing") {
      if (r.value != 1.0) out.push_back("longtime: chi^2 not strictly decreasing");
    } else if (r.statistic == "gsup_le_chi2") {
      if (r.value != 1.0) out.push_back("longtime: sup|G|^2 > chi^2");
    } else if (r.statistic == "decay_rate") {
      if (r.value <= 0.0) out.push_back("longtime: non-positive decay rate");
    } else if (r.statistic == "deviation_in_se") {
      const ResultRow* expected = find(r.params, "expected_drift");
      const ResultRow* measured = find(r.params, "measured_drift");
      if (expected && std::abs(expected->value) <= 1e-12) {
        if (r.value > 4.0)
          out.push_back("mean drift " + fmt(r.value) + " SE away from 0 at " + r.params);
      } else if (expected && measured &&
                 std::abs(measured->value - expected->value) > 0.05 * std::abs(expected->value)) {
        out.push_back("mean drift off by more than 5% at " + r.params);
      }
    } else if (r.statistic == "all_bounds_ok") {
      if (r.value != 1.0) out.push_back("spectral: lambda_tilde below 1/432 somewhere");
    }
  }
  return out;
}

}  // namespace rankdiff
