#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rankdiff/flux.hpp"
#include "rankdiff/table.hpp"

namespace rankdiff {

enum class ExperimentKind {
  ChaosRate,
  ProjectedChaos,
  Ordering,
  MeanConservation,
  LongTimePDE,
  InvariantAgreement,
  SpectralSweep,
};

ExperimentKind experiment_kind_from_string(const std::string& name);
std::string to_string(ExperimentKind kind);

struct ExperimentConfig {
  ExperimentKind experiment = ExperimentKind::ChaosRate;
  std::string flux_kind = "burgers";        // burgers | cubic | polynomial
  std::vector<double> flux_coeffs;          // ascending powers, polynomial only
  double sigma = 1.0;
  std::vector<int> n_list = {50, 100, 200, 400};
  double dt = 1e-3;
  double t_end = 1.0;
  int replications = 200;
  std::uint64_t seed = 42;
  std::string out;        // CSV path; empty = caller handles persistence
  double init_mu = 0.0;   // Gaussian initial law m
  double init_sd = 1.0;
  double grid_h = 0.01;          // PDE / quadrature grid spacing
  std::string start_mode = "spread";  // invariant agreement: spread | sampler
  double perturbation = -1.0;    // long-time offset; < 0 means 0.1 sigma^2

  FluxFunction build_flux() const;
  void validate() const;
  std::string dump() const;  // flat key=value lines, one per field
};

// Parses the flat key=value config format (# comments, blank lines ignored).
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config_file(const std::string& path);

// Dispatch on config.experiment. Every runner is a pure function of
// (config, seed): rows are byte-stable across thread counts.
ResultTable run_experiment(const ExperimentConfig& config);

ResultTable run_chaos_experiment(const ExperimentConfig& config);
ResultTable run_projected_chaos(const ExperimentConfig& config);
ResultTable run_ordering(const ExperimentConfig& config);
ResultTable run_mean_conservation(const ExperimentConfig& config);
ResultTable run_longtime(const ExperimentConfig& config);
ResultTable run_invariant_agreement(const ExperimentConfig& config);
ResultTable run_spectral_sweep(const ExperimentConfig& config);

// Post-hoc check of the provable guarantees an experiment's rows must honor
// (chaos bound with margin, ordering constancy, chi^2 monotonicity, ...).
// Empty result means no violation; entries are human-readable descriptions.
std::vector<std::string> invariant_violations(const ResultTable& table);

}  // namespace rankdiff
