#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "doctest.h"
#include "rankdiff/experiments.hpp"
#include "rankdiff/table.hpp"

using namespace rankdiff;

TEST_CASE("CSV body: quoting and round trip") {
  ResultTable t;
  t.add("demo", "n=3;label=\"a,b\"", "value with, comma", 1.5, 0.25);
  t.add("demo", "n=4", "plain", -2.0);
  const std::string body = csv_body(t);
  const auto rows = parse_csv_body(body);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].params == "n=3;label=\"a,b\"");
  CHECK(rows[0].statistic == "value with, comma");
  CHECK(rows[0].value == 1.5);
  CHECK(rows[0].std_error == 0.25);
  CHECK(rows[1].experiment == "demo");
  CHECK(rows[1].value == -2.0);

  ResultTable empty;
  CHECK(csv_body(empty) == "experiment,params,statistic,value,std_error\n");
  CHECK(parse_csv_body(csv_body(empty)).empty());
}

TEST_CASE("emit writes CSV plus JSON sidecar and round-trips") {
  ResultTable t;
  t.seed = 123;
  t.config_dump = "sigma=1\nseed=123\n";
  t.add("demo", "n=2", "stat", 3.14159, 0.01);
  const std::string path = "emit_test_output.csv";
  emit(t, path);
  std::ifstream csv(path, std::ios::binary);
  std::ostringstream buf;
  buf << csv.rdbuf();
  CHECK(buf.str() == csv_body(t));
  std::ifstream sidecar(path + ".json");
  CHECK(sidecar.good());
  std::ostringstream jbuf;
  jbuf << sidecar.rdbuf();
  CHECK(jbuf.str().find("\"seed\": 123") != std::string::npos);
  std::remove(path.c_str());
  std::remove((path + ".json").c_str());
}

TEST_CASE("config parsing: defaults, comments, round trip, bad input") {
  const ExperimentConfig cfg = parse_config(
      "# comment\n"
      "experiment=longtime\n"
      "sigma = 2.0\n"
      "n_list=2, 10\n"
      "flux_kind=burgers\n"
      "seed=77\n");
  CHECK(cfg.experiment == ExperimentKind::LongTimePDE);
  CHECK(cfg.sigma == 2.0);
  CHECK(cfg.n_list == std::vector<int>{2, 10});
  CHECK(cfg.seed == 77);
  CHECK(cfg.dt == 1e-3);  // untouched default

  const ExperimentConfig again = parse_config(cfg.dump());
  CHECK(again.dump() == cfg.dump());

  CHECK_THROWS_AS(parse_config("nonsense=1\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse_config("replications=0\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse_config("dt=2\nt_end=1\n"), std::invalid_argument);
}

TEST_CASE("experiments are pure functions of (config, seed)") {
  ExperimentConfig cfg;
  cfg.experiment = ExperimentKind::MeanConservation;
  cfg.n_list = {50};
  cfg.t_end = 0.5;
  cfg.seed = 5;
  const std::string a = csv_body(run_mean_conservation(cfg));
  const std::string b = csv_body(run_mean_conservation(cfg));
  CHECK(a == b);
  cfg.seed = 6;
  CHECK(csv_body(run_mean_conservation(cfg)) != a);
}

TEST_CASE("small chaos run honors the proved bound") {
  ExperimentConfig cfg;
  cfg.experiment = ExperimentKind::ChaosRate;
  cfg.n_list = {16, 64};
  cfg.replications = 60;
  cfg.dt = 5e-3;
  cfg.t_end = 0.5;
  cfg.grid_h = 0.02;
  cfg.seed = 31;
  const ResultTable t = run_chaos_experiment(cfg);
  CHECK(invariant_violations(t).empty());
  // estimate rows exist for both n and carry standard errors.
  int with_se = 0;
  for (const auto& r : t.rows)
    if (r.statistic == "sup_sq_estimate") {
      CHECK(r.std_error > 0.0);
      ++with_se;
    }
  CHECK(with_se == 2);
}

TEST_CASE("projected chaos: A = 0 degenerates to projected Brownian motion") {
  ExperimentConfig cfg;
  cfg.experiment = ExperimentKind::ProjectedChaos;
  cfg.flux_kind = "polynomial";
  cfg.flux_coeffs = {0.0, 0.0};
  cfg.n_list = {50};
  cfg.replications = 150;
  cfg.dt = 5e-3;
  cfg.t_end = 0.5;
  cfg.grid_h = 0.02;
  cfg.seed = 13;
  const ResultTable t = run_projected_chaos(cfg);
  double est = 0.0, se = 0.0;
  for (const auto& r : t.rows)
    if (r.statistic == "estimate") {
      est = r.value;
      se = r.std_error;
    }
  // (1/n)(E(X0 - xbar)^2 + sigma^2 t): the projection error of independent
  // Brownian particles.
  const double expected = (1.0 + 0.5) / 50.0;
  CHECK(std::abs(est - expected) <= 4.0 * se);
  CHECK(invariant_violations(t).empty());
}

TEST_CASE("ordering experiment: constant gap, full ordering") {
  ExperimentConfig cfg;
  cfg.experiment = ExperimentKind::Ordering;
  cfg.replications = 500;
  cfg.dt = 2e-3;
  cfg.t_end = 0.5;
  cfg.grid_h = 0.02;
  cfg.seed = 17;
  const ResultTable t = run_ordering(cfg);
  CHECK(invariant_violations(t).empty());
  for (const auto& r : t.rows)
    if (r.statistic == "ordered_fraction") CHECK(r.value == 1.0);
}

TEST_CASE("longtime: chi^2 decays monotonically with G bounded by it") {
  ExperimentConfig cfg;
  cfg.experiment = ExperimentKind::LongTimePDE;
  cfg.t_end = 3.0;
  cfg.grid_h = 0.02;
  cfg.seed = 1;
  const ResultTable t = run_longtime(cfg);
  CHECK(invariant_violations(t).empty());
  double rate = 0.0;
  for (const auto& r : t.rows)
    if (r.statistic == "decay_rate") rate = r.value;
  CHECK(rate > 0.1);
}

TEST_CASE("invariant agreement: sampler start stays stationary") {
  ExperimentConfig cfg;
  cfg.experiment = ExperimentKind::InvariantAgreement;
  cfg.n_list = {2};
  cfg.replications = 800;
  cfg.dt = 5e-3;
  cfg.t_end = 2.0;
  cfg.start_mode = "sampler";
  cfg.seed = 23;
  const ResultTable t = run_invariant_agreement(cfg);
  for (const auto& r : t.rows) {
    if (r.statistic == "gap_ks") CHECK(r.value < 0.08);
    if (r.statistic == "gap_rate") CHECK(r.value == doctest::Approx(0.5));
  }
}

TEST_CASE("spectral sweep runner") {
  ExperimentConfig cfg;
  cfg.experiment = ExperimentKind::SpectralSweep;
  cfg.n_list = {60};  // single entry = sweep 2..60
  const ResultTable t = run_spectral_sweep(cfg);
  CHECK(invariant_violations(t).empty());
  int rows_per_n = 0;
  for (const auto& r : t.rows)
    if (r.statistic == "lambda_tilde") ++rows_per_n;
  CHECK(rows_per_n == 59);
}
