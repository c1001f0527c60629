#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "rankdiff/rng.hpp"
#include "rankdiff/spectral.hpp"

using namespace rankdiff;

TEST_CASE("Q matrix entries for n = 4") {
  // b = (3/4, 1, 3/4); diag = 2 b_i^2, off = -b_i b_{i+1}.
  const Tridiagonal q = build_q_matrix(4);
  REQUIRE(q.size() == 3);
  CHECK(std::abs(q.diag[0] - 1.125) < 1e-12);
  CHECK(std::abs(q.diag[1] - 2.0) < 1e-12);
  CHECK(std::abs(q.diag[2] - 1.125) < 1e-12);
  CHECK(std::abs(q.off[0] - (-0.75)) < 1e-12);
  CHECK(std::abs(q.off[1] - (-0.75)) < 1e-12);
}

TEST_CASE("smallest eigenvalues: exact small-n values") {
  CHECK(std::abs(smallest_eigenvalue(build_q_matrix(2)) - 0.5) < 1e-12);
  CHECK(std::abs((smallest_eigenvalue(build_q_matrix(3))) - (4.0 / 9.0)) < 1e-12);
}

TEST_CASE("Sturm bisection agrees with a dense eigensolver") {
  for (int n : {4, 7, 12, 25, 50}) {
    const Tridiagonal q = build_q_matrix(n);
    Eigen::MatrixXd dense = Eigen::MatrixXd::Zero(n - 1, n - 1);
    for (int i = 0; i < n - 1; ++i) {
      dense(i, i) = q.diag[static_cast<std::size_t>(i)];
      if (i + 1 < n - 1) {
        dense(i, i + 1) = q.off[static_cast<std::size_t>(i)];
        dense(i + 1, i) = q.off[static_cast<std::size_t>(i)];
      }
    }
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dense);
    CHECK(std::abs((smallest_eigenvalue(q)) - (es.eigenvalues()(0))) < 1e-10);
  }
}

TEST_CASE("uniform lower bound holds well past the asymptotic regime") {
  std::vector<int> ns;
  for (int n = 2; n <= 500; ++n) ns.push_back(n);
  for (const auto& rep : verify_lambda_bound(ns, 1.0, 1.0)) {
    CHECK(rep.bound_ok);
    CHECK(rep.lambda_tilde >= 1.0 / 432.0);
    CHECK(rep.lambda_lower == doctest::Approx(0.25 * rep.lambda_tilde));
  }
}

TEST_CASE("matrix identities across sizes") {
  for (int n : {3, 4, 10, 57, 200}) {
    const IdentityReport rep = verify_matrix_identities(n);
    CHECK(rep.mr_equals_l);
    CHECK(rep.det_m_is_n);
    CHECK(rep.m_inverse_ok);
    CHECK(rep.ntn_inverse_is_l);
    CHECK(rep.max_error <= 1e-8 * n);
  }
}

TEST_CASE("Q is the inverse of Nbar^T Nbar") {
  CHECK(q_matrix_dense_discrepancy(5) < 1e-10);
  CHECK(q_matrix_dense_discrepancy(40) < 1e-10);
  CHECK(q_matrix_dense_discrepancy(150) < 1e-8);
}

TEST_CASE("Hardy integrals: hand-computed piecewise-linear cases") {
  // u = 1 on [0,1]: lhs = 1, rhs = 16 int (1-2x)^2 = 16/3.
  auto [lhs1, rhs1] = verify_hardy({0.0, 1.0}, {1.0, 1.0});
  CHECK(lhs1 == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(rhs1 == doctest::Approx(16.0 / 3.0).epsilon(1e-14));

  // u = x: lhs = 1/3; (x^2 - x^3)' = 2x - 3x^2, rhs = 16 * 2/15 = 32/15.
  auto [lhs2, rhs2] = verify_hardy({0.0, 1.0}, {0.0, 1.0});
  CHECK(lhs2 == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  CHECK(rhs2 == doctest::Approx(32.0 / 15.0).epsilon(1e-14));

  // Splitting the interval must not change the exact integrals.
  auto [lhs3, rhs3] = verify_hardy({0.0, 0.3, 0.55, 1.0}, {0.0, 0.3, 0.55, 1.0});
  CHECK(lhs3 == doctest::Approx(lhs2).epsilon(1e-13));
  CHECK(rhs3 == doctest::Approx(rhs2).epsilon(1e-13));
}

TEST_CASE("Hardy inequality on random piecewise-linear functions") {
  for (std::uint64_t run = 0; run < 300; ++run) {
    const std::uint64_t key = rng::stream_key(2024, run);
    const int cells = 1 + static_cast<int>(rng::draw_bits(key, 0) % 20);
    std::vector<double> nodes{0.0}, u;
    for (int i = 1; i < cells; ++i)
      nodes.push_back(rng::uniform01(key, 10 + static_cast<std::uint64_t>(i)));
    nodes.push_back(1.0);
    std::sort(nodes.begin(), nodes.end());
    nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
    for (std::size_t i = 0; i < nodes.size(); ++i)
      u.push_back(4.0 * rng::uniform01(key, 100 + i) - 2.0);
    const auto [lhs, rhs] = verify_hardy(nodes, u);
    CHECK(lhs <= rhs * (1.0 + 1e-12));
  }
}
