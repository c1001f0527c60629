#include "rankdiff/spectral.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

namespace rankdiff {

Tridiagonal build_q_matrix(int n) {
  if (n < 2) throw std::invalid_argument("build_q_matrix: n >= 2");
  const auto m = static_cast<std::size_t>(n) - 1;
  std::vector<double> b(m);
  for (std::size_t i = 0; i < m; ++i) {
    const double di = static_cast<double>(i + 1);
    b[i] = di * (n - di) / n;
  }
  Tridiagonal q;
  q.diag.resize(m);
  q.off.resize(m > 0 ? m - 1 : 0);
  for (std::size_t i = 0; i < m; ++i) q.diag[i] = 2.0 * b[i] * b[i];
  for (std::size_t i = 0; i + 1 < m; ++i) q.off[i] = -b[i] * b[i + 1];
  return q;
}

namespace {

// Number of eigenvalues strictly below x (Sturm count via the LDL^T
// recurrence with the usual underflow guard).
int sturm_count(const Tridiagonal& t, double x) {
  int count = 0;
  double q = 1.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double e2 = i == 0 ? 0.0 : t.off[i - 1] * t.off[i - 1];
    q = t.diag[i] - x - (i == 0 ? 0.0 : e2 / q);
    if (q == 0.0) q = -1e-300;
    if (q < 0.0) ++count;
  }
  return count;
}

}  // namespace

double smallest_eigenvalue(const Tridiagonal& t, double tol) {
  if (tol <= 0.0) throw std::invalid_argument("smallest_eigenvalue: tol > 0");
  if (t.size() == 0) throw std::invalid_argument("smallest_eigenvalue: empty matrix");
  // Gershgorin bracket.
  double lo = t.diag[0], hi = t.diag[0];
  for (std::size_t i = 0; i < t.size(); ++i) {
    double r = 0.0;
    if (i > 0) r += std::abs(t.off[i - 1]);
    if (i + 1 < t.size()) r += std::abs(t.off[i]);
    lo = std::min(lo, t.diag[i] - r);
    hi = std::max(hi, t.diag[i] + r);
  }
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (sturm_count(t, mid) >= 1)
      hi = mid;
    else
      lo = mid;
  }
  return 0.5 * (lo + hi);
}

std::vector<SpectralReport> verify_lambda_bound(const std::vector<int>& n_list, double alpha,
                                                double sigma) {
  std::vector<SpectralReport> out(n_list.size());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t k = 0; k < static_cast<std::ptrdiff_t>(n_list.size()); ++k) {
    SpectralReport r;
    r.n = n_list[static_cast<std::size_t>(k)];
    r.lambda_tilde = smallest_eigenvalue(build_q_matrix(r.n));
    r.lambda_lower = alpha * alpha / (4.0 * sigma * sigma) * r.lambda_tilde;
    r.bound_ok = r.lambda_tilde >= 1.0 / 432.0;
    out[static_cast<std::size_t>(k)] = r;
  }
  return out;
}

namespace {

// The (n-1)x(n-1) change-of-variables matrix M: first row (2,1,...,1),
// then -1/1 bidiagonal rows.
Eigen::MatrixXd build_m(int n) {
  const int m = n - 1;
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(m, m);
  for (int j = 0; j < m; ++j) M(0, j) = j == 0 ? 2.0 : 1.0;
  for (int i = 1; i < m; ++i) {
    M(i, i - 1) = -1.0;
    M(i, i) = 1.0;
  }
  return M;
}

// N is n x (n-1): first row ((1-n)/n, ..., -1/n), below M^{-1}.
Eigen::MatrixXd build_n(int n) {
  const int m = n - 1;
  Eigen::MatrixXd N(n, m);
  for (int j = 0; j < m; ++j) N(0, j) = static_cast<double>(j + 1 - n) / n;
  N.bottomRows(m) = build_m(n).inverse();
  return N;
}

Eigen::MatrixXd build_l(int n) {
  const int m = n - 1;
  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(m, m);
  for (int i = 0; i < m; ++i) {
    L(i, i) = 2.0;
    if (i > 0) L(i, i - 1) = -1.0;
    if (i + 1 < m) L(i, i + 1) = -1.0;
  }
  return L;
}

}  // namespace

IdentityReport verify_matrix_identities(int n) {
  if (n < 2 || n > 2000)
    throw std::invalid_argument("verify_matrix_identities: 2 <= n <= 2000 (dense construction)");
  const int m = n - 1;
  const double tol = 1e-8 * n;

  const Eigen::MatrixXd M = build_m(n);
  const Eigen::MatrixXd Minv = M.inverse();
  const Eigen::MatrixXd L = build_l(n);

  Eigen::MatrixXd R = Eigen::MatrixXd::Zero(m, m);
  for (int i = 0; i < m; ++i) {
    R(i, i) = 1.0;
    if (i + 1 < m) R(i, i + 1) = -1.0;
  }

  IdentityReport rep;
  rep.n = n;
  const double e_inv = (M * Minv - Eigen::MatrixXd::Identity(m, m)).cwiseAbs().maxCoeff();
  const double e_det = std::abs(M.determinant() - n);
  const double e_mr = (M * R - L).cwiseAbs().maxCoeff();
  const Eigen::MatrixXd N = build_n(n);
  const double e_ntn =
      (N.transpose() * N * L - Eigen::MatrixXd::Identity(m, m)).cwiseAbs().maxCoeff();

  rep.m_inverse_ok = e_inv <= tol;
  rep.det_m_is_n = e_det <= tol;
  rep.mr_equals_l = e_mr <= tol;
  rep.ntn_inverse_is_l = e_ntn <= tol;
  rep.max_error = std::max({e_inv, e_det, e_mr, e_ntn});
  return rep;
}

double q_matrix_dense_discrepancy(int n) {
  if (n < 2 || n > 200) throw std::invalid_argument("q_matrix_dense_discrepancy: 2 <= n <= 200");
  const int m = n - 1;
  Eigen::MatrixXd Nbar = build_n(n);
  for (int j = 0; j < m; ++j) {
    const double b = static_cast<double>(j + 1) * (n - j - 1) / n;
    Nbar.col(j) /= b;
  }
  const Eigen::MatrixXd Qdense = (Nbar.transpose() * Nbar).inverse();
  const Tridiagonal q = build_q_matrix(n);
  double err = 0.0;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      double ref = 0.0;
      if (i == j) ref = q.diag[static_cast<std::size_t>(i)];
      if (std::abs(i - j) == 1) ref = q.off[static_cast<std::size_t>(std::min(i, j))];
      err = std::max(err, std::abs(Qdense(i, j) - ref));
    }
  return err;
}

std::pair<double, double> verify_hardy(const std::vector<double>& nodes,
                                       const std::vector<double>& u) {
  if (nodes.size() != u.size() || nodes.size() < 2)
    throw std::invalid_argument("verify_hardy: node/value mismatch");
  if (nodes.front() != 0.0 || nodes.back() != 1.0)
    throw std::invalid_argument("verify_hardy: node set must span [0,1]");

  // 3-point Gauss-Legendre is exact to degree 5; the integrands are at most
  // quartic per cell (u linear, (x(1-x)u)' quadratic).
  static const double gw[3] = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
  static const double gx[3] = {-0.7745966692414834, 0.0, 0.7745966692414834};

  double lhs = 0.0, rhs = 0.0;
  for (std::size_t k = 0; k + 1 < nodes.size(); ++k) {
    const double x0 = nodes[k], x1 = nodes[k + 1];
    if (x1 <= x0) throw std::invalid_argument("verify_hardy: nodes must be increasing");
    const double len = x1 - x0;
    const double slope = (u[k + 1] - u[k]) / len;
    // On the cell, u(x) = a + b x with:
    const double b = slope;
    const double a = u[k] - slope * x0;
    for (int g = 0; g < 3; ++g) {
      const double x = 0.5 * (x0 + x1) + 0.5 * len * gx[g];
      const double w = 0.5 * len * gw[g];
      const double ux = a + b * x;
      const double vprime = a + 2.0 * (b - a) * x - 3.0 * b * x * x;  // (x(1-x)u)'
      lhs += w * ux * ux;
      rhs += w * vprime * vprime;
    }
  }
  return {lhs, 16.0 * rhs};
}

}  // namespace rankdiff
