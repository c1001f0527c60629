#pragma once

#include <utility>
#include <vector>

namespace rankdiff {

/// Symmetric tridiagonal matrix: diag has size m, off has size m-1.
struct Tridiagonal {
  std::vector<double> diag;
  std::vector<double> off;

  std::size_t size() const { return diag.size(); }
};

// Q^n_ij = b(i) L_ij b(j) with b(i) = i(n-i)/n and L = tridiag(-1, 2, -1);
// (n-1) x (n-1), symmetric tridiagonal.
Tridiagonal build_q_matrix(int n);

// Smallest eigenvalue by Sturm-count bisection, absolute tolerance tol.
double smallest_eigenvalue(const Tridiagonal& t, double tol = 1e-13);

struct SpectralReport {
  int n = 0;
  double lambda_tilde = 0.0;  // smallest eigenvalue of Q^n
  double lambda_lower = 0.0;  // alpha^2/(4 sigma^2) * lambda_tilde
  bool bound_ok = false;      // lambda_tilde >= 1/432
};

// For each n: lambda_tilde, the induced lower bound on the Poincare constant,
// and the 1/(16*27) check.
std::vector<SpectralReport> verify_lambda_bound(const std::vector<int>& n_list,
                                                double alpha = 1.0, double sigma = 1.0);

struct IdentityReport {
  int n = 0;
  bool mr_equals_l = false;
  bool det_m_is_n = false;
  bool m_inverse_ok = false;
  bool ntn_inverse_is_l = false;
  double max_error = 0.0;
};

// Dense checks of the matrix identities behind the Poincare-constant proof:
// M M^{-1} = I, det M = n, M R = L^n, (N^T N) L^n = I. Guarded to n <= 2000.
IdentityReport verify_matrix_identities(int n);

// Reconstructs Q^n as the inverse of Nbar^T Nbar (Nbar_ij = N_ij / b(j));
// returns the max element-wise difference from build_q_matrix. n <= 200.
double q_matrix_dense_discrepancy(int n);

// Exact integrals (lhs, rhs) = (int u^2, 16 int ((x(1-x)u)')^2) for a
// piecewise-linear u on [0,1] given by node values; nodes[0] = 0 and
// nodes[last] = 1. Caller asserts lhs <= rhs (the Hardy inequality).
std::pair<double, double> verify_hardy(const std::vector<double>& nodes,
                                       const std::vector<double>& u);

}  // namespace rankdiff
