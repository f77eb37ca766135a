#pragma once

// Gauss-Jacobi rules on [0, 1] for the weight s^p (1-s)^q, p, q > -1.
//
// Nodes are eigenvalues of the symmetric Jacobi matrix of the monic
// recurrence on [0, 1]; weights come from the orthonormal polynomials
// evaluated at the nodes, w_i = 1 / sum_k phat_k(s_i)^2, which is the
// Golub-Welsch weight without forming eigenvectors. Weights are normalised
// to sum to one, so a rule integrates against the Beta(p+1, q+1) law.

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "jainop/core.hpp"

namespace jainop::quadrature {

struct Rule {
  std::vector<double> node;        ///< s_i in (0, 1)
  std::vector<double> complement;  ///< 1 - s_i, computed without cancellation
  std::vector<double> weight;      ///< sums to 1
};

namespace detail {

// Recurrence coefficients of the monic polynomials orthogonal on [0, 1] for
// s^p (1-s)^q, written so that every term is a sum of positive parts; the
// Jacobi matrix then has norm on the scale of the nodes themselves and
// small nodes keep their relative accuracy.
inline double jacobi_diag(int k, double p, double q) {
  const double ab = p + q;
  const double sk = 2.0 * k + ab;
  if (k == 0) return (p + 1.0) / (ab + 2.0);
  return (2.0 * k * k + 2.0 * k * (ab + 1.0) + ab * (p + 1.0)) / (sk * (sk + 2.0));
}

inline double jacobi_offdiag_sq(int k, double p, double q) {
  const double ab = p + q;
  if (k == 1) return (1.0 + p) * (1.0 + q) / ((2.0 + ab) * (2.0 + ab) * (3.0 + ab));
  const double sk = 2.0 * k + ab;
  return k * (k + p) * (k + q) * (k + ab) / (sk * sk * (sk + 1.0) * (sk - 1.0));
}

// Rule for s^p (1-s)^q with p <= q: nodes cluster toward 0, where they are
// resolved relatively.
inline Rule gauss_jacobi_left(int n_nodes, double p, double q) {
  Eigen::VectorXd diag(n_nodes);
  Eigen::VectorXd off(std::max(n_nodes - 1, 1));
  std::vector<double> b(n_nodes, 0.0);  // b[k] = sqrt(offdiag_sq(k)), b[0] unused
  for (int k = 0; k < n_nodes; ++k) diag[k] = jacobi_diag(k, p, q);
  for (int k = 1; k < n_nodes; ++k) {
    b[k] = std::sqrt(jacobi_offdiag_sq(k, p, q));
    off[k - 1] = b[k];
  }

  Eigen::VectorXd x(n_nodes);
  if (n_nodes == 1) {
    x[0] = diag[0];
  } else {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
    solver.computeFromTridiagonal(diag, off.head(n_nodes - 1), Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) throw ConvergenceError("gauss_jacobi: eigen-solver failed");
    x = solver.eigenvalues();
  }

  Rule rule;
  rule.node.resize(n_nodes);
  rule.complement.resize(n_nodes);
  rule.weight.resize(n_nodes);
  double total = 0.0;
  for (int i = 0; i < n_nodes; ++i) {
    const double si = std::clamp(x[i], 0.0, 1.0);
    double prev = 0.0;
    double cur = 1.0;
    double norm = 1.0;
    for (int k = 0; k + 1 < n_nodes; ++k) {
      const double next = ((si - diag[k]) * cur - (k > 0 ? b[k] * prev : 0.0)) / b[k + 1];
      prev = cur;
      cur = next;
      norm += cur * cur;
    }
    rule.node[i] = si;
    rule.complement[i] = 1.0 - si;
    rule.weight[i] = 1.0 / norm;
    total += rule.weight[i];
  }
  for (double& w : rule.weight) w /= total;
  return rule;
}

}  // namespace detail

/// N-point rule for s^p (1-s)^q on [0, 1].
inline Rule gauss_jacobi(int n_nodes, double p, double q) {
  if (n_nodes < 1) throw DomainError("gauss_jacobi: need at least one node");
  if (!(p > -1.0 && q > -1.0)) throw DomainError("gauss_jacobi: exponents must exceed -1");
  if (p <= q) return detail::gauss_jacobi_left(n_nodes, p, q);
  // mirror s -> 1 - s so the crowded end is the one resolved relatively
  Rule r = detail::gauss_jacobi_left(n_nodes, q, p);
  std::swap(r.node, r.complement);
  std::reverse(r.node.begin(), r.node.end());
  std::reverse(r.complement.begin(), r.complement.end());
  std::reverse(r.weight.begin(), r.weight.end());
  return r;
}

}  // namespace jainop::quadrature
