#pragma once

// Closed-form raw and central moments of the three operator families.
//
// Jain moments are those of the generalized Poisson law with mean
// lam/(1-beta), lam = n x (exact). The Jain-Baskakov moments are exact
// recombinations of these through the rising factorial
//   v(v+1)...(v+m-1) = sum_k |s(m,k)| v^k,
// i.e. D(t^m, x) = n^m / prod_{k=2}^{m+1}(n - k c) * sum_k |s(m,k)| n^{k-m} P(t^k, x).
// King moments are D moments at r_n(x).
//
// The *_display functions evaluate printed closed forms verbatim. Several of
// them only agree with the exact moments up to o(1/n) (and the D t^3 one not
// even that); they exist so the gap can be measured.

#include <array>
#include <cmath>
#include <concepts>
#include <string>

#include "jainop/core.hpp"

namespace jainop {

enum class FormulaClass { Exact, Asymptotic };

inline constexpr std::string_view to_string(FormulaClass c) noexcept {
  return c == FormulaClass::Exact ? "exact" : "asymptotic";
}

struct CentralMoments {
  double mu1 = 0.0;
  double mu2 = 0.0;
  double mu4 = 0.0;
  double x = 0.0;
  OperatorParams params;
};

namespace detail {

inline void check_order(int m) {
  if (m < 0 || m > 4) throw DomainError("moment order must lie in 0..4");
}

inline void check_point(double x) {
  if (!(x >= 0.0) || !std::isfinite(x)) throw DomainError("x must be a nonnegative finite number");
}

// prod_{k=2}^{m+1} (n - k c)
template <std::floating_point Real>
Real kernel_denominator(const OperatorParams& p, int m) {
  Real r = 1;
  for (int k = 2; k <= m + 1; ++k) r *= static_cast<Real>(p.n) - k * static_cast<Real>(p.c);
  return r;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Jain
// ---------------------------------------------------------------------------

/// P_n(t^m, x), exact.
template <std::floating_point Real = double>
Real jain_moment(const OperatorParams& p, int m, Real x) {
  detail::check_order(m);
  detail::check_point(static_cast<double>(x));
  p.validate(1.0);
  const Real n = p.n;
  const Real b = p.beta;
  const Real q = 1 - b;
  switch (m) {
    case 0: return 1;
    case 1: return x / q;
    case 2: return x * x / (q * q) + x / (n * q * q * q);
    case 3:
      return x * x * x / (q * q * q) + 3 * x * x / (n * std::pow(q, 4)) +
             (1 + 2 * b) * x / (n * n * std::pow(q, 5));
    default:
      return std::pow(x, 4) / std::pow(q, 4) + 6 * x * x * x / (n * std::pow(q, 5)) +
             (7 + 8 * b) * x * x / (n * n * std::pow(q, 6)) +
             (1 + 8 * b + 6 * b * b) * x / (n * n * n * std::pow(q, 7));
  }
}

/// The printed Jain moment forms; equal to jain_moment for m <= 2 and
/// for beta = 0, otherwise off by O(1/n^2).
inline double jain_moment_display(const OperatorParams& p, int m, double x) {
  detail::check_order(m);
  if (m <= 2) return jain_moment(p, m, x);
  const double n = p.n;
  const double b = p.beta;
  const double q = 1 - b;
  if (m == 3)
    return x * x * x / std::pow(q, 3) + 3 * x * x / (n * std::pow(q, 4)) -
           (6 * std::pow(b, 4) - 6 * std::pow(b, 3) - 2 * b - 1) * x / (n * n * std::pow(q, 5));
  return std::pow(x, 4) / std::pow(q, 4) + 6 * x * x * x / (n * std::pow(q, 5)) -
         (36 * std::pow(b, 4) - 72 * std::pow(b, 3) + 36 * b * b - 8 * b - 7) * x * x /
             (n * n * std::pow(q, 6)) +
         (105 * std::pow(b, 5) - 14 * std::pow(b, 4) - 2 * std::pow(b, 3) + 12 * b * b + 8 * b + 1) * x /
             (n * n * n * std::pow(q, 7));
}

// ---------------------------------------------------------------------------
// Jain-Baskakov
// ---------------------------------------------------------------------------

/// D(t^m, x), exact. Requires n > (m+1) c.
template <std::floating_point Real = double>
Real d_moment_exact(const OperatorParams& p, int m, Real x) {
  detail::check_order(m);
  detail::check_point(static_cast<double>(x));
  p.require(m + 1, "D moment of order " + std::to_string(m));
  if (m == 0) return 1;
  // unsigned Stirling numbers of the first kind, |s(m, k)|
  static constexpr std::array<std::array<int, 5>, 5> stirling1 = {{
      {1, 0, 0, 0, 0},
      {0, 1, 0, 0, 0},
      {0, 1, 1, 0, 0},
      {0, 2, 3, 1, 0},
      {0, 6, 11, 6, 1},
  }};
  const Real n = p.n;
  CompensatedSum<Real> s;
  Real npow = 1;  // n^{k-m}, built from k = m downward
  for (int k = m; k >= 1; --k) {
    s += stirling1[m][k] * npow * jain_moment<Real>(p, k, x);
    npow /= n;
  }
  Real pre = 1;
  for (int k = 0; k < m; ++k) pre *= n;
  return pre / detail::kernel_denominator<Real>(p, m) * s.value();
}

/// Printed main terms of D(t^3, x) and D(t^4, x).
inline double d_moment_display(const OperatorParams& p, int m, double x) {
  if (m != 3 && m != 4) throw DomainError("display forms exist for m = 3, 4 only");
  p.require(m + 1, "D moment display of order " + std::to_string(m));
  const double n = p.n, c = p.c, b = p.beta, q = 1 - b;
  if (m == 3)
    return n * n * x * x * (-q * x * n + 3 * (b * b - 2 * b + 2)) /
           (std::pow(q, 4) * (n - 2 * c) * (n - 3 * c) * (n - 4 * c));
  return n * n * n * x * x * x * (q * x * n + 6 * (b * b - 2 * b + 2)) /
         (std::pow(q, 5) * (n - 2 * c) * (n - 3 * c) * (n - 4 * c) * (n - 5 * c));
}

/// mu_1 = D(t - x, x) = x (n beta + 2c(1-beta)) / ((n-2c)(1-beta)). Exact.
inline double d_mu1(const OperatorParams& p, double x) {
  p.require(2, "mu1");
  const double n = p.n, c = p.c, b = p.beta;
  return x * (n * b + 2 * c * (1 - b)) / ((n - 2 * c) * (1 - b));
}

/// mu_2 = D((t - x)^2, x). Exact.
inline double d_mu2(const OperatorParams& p, double x) {
  p.require(3, "mu2");
  const double n = p.n, c = p.c, b = p.beta, q = 1 - b;
  const double den = (n - 2 * c) * (n - 3 * c);
  return x * x * (n * n * b * b + n * (c + 4 * c * b - 5 * c * b * b) + 6 * c * c - 12 * c * c * b + 6 * c * c * b * b) /
             (den * q * q) +
         n * x * (2 - 2 * b + b * b) / (den * q * q * q);
}

/// Printed main term of mu_4 (carries an o(1/n) remainder).
inline double d_mu4_display(const OperatorParams& p, double x) {
  p.require(5, "mu4");
  const double n = p.n, c = p.c, b = p.beta, q = 1 - b;
  const double num = q * n * n * n * b * b * std::pow(x, 4) * (2 * c * (3 + 4 * b - 7 * b * b) + b * b * n) +
                     6 * n * n * n * b * b * x * x * (b * b - 2 * b + 2);
  return num / ((n - 2 * c) * (n - 3 * c) * (n - 4 * c) * (n - 5 * c) * std::pow(q, 5));
}

namespace detail {

// sum_k C(k_order, j) (-x)^{k_order-j} M(j), accumulated in long double.
template <class RawMoment>
double central_from_raw(int order, double x, RawMoment&& raw) {
  static constexpr std::array<std::array<int, 5>, 5> binom = {{
      {1, 0, 0, 0, 0},
      {1, 1, 0, 0, 0},
      {1, 2, 1, 0, 0},
      {1, 3, 3, 1, 0},
      {1, 4, 6, 4, 1},
  }};
  const long double lx = x;
  CompensatedSum<long double> s;
  for (int j = 0; j <= order; ++j) {
    long double coef = binom[order][j];
    for (int i = 0; i < order - j; ++i) coef *= -lx;
    s += coef * raw(j);
  }
  return static_cast<double>(s.value());
}

}  // namespace detail

/// D((t - x)^k, x) by binomial expansion over the exact raw moments.
inline double d_central_moment_exact(const OperatorParams& p, int k, double x) {
  detail::check_order(k);
  detail::check_point(x);
  p.require(k + 1, "central moment of order " + std::to_string(k));
  return detail::central_from_raw(k, x, [&](int j) { return d_moment_exact<long double>(p, j, x); });
}

/// mu_1, mu_2 from their exact closed forms, mu_4 by binomial expansion. Requires n > 5c.
inline CentralMoments d_central_moments(const OperatorParams& p, double x) {
  detail::check_point(x);
  p.require(5, "central moments up to order 4");
  return {d_mu1(p, x), d_mu2(p, x), d_central_moment_exact(p, 4, x), x, p};
}

// ---------------------------------------------------------------------------
// King-type
// ---------------------------------------------------------------------------

namespace detail {

inline int king_threshold(int m) { return m <= 2 ? 3 : m + 1; }

template <std::floating_point Real>
Real king_point(const OperatorParams& p, Real x) {
  return (static_cast<Real>(p.n) - 2 * static_cast<Real>(p.c)) * (1 - static_cast<Real>(p.beta)) * x /
         static_cast<Real>(p.n);
}

}  // namespace detail

/// D*(t^m, x), exact. m = 0, 1 reproduce 1 and x identically.
template <std::floating_point Real = double>
Real king_moment(const OperatorParams& p, int m, Real x) {
  detail::check_order(m);
  detail::check_point(static_cast<double>(x));
  p.require(detail::king_threshold(m), "King moment of order " + std::to_string(m));
  if (m == 0) return 1;
  if (m == 1) return x;
  return d_moment_exact<Real>(p, m, detail::king_point<Real>(p, x));
}

/// Printed King moments for m = 2 (exact), 3 and 4 (main terms).
inline double king_moment_display(const OperatorParams& p, int m, double x) {
  if (m < 2 || m > 4) throw DomainError("King display forms exist for m = 2, 3, 4");
  p.require(detail::king_threshold(m), "King moment display of order " + std::to_string(m));
  const double n = p.n, c = p.c, b = p.beta, q = 1 - b;
  const double g = b * b - 2 * b + 2;
  switch (m) {
    case 2: return (n - 2 * c) / (n - 3 * c) * x * x + (2 - 2 * b + b * b) / ((n - 3 * c) * q * q) * x;
    case 3:
      return x * x * n * ((1 - b * b) * (n - 4 * c) * x + 3 * g) / (q * q * (n - 3 * c) * (n - 4 * c));
    default:
      return n * n * x * x * x * (q * q * (n - 6 * c) * x + 6 * g) /
             (q * q * (n - 3 * c) * (n - 4 * c) * (n - 5 * c));
  }
}

/// mu*_2 = c x^2/(n-3c) + (2 - 2 beta + beta^2) x / ((n-3c)(1-beta)^2). Exact.
inline double king_mu2(const OperatorParams& p, double x) {
  p.require(3, "King mu2");
  const double n = p.n, c = p.c, b = p.beta, q = 1 - b;
  return c / (n - 3 * c) * x * x + (2 - 2 * b + b * b) / ((n - 3 * c) * q * q) * x;
}

/// D*((t - x)^k, x) by binomial expansion; k = 1 is identically zero.
inline double king_central_moment_exact(const OperatorParams& p, int k, double x) {
  detail::check_order(k);
  detail::check_point(x);
  p.require(detail::king_threshold(k), "King central moment of order " + std::to_string(k));
  if (k == 1) return 0.0;
  if (k == 0) return 1.0;
  return detail::central_from_raw(k, x, [&](int j) { return king_moment<long double>(p, j, x); });
}

/// mu*_1 = 0, mu*_2 closed form, mu*_4 by binomial expansion. Requires n > 5c.
inline CentralMoments king_central_moments(const OperatorParams& p, double x) {
  detail::check_point(x);
  p.require(5, "King central moments up to order 4");
  return {0.0, king_mu2(p, x), king_central_moment_exact(p, 4, x), x, p};
}

// ---------------------------------------------------------------------------
// Dispatch
// ---------------------------------------------------------------------------

/// Exact raw moment of the given family.
inline double raw_moment(OperatorKind kind, const OperatorParams& p, int m, double x) {
  switch (kind) {
    case OperatorKind::Jain: return jain_moment(p, m, x);
    case OperatorKind::JainBaskakov: return d_moment_exact(p, m, x);
    case OperatorKind::KingJainBaskakov: return king_moment(p, m, x);
  }
  return kNaN;
}

/// Exact central moment of the given family.
inline double central_moment(OperatorKind kind, const OperatorParams& p, int k, double x) {
  switch (kind) {
    case OperatorKind::Jain:
      return detail::central_from_raw(k, x, [&](int j) { return jain_moment<long double>(p, j, x); });
    case OperatorKind::JainBaskakov: return d_central_moment_exact(p, k, x);
    case OperatorKind::KingJainBaskakov: return king_central_moment_exact(p, k, x);
  }
  return kNaN;
}

/// Smallest multiple k with n > k c needed for raw moment m of the family.
inline int moment_threshold(OperatorKind kind, int m) {
  switch (kind) {
    case OperatorKind::Jain: return 0;
    case OperatorKind::JainBaskakov: return m + 1;
    case OperatorKind::KingJainBaskakov: return detail::king_threshold(m);
  }
  return 0;
}

}  // namespace jainop
