#pragma once

// Jain basis weights, the Baskakov-type kernel p_{n,v-1,c}, and integrals of
// test functions against that kernel.
//
// Basis. With lam = n x and mu = lam + v beta,
//   omega_beta(v, lam) = lam (lam + v beta)^(v-1) e^-(lam + v beta) / v!
//                      = (lam / mu) * Poisson(v; mu),
// so the log-weight is evaluated as -log1p(v beta / lam) + log Poisson(v; mu)
// with the saddle-point Poisson form; (lam + v beta)^(v-1) is never formed.
//
// Kernel. Under s = ct / (1 + ct) the measure (n-c)/c p_{n,v-1,c}(t) dt is the
// Beta(v, n/c - 1) law on (0, 1). A function of growth degree d is integrated
// as
//   E[f(T)] = R_d * E_{Beta(v, n/c-1-d)}[ f(s / (c(1-s))) (1-s)^d ],
//   R_d     = prod_{k=1..d} (n/c + v - 1 - k) / (n/c - 1 - k),
// which makes t^d an exact polynomial in s for the Gauss-Jacobi rule.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <utility>
#include <vector>

#include "jainop/core.hpp"
#include "jainop/functions.hpp"
#include "jainop/quadrature.hpp"
#include "jainop/special.hpp"

namespace jainop {

struct BasisWeight {
  std::int64_t v = 0;
  double log_weight = -kInf;
  double weight = 0.0;
};

// ---------------------------------------------------------------------------
// Jain basis
// ---------------------------------------------------------------------------

/// log omega_beta(v, lam) for lam >= 0 (lam = n x, or n r_n(x) for King).
inline double jain_basis_log_at(double lam, double beta, std::int64_t v) {
  if (v < 0) throw DomainError("basis index must be nonnegative");
  if (!(lam >= 0.0)) throw DomainError("basis argument must be nonnegative");
  if (v == 0) return -lam;
  if (lam == 0.0) return -kInf;
  const double dv = static_cast<double>(v);
  const double mu = lam + dv * beta;
  return -std::log1p(dv * beta / lam) + special::log_poisson_pmf(dv, mu);
}

/// log omega_beta(v, n x).
inline double jain_basis_log(const OperatorParams& p, double x, std::int64_t v) {
  p.validate(1.0 - std::numeric_limits<double>::epsilon());
  if (!(x >= 0.0) || !std::isfinite(x)) throw DomainError("x must be a nonnegative finite number");
  return jain_basis_log_at(p.n * x, p.beta, v);
}

inline BasisWeight jain_basis(const OperatorParams& p, double x, std::int64_t v) {
  const double lw = jain_basis_log(p, x, v);
  return {v, lw, std::exp(lw)};
}

/// sum_{v=0}^{v_max} omega_beta(v, n x), compensated.
inline double basis_mass(const OperatorParams& p, double x, std::int64_t v_max) {
  p.validate(1.0 - std::numeric_limits<double>::epsilon());
  if (!(x >= 0.0)) throw DomainError("x must be nonnegative");
  if (v_max < 0) return 0.0;
  CompensatedSum<> s;
  const double lam = p.n * x;
  for (std::int64_t v = 0; v <= v_max; ++v) s += std::exp(jain_basis_log_at(lam, p.beta, v));
  return s.value();
}

// ---------------------------------------------------------------------------
// Series engine
// ---------------------------------------------------------------------------

struct SeriesResult {
  double value = 0.0;
  double mass = 0.0;
  std::int64_t terms = 0;
  double tail_bound = 0.0;   ///< estimated |sum of the omitted terms|, growth-weighted
  double error_sum = 0.0;    ///< sum omega_v * |term error|
};

/// Floor on the unaccounted-mass criterion: individual weights carry a few
/// ulps of relative error, so 1 - mass cannot be resolved below this.
inline constexpr double kMassFloor = 1e-13;

/// Sums sum_v omega_beta(v, lam) F(v), where term(v) returns {F(v), err(v)}
/// and growth(v) >= |F(u)| bounds the terms for u near v (polynomial in v).
///
/// Stops past the mean once (a) the accumulated mass is within max(eps, floor)
/// of one, (b) the current term is below eps (1 + |S|), and (c) a geometric
/// bound on the growth-weighted tail is below eps (1 + |S|). The tail ratio is
/// max(w_{v+1}/w_v, beta e^(1-beta)), the latter being the limiting ratio of
/// the basis.
template <class TermFn, class GrowthFn>
SeriesResult sum_basis_series(double lam, double beta, TermFn&& term, GrowthFn&& growth, double eps,
                              std::int64_t v_cap) {
  SeriesResult out;
  CompensatedSum<> total;
  CompensatedSum<> mass;
  CompensatedSum<> err;
  const double mean = lam / (1.0 - beta);
  const double limit_ratio = beta > 0.0 ? beta * std::exp(1.0 - beta) : 0.0;
  double prev_w = 0.0;

  for (std::int64_t v = 0; v <= v_cap; ++v) {
    const double w = std::exp(jain_basis_log_at(lam, beta, v));
    if (w > 0.0 || v == 0) {
      const auto [f, e] = term(v);
      total += w * f;
      err += w * e;
      mass += w;
      out.terms = v + 1;
      const double s = total.value();
      const double scale = eps * (1.0 + std::abs(s));
      if (static_cast<double>(v) > mean && prev_w > 0.0) {
        const double r = std::max(w / prev_w, limit_ratio);
        const double g = growth(v);
        const double q = r * growth(v + 1) / g;
        const double tail_mass = r < 1.0 ? w * r / (1.0 - r) : kInf;
        const double tail_f = q < 1.0 ? w * g * q / (1.0 - q) : kInf;
        const double unaccounted = 1.0 - mass.value();
        if (unaccounted <= std::max(eps, kMassFloor) && tail_mass <= std::max(eps, kMassFloor) &&
            w * std::abs(f) <= scale && tail_f <= scale) {
          out.value = s;
          out.mass = mass.value();
          out.tail_bound = tail_f;
          out.error_sum = err.value();
          return out;
        }
      }
    } else if (static_cast<double>(v) > mean) {
      // underflowed past the bulk: nothing left to add
      out.value = total.value();
      out.mass = mass.value();
      out.tail_bound = 0.0;
      out.error_sum = err.value();
      out.terms = v;
      return out;
    }
    prev_w = w;
  }
  throw ConvergenceError("basis series did not meet its tail criterion within v_max = " +
                         std::to_string(v_cap) + " terms");
}

struct MassResult {
  double mass = 0.0;
  std::int64_t terms = 0;
  double tail_bound = 0.0;
};

/// Basis mass summed until the tail criterion holds.
inline MassResult basis_mass_adaptive(const OperatorParams& p, double x, const EvalConfig& cfg) {
  p.validate(cfg.beta_guard);
  cfg.validate();
  if (!(x >= 0.0)) throw DomainError("x must be nonnegative");
  if (x == 0.0) return {1.0, 1, 0.0};
  const auto r = sum_basis_series(
      p.n * x, p.beta, [](std::int64_t) { return std::pair{1.0, 0.0}; },
      [](std::int64_t) { return 1.0; }, cfg.tail_eps, cfg.v_max);
  return {r.mass, r.terms, r.tail_bound};
}

// ---------------------------------------------------------------------------
// Baskakov kernel
// ---------------------------------------------------------------------------

/// log p_{n,v-1,c}(t). t = 0 is the continuous limit: log c for v = 1, -inf for v >= 2.
inline double baskakov_kernel_log(const OperatorParams& p, std::int64_t v, double t) {
  p.validate(1.0 - std::numeric_limits<double>::epsilon());
  if (v < 1) throw DomainError("kernel index v must be at least 1");
  if (!(t >= 0.0)) throw DomainError("kernel argument t must be nonnegative");
  p.require(1, "baskakov_kernel");
  const double a = p.n / p.c;
  const double dv = static_cast<double>(v);
  const double log_norm = std::log(p.c) + std::lgamma(a + dv - 1.0) - std::lgamma(dv) - std::lgamma(a);
  if (t == 0.0) return v == 1 ? std::log(p.c) : -kInf;
  const double ct = p.c * t;
  return log_norm + (dv - 1.0) * std::log(ct) - (a + dv - 1.0) * std::log1p(ct);
}

/// int_0^inf t^j p_{n,v-1,c}(t) dt = c (v+j-1)...v / ((n-c)...(n-(j+1)c)).
inline double kernel_moment_exact(const OperatorParams& p, std::int64_t v, int j) {
  if (v < 1) throw DomainError("kernel index v must be at least 1");
  if (j < 0) throw DomainError("moment order must be nonnegative");
  p.require(j + 1, "kernel moment of order " + std::to_string(j));
  double r = p.c / (p.n - p.c);
  for (int k = 0; k < j; ++k) r *= (static_cast<double>(v) + k) / (p.n - (k + 2) * p.c);
  return r;
}

/// (n-c)/c times kernel_moment_exact: the j-th moment of the normalised kernel.
inline double normalized_kernel_moment(const OperatorParams& p, double v, int j) {
  double r = 1.0;
  for (int k = 0; k < j; ++k) r *= (v + k) / (p.n - (k + 2) * p.c);
  return r;
}

struct KernelIntegral {
  double value = 0.0;           ///< the integral
  double error_estimate = 0.0;  ///< |Q_2N - Q_N|, same scale as value
  int nodes = 0;                ///< nodes per piece in the accepted rule
};

namespace detail {

// E_{Beta(p+1, q+1)}[g] by one Gauss-Jacobi rule per kink-delimited piece.
// Returns {sum, sum of |.|}.
struct PieceSum {
  double value = 0.0;
  double abs_value = 0.0;
};

template <class G>
PieceSum beta_expectation(int n_nodes, double p, double q, const std::vector<double>& cuts, G&& g) {
  if (cuts.empty()) {
    const auto rule = quadrature::gauss_jacobi(n_nodes, p, q);
    CompensatedSum<> s, a;
    for (std::size_t i = 0; i < rule.node.size(); ++i) {
      const double gi = g(rule.node[i], rule.complement[i]);
      s += rule.weight[i] * gi;
      a += rule.weight[i] * std::abs(gi);
    }
    return {s.value(), a.value()};
  }

  // Piecewise: [0, s1], [s1, s2], ..., [sK, 1]. Each piece's integral of
  // s^p (1-s)^q g is formed in log space relative to log B(p+1, q+1).
  const double log_beta = std::lgamma(p + 1.0) + std::lgamma(q + 1.0) - std::lgamma(p + q + 2.0);
  CompensatedSum<> s, a;
  auto add = [&](double log_factor, double gi) {
    const double w = std::exp(log_factor - log_beta);
    s += w * gi;
    a += w * std::abs(gi);
  };

  // left piece: s = s1 u, weight u^p on [0, 1]
  {
    const double s1 = cuts.front();
    const auto rule = quadrature::gauss_jacobi(n_nodes, p, 0.0);
    const double base = (p + 1.0) * std::log(s1) - std::log(p + 1.0);
    for (std::size_t i = 0; i < rule.node.size(); ++i) {
      const double si = s1 * rule.node[i];
      const double ci = 1.0 - si;
      add(base + std::log(rule.weight[i]) + q * std::log1p(-si), g(si, ci));
    }
  }
  // interior pieces: Gauss-Legendre with the weight evaluated explicitly
  if (cuts.size() > 1) {
    const auto rule = quadrature::gauss_jacobi(n_nodes, 0.0, 0.0);
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
      const double lo = cuts[k];
      const double hi = cuts[k + 1];
      const double len = hi - lo;
      for (std::size_t i = 0; i < rule.node.size(); ++i) {
        const double si = lo + len * rule.node[i];
        const double ci = (1.0 - hi) + len * rule.complement[i];
        add(std::log(len) + std::log(rule.weight[i]) + p * std::log(si) + q * std::log(ci), g(si, ci));
      }
    }
  }
  // right piece: 1 - s = (1 - sK) w, weight w^q on [0, 1]
  {
    const double cK = 1.0 - cuts.back();
    const auto rule = quadrature::gauss_jacobi(n_nodes, q, 0.0);
    const double base = (q + 1.0) * std::log(cK) - std::log(q + 1.0);
    for (std::size_t i = 0; i < rule.node.size(); ++i) {
      const double ci = cK * rule.node[i];
      const double si = 1.0 - ci;
      add(base + std::log(rule.weight[i]) + p * std::log1p(-ci), g(si, ci));
    }
  }
  return {s.value(), a.value()};
}

inline constexpr double kMaxWavelengthPieces = 16384.0;
inline constexpr int kBulkCutsPerSide = 12;

// log of P(S > s) for S ~ Beta(p+1, q+1), by Gauss-Jacobi on [s, 1] with
// 1 - S = (1 - s) w. Exact for integer p below 2 * 48.
inline double log_beta_upper_tail(double p, double q, double s) {
  static thread_local std::vector<std::pair<double, quadrature::Rule>> memo;
  const quadrature::Rule* rule = nullptr;
  for (const auto& [key, r] : memo)
    if (key == q) rule = &r;
  if (!rule) {
    if (memo.size() > 64) memo.clear();
    memo.emplace_back(q, quadrature::gauss_jacobi(48, q, 0.0));
    rule = &memo.back().second;
  }
  const double cs = 1.0 - s;
  const double log_beta = std::lgamma(p + 1.0) + std::lgamma(q + 1.0) - std::lgamma(p + q + 2.0);
  const double base = (q + 1.0) * std::log(cs) - std::log(q + 1.0) - log_beta;
  CompensatedSum<> acc;
  for (std::size_t i = 0; i < rule->node.size(); ++i)
    acc += rule->weight[i] * std::exp(p * std::log1p(-cs * rule->node[i]));
  return base + std::log(acc.value());
}

// s with P(S > s) <= mass, within a few percent of the smallest such s
// (bisection on log(1 - s)).
inline double beta_upper_quantile(double p, double q, double mass) {
  const double log_mass = std::log(mass);
  double hi = 0.5;  // 1 - s with tail above mass
  if (log_beta_upper_tail(p, q, 1.0 - hi) <= log_mass) return 1.0 - hi;
  double lo = hi;   // 1 - s with tail at or below mass
  while (lo > 1e-300 && log_beta_upper_tail(p, q, 1.0 - lo) > log_mass) {
    hi = lo;
    lo *= 0.5;
  }
  for (int it = 0; it < 8; ++it) {
    const double mid = std::sqrt(lo * hi);
    (log_beta_upper_tail(p, q, 1.0 - mid) > log_mass ? hi : lo) = mid;
  }
  return 1.0 - lo;
}

}  // namespace detail

/// (n-c)/c * int_0^inf p_{n,v-1,c}(t) f(t) dt, i.e. E[f(T)] under the
/// normalised kernel. error_estimate is on the same scale.
inline KernelIntegral kernel_average(const OperatorParams& p, std::int64_t v, const TestFunction& f,
                                     const EvalConfig& cfg) {
  if (v < 1) throw DomainError("kernel index v must be at least 1");
  const int d = f.growth_degree;
  if (!p.exceeds(d + 1))
    throw IntegrabilityError(f.name + " has growth degree " + std::to_string(d) + ", which needs n > " +
                             std::to_string(d + 1) + "c (n = " + format_number(p.n) +
                             ", c = " + format_number(p.c) + ")");
  const double a = p.n / p.c;
  const double dv = static_cast<double>(v);
  const double pe = dv - 1.0;
  const double qe = a - 2.0 - d;

  double ratio = 1.0;
  for (int k = 1; k <= d; ++k) ratio *= (a + dv - 1.0 - k) / (a - 1.0 - k);

  std::vector<double> cuts;
  for (double t : f.kinks)
    if (t > 0.0) cuts.push_back(p.c * t / (1.0 + p.c * t));

  // An f that keeps oscillating makes g oscillate without limit as s -> 1.
  // Cut at multiples of its wavelength up to a point past which the kernel
  // mass is negligible; what lies beyond is charged to the error estimate at
  // sup |g| per unit mass, where |g| <= M (1 + c^-d) by the growth bound.
  double tail_charge = 0.0;
  if (f.wavelength) {
    const double s_cut = detail::beta_upper_quantile(pe, qe, 1e-2 * cfg.quad_rel_tol);
    const double t_cut = s_cut / (p.c * (1.0 - s_cut));
    const double width = *f.wavelength * std::max(1.0, std::ceil(t_cut / *f.wavelength / detail::kMaxWavelengthPieces));
    for (double k = 1.0; k * width < t_cut; k += 1.0) {
      const double t = k * width;
      cuts.push_back(p.c * t / (1.0 + p.c * t));
    }
    const double sup_g = f.bounded() ? *f.sup_bound : f.growth_constant * (1.0 + std::pow(p.c, -d));
    tail_charge = 1e-2 * cfg.quad_rel_tol * sup_g;
  }
  if (!cuts.empty()) {
    // Keep every piece narrower than the bulk of the weight, so no single
    // piece sees a sharp peak.
    const double mean = (pe + 1.0) / (pe + qe + 2.0);
    const double sd = std::sqrt(mean * (1.0 - mean) / (pe + qe + 3.0));
    for (int k = -detail::kBulkCutsPerSide; k <= detail::kBulkCutsPerSide; ++k) {
      const double s = mean + k * sd;
      if (s > 0.0 && s < 1.0) cuts.push_back(s);
    }
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  const double c = p.c;
  auto g = [&](double s, double one_minus_s) {
    const double t = s / (c * one_minus_s);
    double scale = 1.0;
    for (int k = 0; k < d; ++k) scale *= one_minus_s;
    return f(t) * scale;
  };

  int nodes = 8;
  auto prev = detail::beta_expectation(nodes, pe, qe, cuts, g);

  // A polynomial of degree <= d makes g a polynomial of degree d in s, so
  // both rules are exact and their difference is pure roundoff.
  if (cuts.empty() && f.polynomial_degree && *f.polynomial_degree <= d && d <= 2 * nodes - 1) {
    const auto cur = detail::beta_expectation(2 * nodes, pe, qe, cuts, g);
    return {ratio * cur.value, ratio * std::abs(cur.value - prev.value), 2 * nodes};
  }
  while (true) {
    const int next_nodes = 2 * nodes;
    if (next_nodes > cfg.quad_max_nodes)
      throw ConvergenceError("kernel quadrature for " + f.name + " at v=" + std::to_string(v) +
                             " (n = " + format_number(p.n) + ", c = " + format_number(p.c) +
                             ") did not reach rel. tol " + format_number(cfg.quad_rel_tol) + " within " +
                             std::to_string(cfg.quad_max_nodes) + " nodes");
    const auto cur = detail::beta_expectation(next_nodes, pe, qe, cuts, g);
    const double diff = std::abs(cur.value - prev.value);
    nodes = next_nodes;
    if (diff <= cfg.quad_rel_tol * std::max(cur.abs_value, std::abs(cur.value)) || diff == 0.0)
      return {ratio * cur.value, ratio * (diff + tail_charge), nodes};
    prev = cur;
  }
}

/// int_0^inf p_{n,v-1,c}(t) f(t) dt.
inline KernelIntegral kernel_integral(const OperatorParams& p, std::int64_t v, const TestFunction& f,
                                      const EvalConfig& cfg) {
  p.validate(cfg.beta_guard);
  auto r = kernel_average(p, v, f, cfg);
  const double scale = p.c / (p.n - p.c);
  r.value *= scale;
  r.error_estimate *= scale;
  return r;
}

}  // namespace jainop
