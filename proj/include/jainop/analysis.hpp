#pragma once

// Empirical checks of the approximation theorems: moduli of smoothness, the
// direct (omega + omega_2) estimate, the rate estimate on [0, a], weighted
// sup-norm errors and the Voronovskaja-type limits.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <future>
#include <optional>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "jainop/core.hpp"
#include "jainop/functions.hpp"
#include "jainop/moments.hpp"
#include "jainop/operators.hpp"

namespace jainop {

/// Runs fn(i) for i in [0, count) on worker threads; results in index order.
template <class Fn>
auto parallel_map(std::size_t count, Fn&& fn) {
  using R = decltype(fn(std::size_t{0}));
  std::vector<std::future<R>> futures;
  futures.reserve(count);
  for (std::size_t i = 0; i < count; ++i) futures.push_back(std::async(std::launch::async, fn, i));
  std::vector<R> out;
  out.reserve(count);
  for (auto& f : futures) out.push_back(f.get());
  return out;
}

// ---------------------------------------------------------------------------
// Moduli
// ---------------------------------------------------------------------------

struct ModulusEstimate {
  double delta = 0.0;
  double omega1 = 0.0;
  double omega2 = 0.0;
  double a = 0.0;
  int grid_points = 0;
  double resolution_slack = 0.0;  ///< bound on what the grid can miss in omega1
};

namespace detail {

// sup over pairs |t - s| <= delta within [lo, hi] of |f(t) - f(s)|, on the
// uniform grid refined once at midpoints, augmented by the points t + delta.
struct WindowSup {
  double value = 0.0;
  double slack = 0.0;
};

inline WindowSup window_oscillation(const RealFn& f, double lo, double hi, double delta, int grid_points) {
  if (delta <= 0.0 || hi <= lo) return {};
  const int m = 2 * std::max(grid_points, 2) - 1;
  const double h = (hi - lo) / (m - 1);
  std::vector<std::pair<double, double>> pts;
  pts.reserve(2 * m);
  double lipschitz = 0.0;
  double prev = 0.0;
  for (int i = 0; i < m; ++i) {
    const double t = i + 1 == m ? hi : lo + h * i;
    const double ft = f(t);
    if (i > 0) lipschitz = std::max(lipschitz, std::abs(ft - prev) / h);
    prev = ft;
    pts.emplace_back(t, ft);
    if (t + delta <= hi) pts.emplace_back(t + delta, f(t + delta));
  }
  std::sort(pts.begin(), pts.end());

  // sliding window of width delta, monotone deques for max and min
  std::deque<std::size_t> qmax, qmin;
  double best = 0.0;
  std::size_t left = 0;
  for (std::size_t r = 0; r < pts.size(); ++r) {
    while (pts[r].first - pts[left].first > delta * (1 + 1e-14)) ++left;
    while (!qmax.empty() && pts[qmax.back()].second <= pts[r].second) qmax.pop_back();
    qmax.push_back(r);
    while (!qmin.empty() && pts[qmin.back()].second >= pts[r].second) qmin.pop_back();
    qmin.push_back(r);
    while (qmax.front() < left) qmax.pop_front();
    while (qmin.front() < left) qmin.pop_front();
    best = std::max(best, pts[qmax.front()].second - pts[qmin.front()].second);
  }
  return {best, lipschitz * h};
}

inline std::optional<double> affine_slope(const TestFunction& f) {
  if (f.polynomial_degree && *f.polynomial_degree <= 1) return f(1.0) - f(0.0);
  return std::nullopt;
}

}  // namespace detail

/// omega_a(f, delta) = sup { |f(t) - f(x)| : x, t in [0, a], |t - x| <= delta }.
inline ModulusEstimate modulus1_estimate(const TestFunction& f, double a, double delta, const EvalConfig& cfg) {
  if (!(a > 0.0)) throw DomainError("modulus1: interval endpoint must be positive");
  if (!(delta >= 0.0)) throw DomainError("modulus1: delta must be nonnegative");
  ModulusEstimate est;
  est.a = a;
  est.delta = delta;
  est.grid_points = cfg.grid_points;
  const auto w = detail::window_oscillation(f.value, 0.0, a, std::min(delta, a), cfg.grid_points);
  est.omega1 = w.value;
  est.resolution_slack = w.slack;
  return est;
}

inline double modulus1(const TestFunction& f, double a, double delta, const EvalConfig& cfg) {
  return modulus1_estimate(f, a, delta, cfg).omega1;
}

/// omega(f, delta) over [0, inf) for bounded (or affine) f.
inline double modulus1_global(const TestFunction& f, double delta, const EvalConfig& cfg) {
  if (!(delta >= 0.0)) throw DomainError("modulus1: delta must be nonnegative");
  if (delta == 0.0) return 0.0;
  if (const auto slope = detail::affine_slope(f)) return std::abs(*slope) * delta;
  if (f.period) {
    const double hi = *f.period + delta;
    return detail::window_oscillation(f.value, 0.0, hi, delta, cfg.grid_points).value;
  }
  if (!f.bounded() || !f.tail_oscillation)
    throw UnboundedFunctionError(f.name + ": global modulus needs a bounded function with tail metadata");
  const double cap = cfg.domain_cap;
  const double grid = detail::window_oscillation(f.value, 0.0, cap + delta, delta, cfg.grid_points).value;
  return std::max(grid, f.tail_oscillation(cap));
}

/// omega_2(f, h0) = sup_{0 < h <= h0} sup_{x >= 0} |f(x+2h) - 2 f(x+h) + f(x)|.
inline double modulus2(const TestFunction& f, double step_bound, const EvalConfig& cfg) {
  if (!(step_bound >= 0.0)) throw DomainError("modulus2: step bound must be nonnegative");
  if (step_bound == 0.0) return 0.0;
  if (detail::affine_slope(f)) return 0.0;
  if (!f.bounded()) throw UnboundedFunctionError(f.name + ": second-order modulus needs a bounded function");
  double hi;
  double tail = 0.0;
  if (f.period) {
    hi = *f.period;
  } else if (f.tail_oscillation) {
    hi = cfg.domain_cap;
    tail = 2.0 * f.tail_oscillation(cfg.domain_cap);
  } else {
    throw UnboundedFunctionError(f.name + ": second-order modulus needs decay or period metadata");
  }
  const int mx = 2 * cfg.grid_points - 1;
  const int mh = cfg.grid_points;
  double best = 0.0;
  for (int j = 1; j <= mh; ++j) {
    const double h = step_bound * j / mh;
    for (int i = 0; i < mx; ++i) {
      const double x = hi * i / (mx - 1);
      best = std::max(best, std::abs(f(x + 2 * h) - 2 * f(x + h) + f(x)));
    }
  }
  return std::max(best, tail);
}

// ---------------------------------------------------------------------------
// Bound checks
// ---------------------------------------------------------------------------

struct BoundCheck {
  std::string theorem_id;
  double n = 0.0;
  double c = 0.0;
  double beta = 0.0;
  double x = 0.0;
  double a = kNaN;   ///< interval endpoint, NaN for pointwise checks
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = 0.0;
  double numerical_error = 0.0;  ///< estimated error of lhs from truncation and quadrature
  double m_required = kNaN;      ///< smallest constant M making this check pass (direct theorem)
};

namespace detail {

// |L f(x) - f(x)| and its error: tail, quadrature and a few ulps of both terms.
inline std::pair<double, double> operator_error(const OperatorEvaluator& op, double x) {
  const auto r = op(x);
  const double fx = op.function()(x);
  const double err = r.est_tail_bound + r.quad_error_est + 8e-16 * (std::abs(r.value) + std::abs(fx));
  return {std::abs(r.value - fx), err};
}

}  // namespace detail

/// |D(f,x) - f(x)| <= omega(f, mu1) + M omega_2(f, sqrt(mu1^2 + mu2)), f bounded, n > 3c.
inline BoundCheck check_direct_bound(const OperatorParams& p, const TestFunction& f, double x,
                                     const EvalConfig& cfg, double constant_m = 2.0) {
  if (!f.bounded() && !detail::affine_slope(f))
    throw UnboundedFunctionError(f.name + ": the direct estimate applies to bounded functions");
  p.require(3, "direct estimate");
  const OperatorEvaluator op(OperatorKind::JainBaskakov, p, f, cfg);
  const double mu1 = d_mu1(p, x);
  const double mu2 = d_mu2(p, x);
  const double w1 = modulus1_global(f, mu1, cfg);
  const double w2 = modulus2(f, std::sqrt(mu1 * mu1 + mu2), cfg);
  BoundCheck b;
  b.theorem_id = "direct";
  b.n = p.n;
  b.c = p.c;
  b.beta = p.beta;
  b.x = x;
  std::tie(b.lhs, b.numerical_error) = detail::operator_error(op, x);
  b.rhs = w1 + constant_m * w2;
  b.slack = b.rhs - b.lhs;
  const double excess = b.lhs - b.numerical_error - w1;
  if (excess <= 0.0)
    b.m_required = 0.0;
  else
    b.m_required = w2 > 0.0 ? excess / w2 : kInf;
  return b;
}

/// Pointwise rate estimate on a grid of [0, a]:
/// |D(f,x) - f(x)| <= 6 M_f (1 + a^2) mu2(x) + 2 omega_{a+1}(f, sqrt(mu2(x))).
inline std::vector<BoundCheck> rate_bound_profile(const OperatorParams& p, const TestFunction& f, double a,
                                                  const EvalConfig& cfg) {
  if (!f.rho0_constant) throw DomainError(f.name + ": the rate estimate needs a rho0 constant M_f");
  if (!(a > 0.0)) throw DomainError("rate estimate: a must be positive");
  p.require(3, "rate estimate");
  const double mf = *f.rho0_constant;
  const OperatorEvaluator op(OperatorKind::JainBaskakov, p, f, cfg);
  const int m = cfg.grid_points;
  std::vector<BoundCheck> out;
  out.reserve(m);
  for (int i = 0; i < m; ++i) {
    const double x = i + 1 == m ? a : a * i / (m - 1);
    const double mu2 = d_mu2(p, x);
    BoundCheck b;
    b.theorem_id = "rate";
    b.n = p.n;
    b.c = p.c;
    b.beta = p.beta;
    b.x = x;
    b.a = a;
    std::tie(b.lhs, b.numerical_error) = detail::operator_error(op, x);
    b.rhs = 6.0 * mf * (1.0 + a * a) * mu2 + 2.0 * modulus1(f, a + 1.0, std::sqrt(mu2), cfg);
    b.slack = b.rhs - b.lhs;
    out.push_back(b);
  }
  return out;
}

/// Worst point of rate_bound_profile.
inline BoundCheck check_rate_bound(const OperatorParams& p, const TestFunction& f, double a, const EvalConfig& cfg) {
  const auto prof = rate_bound_profile(p, f, a, cfg);
  return *std::min_element(prof.begin(), prof.end(),
                           [](const BoundCheck& l, const BoundCheck& r) { return l.slack < r.slack; });
}

// ---------------------------------------------------------------------------
// Weighted norms
// ---------------------------------------------------------------------------

struct WeightedNormEstimate {
  double n = 0.0;
  double beta = 0.0;
  double value = 0.0;      ///< sup over [0, domain_cap] of |D f - f| / (1 + x^2)^(1 + lambda)
  double lambda = 0.0;
  double domain_cap = 0.0;
  double tail_bound = 0.0; ///< bound on the same ratio for x > domain_cap
  double argmax = 0.0;
};

/// 2c/(n-2c) + n beta / ((n-2c)(1-beta)): the rho0-norm majorant for f = t.
inline double weighted_majorant_e1(const OperatorParams& p) {
  const double n = p.n, c = p.c, b = p.beta;
  return 2 * c / (n - 2 * c) + n * b / ((n - 2 * c) * (1 - b));
}

/// |n^2/((n-2c)(n-3c)(1-b)^2) - 1| + n(2 - 2b + b^2)/((n-2c)(n-3c)(1-b)^3) / 2: the majorant for f = t^2.
inline double weighted_majorant_e2(const OperatorParams& p) {
  const double n = p.n, c = p.c, b = p.beta, q = 1 - b;
  const double den = (n - 2 * c) * (n - 3 * c);
  return std::abs(n * n / (den * q * q) - 1.0) + 0.5 * n * (2 - 2 * b + b * b) / (den * q * q * q);
}

namespace detail {

// sup_{x > cap} M_f (2 + D(t^2, x) + x^2) / (1 + x^2)^(1+lambda), sampled on a
// geometric grid together with the limit x -> inf.
inline double weighted_tail_bound(const OperatorParams& p, double mf, double lambda, double cap) {
  double best = 0.0;
  auto ratio = [&](double x) {
    return mf * (2.0 + d_moment_exact(p, 2, x) + x * x) / std::pow(1.0 + x * x, 1.0 + lambda);
  };
  for (double x = cap; x < cap * 1e8; x *= 1.05) best = std::max(best, ratio(x));
  if (lambda == 0.0) {
    const double n = p.n, c = p.c, q = 1 - p.beta;
    best = std::max(best, mf * (1.0 + n * n / ((n - 2 * c) * (n - 3 * c) * q * q)));
  }
  return best;
}

}  // namespace detail

/// Weighted sup-norm error for each parameter set (one per n).
inline std::vector<WeightedNormEstimate> weighted_norm_error(const std::vector<OperatorParams>& seq,
                                                             const TestFunction& f, double lambda,
                                                             const EvalConfig& cfg) {
  if (!f.rho0_constant) throw DomainError(f.name + ": weighted approximation needs f in the rho0 class");
  if (!(lambda >= 0.0)) throw DomainError("lambda must be nonnegative");
  return parallel_map(seq.size(), [&](std::size_t idx) {
    const OperatorParams& p = seq[idx];
    p.require(3, "weighted approximation");
    const OperatorEvaluator op(OperatorKind::JainBaskakov, p, f, cfg);
    WeightedNormEstimate w;
    w.n = p.n;
    w.beta = p.beta;
    w.lambda = lambda;
    w.domain_cap = cfg.domain_cap;
    const int m = cfg.grid_points;
    for (int i = 0; i < m; ++i) {
      const double x = i + 1 == m ? cfg.domain_cap : cfg.domain_cap * i / (m - 1);
      const double r = std::abs(op(x).value - f(x)) / std::pow(1.0 + x * x, 1.0 + lambda);
      if (r > w.value) {
        w.value = r;
        w.argmax = x;
      }
    }
    w.tail_bound = detail::weighted_tail_bound(p, *f.rho0_constant, lambda, cfg.domain_cap);
    return w;
  });
}

// ---------------------------------------------------------------------------
// Sweeps
// ---------------------------------------------------------------------------

/// log(e_{i-1} / e_i) / log(n_i / n_{i-1}); NaN for the first entry or when undefined.
inline std::vector<double> empirical_orders(const std::vector<double>& ns, const std::vector<double>& errors) {
  std::vector<double> out(errors.size(), kNaN);
  for (std::size_t i = 1; i < errors.size(); ++i) {
    if (errors[i] > 0.0 && errors[i - 1] > 0.0 && ns[i] != ns[i - 1])
      out[i] = std::log(errors[i - 1] / errors[i]) / std::log(ns[i] / ns[i - 1]);
  }
  return out;
}

struct SweepResult {
  double n = 0.0;
  double beta = 0.0;
  double x = 0.0;
  double value = 0.0;
  double target = 0.0;     ///< f(x)
  double error = 0.0;      ///< |value - target|
  double predicted = kNaN; ///< mu1 f'(x) + mu2 f''(x) / 2 when f is C^2
  double order = kNaN;
};

/// |L_n f(x) - f(x)| over n, fixed c and beta.
inline std::vector<SweepResult> convergence_sweep(OperatorKind kind, double c, double beta, const TestFunction& f,
                                                  double x, const std::vector<double>& n_values,
                                                  const EvalConfig& cfg) {
  auto rows = parallel_map(n_values.size(), [&](std::size_t i) {
    const OperatorParams p{n_values[i], c, beta};
    const OperatorEvaluator op(kind, p, f, cfg);
    SweepResult r;
    r.n = p.n;
    r.beta = beta;
    r.x = x;
    r.value = op(x).value;
    r.target = f(x);
    r.error = std::abs(r.value - r.target);
    if (f.has_derivatives() && p.exceeds(moment_threshold(kind, 2)))
      r.predicted = central_moment(kind, p, 1, x) * f.deriv1(x) + 0.5 * central_moment(kind, p, 2, x) * f.deriv2(x);
    return r;
  });
  std::vector<double> ns, errs;
  for (const auto& r : rows) {
    ns.push_back(r.n);
    errs.push_back(r.error);
  }
  const auto ord = empirical_orders(ns, errs);
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i].order = ord[i];
  return rows;
}

struct VoronovskajaRecord {
  double n = 0.0;
  double beta_n = 0.0;
  double value = 0.0;
  double scaled_error = 0.0;    ///< n (L_n f(x) - f(x))
  double predicted_limit = 0.0;
  double gap = 0.0;             ///< |scaled_error - predicted_limit|
  double noise = 0.0;           ///< n times the numerical error estimate
  bool noise_dominated = false; ///< noise >= gap: the gap is not resolved
  double order = kNaN;          ///< empirical order of the gap
};

/// x (l + 2c) f'(x) + x (2 + x c) f''(x) / 2 for D with n beta_n -> l;
/// x (2 + x c) f''(x) / 2 for the King-type operators.
inline double voronovskaja_limit(OperatorKind kind, double c, double l, const TestFunction& f, double x) {
  if (!f.has_derivatives()) throw DomainError(f.name + ": Voronovskaja limit needs f' and f''");
  const double second = x * (2.0 + x * c) / 2.0 * f.deriv2(x);
  if (kind == OperatorKind::KingJainBaskakov) return second;
  if (kind == OperatorKind::JainBaskakov) return x * (l + 2.0 * c) * f.deriv1(x) + second;
  throw DomainError("Voronovskaja sweeps cover the Jain-Baskakov and King-type operators");
}

/// beta_n = l / n for D, 1 / n^2 for King.
inline double voronovskaja_beta(OperatorKind kind, double l, double n) {
  return kind == OperatorKind::KingJainBaskakov ? 1.0 / (n * n) : l / n;
}

/// Runs n (L_n f(x) - f(x)) against its limit. Tolerances are tightened per n
/// (tail_eps / n^2, quad_rel_tol / n floored at 1e-14) so the factor n does not
/// amplify numerical error past the asymptotic gap.
inline std::vector<VoronovskajaRecord> voronovskaja_sweep(OperatorKind kind, double c, double l,
                                                          const TestFunction& f, double x,
                                                          const std::vector<double>& n_values,
                                                          const EvalConfig& cfg) {
  if (!(x > 0.0)) throw DomainError("Voronovskaja point must be positive");
  if (l < 0.0) throw DomainError("l must be nonnegative");
  const double limit = voronovskaja_limit(kind, c, l, f, x);
  auto rows = parallel_map(n_values.size(), [&](std::size_t i) {
    const double n = n_values[i];
    const OperatorParams p{n, c, voronovskaja_beta(kind, l, n)};
    EvalConfig local = cfg;
    local.tail_eps = cfg.tail_eps / (n * n);
    local.quad_rel_tol = std::max(cfg.quad_rel_tol / n, 1e-14);
    const OperatorEvaluator op(kind, p, f, local);
    const auto r = op(x);
    VoronovskajaRecord rec;
    rec.n = n;
    rec.beta_n = p.beta;
    rec.value = r.value;
    rec.scaled_error = n * (r.value - f(x));
    rec.predicted_limit = limit;
    rec.gap = std::abs(rec.scaled_error - limit);
    rec.noise = n * (r.quad_error_est + r.est_tail_bound + 4e-16 * (std::abs(r.value) + std::abs(f(x))));
    rec.noise_dominated = rec.noise >= rec.gap;
    return rec;
  });
  std::vector<double> ns, gaps;
  for (const auto& r : rows) {
    ns.push_back(r.n);
    gaps.push_back(r.gap);
  }
  const auto ord = empirical_orders(ns, gaps);
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i].order = ord[i];
  return rows;
}

/// n (L_n f(x) - f(x)) from closed-form moments, for a polynomial f = sum_k a_k t^k (degree <= 4).
inline double scaled_error_exact(OperatorKind kind, const OperatorParams& p, const std::vector<double>& coeffs,
                                 double x) {
  if (coeffs.size() > 5) throw DomainError("scaled_error_exact: degree must not exceed 4");
  const long double lx = x;
  CompensatedSum<long double> acc;
  for (std::size_t k = 1; k < coeffs.size(); ++k) {
    const int m = static_cast<int>(k);
    long double mk = 0.0L;
    switch (kind) {
      case OperatorKind::Jain: mk = jain_moment<long double>(p, m, lx); break;
      case OperatorKind::JainBaskakov: mk = d_moment_exact<long double>(p, m, lx); break;
      case OperatorKind::KingJainBaskakov: mk = king_moment<long double>(p, m, lx); break;
    }
    acc += static_cast<long double>(coeffs[k]) * (mk - std::pow(lx, m));
  }
  return static_cast<double>(static_cast<long double>(p.n) * acc.value());
}

}  // namespace jainop
