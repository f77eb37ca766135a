#pragma once

// Test functions: a value on [0, inf) plus the metadata the operators and the
// analysis harness need (growth class, sup bound, kinks, tail behaviour).

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "jainop/core.hpp"

namespace jainop {

using RealFn = std::function<double(double)>;

struct TestFunction {
  std::string name;
  RealFn value;
  RealFn deriv1;  ///< empty when f is not C^1
  RealFn deriv2;  ///< empty when f is not C^2

  /// |f(t)| <= growth_constant * (1 + t^growth_degree) on [0, inf).
  int growth_degree = 0;
  double growth_constant = 1.0;

  /// sup |f| when f is bounded.
  std::optional<double> sup_bound;
  /// M_f with |f(t)| <= M_f (1 + t^2), when f is in the rho0 class.
  std::optional<double> rho0_constant;
  /// Exact degree when f is a polynomial.
  std::optional<int> polynomial_degree;

  /// Points t > 0 where f' jumps; quadrature splits there.
  std::vector<double> kinks;
  /// Bound on sup_{s,t >= X} |f(s) - f(t)|, for functions that settle down.
  RealFn tail_oscillation;
  /// Period, for periodic functions (a window of one period sees every value).
  std::optional<double> period;
  /// Length scale of oscillation that persists as t -> inf; kernel
  /// quadrature splits at its multiples. Equals the period when there is one.
  std::optional<double> wavelength;

  double operator()(double t) const { return value(t); }
  bool bounded() const noexcept { return sup_bound.has_value(); }
  bool has_derivatives() const noexcept { return deriv1 && deriv2; }
};

// ---------------------------------------------------------------------------
// Builders
// ---------------------------------------------------------------------------

inline TestFunction monomial(int m) {
  if (m < 0) throw DomainError("monomial: negative degree");
  TestFunction f;
  f.name = "e" + std::to_string(m);
  f.value = [m](double t) { return m == 0 ? 1.0 : std::pow(t, m); };
  f.deriv1 = [m](double t) { return m == 0 ? 0.0 : m * std::pow(t, m - 1); };
  f.deriv2 = [m](double t) { return m < 2 ? 0.0 : m * (m - 1) * std::pow(t, m - 2); };
  f.growth_degree = m;
  f.growth_constant = 1.0;
  f.polynomial_degree = m;
  if (m == 0) {
    f.sup_bound = 1.0;
    f.tail_oscillation = [](double) { return 0.0; };
  }
  if (m <= 2) f.rho0_constant = 1.0;
  return f;
}

inline TestFunction affine(double a, double b) {
  TestFunction f;
  f.name = "affine";
  f.value = [a, b](double t) { return a + b * t; };
  f.deriv1 = [b](double) { return b; };
  f.deriv2 = [](double) { return 0.0; };
  f.growth_degree = b == 0.0 ? 0 : 1;
  f.growth_constant = std::max(std::abs(a), std::abs(b));
  f.polynomial_degree = b == 0.0 ? 0 : 1;
  f.rho0_constant = std::abs(a) + std::abs(b);
  if (b == 0.0) {
    f.sup_bound = std::abs(a);
    f.tail_oscillation = [](double) { return 0.0; };
  }
  return f;
}

/// (t - x0)^k, the integrand of the k-th central moment at x0.
inline TestFunction shifted_power(double x0, int k) {
  TestFunction f;
  f.name = "shifted-power";
  f.value = [x0, k](double t) { return std::pow(t - x0, k); };
  f.deriv1 = [x0, k](double t) { return k == 0 ? 0.0 : k * std::pow(t - x0, k - 1); };
  f.deriv2 = [x0, k](double t) { return k < 2 ? 0.0 : k * (k - 1) * std::pow(t - x0, k - 2); };
  f.growth_degree = k;
  // |t - x0|^k <= 2^(k-1) (t^k + x0^k) <= 2^(k-1) max(1, x0^k) (1 + t^k)
  f.growth_constant = std::ldexp(1.0, std::max(k - 1, 0)) * std::max(1.0, std::pow(x0, k));
  f.polynomial_degree = k;
  return f;
}

/// alpha f + beta g, with metadata combined conservatively.
inline TestFunction linear_combination(double alpha, const TestFunction& f, double beta,
                                       const TestFunction& g) {
  TestFunction h;
  h.name = "lincomb(" + f.name + "," + g.name + ")";
  h.value = [alpha, beta, fv = f.value, gv = g.value](double t) {
    return alpha * fv(t) + beta * gv(t);
  };
  if (f.deriv1 && g.deriv1)
    h.deriv1 = [alpha, beta, a = f.deriv1, b = g.deriv1](double t) {
      return alpha * a(t) + beta * b(t);
    };
  if (f.deriv2 && g.deriv2)
    h.deriv2 = [alpha, beta, a = f.deriv2, b = g.deriv2](double t) {
      return alpha * a(t) + beta * b(t);
    };
  h.growth_degree = std::max(f.growth_degree, g.growth_degree);
  h.growth_constant = std::abs(alpha) * f.growth_constant + std::abs(beta) * g.growth_constant;
  if (f.sup_bound && g.sup_bound) h.sup_bound = std::abs(alpha) * *f.sup_bound + std::abs(beta) * *g.sup_bound;
  if (f.rho0_constant && g.rho0_constant)
    h.rho0_constant = std::abs(alpha) * *f.rho0_constant + std::abs(beta) * *g.rho0_constant;
  if (f.polynomial_degree && g.polynomial_degree)
    h.polynomial_degree = std::max(*f.polynomial_degree, *g.polynomial_degree);
  h.kinks = f.kinks;
  h.kinks.insert(h.kinks.end(), g.kinks.begin(), g.kinks.end());
  std::sort(h.kinks.begin(), h.kinks.end());
  h.kinks.erase(std::unique(h.kinks.begin(), h.kinks.end()), h.kinks.end());
  if (f.period && g.period && *f.period == *g.period) h.period = f.period;
  if (f.wavelength || g.wavelength)
    h.wavelength = std::min(f.wavelength.value_or(kInf), g.wavelength.value_or(kInf));
  if (f.tail_oscillation && g.tail_oscillation)
    h.tail_oscillation = [alpha, beta, a = f.tail_oscillation, b = g.tail_oscillation](double x) {
      return std::abs(alpha) * a(x) + std::abs(beta) * b(x);
    };
  return h;
}

// ---------------------------------------------------------------------------
// Registry
// ---------------------------------------------------------------------------

namespace detail {

inline TestFunction exp_neg() {
  TestFunction f;
  f.name = "exp-neg";
  f.value = [](double t) { return std::exp(-t); };
  f.deriv1 = [](double t) { return -std::exp(-t); };
  f.deriv2 = [](double t) { return std::exp(-t); };
  f.sup_bound = 1.0;
  f.rho0_constant = 1.0;
  f.tail_oscillation = [](double x) { return std::exp(-std::max(x, 0.0)); };
  return f;
}

inline TestFunction sine() {
  TestFunction f;
  f.name = "sin";
  f.value = [](double t) { return std::sin(t); };
  f.deriv1 = [](double t) { return std::cos(t); };
  f.deriv2 = [](double t) { return -std::sin(t); };
  f.sup_bound = 1.0;
  f.rho0_constant = 1.0;
  f.period = 2.0 * std::numbers::pi;
  f.wavelength = f.period;
  f.tail_oscillation = [](double) { return 2.0; };
  return f;
}

inline TestFunction recip_sq() {
  TestFunction f;
  f.name = "recip-sq";
  f.value = [](double t) { return 1.0 / (1.0 + t * t); };
  f.deriv1 = [](double t) {
    const double d = 1.0 + t * t;
    return -2.0 * t / (d * d);
  };
  f.deriv2 = [](double t) {
    const double d = 1.0 + t * t;
    return (6.0 * t * t - 2.0) / (d * d * d);
  };
  f.sup_bound = 1.0;
  f.rho0_constant = 1.0;
  f.tail_oscillation = [](double x) { return 1.0 / (1.0 + x * x); };
  return f;
}

inline TestFunction abs_shift() {
  TestFunction f;
  f.name = "abs-shift";
  f.value = [](double t) { return std::abs(t - 1.0); };
  f.growth_degree = 1;
  f.growth_constant = 1.0;
  f.rho0_constant = 1.0;
  f.kinks = {1.0};
  return f;
}

inline TestFunction t_exp_neg() {
  TestFunction f;
  f.name = "t-exp-neg";
  f.value = [](double t) { return t * std::exp(-t); };
  f.deriv1 = [](double t) { return (1.0 - t) * std::exp(-t); };
  f.deriv2 = [](double t) { return (t - 2.0) * std::exp(-t); };
  f.growth_constant = std::exp(-1.0);
  f.sup_bound = std::exp(-1.0);
  f.rho0_constant = 1.0;
  // t e^-t decreases for t >= 1
  f.tail_oscillation = [](double x) { return x >= 1.0 ? x * std::exp(-x) : std::exp(-1.0); };
  return f;
}

}  // namespace detail

/// Stable CLI identifiers, in registry order.
inline const std::vector<std::string>& registry_names() {
  static const std::vector<std::string> names = {"e0",  "e1",       "e2",        "e3",
                                                 "e4",  "exp-neg",  "sin",       "recip-sq",
                                                 "abs-shift", "t-exp-neg"};
  return names;
}

inline TestFunction lookup(std::string_view name) {
  if (name.size() == 2 && name[0] == 'e' && name[1] >= '0' && name[1] <= '4') return monomial(name[1] - '0');
  if (name == "exp-neg") return detail::exp_neg();
  if (name == "sin") return detail::sine();
  if (name == "recip-sq") return detail::recip_sq();
  if (name == "abs-shift") return detail::abs_shift();
  if (name == "t-exp-neg") return detail::t_exp_neg();
  throw DomainError("unknown function '" + std::string(name) + "'");
}

inline std::vector<TestFunction> registry() {
  std::vector<TestFunction> out;
  for (const auto& n : registry_names()) out.push_back(lookup(n));
  return out;
}

// ---------------------------------------------------------------------------
// Registration checks
// ---------------------------------------------------------------------------

/// Checks the declared growth bound on a grid up to domain_cap and, where
/// derivatives are declared, compares them with centred differences (1e-5
/// relative). Returns an empty string on success, otherwise a description.
inline std::string check_metadata(const TestFunction& f, const EvalConfig& cfg) {
  const int n = std::max(cfg.grid_points, 2);
  const double h_fd = 1e-4;
  auto near_kink = [&](double t) {
    return std::any_of(f.kinks.begin(), f.kinks.end(),
                       [&](double k) { return std::abs(t - k) < 4 * h_fd; });
  };
  for (int i = 0; i < n; ++i) {
    const double t = cfg.domain_cap * i / (n - 1);
    const double v = f(t);
    const double bound = f.growth_constant * (1.0 + std::pow(t, f.growth_degree));
    if (std::abs(v) > bound * (1 + 1e-12))
      return f.name + ": growth bound violated at t=" + std::to_string(t);
    if (f.sup_bound && std::abs(v) > *f.sup_bound * (1 + 1e-12))
      return f.name + ": sup bound violated at t=" + std::to_string(t);
    if (f.rho0_constant && std::abs(v) > *f.rho0_constant * (1.0 + t * t) * (1 + 1e-12))
      return f.name + ": rho0 bound violated at t=" + std::to_string(t);
    if (t < 2 * h_fd || near_kink(t)) continue;
    if (f.deriv1) {
      const double fd = (f(t + h_fd) - f(t - h_fd)) / (2 * h_fd);
      if (std::abs(fd - f.deriv1(t)) > 1e-5 * std::max(1.0, std::abs(fd)))
        return f.name + ": deriv1 mismatch at t=" + std::to_string(t);
    }
    if (f.deriv2) {
      const double fd = (f(t + h_fd) - 2 * f(t) + f(t - h_fd)) / (h_fd * h_fd);
      if (std::abs(fd - f.deriv2(t)) > 1e-5 * std::max(1.0, std::abs(fd)))
        return f.name + ": deriv2 mismatch at t=" + std::to_string(t);
    }
  }
  return {};
}

}  // namespace jainop
