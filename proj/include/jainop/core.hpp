#pragma once

// Shared vocabulary: parameter triple, numerical tolerances, error types and
// a compensated accumulator used by every summation in the library.

#include <charconv>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>

namespace jainop {

/// Shortest decimal form that round-trips, for messages.
inline std::string format_number(double v) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual std::string_view kind() const noexcept { return "error"; }
};

/// Argument outside the mathematical domain (x < 0, beta out of range, ...).
class DomainError : public Error {
 public:
  using Error::Error;
  std::string_view kind() const noexcept override { return "domain"; }
};

/// A formula needs n > k c and the parameters do not satisfy it.
class ThresholdError : public Error {
 public:
  using Error::Error;
  std::string_view kind() const noexcept override { return "threshold"; }
};

/// f grows too fast for the Baskakov kernel: needs n > (d+1) c.
class IntegrabilityError : public Error {
 public:
  using Error::Error;
  std::string_view kind() const noexcept override { return "integrability"; }
};

/// Series or quadrature did not reach its tolerance within the caps.
class ConvergenceError : public Error {
 public:
  using Error::Error;
  std::string_view kind() const noexcept override { return "convergence"; }
};

/// A bounded-function operation was handed a function with no sup bound.
class UnboundedFunctionError : public Error {
 public:
  using Error::Error;
  std::string_view kind() const noexcept override { return "unbounded"; }
};

// ---------------------------------------------------------------------------
// Parameters
// ---------------------------------------------------------------------------

/// Default public guard on beta. Jain moment factors (1-beta)^-7 amplify
/// rounding badly past this point.
inline constexpr double kDefaultBetaGuard = 0.95;

/// The triple (n, c, beta). n is real; sweeps use integer values.
struct OperatorParams {
  double n = 10.0;
  double c = 1.0;
  double beta = 0.0;

  friend bool operator==(const OperatorParams&, const OperatorParams&) = default;

  /// Throws DomainError unless n > 0, c > 0 and 0 <= beta <= beta_guard < 1.
  void validate(double beta_guard = kDefaultBetaGuard) const {
    if (!(std::isfinite(n) && n > 0.0)) throw DomainError("n must be a positive finite number");
    if (!(std::isfinite(c) && c > 0.0)) throw DomainError("c must be a positive finite number");
    if (!(beta >= 0.0 && beta < 1.0)) throw DomainError("beta must lie in [0, 1)");
    if (beta > beta_guard)
      throw DomainError("beta = " + format_number(beta) + " exceeds the configured guard " +
                        format_number(beta_guard));
  }

  /// n > order * c, the condition for the (order-1)-th kernel moment.
  bool exceeds(int order) const noexcept { return n > order * c; }

  /// Throws ThresholdError unless n > order * c.
  void require(int order, std::string_view what) const {
    if (!exceeds(order))
      throw ThresholdError(std::string(what) + " requires n > " + std::to_string(order) +
                           "c (n = " + format_number(n) + ", c = " + format_number(c) + ")");
  }
};

/// Numerical tolerances shared by evaluation and analysis.
struct EvalConfig {
  double tail_eps = 1e-12;      ///< unaccounted basis mass at which the v-series stops
  double quad_rel_tol = 1e-12;  ///< target relative error of each kernel integral
  int quad_max_nodes = 512;     ///< Gauss-Jacobi node cap
  int grid_points = 201;        ///< samples for moduli and sup norms
  double domain_cap = 10.0;     ///< truncation point for sups over [0, inf)
  double beta_guard = kDefaultBetaGuard;
  std::int64_t v_max = 1'000'000;  ///< hard cap on series length

  void validate() const {
    if (!(tail_eps > 0.0 && tail_eps < 1.0)) throw DomainError("tail_eps must lie in (0, 1)");
    if (!(quad_rel_tol > 0.0)) throw DomainError("quad_rel_tol must be positive");
    if (quad_max_nodes < 2) throw DomainError("quad_max_nodes must be at least 2");
    if (grid_points < 2) throw DomainError("grid_points must be at least 2");
    if (!(domain_cap > 0.0)) throw DomainError("domain_cap must be positive");
    if (!(beta_guard >= 0.0 && beta_guard < 1.0)) throw DomainError("beta_guard must lie in [0, 1)");
    if (v_max < 1) throw DomainError("v_max must be positive");
  }
};

enum class OperatorKind { Jain, JainBaskakov, KingJainBaskakov };

inline constexpr std::string_view to_string(OperatorKind k) noexcept {
  switch (k) {
    case OperatorKind::Jain: return "jain";
    case OperatorKind::JainBaskakov: return "jain-baskakov";
    case OperatorKind::KingJainBaskakov: return "king";
  }
  return "?";
}

inline OperatorKind parse_operator_kind(std::string_view s) {
  if (s == "jain") return OperatorKind::Jain;
  if (s == "jain-baskakov" || s == "jb") return OperatorKind::JainBaskakov;
  if (s == "king" || s == "king-jain-baskakov") return OperatorKind::KingJainBaskakov;
  throw DomainError("unknown operator '" + std::string(s) + "'");
}

// ---------------------------------------------------------------------------
// Neumaier summation
// ---------------------------------------------------------------------------

template <class Real = double>
class CompensatedSum {
 public:
  constexpr CompensatedSum& operator+=(Real x) noexcept {
    const Real t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
    return *this;
  }
  constexpr Real value() const noexcept { return sum_ + comp_; }

 private:
  Real sum_{0};
  Real comp_{0};
};

inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
inline constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace jainop
