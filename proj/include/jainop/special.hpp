#pragma once

// Saddle-point evaluation of Poisson log-probabilities (Loader 2000).
// log P(v; mu) = -stirlerr(v) - bd0(v, mu) - log(2 pi v) / 2
// stays accurate to a few ulps where the naive v log mu - mu - lgamma(v+1)
// loses everything to cancellation.

#include <cmath>
#include <numbers>

namespace jainop::special {

/// log(v!) - [(v + 1/2) log v - v + log(2 pi)/2], for integer v >= 1.
inline double stirlerr(double v) {
  constexpr double S0 = 1.0 / 12.0;
  constexpr double S1 = 1.0 / 360.0;
  constexpr double S2 = 1.0 / 1260.0;
  constexpr double S3 = 1.0 / 1680.0;
  constexpr double S4 = 1.0 / 1188.0;
  if (v <= 15.0) {
    // small v: direct, in extended precision to absorb the cancellation
    const long double lv = v;
    const long double half_log_2pi = 0.918938533204672741780329736405617639861L;
    return static_cast<double>(std::lgamma(lv + 1.0L) - (lv + 0.5L) * std::log(lv) + lv -
                               half_log_2pi);
  }
  const double nn = v * v;
  if (v > 500.0) return (S0 - S1 / nn) / v;
  if (v > 80.0) return (S0 - (S1 - S2 / nn) / nn) / v;
  if (v > 35.0) return (S0 - (S1 - (S2 - S3 / nn) / nn) / nn) / v;
  return (S0 - (S1 - (S2 - (S3 - S4 / nn) / nn) / nn) / nn) / v;
}

/// Deviance term x log(x/m) + m - x, evaluated without cancellation near x = m.
inline double bd0(double x, double m) {
  if (std::abs(x - m) < 0.1 * (x + m)) {
    double v = (x - m) / (x + m);
    double s = (x - m) * v;
    double ej = 2.0 * x * v;
    v *= v;
    for (int j = 1; j < 1000; ++j) {
      ej *= v;
      const double s1 = s + ej / (2 * j + 1);
      if (s1 == s) return s1;
      s = s1;
    }
    return s;
  }
  return x * std::log(x / m) + m - x;
}

/// log of e^-mu mu^v / v!, for integer v >= 0 and mu > 0.
inline double log_poisson_pmf(double v, double mu) {
  if (v == 0.0) return -mu;
  return -stirlerr(v) - bd0(v, mu) - 0.5 * std::log(2.0 * std::numbers::pi * v);
}

}  // namespace jainop::special
