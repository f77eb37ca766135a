#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <vector>

#include "jainop/moments.hpp"
#include "jainop/operators.hpp"

using namespace jainop;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

// Sum of w(v) * term(v) over the generalized Poisson law with weights from
// lgamma, run far past the bulk. Independent of the library's basis code.
template <class Term>
long double gp_sum(double n, double beta, double x, Term&& term) {
  const long double lam = static_cast<long double>(n) * x;
  const long double b = beta;
  long double s = std::exp(-lam) * term(0);
  const long double mean = lam / (1 - b);
  const long double sd = std::sqrt(lam / ((1 - b) * (1 - b) * (1 - b)));
  const int vmax = static_cast<int>(mean + 60 * sd + 200);
  for (int v = 1; v <= vmax; ++v) {
    const long double mu = lam + v * b;
    const long double lw = std::log(lam) + (v - 1) * std::log(mu) - mu - std::lgamma(v + 1.0L);
    s += std::exp(lw) * term(v);
  }
  return s;
}

// P(t^m, x) by direct summation.
double jain_oracle(const OperatorParams& p, int m, double x) {
  return static_cast<double>(gp_sum(p.n, p.beta, x, [&](int v) { return std::pow(v / static_cast<long double>(p.n), m); }));
}

// D(t^m, x) = sum_v w(v) prod_{k<m} (v+k)/(n-(k+2)c), by direct summation.
double d_oracle(const OperatorParams& p, int m, double x) {
  if (m == 0) return 1.0;
  return static_cast<double>(gp_sum(p.n, p.beta, x, [&](int v) {
    long double r = 1.0L;
    for (int k = 0; k < m; ++k) r *= (v + k) / (static_cast<long double>(p.n) - (k + 2) * static_cast<long double>(p.c));
    return r;
  }));
}

struct GridPoint {
  OperatorParams p;
  double x;
};

std::vector<GridPoint> moment_grid(int m) {
  std::vector<GridPoint> out;
  for (double c : {0.5, 1.0, 2.0})
    for (double mult : {1.5, 4.0, 30.0})
      for (double beta : {0.0, 0.2, 0.5})
        for (double x : {0.1, 1.0, 3.0}) out.push_back({{(m + 1) * c * mult, c, beta}, x});
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Jain
// ---------------------------------------------------------------------------

TEST_CASE("jain_moment: examples", "[moments][jain]") {
  for (double x : {0.0, 0.7, 5.0}) CHECK(jain_moment({9.0, 1.0, 0.4}, 0, x) == 1.0);
  for (double x : {0.0, 0.7, 5.0}) CHECK(jain_moment({9.0, 1.0, 0.0}, 1, x) == x);
  CHECK_THAT(jain_moment({10.0, 1.0, 0.0}, 3, 1.0), WithinRel(1.31, 1e-15));
  CHECK_THAT(jain_moment({50.0, 1.0, 0.2}, 2, 1.0), WithinRel(1.6015625, 1e-15));
}

TEST_CASE("jain_moment: matches direct summation of the basis", "[moments][jain][oracle]") {
  for (int m = 0; m <= 4; ++m) {
    for (const auto& g : moment_grid(m)) {
      INFO("m=" << m << " n=" << g.p.n << " beta=" << g.p.beta << " x=" << g.x);
      CHECK_THAT(jain_moment(g.p, m, g.x), WithinRel(jain_oracle(g.p, m, g.x), 1e-12));
    }
  }
}

TEST_CASE("jain_moment: matches eval_jain on monomials", "[moments][jain][oracle]") {
  for (int m = 0; m <= 4; ++m) {
    for (const auto& g : moment_grid(m)) {
      INFO("m=" << m << " n=" << g.p.n << " beta=" << g.p.beta << " x=" << g.x);
      CHECK_THAT(eval_jain(g.p, monomial(m), g.x).value, WithinRel(jain_moment(g.p, m, g.x), 1e-8));
    }
  }
}

TEST_CASE("jain_moment_display: exact at beta = 0, O(1/n^2) away otherwise", "[moments][jain][display]") {
  for (int m : {3, 4}) {
    CHECK_THAT(jain_moment_display({40.0, 1.0, 0.0}, m, 1.3), WithinRel(jain_moment({40.0, 1.0, 0.0}, m, 1.3), 1e-14));
    std::vector<double> scaled;
    for (double n = 64; n <= 8192; n *= 2) {
      const OperatorParams p{n, 1.0, 0.3};
      scaled.push_back(n * n * std::abs(jain_moment_display(p, m, 1.0) - jain_moment(p, m, 1.0)));
    }
    // n^2 * gap settles to a nonzero constant
    CHECK(scaled.back() > 0.0);
    CHECK_THAT(scaled.back(), WithinRel(scaled[scaled.size() - 2], 0.02));
  }
}

// ---------------------------------------------------------------------------
// Jain-Baskakov
// ---------------------------------------------------------------------------

TEST_CASE("d_moment_exact: examples", "[moments][baskakov]") {
  CHECK_THAT(d_moment_exact({10.0, 1.0, 0.0}, 1, 2.0), WithinRel(2.5, 1e-15));
  CHECK_THAT(d_moment_exact({10.0, 1.0, 0.0}, 2, 1.0), WithinRel(15.0 / 7.0, 1e-15));
  CHECK(d_moment_exact({3.5, 1.0, 0.3}, 0, 2.0) == 1.0);
  CHECK_THROWS_AS(d_moment_exact({4.0, 1.0, 0.0}, 3, 1.0), ThresholdError);
  CHECK_THROWS_AS(d_moment_exact({40.0, 1.0, 0.0}, 5, 1.0), DomainError);
}

TEST_CASE("d_moment_exact: matches direct summation of the kernel products", "[moments][baskakov][oracle]") {
  for (int m = 0; m <= 4; ++m) {
    for (const auto& g : moment_grid(m)) {
      INFO("m=" << m << " n=" << g.p.n << " c=" << g.p.c << " beta=" << g.p.beta << " x=" << g.x);
      CHECK_THAT(d_moment_exact(g.p, m, g.x), WithinRel(d_oracle(g.p, m, g.x), 1e-12));
    }
  }
}

TEST_CASE("d_moment_exact: matches eval_jain_baskakov on monomials", "[moments][baskakov][oracle]") {
  for (int m = 0; m <= 4; ++m) {
    for (const auto& g : moment_grid(m)) {
      INFO("m=" << m << " n=" << g.p.n << " c=" << g.p.c << " beta=" << g.p.beta << " x=" << g.x);
      CHECK_THAT(eval_jain_baskakov(g.p, monomial(m), g.x).value, WithinRel(d_moment_exact(g.p, m, g.x), 1e-7));
    }
  }
}

TEST_CASE("d_moment_display: examples", "[moments][baskakov][display]") {
  CHECK(d_moment_display({20.0, 1.0, 0.2}, 3, 0.0) == 0.0);
  const double n = 1000.0;
  const double expected = n * n * n * (n + 12.0) / ((n - 2) * (n - 3) * (n - 4) * (n - 5));
  CHECK_THAT(d_moment_display({n, 1.0, 0.0}, 4, 1.0), WithinRel(expected, 1e-14));
  CHECK_THROWS_AS(d_moment_display({20.0, 1.0, 0.2}, 2, 1.0), DomainError);
  CHECK_THROWS_AS(d_moment_display({4.5, 1.0, 0.2}, 4, 1.0), ThresholdError);
}

TEST_CASE("d_moment_display: t^4 form is within o(1/n), t^3 form is not", "[moments][baskakov][display]") {
  for (double beta : {0.0, 0.2}) {
    for (double x : {0.5, 1.0}) {
      std::vector<double> gap3, gap4;
      for (double n = 64; n <= 8192; n *= 2) {
        const OperatorParams p{n, 1.0, beta};
        gap3.push_back(n * std::abs(d_moment_display(p, 3, x) - d_moment_exact<long double>(p, 3, x)));
        gap4.push_back(n * std::abs(d_moment_display(p, 4, x) - d_moment_exact<long double>(p, 4, x)));
      }
      INFO("beta=" << beta << " x=" << x);
      for (std::size_t i = 1; i < gap4.size(); ++i) CHECK(gap4[i] < gap4[i - 1]);
      // The printed t^3 form carries the opposite sign on its leading term.
      for (std::size_t i = 1; i < gap3.size(); ++i) CHECK(gap3[i] > gap3[i - 1]);
    }
  }
}

TEST_CASE("d central moments: examples and exact displays", "[moments][baskakov][central]") {
  const OperatorParams p{10.0, 1.0, 0.0};
  CHECK_THAT(d_mu1(p, 1.0), WithinRel(0.25, 1e-15));
  // D(t^2) - 2 x D(t) + x^2 = 15/7 - 5/2 + 1
  CHECK_THAT(d_mu2(p, 1.0), WithinRel(9.0 / 14.0, 1e-15));

  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> cd(0.2, 3.0), bd(0.0, 0.9), xd(0.0, 6.0), md(3.05, 200.0);
  for (int i = 0; i < 500; ++i) {
    const double c = cd(rng);
    const OperatorParams q{c * md(rng), c, bd(rng)};
    const double x = xd(rng);
    INFO("n=" << q.n << " c=" << q.c << " beta=" << q.beta << " x=" << x);
    CHECK_THAT(d_mu1(q, x), WithinAbs(d_central_moment_exact(q, 1, x), 1e-10 * std::max(1.0, d_mu1(q, x))));
    CHECK_THAT(d_mu2(q, x), WithinAbs(d_central_moment_exact(q, 2, x), 1e-10 * std::max(1.0, d_mu2(q, x))));
    CHECK(d_mu1(q, x) >= 0.0);
    if (x > 0) CHECK(d_mu2(q, x) > 0.0);
    if (q.exceeds(5)) {
      const auto cm = d_central_moments(q, x);
      CHECK(cm.mu2 >= 0.0);
      CHECK(cm.mu4 >= 0.0);
    }
  }
}

TEST_CASE("d central moments: binomial expansion matches numerical D((t-x)^k, x)", "[moments][baskakov][central]") {
  for (double beta : {0.0, 0.1, 0.4}) {
    for (double n : {12.0, 40.0, 150.0}) {
      for (double x : {0.2, 1.0, 2.5}) {
        const OperatorParams p{n, 1.0, beta};
        for (int k : {1, 2, 4}) {
          const double exact = d_central_moment_exact(p, k, x);
          const double numeric = eval_jain_baskakov(p, shifted_power(x, k), x).value;
          INFO("k=" << k << " n=" << n << " beta=" << beta << " x=" << x);
          CHECK_THAT(numeric, WithinRel(exact, 1e-6));
        }
      }
    }
  }
}

TEST_CASE("d_mu4_display: o(1/n) gap to the exact fourth central moment", "[moments][baskakov][display]") {
  for (double beta : {0.0, 0.1, 0.3}) {
    std::vector<double> gap;
    for (double n = 64; n <= 8192; n *= 2) {
      const OperatorParams p{n, 1.0, beta};
      gap.push_back(n * std::abs(d_mu4_display(p, 1.0) - d_central_moment_exact(p, 4, 1.0)));
    }
    INFO("beta=" << beta);
    for (std::size_t i = 1; i < gap.size(); ++i) CHECK(gap[i] < gap[i - 1]);
  }
}

// ---------------------------------------------------------------------------
// King-type
// ---------------------------------------------------------------------------

TEST_CASE("king_moment: identities and examples", "[moments][king]") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> cd(0.2, 3.0), bd(0.0, 0.9), xd(0.0, 6.0), md(3.01, 300.0);
  for (int i = 0; i < 1000; ++i) {
    const double c = cd(rng);
    const OperatorParams p{c * md(rng), c, bd(rng)};
    const double x = xd(rng);
    CHECK(king_moment(p, 0, x) == 1.0);
    CHECK_THAT(king_moment(p, 1, x), WithinAbs(x, 1e-12 * std::max(1.0, x)));
    CHECK(king_central_moment_exact(p, 1, x) == 0.0);
    CHECK_THAT(king_moment_display(p, 2, x), WithinRel(king_moment(p, 2, x), 1e-12));
    CHECK_THAT(king_mu2(p, x), WithinAbs(king_central_moment_exact(p, 2, x), 1e-11 * std::max(1.0, king_mu2(p, x))));
  }
  CHECK(king_moment({10.0, 1.0, 0.3}, 1, 3.0) == 3.0);
  CHECK_THAT(king_moment({13.0, 1.0, 0.0}, 2, 1.0), WithinRel(1.3, 1e-15));
  CHECK_THAT(king_mu2({13.0, 1.0, 0.0}, 1.0), WithinRel(0.3, 1e-15));
  CHECK_THROWS_AS(king_moment({3.0, 1.0, 0.0}, 1, 1.0), ThresholdError);
  CHECK_THROWS_AS(king_moment({4.5, 1.0, 0.0}, 4, 1.0), ThresholdError);
}

TEST_CASE("king_moment: matches eval_king on monomials", "[moments][king][oracle]") {
  for (int m = 0; m <= 4; ++m) {
    for (const auto& g : moment_grid(std::max(m, 2))) {
      INFO("m=" << m << " n=" << g.p.n << " c=" << g.p.c << " beta=" << g.p.beta << " x=" << g.x);
      CHECK_THAT(eval_king(g.p, monomial(m), g.x).value, WithinRel(king_moment(g.p, m, g.x), 1e-7));
    }
  }
}

TEST_CASE("king central moments: n mu*_4 decreases, displays approach exact", "[moments][king][display]") {
  for (double beta : {0.0, 0.2}) {
    for (double x : {0.5, 1.0, 2.0}) {
      std::vector<double> scaled, gap4;
      for (double n = 64; n <= 8192; n *= 2) {
        const OperatorParams p{n, 1.0, beta};
        const auto cm = king_central_moments(p, x);
        CHECK(cm.mu1 == 0.0);
        CHECK(cm.mu4 >= 0.0);
        scaled.push_back(n * cm.mu4);
        gap4.push_back(n * std::abs(king_moment_display(p, 4, x) - king_moment<long double>(p, 4, x)));
      }
      INFO("beta=" << beta << " x=" << x);
      for (std::size_t i = 1; i < scaled.size(); ++i) CHECK(scaled[i] < scaled[i - 1]);
      for (std::size_t i = 1; i < gap4.size(); ++i) CHECK(gap4[i] < gap4[i - 1]);
    }
  }
}

TEST_CASE("king_moment_display: t^3 form agrees only at beta = 0", "[moments][king][display]") {
  std::vector<double> gap0, gap1;
  for (double n = 64; n <= 8192; n *= 2) {
    gap0.push_back(n * std::abs(king_moment_display({n, 1.0, 0.0}, 3, 1.0) - king_moment<long double>({n, 1.0, 0.0}, 3, 1.0)));
    gap1.push_back(n * std::abs(king_moment_display({n, 1.0, 0.2}, 3, 1.0) - king_moment<long double>({n, 1.0, 0.2}, 3, 1.0)));
  }
  for (std::size_t i = 1; i < gap0.size(); ++i) CHECK(gap0[i] < gap0[i - 1]);
  CHECK(gap1.back() > 0.1);
}

// ---------------------------------------------------------------------------
// Dispatch
// ---------------------------------------------------------------------------

TEST_CASE("raw_moment / central_moment dispatch", "[moments]") {
  const OperatorParams p{30.0, 1.5, 0.25};
  for (int m = 0; m <= 4; ++m) {
    CHECK(raw_moment(OperatorKind::Jain, p, m, 1.2) == jain_moment(p, m, 1.2));
    CHECK(raw_moment(OperatorKind::JainBaskakov, p, m, 1.2) == d_moment_exact(p, m, 1.2));
    CHECK(raw_moment(OperatorKind::KingJainBaskakov, p, m, 1.2) == king_moment(p, m, 1.2));
  }
  // Jain: mu1 = x beta/(1-beta), mu2 = x^2 beta^2/(1-beta)^2 + x/(n(1-beta)^3)
  CHECK_THAT(central_moment(OperatorKind::Jain, p, 1, 1.2), WithinRel(1.2 * 0.25 / 0.75, 1e-14));
  CHECK_THAT(central_moment(OperatorKind::Jain, p, 2, 1.2),
             WithinRel(1.44 * 0.0625 / 0.5625 + 1.2 / (30.0 * 0.421875), 1e-13));
  CHECK(central_moment(OperatorKind::KingJainBaskakov, p, 1, 1.2) == 0.0);
  CHECK(moment_threshold(OperatorKind::Jain, 4) == 0);
  CHECK(moment_threshold(OperatorKind::JainBaskakov, 4) == 5);
  CHECK(moment_threshold(OperatorKind::KingJainBaskakov, 1) == 3);
  CHECK(moment_threshold(OperatorKind::KingJainBaskakov, 3) == 4);
  CHECK(to_string(FormulaClass::Exact) == "exact");
  CHECK(to_string(FormulaClass::Asymptotic) == "asymptotic");
}
