#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "jainop/functions.hpp"

using namespace jainop;
using Catch::Matchers::WithinAbs;

TEST_CASE("registry: stable names and metadata checks", "[functions]") {
  const auto& names = registry_names();
  REQUIRE(names.size() == 10);
  CHECK(names.front() == "e0");
  CHECK(names.back() == "t-exp-neg");
  EvalConfig cfg;
  for (const auto& f : registry()) {
    INFO(f.name);
    CHECK(check_metadata(f, cfg).empty());
    CHECK(f.value);
  }
  for (const auto& n : names) CHECK(lookup(n).name == n);
  CHECK_THROWS_AS(lookup("sq"), DomainError);
  CHECK_THROWS_AS(lookup("e5"), DomainError);
}

TEST_CASE("registry: declared classes", "[functions]") {
  CHECK(lookup("sin").bounded());
  CHECK(lookup("sin").period.has_value());
  CHECK(lookup("exp-neg").bounded());
  CHECK_FALSE(lookup("e1").bounded());
  CHECK_FALSE(lookup("abs-shift").has_derivatives());
  CHECK(lookup("abs-shift").kinks == std::vector<double>{1.0});
  for (int m = 0; m <= 4; ++m) {
    const auto f = lookup("e" + std::to_string(m));
    CHECK(f.growth_degree == m);
    CHECK(*f.polynomial_degree == m);
    CHECK(f.rho0_constant.has_value() == (m <= 2));
  }
}

TEST_CASE("check_metadata: catches wrong declarations", "[functions]") {
  EvalConfig cfg;
  auto f = monomial(2);
  f.growth_degree = 1;
  CHECK_FALSE(check_metadata(f, cfg).empty());

  auto g = lookup("exp-neg");
  g.deriv1 = [](double t) { return std::exp(-t); };
  CHECK(check_metadata(g, cfg).find("deriv1") != std::string::npos);

  auto h = lookup("sin");
  h.sup_bound = 0.5;
  CHECK(check_metadata(h, cfg).find("sup") != std::string::npos);
}

TEST_CASE("builders", "[functions]") {
  const auto a = affine(2.0, -0.5);
  CHECK(a(4.0) == 0.0);
  CHECK(*a.polynomial_degree == 1);
  CHECK(affine(3.0, 0.0).bounded());

  const auto s = shifted_power(1.5, 3);
  CHECK_THAT(s(2.5), WithinAbs(1.0, 1e-15));
  CHECK(check_metadata(s, EvalConfig{}).empty());

  const auto l = linear_combination(2.0, lookup("exp-neg"), -1.0, lookup("sin"));
  CHECK_THAT(l(1.0), WithinAbs(2 * std::exp(-1.0) - std::sin(1.0), 1e-15));
  CHECK(l.bounded());
  CHECK(*l.sup_bound == 3.0);
  CHECK(l.wavelength == lookup("sin").wavelength);
  CHECK_FALSE(l.period.has_value());
  CHECK(check_metadata(l, EvalConfig{}).empty());

  const auto k = linear_combination(1.0, lookup("abs-shift"), 1.0, lookup("e2"));
  CHECK(k.kinks == std::vector<double>{1.0});
  CHECK_FALSE(k.has_derivatives());
  CHECK(k.growth_degree == 2);
  CHECK_THROWS_AS(monomial(-1), DomainError);
}
