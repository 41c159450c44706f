#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "polydisc/bohr.hpp"
#include "polydisc/rng.hpp"

using namespace polydisc;
using Catch::Approx;

TEST_CASE("index_of_integer small cases") {
  CHECK(index_of_integer(1).empty());
  CHECK(index_of_integer(12) == MultiIndex{{1, 2}, {2, 1}});
  CHECK(index_of_integer(50) == MultiIndex{{1, 1}, {3, 2}});
  CHECK_THROWS_AS(index_of_integer(0), DomainError);
}

TEST_CASE("integer_of_index small cases") {
  CHECK(integer_of_index(MultiIndex()) == 1);
  CHECK(integer_of_index(MultiIndex{{2, 1}}) == 3);
  CHECK(integer_of_index(MultiIndex{{1, 3}, {4, 1}}) == 56);
  CHECK_THROWS_AS(integer_of_index(MultiIndex{{1, -1}}), DomainError);
  CHECK_THROWS_AS(integer_of_index(MultiIndex{{1, 64}}), RangeError);
}

TEST_CASE("factorization round trip and multiplicativity") {
  for (std::uint64_t n = 1; n <= 200'000; ++n) REQUIRE(integer_of_index(index_of_integer(n)) == n);
  RandomStream rng(11);
  for (int i = 0; i < 2000; ++i) {
    std::uint64_t a = 1 + rng() % 100'000, b = 1 + rng() % 100'000;
    REQUIRE(index_of_integer(a * b) == index_of_integer(a) + index_of_integer(b));
  }
}

TEST_CASE("large prime factors beyond the sieve") {
  // 999983 is the largest prime below 10^6
  CHECK(integer_of_index(index_of_integer(999983ULL * 999983ULL)) == 999983ULL * 999983ULL);
  CHECK_THROWS_AS(index_of_integer(1000003ULL * 2), RangeError);
}

TEST_CASE("lift and unlift") {
  DirichletSeries one{{1, 1.0}};
  CHECK(lift_dirichlet(one).coeff(MultiIndex()) == Complex(1.0));
  Complex c(0.5, -2.0);
  DirichletSeries six{{6, c}};
  auto f = lift_dirichlet(six);
  CHECK(f.size() == 1);
  CHECK(f.coeff(MultiIndex{{1, 1}, {2, 1}}) == c);
  DirichletSeries d{{2, 1.0}, {3, Complex(0, 1)}, {4, -2.0}, {5, 0.25}, {6, 3.0}, {12, Complex(1, 1)}};
  CHECK(unlift(lift_dirichlet(d)) == d);
  FourierSeries bad{{MultiIndex{{1, -1}}, 1.0}};
  CHECK_THROWS_AS(unlift(bad), SpectrumError);
}

TEST_CASE("convolution becomes coefficient product") {
  RandomStream rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    DirichletSeries a, b;
    for (int k = 0; k < 6; ++k) {
      a.add(1 + rng() % 60, Complex(rng.uniform(-1, 1), rng.uniform(-1, 1)));
      b.add(1 + rng() % 60, Complex(rng.uniform(-1, 1), rng.uniform(-1, 1)));
    }
    auto lhs = lift_dirichlet(dirichlet_convolve(a, b));
    auto rhs = lift_dirichlet(a) * lift_dirichlet(b);
    REQUIRE(lhs.size() == rhs.size());
    for (const auto& [nu, c] : rhs.terms()) REQUIRE(std::abs(lhs.coeff(nu) - c) < 1e-13);
  }
}

TEST_CASE("dirichlet_eval") {
  CHECK(dirichlet_eval(DirichletSeries{{1, 1.0}}, Complex(3.0, 7.0), 1) == Complex(1.0));
  DirichletSeries d{{1, 1.0}, {2, 1.0}, {4, 1.0}};
  CHECK(dirichlet_eval(d, 1.0, 4).real() == Approx(1.75).epsilon(1e-15));
  DirichletSeries zeta;
  for (std::uint64_t n = 1; n <= 100; ++n) zeta.add(n, 1.0);
  double v = dirichlet_eval(zeta, 2.0, 100).real();
  // tail sum_{n>100} n^-2 lies in (1/101, 1/100)
  CHECK(std::numbers::pi * std::numbers::pi / 6 - v > 1.0 / 101);
  CHECK(std::numbers::pi * std::numbers::pi / 6 - v < 1.0 / 100);
  CHECK_THROWS_AS(dirichlet_eval(d, 1.0, 3), ConfigError);
}
