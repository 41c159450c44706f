#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "polydisc/series.hpp"

using namespace polydisc;
using Catch::Approx;

namespace {

const MultiIndex z1 = MultiIndex::unit(1);
const MultiIndex z2 = MultiIndex::unit(2);
const MultiIndex z3 = MultiIndex::unit(3);

}  // namespace

TEST_CASE("multi-index canonical form and derived quantities") {
  MultiIndex a{{3, 1}, {1, 2}, {3, -1}};
  CHECK(a == MultiIndex{{1, 2}});
  CHECK(MultiIndex{{2, 0}}.empty());
  CHECK_THROWS_AS(MultiIndex({{0, 1}}), DomainError);
  MultiIndex b{{1, 2}, {3, -1}};
  CHECK(b.order() == 3);
  CHECK(b.diagonal_sum() == 1);
  CHECK(b.weighted_degree([](std::uint32_t j) { return j; }) == 5);
  CHECK(b.diagonal_signature([](std::uint32_t j) { return j; }) == -1);
  CHECK(MultiIndex::parse(b.to_string()) == b);
  CHECK_THROWS_AS(MultiIndex::parse("2:1,1:1"), ConfigError);
  CHECK_THROWS_AS(MultiIndex::parse("1:x"), ConfigError);
  CHECK(std::hash<MultiIndex>{}(MultiIndex{{1, 1}, {2, 0}}) == std::hash<MultiIndex>{}(z1));
}

TEST_CASE("abschnitt") {
  FourierSeries f{{z1, 1.0}, {z3, 1.0}};
  auto a = abschnitt(f, 2);
  CHECK(a.size() == 1);
  CHECK(a.coeff(z1) == Complex(1.0));
  CHECK(abschnitt(f, 3) == f);
  CHECK(abschnitt(f, 7) == f);

  StreamFamily fam(3);
  for (std::size_t i = 0; i < 20; ++i) {
    RandomStream rng = fam.stream(i);
    auto F = random_polynomial({SpectrumClass::General, 5, 3, 8}, rng);
    std::vector<double> radii(5), angles(5);
    for (int j = 0; j < 5; ++j) {
      radii[j] = rng.uniform();
      angles[j] = rng.angle();
    }
    for (std::uint32_t m = 1; m <= 5; ++m) {
      std::vector<double> rm(radii.begin(), radii.begin() + m), am(angles.begin(), angles.begin() + m);
      auto lhs = evaluate(abschnitt(F, m), PolydiscPoint::polar(radii, angles));
      auto rhs = evaluate(F, PolydiscPoint::polar(rm, am));
      REQUIRE(std::abs(lhs - rhs) < 1e-13);
    }
  }
}

TEST_CASE("spectrum classes") {
  CHECK(spectrum_class(FourierSeries{{z1 + z2, 1.0}}) == SpectrumClass::Analytic);
  CHECK(spectrum_class(FourierSeries{{z1, 1.0}, {-z2, 1.0}}) == SpectrumClass::PMAnalytic);
  CHECK(spectrum_class(FourierSeries{{z1 + -z2, 1.0}}) == SpectrumClass::Big);
  CHECK(spectrum_class(FourierSeries{{-z1 + -z1 + z2, 1.0}}) == SpectrumClass::General);
  CHECK(spectrum_class(FourierSeries::constant(2.0)) == SpectrumClass::Analytic);
}

TEST_CASE("evaluate") {
  FourierSeries f{{z1 + z2, 1.0}};
  auto v = evaluate(f, PolydiscPoint({0.5, std::polar(0.5, std::numbers::pi / 2)}));
  CHECK(std::abs(v - Complex(0, 0.25)) < 1e-16);
  FourierSeries conj1{{-z1, 1.0}};
  auto w = evaluate(conj1, PolydiscPoint({std::polar(0.7, 0.3)}));
  CHECK(std::abs(w - std::polar(0.7, -0.3)) < 1e-15);
  FourierSeries g{{MultiIndex(), 1.0}, {z1, 1.0}};
  CHECK(evaluate(g, PolydiscPoint({0.0})) == Complex(1.0));
  CHECK(evaluate(FourierSeries{{z3, 1.0}}, PolydiscPoint({0.5})) == Complex(0.0));
  CHECK_THROWS_AS(PolydiscPoint({1.5}), DomainError);
}

TEST_CASE("norms") {
  CHECK(wiener_norm(FourierSeries{}) == 0.0);
  FourierSeries f{{z1, 3.0}, {z2, Complex(0, -4)}};
  CHECK(wiener_norm(f) == 7.0);
  CHECK(l2_norm(FourierSeries{{z1, 1.0}, {z2, 1.0}}) == Approx(std::sqrt(2.0)));
  FourierSeries u;
  for (int k = 0; k < 9; ++k) u.add(MultiIndex::unit(1 + k % 3, 1 + k / 3), std::polar(1.0, 0.7 * k));
  CHECK(l2_norm(u) == Approx(3.0));
}

TEST_CASE("Monte Carlo norms") {
  StreamFamily fam(17);
  auto c = lp_norm_mc(FourierSeries::constant(Complex(3, 4)), 1.0, 1000, fam);
  CHECK(c.value == Approx(5.0).epsilon(1e-15));
  CHECK(c.std_error == Approx(0.0).margin(1e-12));
  auto e = lp_norm_mc(FourierSeries{{z1, 1.0}}, 2.0, 1000, fam);
  CHECK(std::abs(e.value - 1.0) <= 1e-12 + 3 * e.std_error);
  // ||z1+z2||_4^4 = int |1 + e^{is}|^4 = 6
  auto q = lp_norm_mc(FourierSeries{{z1, 1.0}, {z2, 1.0}}, 4.0, 20000, fam);
  CHECK(std::abs(q.value - std::pow(6.0, 0.25)) <= 3 * q.std_error);
  for (std::size_t i = 0; i < 10; ++i) {
    RandomStream rng = fam.stream(1000 + i);
    auto F = random_polynomial({SpectrumClass::General, 4, 3, 6}, rng);
    auto est = lp_norm_mc(F, 2.0, 20000, fam.derive(i));
    CHECK(std::abs(est.value - l2_norm(F)) <= 3 * est.std_error);
  }
}

TEST_CASE("sample_torus") {
  StreamFamily fam(99);
  RandomStream a = fam.stream(0), b = fam.stream(0);
  CHECK(sample_torus(5, a).angles() == sample_torus(5, b).angles());
  double s = 0;
  for (std::size_t i = 0; i < 10000; ++i) {
    RandomStream r = fam.stream(i);
    s += std::cos(sample_torus(1, r)[0]);
  }
  CHECK(std::abs(s / 10000) < 3.0 / 100 / std::sqrt(2.0));
  RandomStream r = fam.stream(1);
  CHECK_THROWS_AS(sample_torus(0, r), ConfigError);
}

TEST_CASE("diagonal restriction") {
  TorusPoint th({0.4, 1.9});
  auto r1 = diagonal_restriction(FourierSeries{{z1, 1.0}}, th);
  CHECK(std::abs(r1.coeff(1) - std::polar(1.0, 0.4)) < 1e-15);
  auto r2 = diagonal_restriction(FourierSeries{{z1 + -z2, 1.0}}, th);
  CHECK(std::abs(r2.coeff(0) - std::polar(1.0, 0.4 - 1.9)) < 1e-15);

  StreamFamily fam(4);
  for (std::size_t i = 0; i < 20; ++i) {
    RandomStream rng = fam.stream(i);
    auto F = random_polynomial({SpectrumClass::General, 4, 3, 6}, rng);
    auto theta = sample_torus(4, rng);
    double t = rng.angle();
    std::vector<double> rotated(4);
    for (int j = 0; j < 4; ++j) rotated[j] = theta[j] + t;
    auto lhs = diagonal_restriction(F, theta)(t);
    auto rhs = evaluate(F, TorusPoint(rotated));
    REQUIRE(std::abs(lhs - rhs) < 1e-12);
  }
}

TEST_CASE("analytic restrictions have no negative frequencies and mean a0") {
  StreamFamily fam(8);
  for (std::size_t i = 0; i < 10; ++i) {
    RandomStream rng = fam.stream(i);
    auto F = random_polynomial({SpectrumClass::Analytic, 3, 3, 6}, rng);
    auto theta = sample_torus(3, rng);
    auto R = diagonal_restriction(F, theta);
    CHECK(R.min_frequency() >= 0);
    CHECK(std::abs(R.coeff(0) - F.coeff(MultiIndex())) < 1e-15);
  }
}

TEST_CASE("linearity and text round trip") {
  StreamFamily fam(12);
  RandomStream rng = fam.stream(0);
  auto F = random_polynomial({SpectrumClass::General, 4, 3, 6}, rng);
  auto G = random_polynomial({SpectrumClass::General, 4, 3, 6}, rng);
  auto th = sample_torus(4, rng);
  Complex a(0.3, -1.1);
  CHECK(std::abs(evaluate(F * a + G, th) - (a * evaluate(F, th) + evaluate(G, th))) < 1e-13);
  CHECK(from_text(to_text(F)) == F);
  CHECK(from_text(to_text(FourierSeries::constant(2.5))) == FourierSeries::constant(2.5));
  CHECK_THROWS_AS(from_text("1:1 -> nope"), ConfigError);
}
