#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "polydisc/radial.hpp"

using namespace polydisc;
using Catch::Approx;

namespace {

std::pair<double, double> brute_A(const RadialScheme& s, double r, std::uint32_t terms) {
  double A = 0, dA = 0;
  for (std::uint32_t j = 1; j <= terms; ++j) {
    double m = static_cast<double>(s(j));
    A += std::pow(r, m);
    dA += m * std::pow(r, m - 1);
  }
  return {A, dA};
}

}  // namespace

TEST_CASE("admissibility closed forms and brute force") {
  auto half = admissibility_A(RadialScheme::diagonal(), 0.5);
  CHECK(half.A == Approx(1.0).epsilon(1e-12));
  CHECK(half.dA == Approx(4.0).epsilon(1e-12));
  CHECK(admissibility_A(RadialScheme::power(2.0), 0.0).A == 0.0);
  CHECK(admissibility_A(RadialScheme::diagonal(), 0.0).dA == 1.0);
  CHECK_THROWS_AS(admissibility_A(RadialScheme::diagonal(), 1.0), DomainError);

  for (auto s : {RadialScheme::power(2.0), RadialScheme::power(0.5), RadialScheme::power(1.5),
                 RadialScheme::explicit_table({3, 1, 4, 1, 5})}) {
    for (double r : {0.3, 0.9}) {
      auto a = admissibility_A(s, r, 1e-12);
      auto [A, dA] = brute_A(s, r, 1'000'000);
      CHECK(std::abs(a.A - A) < 1e-10);
      CHECK(std::abs(a.dA - dA) < 1e-9);
      CHECK(a.A_tail < 1e-12);
      // certified: partial + tail bound covers the brute sum
      CHECK(a.dA_upper() >= dA - 1e-9);
    }
  }
  auto d = admissibility_A(RadialScheme::diagonal(), 0.99, 1e-10);
  CHECK(d.A == Approx(0.99 / 0.01).epsilon(1e-11));
  CHECK(d.dA == Approx(1.0 / 1e-4).epsilon(1e-11));
}

TEST_CASE("default MZ sequence") {
  auto r = mz_default_sequence(1000);
  CHECK(r[0] == 0.0);
  CHECK(r[7] == 0.5);
  CHECK(r[999] == 0.9);
  for (std::size_t k = 1; k < r.size(); ++k) REQUIRE(r[k] > r[k - 1]);
  double worst = 0;
  for (std::uint64_t k = 1; k <= 10000; ++k) worst = std::max(worst, mz_summand_bound(k));
  CHECK(worst < 10.0);
  CHECK(mz_summand_bound(10000) == Approx(1.0 / 3.0).epsilon(1e-3));
}

TEST_CASE("built MZ sequence on a small target, pairwise") {
  for (auto s : {RadialScheme::diagonal(), RadialScheme::power(2.0), RadialScheme::power(0.7)}) {
    auto seq = build_mz_sequence(s, 0.8);
    CHECK(seq.first() == 0.5);
    auto r = seq.materialize();
    CHECK(r.back() > 0.8);
    CHECK(r[r.size() - 2] <= 0.8);
    CHECK(pairs_satisfy_step_bound(r, s));
    for (std::size_t i = 0; i < r.size(); i += 97) REQUIRE(seq[i] == r[i]);
    auto audit = audit_mz_sequence(seq, s);
    CHECK(audit.pairs_ok);
    CHECK(audit.increasing);
    CHECK(audit.gap_decay_ok);
  }
}

TEST_CASE("built MZ sequence reaches 0.999") {
  auto s = RadialScheme::diagonal();
  auto seq = build_mz_sequence(s, 0.999);
  CHECK(seq.last() > 0.999);
  CHECK(seq.size() > 1'000'000'000ULL);
  auto audit = audit_mz_sequence(seq, s);
  CHECK(audit.pairs_ok);
  CHECK(audit.increasing);
  CHECK(audit.gap_decay_ok);
  CHECK(audit.worst_gap_ratio <= 0.75);
  // the first fill from 1/2 toward 3/4 uses steps just under (1/4)^2 / A'(3/4) = 1/256
  CHECK(seq.segments().front().count == 64);
  CHECK(seq.segments().front().last() < 0.75);
  CHECK_THROWS_AS(build_mz_sequence(s, 0.3), DomainError);
  CHECK_THROWS_AS(build_mz_sequence(s, 0.999, 3), ResourceError);
}

TEST_CASE("kernel ratio") {
  TorusPoint th({0.3, 1.0, 2.5, 4.0});
  CHECK(kernel_ratio(0.7, 0.7, th) == 1.0);
  double r = 0.8, rk = 0.5;
  CHECK(kernel_ratio(r, rk, TorusPoint({0.0})) == Approx((1 + r) / (1 - r) * (1 - rk) / (1 + rk)).epsilon(1e-13));
  double whole = kernel_ratio(r, rk, th);
  double split = kernel_ratio(r, rk, TorusPoint({0.3, 1.0})) *
                 kernel_ratio(r, rk, TorusPoint({2.5, 4.0}), RadialScheme::explicit_table({3, 4}));
  CHECK(whole == Approx(split).epsilon(1e-13));
  CHECK(whole == Approx(product_poisson_kernel(r, th) / product_poisson_kernel(rk, th)).epsilon(1e-12));
  CHECK_THROWS_AS(kernel_ratio(1.0, 0.5, th), DomainError);
}

TEST_CASE("kernel ratio stabilizes in the truncation") {
  auto rs = mz_default_sequence(51);
  StreamFamily fam(31);
  double max50 = 0, max200 = 0;
  for (std::size_t i = 0; i < 1000; ++i) {
    RandomStream rng = fam.stream(i);
    std::size_t k = 1 + static_cast<std::size_t>(rng.uniform() * 49);
    double r = rng.uniform(rs[k - 1], rs[k]);
    auto th = sample_torus(200, rng);
    TorusPoint th50(std::vector<double>(th.angles().begin(), th.angles().begin() + 50));
    double a = kernel_ratio(r, rs[k - 1], th50), b = kernel_ratio(r, rs[k - 1], th);
    REQUIRE(std::isfinite(b));
    max50 = std::max(max50, a);
    max200 = std::max(max200, b);
  }
  CHECK(std::abs(max200 / max50 - 1) < 0.01);
}

TEST_CASE("block paths") {
  auto p1 = block_path({1});
  REQUIRE(p1.steps.size() == 2);
  CHECK(p1.steps[0].radius(1) == 0.0);
  CHECK(p1.steps[1].radius(1) == 0.5);
  CHECK(p1.monotone);

  auto p = block_path({2, 3});
  REQUIRE(p.steps.size() == 6);
  for (int k = 0; k < 4; ++k) CHECK(p.steps[k].head_len == 0);
  for (int k = 4; k < 6; ++k) {
    CHECK(p.steps[k].head_len == 2);
    CHECK(p.steps[k].head_radius == 0.5);
    CHECK(p.steps[k].radius(4) == 0.0);
  }
  CHECK(radii_in_unit_interval(p));
  // a width-2 block revisits (1/2, 0) after (0, 1/2): not coordinatewise monotone
  CHECK_FALSE(p.monotone);
  CHECK(monotone_after_freeze(p));
  CHECK_THROWS_AS(block_path({21}), ConfigError);
  CHECK_THROWS_AS(block_path({3, 2}), ConfigError);

  RandomStream rng(4);
  auto sp = sampled_block_path({30, 60}, 5, rng);
  CHECK(sp.steps.size() == 10);
  CHECK(monotone_after_freeze(sp));
}

TEST_CASE("path text round trip") {
  auto p = block_path({2, 5});
  p.steps[3].head_radius = 0.1;
  auto q = path_from_text(to_text(p));
  CHECK(q.steps == p.steps);
  CHECK(to_text(q) == to_text(p));
  CHECK_THROWS_AS(path_from_text("head_len x 0.5 | 1"), ConfigError);
}

TEST_CASE("Monte Carlo block choice") {
  StreamFamily fam(77);
  CHECK(choose_blocks_mc(100, 0.0, 200, fam) == 101);
  std::uint64_t n50 = choose_blocks_mc(100, 0.5, 400, fam);
  CHECK(n50 > 100 * std::exp(std::numbers::pi / 2) / 2);
  CHECK(n50 < 100 * std::exp(std::numbers::pi / 2) * 2);
  std::uint64_t prev = 0;
  for (double p0 : {0.1, 0.3, 0.5, 0.7, 0.9, 0.95}) {
    auto n = choose_blocks_mc(10, p0, 400, fam);
    CHECK(n >= prev);
    prev = n;
  }
  CHECK(choose_blocks_mc(10, 0.9, 400, fam) == choose_blocks_mc(10, 0.9, 400, fam));
  CHECK_THROWS_AS(choose_blocks_mc(10, 0.9, 50, fam), ConfigError);
  CHECK_THROWS_AS(choose_blocks_mc(100, 0.9, 200, fam, 150), ResourceError);
  auto b = mc_block_boundaries(4, 0.95, 400, fam);
  CHECK(b.boundaries.size() == 4);
  for (std::size_t k = 1; k < 4; ++k) CHECK(b.boundaries[k] - b.boundaries[k - 1] <= 20);
}

TEST_CASE("adaptive block path") {
  TorusPoint th(std::vector<double>(1000, 0.1));
  auto one = adaptive_block_path([](std::uint32_t, double, double) { return 1.0; }, th);
  CHECK(one.complete);
  CHECK(one.nu == std::vector<std::uint32_t>{4, 20, 84});
  REQUIRE(one.path.steps.size() == 3);
  CHECK(one.path.steps[2].head_len == 20);
  CHECK(one.path.steps[2].head_radius == 1.0 - 1e-6);
  CHECK(one.path.monotone);

  AdaptiveOptions opt;
  opt.coordinate_cap = 50;
  auto zero = adaptive_block_path([](std::uint32_t, double, double) { return 0.0; }, th, opt);
  CHECK_FALSE(zero.complete);
  CHECK(zero.levels_reached == 0);
  CHECK(zero.level_sums == std::vector<double>{0.0});
  CHECK(zero.chosen_radius.size() == 50);

  // the oracle prefers radius closest to a target; grid points above the head cap are skipped
  auto peaked = adaptive_block_path([](std::uint32_t, double, double r) { return r; }, th);
  CHECK(peaked.chosen_radius.front() == 1.0 - std::ldexp(1.0, -19));
  CHECK(peaked.path.monotone);
}
