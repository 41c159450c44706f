// One PASS/FAIL line per acceptance criterion. Exit status 0 iff all pass.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>

#include "polydisc/polydisc.hpp"

using namespace polydisc;

namespace {

constexpr std::uint64_t kSeed = 20240611;

struct Outcome {
  bool pass;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

RandomPolynomialSpec spec(SpectrumClass s, std::uint32_t dim, std::int64_t order, std::size_t terms,
                          double constant_min = 0.0) {
  RandomPolynomialSpec sp;
  sp.spectrum = s;
  sp.dim = dim;
  sp.max_order = order;
  sp.terms = terms;
  sp.constant_min = constant_min;
  return sp;
}

double check_value(const ExperimentResult& r, const std::string& name) {
  for (const auto& c : r.checks)
    if (c.name == name) return c.observed;
  return NAN;
}

bool check_passed(const ExperimentResult& r, const std::string& name) {
  for (const auto& c : r.checks)
    if (c.name == name) return c.passed;
  return false;
}

Outcome bohr_round_trip() {
  for (std::uint64_t n = 1; n <= 1'000'000; ++n)
    if (integer_of_index(index_of_integer(n)) != n) return {false, "integer round trip fails at n = " + std::to_string(n)};
  StreamFamily fam(kSeed, 101);
  for (int i = 0; i < 100; ++i) {
    RandomStream rng = fam.stream(i);
    DirichletSeries d;
    int terms = 1 + static_cast<int>(rng.uniform() * 20);
    for (int t = 0; t < terms; ++t)
      d.set(1 + static_cast<std::uint64_t>(rng.uniform() * 1e6), Complex(rng.uniform(-1, 1), rng.uniform(-1, 1)));
    if (!(unlift(lift_dirichlet(d)) == d)) return {false, "lift/unlift fails on polynomial " + std::to_string(i)};
  }
  return {true, "n <= 10^6 and 100 Dirichlet polynomials exact"};
}

Outcome two_route_twist() {
  StreamFamily fam(kSeed, 102);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    RandomStream rng = fam.stream(i);
    FourierSeries F = random_polynomial(spec(SpectrumClass::Analytic, 6, 4, 10), rng);
    TorusPoint th = sample_torus(6, rng);
    for (double r : {0.3, 0.9}) {
      std::vector<double> radii(6);
      for (int j = 0; j < 6; ++j) radii[j] = std::pow(r, j + 1);
      Complex direct = evaluate(F, th.scaled(radii));
      worst = std::max(worst, std::abs(radial_section(F, r, th) - direct));
    }
  }
  return {worst <= 1e-12, fmt("max |coefficient route - pointwise| = %.3g (tol 1e-12)", worst)};
}

Outcome harmonicity() {
  StreamFamily fam(kSeed, 103);
  double worst = 0.0;
  const int T = 4096;
  for (int i = 0; i < 20; ++i) {
    RandomStream rng = fam.stream(i);
    FourierSeries F = random_polynomial(spec(SpectrumClass::PMAnalytic, 4, 3, 8), rng);
    TorusPoint th = sample_torus(4, rng);
    for (double rho : {0.3, 0.7}) {
      Complex mean{};
      for (int k = 0; k < T; ++k) mean += evaluate(twist(F, std::polar(rho, 2 * std::numbers::pi * k / T)), th);
      mean /= static_cast<double>(T);
      worst = std::max(worst, std::abs(mean - F.coeff(MultiIndex())));
    }
  }
  return {worst <= 1e-8, fmt("max |mean_t f_xi - F(0)| = %.3g (tol 1e-8)", worst)};
}

Outcome l1_contraction() {
  StreamFamily fam(kSeed, 104);
  double worst = -INFINITY;
  const std::size_t S = 10000;
  for (int i = 0; i < 20; ++i) {
    RandomStream rng = fam.stream(i);
    FourierSeries F = random_polynomial(spec(SpectrumClass::Analytic, 4, 3, 8), rng);
    for (Complex xi : {Complex(0.5, 0.0), std::polar(0.9, 1.0)}) {
      FourierSeries Fx = twist(F, xi);
      StreamFamily pts(kSeed + i, 105);
      std::vector<double> a(S), b(S);
      for (std::size_t s = 0; s < S; ++s) {
        RandomStream r = pts.stream(s);
        TorusPoint th = sample_torus(4, r);
        a[s] = std::abs(evaluate(F, th));
        b[s] = std::abs(evaluate(Fx, th));
      }
      Estimate ea = sample_mean(a), eb = sample_mean(b);
      double se = std::hypot(ea.std_error, eb.std_error);
      worst = std::max(worst, eb.value - ea.value - 3 * se);
    }
  }
  return {worst <= 0.0, fmt("max (||f_xi||_1 - ||f||_1 - 3 SE) = %.3g (must be <= 0)", worst)};
}

Outcome wiener() {
  StreamFamily fam(kSeed, 106);
  double worst = 0.0;
  double B = wiener_bound(0.9);
  for (int i = 0; i < 100; ++i) {
    RandomStream rng = fam.stream(i);
    FourierSeries F = random_polynomial(spec(SpectrumClass::Analytic, 10, 6, 20), rng);
    worst = std::max(worst, wiener_norm(twist(F, 0.9)) / (max_coefficient(F) * B));
  }
  return {worst <= 1.0, fmt("max ||F_xi||_Wi / (max|a| * bound) = %.3g (must be <= 1)", worst)};
}

Outcome fatou() {
  auto r = run_experiment(Json{{"kind", "fatou"}, {"seed", kSeed}, {"samples", 1000}});
  double slope = r.summary["values"]["slope"].is_null() ? NAN : r.summary["values"]["slope"].get<double>();
  // F = z_1 at eps = 1e-3: error exactly 1 - r
  auto z1 = run_experiment(Json{{"kind", "fatou"},
                                {"seed", kSeed},
                                {"samples", 10},
                                {"eps", {1e-3}},
                                {"target", {{"type", "series"}, {"text", "1:1 -> 1,0\n"}}}});
  bool exact = true;
  for (double e : z1.column("err_0")) exact = exact && std::abs(e - (1.0 - 0.999)) <= 1e-15;
  return {check_passed(r, "rate_bound") && check_passed(r, "slope_near_one") && exact,
          fmt("bound holds for all eps, slope = %.4f (1 +- 0.05)", slope) + (exact ? ", z1 exact" : ", z1 mismatch")};
}

Outcome mz_sequence() {
  RadialScheme s = RadialScheme::diagonal();
  MzSequence seq = build_mz_sequence(s, 0.999);
  MzAudit a = audit_mz_sequence(seq, s);
  // sample pairs directly against the step bound as an independent spot check
  bool spot = true;
  for (const auto& seg : seq.segments()) {
    double r0 = seg.at(seg.count - 1), r1 = seg.at(seg.count);
    double A1 = 1.0 / ((1.0 - r1) * (1.0 - r1));  // A'(r) = sum j r^{j-1} for the diagonal scheme
    if (!(r1 - r0 <= (1.0 - r1) * (1.0 - r1) / A1)) spot = false;
  }
  bool ok = a.pairs_ok && a.increasing && a.gap_decay_ok && seq.last() >= 0.999 && spot;
  return {ok, "size " + std::to_string(seq.size()) + fmt(", last %.6f", seq.last()) +
                  fmt(", worst pair ratio %.6f", a.worst_ratio) + fmt(", worst gap ratio %.4f", a.worst_gap_ratio)};
}

Outcome kernel_ratio_stability() {
  auto rk = mz_default_sequence(50);
  StreamFamily fam(kSeed, 108);
  double max50 = 0.0, max200 = 0.0, per_sample = 0.0;
  bool finite = true;
  for (int s = 0; s < 1000; ++s) {
    RandomStream rng = fam.stream(s);
    auto k = static_cast<std::size_t>(rng.uniform() * 49);  // pair (r_{k+1}, r_k), k+1 < 50
    TorusPoint th = sample_torus(200, rng);
    TorusPoint th50(std::vector<double>(th.angles().begin(), th.angles().begin() + 50));
    double a = kernel_ratio(rk[k + 1], rk[k], th50);
    double b = kernel_ratio(rk[k + 1], rk[k], th);
    finite = finite && std::isfinite(a) && std::isfinite(b);
    per_sample = std::max(per_sample, std::abs(b - a) / a);
    max50 = std::max(max50, a);
    max200 = std::max(max200, b);
  }
  double change = std::abs(max200 - max50) / max50;
  double summand = 0.0;
  for (std::uint64_t k = 1; k <= 10000; ++k) summand = std::max(summand, mz_summand_bound(k));
  bool ok = finite && change < 0.01 && std::isfinite(summand) && summand < 1.0;
  return {ok, fmt("max ratio m=200: %.6g", max200) + fmt(", change vs m=50: %.3g", change) +
                  fmt(" (largest per-sample change %.3g)", per_sample) +
                  fmt(", sup summand bound k<=1e4: %.4f", summand)};
}

Outcome singular_measure() {
  auto mz = run_experiment(Json{{"kind", "mz"}, {"seed", kSeed}, {"samples", 1000}});
  auto wt = run_experiment(Json{{"kind", "weak_type"}, {"seed", kSeed}, {"samples", 10000}});
  double frac = mz.summary["estimates"]["dip_fraction"]["value"].get<double>();
  double slope = check_value(wt, "tail_slope");
  bool ok = mz.passed() && wt.passed();
  return {ok, fmt("dip fraction %.3f (>= 0.9)", frac) + fmt(", tail slope %.3f (<= -0.8)", slope)};
}

Outcome log_integrability() {
  double worst_up = -INFINITY, worst_lo = -INFINITY;
  bool ok = true;
  for (int i = 0; i < 20; ++i) {
    Json target{{"type", "random"}, {"spectrum", "analytic"}, {"dim", 3}, {"max_order", 3},
                {"terms", 6},       {"constant_min", 0.1},    {"index", i}};
    auto r = run_experiment(Json{{"kind", "log_int"}, {"seed", kSeed}, {"samples", 100}, {"target", target}});
    ok = ok && r.passed();
    for (const auto& c : r.checks) {
      double excess = c.comparison == "<=" ? c.observed - c.threshold : c.threshold - c.observed;
      (c.name == "upper_bound" ? worst_up : worst_lo) = std::max(c.name == "upper_bound" ? worst_up : worst_lo, excess);
    }
  }
  // F = 1 + z_1/2: a 1-D trapezoid oracle of log(1/|1 + e^{it}/2|) with its own grid
  double oracle = 0.0;
  const int Q = 4096;
  for (int j = 0; j < Q; ++j) oracle -= std::log(std::abs(1.0 + 0.5 * std::polar(1.0, 2 * std::numbers::pi * j / Q)));
  oracle /= Q;
  auto half = run_experiment(Json{{"kind", "log_int"},
                                  {"seed", kSeed},
                                  {"samples", 20},
                                  {"target", {{"type", "series"}, {"text", " -> 1,0\n1:1 -> 0.5,0\n"}}}});
  double dev = 0.0;
  for (double v : half.column("log_integral")) dev = std::max(dev, std::abs(v));
  ok = ok && dev <= 1e-6 && std::abs(oracle) <= 1e-6;
  return {ok, fmt("max upper excess %.3g", worst_up) + fmt(", max lower excess %.3g", worst_lo) +
                  fmt(", |integral| for 1+z1/2: %.3g", dev)};
}

Outcome counterexample() {
  StreamFamily fam(kSeed, 111);
  auto values = parallel_map(10000, 1, [&](std::size_t s) {
    RandomStream rng = fam.stream(s);
    std::vector<double> radii(200), angles(200);
    for (int n = 0; n < 200; ++n) {
      radii[n] = rng.uniform();
      angles[n] = rng.angle();
    }
    return std::abs(counterexample_f(PolydiscPoint::polar(radii, angles)));
  });
  double mx = *std::max_element(values.begin(), values.end());
  auto r = run_experiment(Json{{"kind", "divergence"},
                               {"seed", kSeed},
                               {"samples", 100},
                               {"target", {{"type", "counterexample_f"}}},
                               {"path", {{"type", "adaptive"}, {"levels", 3}}}});
  double small = r.summary["estimates"]["small_fraction"]["value"].get<double>();
  double bdry = r.summary["estimates"]["boundary_fraction"]["value"].get<double>();
  auto lv = r.column("levels_reached");
  double full = 0;
  for (double l : lv) full += l >= 3;
  bool ok = mx <= 1 + 1e-6 && r.passed();
  return {ok, fmt("max |f| interior %.6f", mx) + fmt(", min|f| <= e^-4 fraction %.2f (>= 0.9)", small) +
                  fmt(", boundary >= 0.1 fraction %.2f (>= 0.5)", bdry) +
                  fmt(", samples reaching all 3 levels %.0f/100", full)};
}

Outcome oscillation() {
  auto g = run_experiment(Json{{"kind", "divergence"}, {"seed", kSeed}, {"samples", 1000}});
  auto u = run_experiment(
      Json{{"kind", "divergence"}, {"seed", kSeed}, {"samples", 50}, {"target", {{"type", "example_u"}}}});
  double frac = g.summary["estimates"]["oscillation_fraction"]["value"].get<double>();
  auto osc = g.column("oscillation");
  double med = quantile(osc, 0.5);
  double uerr = check_value(u, "modulus_identity");
  return {g.passed() && u.passed(), fmt("oscillation >= 0.4 fraction %.3f (>= 0.9)", frac) +
                                        fmt(", median oscillation %.3f", med) +
                                        fmt(", u modulus identity err %.3g (tol 1e-12)", uerr) + ", blocks " +
                                        g.facts["boundaries"].dump()};
}

Outcome reproducibility() {
  std::vector<Json> configs{
      {{"kind", "fatou"}, {"seed", kSeed}, {"samples", 300}},
      {{"kind", "weak_type"}, {"seed", kSeed}, {"samples", 500}},
      {{"kind", "log_int"}, {"seed", kSeed}, {"samples", 30}},
      {{"kind", "mz"}, {"seed", kSeed}, {"samples", 50}},
      {{"kind", "divergence"}, {"seed", kSeed}, {"samples", 200}},
      {{"kind", "divergence"},
       {"seed", kSeed},
       {"samples", 4},
       {"target", {{"type", "counterexample_f"}}},
       {"path", {{"type", "adaptive"}, {"levels", 1}, {"coordinate_cap", 5000}}}},
      {{"kind", "abschnitt"}, {"seed", kSeed}, {"samples", 500}},
  };
  int same = 0;
  for (const auto& cfg : configs) {
    std::string out[2];
    int w = 0;
    for (std::size_t workers : {1u, 8u}) {
      auto r = run_experiment(cfg, workers);
      std::ostringstream os;
      write_csv(os, r);
      write_json(os, r);
      out[w++] = os.str();
    }
    same += out[0] == out[1];
  }
  return {same == static_cast<int>(configs.size()),
          std::to_string(same) + "/" + std::to_string(configs.size()) + " configs byte-identical at 1 and 8 workers"};
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<Outcome()> run;
  };
  std::vector<Criterion> all{
      {"bohr round trip", bohr_round_trip},
      {"two-route twist identity", two_route_twist},
      {"harmonicity", harmonicity},
      {"L1 contraction", l1_contraction},
      {"Wiener bound", wiener},
      {"Fatou rate", fatou},
      {"MZ sequence algorithm", mz_sequence},
      {"kernel-ratio stability", kernel_ratio_stability},
      {"singular-measure vanishing", singular_measure},
      {"log-integrability", log_integrability},
      {"counterexample behavior", counterexample},
      {"oscillation examples", oscillation},
      {"reproducibility", reproducibility},
  };
  int failed = 0;
  for (std::size_t i = 0; i < all.size(); ++i) {
    auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = all[i].run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    failed += !o.pass;
    std::printf("%s %2zu %s: %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", i + 1, all[i].name, o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
