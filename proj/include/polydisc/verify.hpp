#pragma once

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <exception>
#include <fstream>
#include <functional>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "polydisc/errors.hpp"
#include "polydisc/extension.hpp"
#include "polydisc/format.hpp"
#include "polydisc/radial.hpp"
#include "polydisc/rng.hpp"
#include "polydisc/series.hpp"
#include "polydisc/special.hpp"

namespace polydisc {

using Json = nlohmann::ordered_json;

/// Runs fn(i) for i in [0, n) on up to `workers` threads; slot i holds fn(i).
/// The first exception by index is rethrown after all workers finish.
template <class F>
auto parallel_map(std::size_t n, std::size_t workers, F fn) -> std::vector<decltype(fn(std::size_t{}))> {
  using T = decltype(fn(std::size_t{}));
  std::vector<T> out(n);
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        out[i] = fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  workers = std::max<std::size_t>(1, std::min(workers, n));
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

/// FNV-1a over the bytes of the sample's random inputs.
inline std::string inputs_hash(const std::vector<double>& xs) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (double x : xs) {
    unsigned char bytes[sizeof(double)];
    std::memcpy(bytes, &x, sizeof(double));
    for (unsigned char b : bytes) {
      h ^= b;
      h *= 0x100000001b3ULL;
    }
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

struct SampleRecord {
  std::uint64_t sample_index = 0;
  std::string inputs_hash;
  std::vector<double> values;
};

struct CheckResult {
  std::string name;
  bool passed = false;
  double observed = 0.0;
  double threshold = 0.0;
  std::string comparison;  ///< "<=" or ">=": observed compared against threshold
};

struct ExperimentResult {
  std::string kind;
  std::uint64_t seed = 0;
  Json config;  ///< normalized config, defaults filled in
  Json facts;   ///< deterministic quantities derived from the config (not from samples)
  std::vector<std::string> metrics;
  std::vector<SampleRecord> records;
  Json summary;
  std::vector<CheckResult> checks;

  bool passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
  }
  std::vector<double> column(const std::string& name) const {
    auto it = std::find(metrics.begin(), metrics.end(), name);
    if (it == metrics.end()) throw ConfigError("no metric '" + name + "'");
    std::size_t j = static_cast<std::size_t>(it - metrics.begin());
    std::vector<double> v;
    v.reserve(records.size());
    for (const auto& r : records) v.push_back(r.values[j]);
    return v;
  }
};

/// Nearest-rank quantile of an unsorted sample.
inline double quantile(std::vector<double> xs, double q) {
  if (xs.empty()) return 0.0;
  std::sort(xs.begin(), xs.end());
  if (q <= 0.0) return xs.front();
  auto rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(xs.size())));
  return xs[std::clamp<std::size_t>(rank, 1, xs.size()) - 1];
}

/// Least-squares slope of log y against log x over the points with y > 0.
inline std::optional<double> loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < x.size(); ++i)
    if (y[i] > 0.0 && x[i] > 0.0) {
      lx.push_back(std::log(x[i]));
      ly.push_back(std::log(y[i]));
    }
  if (lx.size() < 2) return std::nullopt;
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= static_cast<double>(lx.size());
  my /= static_cast<double>(ly.size());
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxy += (lx[i] - mx) * (ly[i] - my);
    sxx += (lx[i] - mx) * (lx[i] - mx);
  }
  if (sxx == 0.0) return std::nullopt;
  return sxy / sxx;
}

namespace detail {

enum Purpose : std::uint64_t { kSamplePurpose = 1, kTargetPurpose = 2, kNormPurpose = 3, kBlockPurpose = 4 };

inline Json default_random_target(const char* spectrum, std::uint32_t dim, std::int64_t order, double constant_min) {
  return Json{{"type", "random"}, {"spectrum", spectrum}, {"dim", dim}, {"max_order", order},
              {"terms", 6},       {"constant_min", constant_min}, {"index", 0}};
}

inline Json defaults_for(const std::string& kind) {
  if (kind == "fatou")
    return Json{{"kind", kind},
                {"seed", nullptr},
                {"samples", 1000},
                {"dim", 0},
                {"target", default_random_target("analytic", 3, 2, 0.0)},
                {"scheme", "diagonal"},
                {"eps", {0.1, 0.01, 0.001, 0.0001}},
                {"slope_tolerance", 0.05}};
  if (kind == "weak_type")
    return Json{{"kind", kind},
                {"seed", nullptr},
                {"samples", 10000},
                {"dim", 1},
                {"target", {{"type", "riesz"}, {"q", 3}, {"depth", 10}}},
                {"scheme", "diagonal"},
                {"lambdas", Json::array()},
                {"radius_grid", 40},
                {"max_slope", -0.8}};
  if (kind == "log_int")
    return Json{{"kind", kind},
                {"seed", nullptr},
                {"samples", 200},
                {"dim", 0},
                {"target", default_random_target("analytic", 3, 3, 0.1)},
                {"quadrature", 4096},
                {"tolerance", 1e-6},
                {"se_multiplier", 3.0}};
  if (kind == "mz")
    return Json{{"kind", kind},
                {"seed", nullptr},
                {"samples", 1000},
                {"dim", 50},
                {"target", {{"type", "riesz"}, {"q", 3}, {"depth", 12}}},
                {"sequence", {{"type", "default"}, {"points", 3000}}},
                {"threshold", 0.2},
                {"min_fraction", 0.9},
                {"guard_terms", 50}};
  if (kind == "divergence")
    return Json{{"kind", kind},
                {"seed", nullptr},
                {"samples", 1000},
                {"target", {{"type", "example_g"}}},
                {"path", {{"type", "block"}, {"p0", 0.95}, {"blocks", 4}, {"width_cap", 20}, {"choice_samples", 1000}}},
                {"osc_threshold", 0.4},
                {"min_fraction", 0.9},
                {"f_threshold", std::exp(-4.0)},
                {"boundary_threshold", 0.1},
                {"boundary_fraction", 0.5}};
  if (kind == "abschnitt")
    return Json{{"kind", kind},
                {"seed", nullptr},
                {"samples", 10000},
                {"target", {{"type", "series"}, {"text", "1:1 -> 1,0\n2:1 -> 1,0\n"}}},
                {"p", 1.0},
                {"m_list", {1, 2, 3, 5, 8}},
                {"se_multiplier", 3.0}};
  throw ConfigError("unknown experiment kind '" + kind + "'");
}

inline Json path_defaults(const std::string& type) {
  if (type == "block")
    return Json{{"type", type}, {"p0", 0.95}, {"blocks", 4}, {"width_cap", 20}, {"choice_samples", 1000}};
  if (type == "adaptive")
    return Json{{"type", type},          {"levels", 3},         {"level_base", 4.0},
                {"coordinate_cap", 100000}, {"head_cap", 1.0 - 1e-6}, {"grid_count", 30}};
  if (type == "trivial") return Json{{"type", type}, {"coordinates", 20}};
  if (type == "explicit") return Json{{"type", type}, {"text", ""}};
  throw ConfigError("unknown path type '" + type + "'");
}

/// Overlays user keys onto defaults, rejecting keys the defaults don't know.
inline Json overlay(Json base, const Json& user, const std::string& where) {
  if (!user.is_object()) throw ConfigError(where + " must be an object");
  for (auto it = user.begin(); it != user.end(); ++it) {
    if (!base.contains(it.key())) throw ConfigError("unknown key '" + it.key() + "' in " + where);
    base[it.key()] = it.value();
  }
  return base;
}

template <class T>
T get(const Json& j, const char* key) {
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config key '") + key + "': " + e.what());
  }
}

inline SpectrumClass parse_spectrum(const std::string& s) {
  if (s == "analytic") return SpectrumClass::Analytic;
  if (s == "pm_analytic") return SpectrumClass::PMAnalytic;
  if (s == "big") return SpectrumClass::Big;
  if (s == "general") return SpectrumClass::General;
  throw ConfigError("unknown spectrum '" + s + "'");
}

}  // namespace detail

/// Validates a config document and fills in every default. The result is
/// echoed verbatim into the experiment output and suffices to re-run it.
inline Json normalize_config(const Json& user, std::optional<std::uint64_t> seed_override = std::nullopt) {
  if (!user.is_object() || !user.contains("kind")) throw ConfigError("config needs a 'kind'");
  std::string kind = detail::get<std::string>(user, "kind");
  Json cfg = detail::overlay(detail::defaults_for(kind), user, "config");
  if (seed_override) cfg["seed"] = *seed_override;
  if (cfg["seed"].is_null()) throw ConfigError("experiment needs an explicit seed (--seed or \"seed\")");
  if (!cfg["seed"].is_number_unsigned() && !(cfg["seed"].is_number_integer() && cfg["seed"].get<std::int64_t>() >= 0))
    throw ConfigError("seed must be a nonnegative integer");
  if (detail::get<std::int64_t>(cfg, "samples") < 1) throw ConfigError("samples must be >= 1");
  if (cfg.contains("path")) {
    const Json& p = cfg["path"];
    if (!p.is_object() || !p.contains("type")) throw ConfigError("path needs a 'type'");
    cfg["path"] = detail::overlay(detail::path_defaults(detail::get<std::string>(p, "type")), p, "path");
  }
  return cfg;
}

/// Series described by a target object: {"type":"series","text"|"path"} or
/// {"type":"random",...}; random targets draw from the target stream of the seed.
inline FourierSeries resolve_series(const Json& target, std::uint64_t seed) {
  std::string type = detail::get<std::string>(target, "type");
  if (type == "series") {
    if (target.contains("text")) return from_text(detail::get<std::string>(target, "text"));
    if (target.contains("path")) {
      std::string path = detail::get<std::string>(target, "path");
      std::ifstream in(path);
      if (!in) throw IoError("cannot read series file '" + path + "'");
      return read_series(in);
    }
    throw ConfigError("series target needs 'text' or 'path'");
  }
  if (type == "random") {
    Json t = detail::overlay(detail::default_random_target("analytic", 3, 3, 0.0), target, "random target");
    RandomPolynomialSpec spec;
    spec.spectrum = detail::parse_spectrum(detail::get<std::string>(t, "spectrum"));
    spec.dim = detail::get<std::uint32_t>(t, "dim");
    spec.max_order = detail::get<std::int64_t>(t, "max_order");
    spec.terms = detail::get<std::size_t>(t, "terms");
    spec.constant_min = detail::get<double>(t, "constant_min");
    RandomStream rng = StreamFamily(seed, detail::kTargetPurpose).stream(detail::get<std::uint64_t>(t, "index"));
    return random_polynomial(spec, rng);
  }
  throw ConfigError("target type '" + type + "' is not a series");
}

inline RieszProductMeasure resolve_riesz(const Json& target) {
  Json t = detail::overlay(Json{{"type", "riesz"}, {"q", 3}, {"depth", 12}}, target, "riesz target");
  return RieszProductMeasure(detail::get<std::uint32_t>(t, "q"), detail::get<std::uint32_t>(t, "depth"));
}

namespace detail {

inline Json quantile_summary(const ExperimentResult& r) {
  Json q = Json::object();
  for (const auto& m : r.metrics) {
    auto col = r.column(m);
    q[m] = Json{{"min", quantile(col, 0.0)}, {"median", quantile(col, 0.5)}, {"p90", quantile(col, 0.9)},
                {"max", quantile(col, 1.0)}};
  }
  return q;
}

inline Json estimate_json(Estimate e) { return Json{{"value", e.value}, {"std_error", e.std_error}}; }

inline Estimate fraction(const std::vector<double>& flags) {
  double n = static_cast<double>(flags.size());
  double k = 0;
  for (double f : flags) k += f != 0.0;
  double p = n > 0 ? k / n : 0.0;
  return {p, n > 0 ? std::sqrt(p * (1 - p) / n) : 0.0};
}

inline CheckResult check(std::string name, double observed, const char* cmp, double threshold) {
  bool ok = std::string(cmp) == "<=" ? observed <= threshold : observed >= threshold;
  return {std::move(name), ok, observed, threshold, cmp};
}

inline std::vector<double> lambda_grid(const Json& cfg) {
  std::vector<double> l = get<std::vector<double>>(cfg, "lambdas");
  if (l.empty())
    for (int i = 0; i < 20; ++i) l.push_back(std::exp(std::log(50.0) * i / 19.0));
  return l;
}

}  // namespace detail

/// Recomputes summary and checks from the config, derived facts and records only.
inline void decide(ExperimentResult& r) {
  const Json& cfg = r.config;
  r.summary = Json{{"quantiles", detail::quantile_summary(r)}};
  r.checks.clear();
  Json estimates = Json::object();
  Json values = Json::object();
  if (r.kind == "fatou") {
    auto eps = detail::get<std::vector<double>>(cfg, "eps");
    auto bounds = r.facts.at("bounds").get<std::vector<double>>();
    std::vector<double> maxima;
    double worst = 0.0;
    for (std::size_t i = 0; i < eps.size(); ++i) {
      auto col = r.column("err_" + std::to_string(i));
      double mx = col.empty() ? 0.0 : *std::max_element(col.begin(), col.end());
      maxima.push_back(mx);
      // allow rounding of the evaluations themselves
      double allowed = bounds[i] + 1e-13 * (1.0 + r.facts.at("wiener_norm").get<double>());
      worst = std::max(worst, mx - allowed);
    }
    values["max_error"] = maxima;
    r.checks.push_back(detail::check("rate_bound", worst, "<=", 0.0));
    if (auto slope = loglog_slope(eps, maxima)) {
      values["slope"] = *slope;
      r.checks.push_back(
          detail::check("slope_near_one", std::abs(*slope - 1.0), "<=", detail::get<double>(cfg, "slope_tolerance")));
    } else {
      values["slope"] = nullptr;
    }
  } else if (r.kind == "weak_type") {
    auto lambdas = detail::lambda_grid(cfg);
    auto M = r.column("M");
    auto Mr = r.column("M_refined");
    std::vector<double> tail;
    Json tails = Json::array();
    for (double l : lambdas) {
      std::vector<double> flags;
      for (double m : M) flags.push_back(m > l);
      Estimate e = detail::fraction(flags);
      tail.push_back(e.value);
      tails.push_back(Json{{"lambda", l}, {"tail", e.value}, {"std_error", e.std_error}});
    }
    values["tail"] = tails;
    // empirical weak-type constant: max over the grid of lambda P(M > lambda) / ||mu||
    double mass = r.facts.contains("total_variation") ? r.facts["total_variation"].get<double>()
                                                      : r.facts.at("wiener_norm").get<double>();
    double C = 0.0;
    for (std::size_t i = 0; i < lambdas.size(); ++i) C = std::max(C, lambdas[i] * tail[i] / mass);
    values["empirical_constant"] = C;
    auto slope = loglog_slope(lambdas, tail);
    values["slope"] = slope ? Json(*slope) : Json(nullptr);
    r.checks.push_back(detail::check("tail_slope", slope ? *slope : INFINITY, "<=", detail::get<double>(cfg, "max_slope")));
    double worst = -INFINITY;
    for (std::size_t i = 0; i < M.size(); ++i) worst = std::max(worst, M[i] - Mr[i]);
    r.checks.push_back(detail::check("refinement_monotone", M.empty() ? 0.0 : worst, "<=", 0.0));
  } else if (r.kind == "log_int") {
    auto I = r.column("log_integral");
    auto absf = r.column("abs_f");
    double upper = r.facts.at("log_inv_a0").get<double>() + detail::get<double>(cfg, "tolerance");
    Estimate norm = I.size() >= 2 ? sample_mean(absf) : Estimate{absf.empty() ? 0.0 : absf[0], 0.0};
    double lower = -(norm.value + detail::get<double>(cfg, "se_multiplier") * norm.std_error);
    estimates["l1_norm"] = detail::estimate_json(norm);
    values["upper_bound"] = upper;
    values["lower_bound"] = lower;
    double mx = I.empty() ? -INFINITY : *std::max_element(I.begin(), I.end());
    double mn = I.empty() ? INFINITY : *std::min_element(I.begin(), I.end());
    r.checks.push_back(detail::check("upper_bound", mx, "<=", upper));
    r.checks.push_back(detail::check("lower_bound", mn, ">=", lower));
  } else if (r.kind == "mz") {
    Estimate f = detail::fraction(r.column("dipped"));
    estimates["dip_fraction"] = detail::estimate_json(f);
    auto guard = r.column("kernel_guard");
    values["kernel_guard_max"] = guard.empty() ? 0.0 : *std::max_element(guard.begin(), guard.end());
    r.checks.push_back(detail::check("dip_fraction", f.value, ">=", detail::get<double>(cfg, "min_fraction")));
  } else if (r.kind == "divergence") {
    std::string target = cfg.at("target").at("type").get<std::string>();
    if (target == "example_g") {
      std::vector<double> flags;
      for (double o : r.column("oscillation")) flags.push_back(o >= detail::get<double>(cfg, "osc_threshold"));
      Estimate f = detail::fraction(flags);
      estimates["oscillation_fraction"] = detail::estimate_json(f);
      r.checks.push_back(detail::check("oscillation_fraction", f.value, ">=", detail::get<double>(cfg, "min_fraction")));
    } else if (target == "example_u") {
      auto err = r.column("modulus_identity_error");
      r.checks.push_back(detail::check("modulus_identity", err.empty() ? 0.0 : *std::max_element(err.begin(), err.end()),
                                       "<=", 1e-12));
    } else {
      std::vector<double> small, large;
      for (double v : r.column("min_abs_f")) small.push_back(v <= detail::get<double>(cfg, "f_threshold"));
      for (double v : r.column("boundary_abs_f")) large.push_back(v >= detail::get<double>(cfg, "boundary_threshold"));
      Estimate fs = detail::fraction(small), fl = detail::fraction(large);
      estimates["small_fraction"] = detail::estimate_json(fs);
      estimates["boundary_fraction"] = detail::estimate_json(fl);
      auto absf = r.column("max_abs_f");
      r.checks.push_back(detail::check("modulus_at_most_one", absf.empty() ? 0.0 : *std::max_element(absf.begin(), absf.end()),
                                       "<=", 1.0 + 1e-6));
      r.checks.push_back(detail::check("small_fraction", fs.value, ">=", detail::get<double>(cfg, "min_fraction")));
      r.checks.push_back(
          detail::check("boundary_fraction", fl.value, ">=", detail::get<double>(cfg, "boundary_fraction")));
    }
  } else if (r.kind == "abschnitt") {
    double p = detail::get<double>(cfg, "p");
    auto ms = detail::get<std::vector<std::uint32_t>>(cfg, "m_list");
    auto dim = r.facts.at("dim").get<std::uint32_t>();
    double k = detail::get<double>(cfg, "se_multiplier");
    Estimate full = r.records.size() >= 2 ? lp_from_powers(r.column("pow_full"), p) : Estimate{};
    estimates["full"] = detail::estimate_json(full);
    double worst_excess = -INFINITY;
    double worst_stable = 0.0;
    for (auto m : ms) {
      auto col = r.column("pow_m" + std::to_string(m));
      Estimate e = r.records.size() >= 2 ? lp_from_powers(col, p) : Estimate{};
      estimates["m" + std::to_string(m)] = detail::estimate_json(e);
      double se = std::sqrt(e.std_error * e.std_error + full.std_error * full.std_error);
      worst_excess = std::max(worst_excess, e.value - full.value - k * se);
      if (m >= dim) worst_stable = std::max(worst_stable, std::abs(e.value - full.value));
    }
    r.checks.push_back(detail::check("stable_beyond_dim", worst_stable, "<=", 0.0));
    if (p >= 1.0) r.checks.push_back(detail::check("contraction", ms.empty() ? 0.0 : worst_excess, "<=", 0.0));
  } else {
    throw ConfigError("unknown experiment kind '" + r.kind + "'");
  }
  r.summary["estimates"] = estimates;
  r.summary["values"] = values;
}

namespace detail {

inline ExperimentResult start(const Json& cfg, std::vector<std::string> metrics) {
  ExperimentResult r;
  r.kind = cfg.at("kind").get<std::string>();
  r.seed = cfg.at("seed").get<std::uint64_t>();
  r.config = cfg;
  r.metrics = std::move(metrics);
  return r;
}

inline std::size_t sample_count(const Json& cfg) { return get<std::size_t>(cfg, "samples"); }

inline void check_polyharmonic(const FourierSeries& f, const char* what) {
  auto s = spectrum_class(f);
  if (s != SpectrumClass::Analytic && s != SpectrumClass::PMAnalytic)
    throw SpectrumError(std::string(what) + " needs an analytic or PM-analytic series (got " + to_string(s) + ")");
}

inline ExperimentResult run_fatou(const Json& cfg, std::size_t workers) {
  FourierSeries F = resolve_series(cfg.at("target"), get<std::uint64_t>(cfg, "seed"));
  check_polyharmonic(F, "fatou experiment");
  auto eps = get<std::vector<double>>(cfg, "eps");
  for (double e : eps)
    if (!(e > 0.0 && e <= 1.0)) throw ConfigError("eps values must lie in (0,1]");
  RadialScheme scheme = RadialScheme::parse(get<std::string>(cfg, "scheme"));
  std::vector<std::string> metrics;
  for (std::size_t i = 0; i < eps.size(); ++i) metrics.push_back("err_" + std::to_string(i));
  ExperimentResult r = start(cfg, metrics);
  double W = 0.0;
  for (const auto& [nu, c] : F.terms()) W = std::max(W, static_cast<double>(nu.weighted_degree(scheme)));
  std::vector<double> bounds;
  for (double e : eps) bounds.push_back(wiener_norm(F) * W * e);
  r.facts = Json{{"wiener_norm", wiener_norm(F)}, {"max_weighted_degree", W}, {"bounds", bounds}};
  std::size_t m = std::max<std::size_t>({1, F.dim(), get<std::size_t>(cfg, "dim")});
  StreamFamily fam(r.seed, kSamplePurpose);
  r.records = parallel_map(sample_count(cfg), workers, [&](std::size_t i) {
    RandomStream rng = fam.stream(i);
    TorusPoint th = sample_torus(m, rng);
    RadialSection section(F, th, scheme);
    Complex boundary = section.boundary();
    SampleRecord rec{i, inputs_hash(th.angles()), {}};
    for (double e : eps) rec.values.push_back(std::abs(section(1.0 - e) - boundary));
    return rec;
  });
  return r;
}

inline ExperimentResult run_weak_type(const Json& cfg, std::size_t workers) {
  const Json& target = cfg.at("target");
  std::string type = get<std::string>(target, "type");
  RadialScheme scheme = RadialScheme::parse(get<std::string>(cfg, "scheme"));
  int count = get<int>(cfg, "radius_grid");
  if (count < 1 || count > 60) throw ConfigError("radius_grid must be a dyadic depth in [1, 60]");
  std::vector<double> grid = default_radius_grid(count);
  std::vector<double> refined = grid;
  for (int k = 1; k <= count; ++k) refined.push_back(1.0 - std::exp2(-(k + 0.5)));
  ExperimentResult r = start(cfg, {"M", "M_refined"});
  std::size_t m = std::max<std::size_t>(1, get<std::size_t>(cfg, "dim"));
  std::function<double(const TorusPoint&, const std::vector<double>&)> maximal;
  std::optional<RieszProductMeasure> mu;
  std::optional<FourierSeries> F;
  if (type == "riesz") {
    mu = resolve_riesz(target);
    r.facts = Json{{"total_variation", 1.0}};
    maximal = [&](const TorusPoint& th, const std::vector<double>& g) {
      double best = 0.0;
      for (double rr : g) best = std::max(best, std::abs(measure_radial_value(*mu, rr, th[0])));
      return best;
    };
  } else {
    F = resolve_series(target, r.seed);
    check_polyharmonic(*F, "weak type experiment");
    m = std::max<std::size_t>(m, F->dim());
    r.facts = Json{{"wiener_norm", wiener_norm(*F)}};
    maximal = [&](const TorusPoint& th, const std::vector<double>& g) { return radial_maximal(*F, th, g, scheme); };
  }
  StreamFamily fam(r.seed, kSamplePurpose);
  r.records = parallel_map(sample_count(cfg), workers, [&](std::size_t i) {
    RandomStream rng = fam.stream(i);
    TorusPoint th = sample_torus(m, rng);
    return SampleRecord{i, inputs_hash(th.angles()), {maximal(th, grid), maximal(th, refined)}};
  });
  return r;
}

inline ExperimentResult run_log_int(const Json& cfg, std::size_t workers) {
  std::uint64_t seed = get<std::uint64_t>(cfg, "seed");
  FourierSeries F = resolve_series(cfg.at("target"), seed);
  if (spectrum_class(F) != SpectrumClass::Analytic) throw SpectrumError("log integrability needs an analytic series");
  Complex a0 = F.coeff(MultiIndex());
  if (a0 == Complex{}) throw ConfigError("log integrability with F(0) = 0 is unsupported");
  int Q = get<int>(cfg, "quadrature");
  if (Q < 16) throw ConfigError("quadrature must be >= 16");
  ExperimentResult r = start(cfg, {"log_integral", "abs_f"});
  r.facts = Json{{"log_inv_a0", -std::log(std::abs(a0))}, {"dim", F.dim()}};
  std::size_t m = std::max<std::size_t>({1, F.dim(), get<std::size_t>(cfg, "dim")});
  StreamFamily fam(seed, kSamplePurpose);
  StreamFamily norm(seed, kNormPurpose);
  r.records = parallel_map(sample_count(cfg), workers, [&](std::size_t i) {
    RandomStream rng = fam.stream(i);
    TorusPoint th = sample_torus(m, rng);
    // t -> F(e^{i(theta_1 + t)}, e^{i(theta_2 + 2t)}, ...): the twist at xi = e^{it}
    OneVarSeries P;
    for (const auto& [nu, c] : F.terms()) {
      double phase = 0.0;
      for (const auto& e : nu.entries()) phase += static_cast<double>(e.exponent) * th[e.coord - 1];
      P.add(nu.diagonal_signature(RadialScheme()), c * std::polar(1.0, phase));
    }
    double s = 0.0;
    for (int j = 0; j < Q; ++j) s -= std::log(std::abs(P(2.0 * std::numbers::pi * j / Q)));
    RandomStream nr = norm.stream(i);
    TorusPoint th2 = sample_torus(m, nr);
    std::vector<double> inputs = th.angles();
    inputs.insert(inputs.end(), th2.angles().begin(), th2.angles().end());
    return SampleRecord{i, inputs_hash(inputs), {s / Q, std::abs(evaluate(F, th2))}};
  });
  return r;
}

/// Radii of the configured sequence inside the usable range r <= r_max.
inline std::vector<double> mz_radii(const Json& seq, double r_max) {
  std::string type = get<std::string>(seq, "type");
  std::vector<double> out;
  if (type == "default") {
    Json s = overlay(Json{{"type", "default"}, {"points", 3000}}, seq, "sequence");
    auto points = get<std::size_t>(s, "points");
    if (points < 2) throw ConfigError("sequence points must be >= 2");
    // r_k <= r_max  <=>  k <= (1 - r_max)^{-3}
    double kmax = std::floor(std::pow(1.0 - r_max, -3.0) * (1.0 + 1e-12));
    kmax = std::max(kmax, 1.0);
    double last = 0.0;
    for (std::size_t i = 0; i < points; ++i) {
      double k = std::round(std::exp(std::log(kmax) * static_cast<double>(i) / static_cast<double>(points - 1)));
      if (k <= last) continue;
      last = k;
      double r = 1.0 - 1.0 / std::cbrt(k);
      if (r <= r_max) out.push_back(r);
    }
  } else if (type == "explicit") {
    Json s = overlay(Json{{"type", "explicit"}, {"radii", Json::array()}}, seq, "sequence");
    for (double r : get<std::vector<double>>(s, "radii")) {
      if (!(r >= 0.0 && r < 1.0)) throw ConfigError("sequence radii must lie in [0,1)");
      if (!out.empty() && r <= out.back()) throw ConfigError("sequence radii must be increasing");
      if (r <= r_max) out.push_back(r);
    }
  } else if (type == "built") {
    Json s = overlay(Json{{"type", "built"}, {"scheme", "diagonal"}, {"points", 3000}}, seq, "sequence");
    double target = std::min(r_max, 1.0 - 1e-9);
    auto built = build_mz_sequence(RadialScheme::parse(get<std::string>(s, "scheme")), std::max(target, 0.5 + 1e-9));
    auto points = get<std::size_t>(s, "points");
    if (points < 2) throw ConfigError("sequence points must be >= 2");
    double n = static_cast<double>(built.size() - 1);
    std::uint64_t last = UINT64_MAX;
    for (std::size_t i = 0; i < points; ++i) {
      auto k = static_cast<std::uint64_t>(std::round(std::expm1(std::log1p(n) * i / (points - 1))));
      if (k == last) continue;
      last = k;
      double r = built[k];
      if (r <= r_max) out.push_back(r);
    }
  } else {
    throw ConfigError("unknown sequence type '" + type + "'");
  }
  if (out.empty()) throw ConfigError("sequence has no radii in the usable range");
  return out;
}

inline ExperimentResult run_mz(const Json& cfg, std::size_t workers) {
  RieszProductMeasure mu = resolve_riesz(cfg.at("target"));
  double r_max = 1.0 - std::pow(static_cast<double>(mu.q()), -static_cast<double>(mu.depth()));
  std::vector<double> radii = mz_radii(cfg.at("sequence"), r_max);
  auto guard_terms = get<std::size_t>(cfg, "guard_terms");
  std::vector<double> guard_seq = mz_default_sequence(guard_terms + 1);
  double threshold = get<double>(cfg, "threshold");
  ExperimentResult r = start(cfg, {"trajectory_min", "trajectory_last", "dipped", "kernel_guard"});
  r.facts = Json{{"usable_max_radius", r_max}, {"trajectory_points", radii.size()}};
  std::size_t m = std::max<std::size_t>(1, get<std::size_t>(cfg, "dim"));
  StreamFamily fam(r.seed, kSamplePurpose);
  r.records = parallel_map(sample_count(cfg), workers, [&](std::size_t i) {
    RandomStream rng = fam.stream(i);
    TorusPoint th = sample_torus(m, rng);
    double lo = INFINITY, last = 0.0;
    for (double rr : radii) {
      last = measure_radial_value(mu, rr, th[0]);
      lo = std::min(lo, last);
    }
    double guard = 0.0;
    for (std::size_t k = 0; k + 1 < guard_seq.size(); ++k)
      guard = std::max(guard, kernel_ratio(guard_seq[k + 1], guard_seq[k], th));
    return SampleRecord{i, inputs_hash(th.angles()), {lo, last, lo < threshold ? 1.0 : 0.0, guard}};
  });
  return r;
}

/// Extremes of sum_n phi(n, r_n) over the steps of a block path, in closed
/// form: every block step shares the head and tail sums and the block runs
/// through all alphabet tuples, so each block coordinate independently hits
/// its min and max over the alphabet.
struct BlockExtrema {
  std::vector<double> lo, hi;
};

inline BlockExtrema block_extrema(const std::vector<std::uint32_t>& boundaries, const std::vector<double>& alphabet,
                                  const std::function<double(std::uint32_t, double)>& phi) {
  BlockExtrema out;
  std::uint32_t N = boundaries.back();
  std::vector<double> at_zero(N + 1, 0.0);
  for (std::uint32_t n = 1; n <= N; ++n) at_zero[n] = phi(n, 0.0);
  std::uint32_t prev = 0;
  for (auto m : boundaries) {
    double base = 0.0;
    double h = reciprocal_head(prev);
    for (std::uint32_t n = 1; n <= prev; ++n) base += phi(n, h);
    for (std::uint32_t n = m + 1; n <= N; ++n) base += at_zero[n];
    double lo = base, hi = base;
    for (std::uint32_t n = prev + 1; n <= m; ++n) {
      double a = INFINITY, b = -INFINITY;
      for (double t : alphabet) {
        double v = t == 0.0 ? at_zero[n] : phi(n, t);
        a = std::min(a, v);
        b = std::max(b, v);
      }
      lo += a;
      hi += b;
    }
    out.lo.push_back(lo);
    out.hi.push_back(hi);
    prev = m;
  }
  return out;
}

/// sum_n phi(n, r_n) at every step of a general path over coordinates 1..N.
inline std::vector<double> path_values(const ApproachPath& p, std::uint32_t N,
                                       const std::function<double(std::uint32_t, double)>& phi) {
  std::vector<double> v;
  for (const auto& s : p.steps) {
    double sum = 0.0;
    for (std::uint32_t n = 1; n <= N; ++n) sum += phi(n, s.radius(n));
    v.push_back(sum);
  }
  return v;
}

inline ExperimentResult run_divergence(const Json& cfg, std::size_t workers) {
  std::string target = get<std::string>(cfg.at("target"), "type");
  if (target != "example_g" && target != "example_u" && target != "counterexample_f")
    throw ConfigError("divergence target must be example_g, example_u or counterexample_f");
  overlay(Json{{"type", target}}, cfg.at("target"), "target");
  const Json& path = cfg.at("path");
  std::string ptype = get<std::string>(path, "type");
  std::uint64_t seed = get<std::uint64_t>(cfg, "seed");

  std::vector<std::string> metrics;
  if (target == "example_g") metrics = {"oscillation", "trajectory_min", "trajectory_max", "boundary_re"};
  if (target == "example_u") metrics = {"oscillation_arg", "boundary_abs", "modulus_identity_error"};
  if (target == "counterexample_f")
    metrics = {"min_abs_f", "max_abs_f", "boundary_abs_f", "levels_reached", "coordinates"};
  ExperimentResult r = start(cfg, metrics);

  // point-independent paths are fixed before sampling
  std::vector<std::uint32_t> boundaries;
  std::optional<ApproachPath> fixed;
  if (ptype == "block") {
    if (get<std::uint32_t>(path, "width_cap") > kBlockWidthCap)
      throw ConfigError("block width cap exceeds " + std::to_string(kBlockWidthCap));
    auto choice = mc_block_boundaries(get<std::size_t>(path, "blocks"), get<double>(path, "p0"),
                                      get<std::size_t>(path, "choice_samples"), StreamFamily(seed, kBlockPurpose),
                                      get<std::uint32_t>(path, "width_cap"));
    boundaries = choice.boundaries;
    r.facts = Json{{"boundaries", boundaries}, {"unclipped", choice.unclipped}};
  } else if (ptype == "trivial") {
    auto n = get<std::uint32_t>(path, "coordinates");
    if (n == 0) throw ConfigError("trivial path needs coordinates >= 1");
    fixed = ApproachPath{{PathStep{n, 1.0, {}}, PathStep{n, 1.0, {}}}, true};
  } else if (ptype == "explicit") {
    fixed = path_from_text(get<std::string>(path, "text"));
    if (fixed->steps.empty()) throw ConfigError("explicit path has no steps");
    if (!radii_in_unit_interval(*fixed, true)) throw ConfigError("explicit path radii must lie in [0,1]");
  } else if (ptype == "adaptive") {
    if (target != "counterexample_f") throw ConfigError("adaptive paths need the counterexample_f target");
  }
  if (fixed) r.facts = Json{{"steps", fixed->steps.size()}, {"coordinates", fixed->extent()}};

  AdaptiveOptions aopt;
  if (ptype == "adaptive") {
    aopt.levels = get<int>(path, "levels");
    aopt.level_base = get<double>(path, "level_base");
    aopt.coordinate_cap = get<std::uint32_t>(path, "coordinate_cap");
    aopt.head_cap = get<double>(path, "head_cap");
    aopt.radius_grid = default_radius_grid(get<int>(path, "grid_count"));
    r.facts = Json{{"radius_grid_used", std::count_if(aopt.radius_grid.begin(), aopt.radius_grid.end(),
                                                      [&](double x) { return x <= aopt.head_cap; })}};
  }

  std::uint32_t N = ptype == "block" ? boundaries.back() : ptype == "adaptive" ? aopt.coordinate_cap : fixed->extent();
  StreamFamily fam(seed, kSamplePurpose);
  const std::vector<double> alphabet{0.0, 0.5};

  r.records = parallel_map(sample_count(cfg), workers, [&](std::size_t i) -> SampleRecord {
    RandomStream rng = fam.stream(i);
    TorusPoint th = sample_torus(N, rng);
    SampleRecord rec{i, inputs_hash(th.angles()), {}};
    // trailing window: last two blocks (or all steps of a general path)
    auto trailing = [&](const std::function<double(std::uint32_t, double)>& phi) {
      if (ptype == "block") {
        auto ex = block_extrema(boundaries, alphabet, phi);
        std::size_t from = ex.lo.size() >= 2 ? ex.lo.size() - 2 : 0;
        double lo = *std::min_element(ex.lo.begin() + from, ex.lo.end());
        double hi = *std::max_element(ex.hi.begin() + from, ex.hi.end());
        double all_lo = *std::min_element(ex.lo.begin(), ex.lo.end());
        double all_hi = *std::max_element(ex.hi.begin(), ex.hi.end());
        return std::array<double, 3>{hi - lo, all_lo, all_hi};
      }
      auto v = path_values(*fixed, N, phi);
      double lo = *std::min_element(v.begin(), v.end()), hi = *std::max_element(v.begin(), v.end());
      return std::array<double, 3>{hi - lo, lo, hi};
    };
    if (target == "example_g") {
      auto phi = [&](std::uint32_t n, double rr) { return rr * std::cos(th[n - 1]) / n; };
      auto t = trailing(phi);
      double boundary = 0.0;
      for (std::uint32_t n = 1; n <= N; ++n) boundary += phi(n, 1.0);
      rec.values = {t[0], t[1], t[2], boundary};
    } else if (target == "example_u") {
      auto t = trailing([&](std::uint32_t n, double rr) { return std::atan(rr * std::cos(th[n - 1]) / n); });
      PolydiscPoint z = th.scaled(std::vector<double>(N, 1.0));
      Complex u = example_u(z);
      double prod = 1.0;
      for (std::uint32_t n = 1; n <= N; ++n) {
        double s = 2.0 * std::cos(th[n - 1]);
        prod *= 1.0 + s * s / (4.0 * n * n);
      }
      rec.values = {t[0], std::abs(u), std::abs(std::norm(u) - prod) / prod};
    } else {
      BumpProfile profile;
      auto u = [&](std::uint32_t n, double rr) { return BumpHarmonic::factor(n, profile).value(rr, th[n - 1]); };
      if (ptype == "adaptive") {
        auto res = adaptive_block_path(bump_oracle(profile), th, aopt);
        auto used = static_cast<std::uint32_t>(res.chosen_radius.size());
        // tail sums of c0 and head sums at the cap, accumulated once
        std::vector<double> c0(used + 2, 0.0);
        for (std::uint32_t n = used; n >= 1; --n) c0[n] = c0[n + 1] + BumpHarmonic::factor(n, profile).c0();
        double min_log = INFINITY, max_log = -INFINITY;
        double head = 0.0;
        std::uint32_t head_done = 0;
        for (const auto& s : res.path.steps) {
          for (; head_done < s.head_len; ++head_done) head += u(head_done + 1, s.head_radius);
          double block = 0.0;
          for (std::uint32_t n = s.head_len + 1; n <= s.extent(); ++n) block += res.chosen_value[n - 1];
          double total = head + block + c0[s.extent() + 1];
          min_log = std::min(min_log, -total);
          max_log = std::max(max_log, -total);
        }
        rec.values = {std::exp(min_log), std::exp(max_log), counterexample_boundary_modulus(th, used, profile),
                      static_cast<double>(res.levels_reached), static_cast<double>(used)};
      } else {
        auto t = trailing([&](std::uint32_t n, double rr) { return -u(n, rr); });
        rec.values = {std::exp(t[1]), std::exp(t[2]), counterexample_boundary_modulus(th, N, profile), 0.0,
                      static_cast<double>(N)};
      }
    }
    return rec;
  });
  return r;
}

inline ExperimentResult run_abschnitt(const Json& cfg, std::size_t workers) {
  std::uint64_t seed = get<std::uint64_t>(cfg, "seed");
  FourierSeries F = resolve_series(cfg.at("target"), seed);
  double p = get<double>(cfg, "p");
  if (!(p > 0.0)) throw ConfigError("p must be > 0");
  auto ms = get<std::vector<std::uint32_t>>(cfg, "m_list");
  for (std::size_t i = 0; i < ms.size(); ++i)
    if (ms[i] == 0 || (i > 0 && ms[i] <= ms[i - 1])) throw ConfigError("m_list must be increasing positive integers");
  if (get<std::size_t>(cfg, "samples") < 2) throw ConfigError("abschnitt check needs at least 2 samples");
  std::vector<std::string> metrics{"pow_full"};
  for (auto m : ms) metrics.push_back("pow_m" + std::to_string(m));
  ExperimentResult r = start(cfg, metrics);
  r.facts = Json{{"dim", F.dim()}};
  std::vector<FourierSeries> parts;
  for (auto m : ms) parts.push_back(abschnitt(F, m));
  std::size_t dim = std::max<std::size_t>({1, F.dim(), ms.empty() ? 1 : ms.back()});
  StreamFamily fam(seed, kSamplePurpose);
  r.records = parallel_map(sample_count(cfg), workers, [&](std::size_t i) {
    RandomStream rng = fam.stream(i);
    TorusPoint th = sample_torus(dim, rng);
    SampleRecord rec{i, inputs_hash(th.angles()), {std::pow(std::abs(evaluate(F, th)), p)}};
    for (const auto& g : parts) rec.values.push_back(std::pow(std::abs(evaluate(g, th)), p));
    return rec;
  });
  return r;
}

}  // namespace detail

/// Runs a config (normalized or not) and decides it. Worker count never
/// changes the result: sample i always draws from stream i.
inline ExperimentResult run_experiment(const Json& config, std::size_t workers = 1,
                                       std::optional<std::uint64_t> seed_override = std::nullopt) {
  Json cfg = normalize_config(config, seed_override);
  std::string kind = cfg.at("kind").get<std::string>();
  ExperimentResult r;
  if (kind == "fatou") r = detail::run_fatou(cfg, workers);
  else if (kind == "weak_type") r = detail::run_weak_type(cfg, workers);
  else if (kind == "log_int") r = detail::run_log_int(cfg, workers);
  else if (kind == "mz") r = detail::run_mz(cfg, workers);
  else if (kind == "divergence") r = detail::run_divergence(cfg, workers);
  else r = detail::run_abschnitt(cfg, workers);
  decide(r);
  return r;
}

inline Json to_json(const ExperimentResult& r) {
  Json checks = Json::array();
  for (const auto& c : r.checks)
    checks.push_back(Json{{"name", c.name}, {"passed", c.passed}, {"observed", c.observed},
                          {"comparison", c.comparison}, {"threshold", c.threshold}});
  return Json{{"kind", r.kind},       {"seed", r.seed},        {"samples", r.records.size()},
              {"metrics", r.metrics}, {"facts", r.facts},      {"summary", r.summary},
              {"checks", checks},     {"passed", r.passed()},  {"config", r.config}};
}

inline void write_csv(std::ostream& os, const ExperimentResult& r) {
  os << "sample_index,inputs_hash";
  for (const auto& m : r.metrics) os << ',' << m;
  os << '\n';
  for (const auto& rec : r.records) {
    os << rec.sample_index << ',' << rec.inputs_hash;
    for (double v : rec.values) os << ',' << format_double(v);
    os << '\n';
  }
}

inline void write_json(std::ostream& os, const ExperimentResult& r) { os << to_json(r).dump(2) << '\n'; }

/// Parses CSV written by write_csv back into records (for re-deciding).
inline std::vector<SampleRecord> read_csv_records(std::istream& is, std::vector<std::string>* metrics = nullptr) {
  std::string line;
  if (!std::getline(is, line)) throw ConfigError("empty CSV");
  auto head = split(line, ',');
  if (head.size() < 2 || head[0] != "sample_index" || head[1] != "inputs_hash") throw ConfigError("unexpected CSV header");
  if (metrics) {
    metrics->clear();
    for (std::size_t i = 2; i < head.size(); ++i) metrics->emplace_back(head[i]);
  }
  std::vector<SampleRecord> out;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    auto cells = split(line, ',');
    if (cells.size() != head.size()) throw ConfigError("CSV row has the wrong number of cells");
    SampleRecord rec;
    rec.sample_index = static_cast<std::uint64_t>(parse_double(cells[0]));
    rec.inputs_hash = std::string(cells[1]);
    for (std::size_t i = 2; i < cells.size(); ++i) rec.values.push_back(parse_double(cells[i]));
    out.push_back(std::move(rec));
  }
  return out;
}

/// Writes prefix.csv and prefix.json.
inline void write_result_files(const ExperimentResult& r, const std::string& prefix) {
  for (const char* ext : {".csv", ".json"}) {
    std::string path = prefix + ext;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write '" + path + "'");
    if (std::string(ext) == ".csv") {
      write_csv(out, r);
    } else {
      write_json(out, r);
    }
    if (!out) throw IoError("write to '" + path + "' failed");
  }
}

}  // namespace polydisc
