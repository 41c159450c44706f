#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <initializer_list>
#include <istream>
#include <map>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "polydisc/errors.hpp"
#include "polydisc/format.hpp"
#include "polydisc/multi_index.hpp"
#include "polydisc/rng.hpp"

namespace polydisc {

using Complex = std::complex<double>;

/// Sparse multivariate Fourier series sum a_nu e^{i nu.theta}.
///
/// Used both for functions and for (absolutely continuous) measures, which are
/// only ever touched through their coefficients.
class FourierSeries {
 public:
  using Terms = std::map<MultiIndex, Complex>;

  FourierSeries() = default;
  FourierSeries(std::initializer_list<std::pair<MultiIndex, Complex>> terms) {
    for (const auto& [k, c] : terms) add(k, c);
  }

  static FourierSeries constant(Complex c) { return FourierSeries{{MultiIndex(), c}}; }
  static FourierSeries monomial(const MultiIndex& nu, Complex c = 1.0) { return FourierSeries{{nu, c}}; }

  /// Accumulates c into the coefficient of nu; coefficients that become zero are removed.
  void add(const MultiIndex& nu, Complex c) {
    if (c == Complex{}) return;
    auto [it, inserted] = terms_.try_emplace(nu, c);
    if (!inserted) {
      it->second += c;
      if (it->second == Complex{}) terms_.erase(it);
    }
  }

  void set(const MultiIndex& nu, Complex c) {
    if (c == Complex{}) {
      terms_.erase(nu);
    } else {
      terms_[nu] = c;
    }
  }

  Complex coeff(const MultiIndex& nu) const {
    auto it = terms_.find(nu);
    return it == terms_.end() ? Complex{} : it->second;
  }

  const Terms& terms() const noexcept { return terms_; }
  std::size_t size() const noexcept { return terms_.size(); }
  bool empty() const noexcept { return terms_.empty(); }

  /// Smallest m with all support in the first m coordinates.
  std::uint32_t dim() const noexcept {
    std::uint32_t d = 0;
    for (const auto& [nu, c] : terms_) d = std::max(d, nu.dim());
    return d;
  }

  FourierSeries& operator+=(const FourierSeries& o) {
    for (const auto& [nu, c] : o.terms_) add(nu, c);
    return *this;
  }
  FourierSeries& operator-=(const FourierSeries& o) {
    for (const auto& [nu, c] : o.terms_) add(nu, -c);
    return *this;
  }
  FourierSeries& operator*=(Complex s) {
    if (s == Complex{}) {
      terms_.clear();
      return *this;
    }
    for (auto& [nu, c] : terms_) c *= s;
    std::erase_if(terms_, [](const auto& kv) { return kv.second == Complex{}; });
    return *this;
  }

  friend FourierSeries operator+(FourierSeries a, const FourierSeries& b) { return a += b; }
  friend FourierSeries operator-(FourierSeries a, const FourierSeries& b) { return a -= b; }
  friend FourierSeries operator*(FourierSeries a, Complex s) { return a *= s; }
  friend FourierSeries operator*(Complex s, FourierSeries a) { return a *= s; }

  /// Coefficient convolution (pointwise product of the functions).
  friend FourierSeries operator*(const FourierSeries& a, const FourierSeries& b) {
    FourierSeries out;
    for (const auto& [na, ca] : a.terms_)
      for (const auto& [nb, cb] : b.terms_) out.add(na + nb, ca * cb);
    return out;
  }

  friend bool operator==(const FourierSeries&, const FourierSeries&) = default;

 private:
  Terms terms_;
};

enum class SpectrumClass { Analytic, PMAnalytic, Big, General };

inline const char* to_string(SpectrumClass c) {
  switch (c) {
    case SpectrumClass::Analytic: return "analytic";
    case SpectrumClass::PMAnalytic: return "pm_analytic";
    case SpectrumClass::Big: return "big";
    case SpectrumClass::General: return "general";
  }
  return "general";
}

/// Whether every series of class `inner` also belongs to class `outer`.
constexpr bool contained_in(SpectrumClass inner, SpectrumClass outer) {
  if (inner == outer || outer == SpectrumClass::General) return true;
  return inner == SpectrumClass::Analytic;
}

/// Point of the closed polydisc; coordinates past the stored ones are zero.
class PolydiscPoint {
 public:
  PolydiscPoint() = default;
  explicit PolydiscPoint(std::vector<Complex> coords) : coords_(std::move(coords)) {
    for (std::size_t j = 0; j < coords_.size(); ++j) {
      if (!(std::abs(coords_[j]) <= 1.0 + kBoundarySlack))
        throw DomainError("polydisc point coordinate " + std::to_string(j + 1) + " has modulus " +
                          format_double(std::abs(coords_[j])) + " > 1");
    }
  }

  /// (rho_j e^{i theta_j}); radii and angles must have equal length.
  static PolydiscPoint polar(const std::vector<double>& radii, const std::vector<double>& angles) {
    if (radii.size() != angles.size()) throw ConfigError("radii and angles differ in length");
    std::vector<Complex> z(radii.size());
    for (std::size_t j = 0; j < z.size(); ++j) {
      if (radii[j] < 0.0) throw DomainError("negative radius");
      z[j] = std::polar(radii[j], angles[j]);
    }
    return PolydiscPoint(std::move(z));
  }

  const std::vector<Complex>& coords() const noexcept { return coords_; }
  std::size_t size() const noexcept { return coords_.size(); }
  Complex operator[](std::size_t j) const noexcept { return coords_[j]; }

  /// Rounding slack allowed on |z_j| = 1 boundary points.
  static constexpr double kBoundarySlack = 1e-12;

 private:
  std::vector<Complex> coords_;
};

/// Point of the torus, angles reduced to [0, 2pi).
class TorusPoint {
 public:
  TorusPoint() = default;
  explicit TorusPoint(std::vector<double> angles) : angles_(std::move(angles)) {
    for (auto& a : angles_) a = reduce_angle(a);
  }

  static double reduce_angle(double a) {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    double r = std::fmod(a, two_pi);
    if (r < 0) r += two_pi;
    if (r >= two_pi) r = 0.0;
    return r;
  }

  const std::vector<double>& angles() const noexcept { return angles_; }
  std::size_t size() const noexcept { return angles_.size(); }
  double operator[](std::size_t j) const noexcept { return angles_[j]; }

  PolydiscPoint scaled(const std::vector<double>& radii) const { return PolydiscPoint::polar(radii, angles_); }

 private:
  std::vector<double> angles_;
};

/// m i.i.d. Haar-uniform angles.
inline TorusPoint sample_torus(std::size_t m, RandomStream& rng) {
  if (m == 0) throw ConfigError("sample_torus needs m >= 1");
  std::vector<double> a(m);
  for (auto& x : a) x = rng.angle();
  return TorusPoint(std::move(a));
}

/// Bohr's m-th Abschnitt: the terms supported in the first m coordinates.
inline FourierSeries abschnitt(const FourierSeries& f, std::uint32_t m) {
  if (m == 0) throw ConfigError("abschnitt needs m >= 1");
  FourierSeries out;
  for (const auto& [nu, c] : f.terms())
    if (nu.supported_in(m)) out.set(nu, c);
  return out;
}

inline SpectrumClass spectrum_class(const FourierSeries& f) {
  bool analytic = true, pm = true, big = true;
  for (const auto& [nu, c] : f.terms()) {
    bool nonneg = nu.nonnegative();
    analytic = analytic && nonneg;
    pm = pm && (nonneg || nu.nonpositive());
    big = big && nu.diagonal_sum() >= 0;
  }
  if (analytic) return SpectrumClass::Analytic;
  if (pm) return SpectrumClass::PMAnalytic;
  if (big) return SpectrumClass::Big;
  return SpectrumClass::General;
}

/// Polyharmonic evaluation sum a_nu rho^{|nu|} e^{i nu.theta}; coordinates
/// beyond the point are zero, so a term touching them vanishes.
inline Complex evaluate(const FourierSeries& f, const PolydiscPoint& z) {
  std::vector<double> rho(z.size()), arg(z.size());
  for (std::size_t j = 0; j < z.size(); ++j) {
    rho[j] = std::abs(z[j]);
    arg[j] = std::arg(z[j]);
  }
  Complex sum{};
  for (const auto& [nu, c] : f.terms()) {
    double mod = 1.0;
    double phase = 0.0;
    bool vanishes = false;
    for (const auto& e : nu.entries()) {
      if (e.coord > z.size()) {
        vanishes = true;
        break;
      }
      mod *= std::pow(rho[e.coord - 1], static_cast<double>(std::llabs(e.exponent)));
      phase += static_cast<double>(e.exponent) * arg[e.coord - 1];
    }
    if (!vanishes) sum += c * std::polar(mod, phase);
  }
  return sum;
}

/// Boundary evaluation: the trigonometric sum at e^{i theta}.
inline Complex evaluate(const FourierSeries& f, const TorusPoint& theta) {
  Complex sum{};
  for (const auto& [nu, c] : f.terms()) {
    double phase = 0.0;
    bool vanishes = false;
    for (const auto& e : nu.entries()) {
      if (e.coord > theta.size()) {
        vanishes = true;
        break;
      }
      phase += static_cast<double>(e.exponent) * theta[e.coord - 1];
    }
    if (!vanishes) sum += c * std::polar(1.0, phase);
  }
  return sum;
}

inline double wiener_norm(const FourierSeries& f) {
  double s = 0.0;
  for (const auto& [nu, c] : f.terms()) s += std::abs(c);
  return s;
}

inline double max_coefficient(const FourierSeries& f) {
  double s = 0.0;
  for (const auto& [nu, c] : f.terms()) s = std::max(s, std::abs(c));
  return s;
}

inline double l2_norm(const FourierSeries& f) {
  double s = 0.0;
  for (const auto& [nu, c] : f.terms()) s += std::norm(c);
  return std::sqrt(s);
}

/// Monte Carlo estimate together with its standard error.
struct Estimate {
  double value = 0.0;
  double std_error = 0.0;
};

/// Mean and standard error of the mean of a sample (n >= 2).
inline Estimate sample_mean(const std::vector<double>& xs) {
  if (xs.size() < 2) throw ConfigError("need at least 2 samples");
  double n = static_cast<double>(xs.size());
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= n;
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return {mean, std::sqrt(ss / (n - 1.0) / n)};
}

/// ||F||_p from the sample mean of |F|^p, with delta-method standard error.
inline Estimate lp_from_powers(const std::vector<double>& powers, double p) {
  Estimate m = sample_mean(powers);
  if (m.value <= 0.0) return {0.0, 0.0};
  double est = std::pow(m.value, 1.0 / p);
  return {est, est / (p * m.value) * m.std_error};
}

/// Monte Carlo L^p(T^inf) norm; sample i draws its angles from streams.stream(i).
inline Estimate lp_norm_mc(const FourierSeries& f, double p, std::size_t samples, const StreamFamily& streams) {
  if (!(p > 0.0)) throw ConfigError("lp_norm_mc needs p > 0");
  if (samples < 2) throw ConfigError("lp_norm_mc needs at least 2 samples");
  std::size_t m = std::max<std::size_t>(1, f.dim());
  std::vector<double> powers(samples);
  for (std::size_t i = 0; i < samples; ++i) {
    RandomStream rng = streams.stream(i);
    powers[i] = std::pow(std::abs(evaluate(f, sample_torus(m, rng))), p);
  }
  return lp_from_powers(powers, p);
}

/// One-variable trigonometric series sum_k c_k e^{ikt}.
class OneVarSeries {
 public:
  using Terms = std::map<std::int64_t, Complex>;

  void add(std::int64_t k, Complex c) {
    if (c == Complex{}) return;
    auto [it, inserted] = terms_.try_emplace(k, c);
    if (!inserted) {
      it->second += c;
      if (it->second == Complex{}) terms_.erase(it);
    }
  }
  Complex coeff(std::int64_t k) const {
    auto it = terms_.find(k);
    return it == terms_.end() ? Complex{} : it->second;
  }
  const Terms& terms() const noexcept { return terms_; }

  Complex operator()(double t) const {
    Complex s{};
    for (const auto& [k, c] : terms_) s += c * std::polar(1.0, static_cast<double>(k) * t);
    return s;
  }

  std::int64_t min_frequency() const { return terms_.empty() ? 0 : terms_.begin()->first; }

 private:
  Terms terms_;
};

/// t -> F(e^{i(theta + t)}) as a series in t: frequency k collects the terms with s(nu) = k.
inline OneVarSeries diagonal_restriction(const FourierSeries& f, const TorusPoint& theta) {
  if (f.dim() > theta.size()) throw ConfigError("diagonal_restriction: theta shorter than dim(F)");
  OneVarSeries out;
  for (const auto& [nu, c] : f.terms()) {
    double phase = 0.0;
    for (const auto& e : nu.entries()) phase += static_cast<double>(e.exponent) * theta[e.coord - 1];
    out.add(nu.diagonal_sum(), c * std::polar(1.0, phase));
  }
  return out;
}

// Canonical text form: one term per line, "j1:e1,j2:e2 -> re,im", sorted by index.

inline void write_series(std::ostream& os, const FourierSeries& f) {
  for (const auto& [nu, c] : f.terms()) os << nu.to_string() << " -> " << format_complex(c) << '\n';
}

inline std::string to_text(const FourierSeries& f) {
  std::ostringstream os;
  write_series(os, f);
  return os.str();
}

inline FourierSeries read_series(std::istream& is) {
  FourierSeries f;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    std::string_view v = trim(line);
    if (v.empty() || v.front() == '#') continue;
    std::size_t arrow = v.find("->");
    if (arrow == std::string_view::npos)
      throw ConfigError("series line " + std::to_string(lineno) + ": missing '->'");
    MultiIndex nu = MultiIndex::parse(v.substr(0, arrow));
    Complex c = parse_complex(v.substr(arrow + 2));
    if (f.terms().contains(nu)) throw ConfigError("series line " + std::to_string(lineno) + ": duplicate index");
    f.set(nu, c);
  }
  return f;
}

inline FourierSeries from_text(const std::string& text) {
  std::istringstream is(text);
  return read_series(is);
}

/// Parameters for drawing random test polynomials.
struct RandomPolynomialSpec {
  SpectrumClass spectrum = SpectrumClass::Analytic;
  std::uint32_t dim = 3;
  std::int64_t max_order = 3;  ///< bound on |nu|_1 of each non-constant term
  std::size_t terms = 6;       ///< non-constant terms drawn (duplicates merge)
  double constant_min = 0.0;   ///< |constant term| drawn from [constant_min, 1]; 0 -> uniform box
};

/// Coefficients uniform in [-1,1]^2; the constant term is controlled separately.
inline FourierSeries random_polynomial(const RandomPolynomialSpec& spec, RandomStream& rng) {
  if (spec.dim == 0 || spec.max_order < 1) throw ConfigError("random polynomial needs dim >= 1, max_order >= 1");
  FourierSeries f;
  auto draw_coeff = [&] { return Complex(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)); };
  for (std::size_t t = 0; t < spec.terms; ++t) {
    std::int64_t order = 1 + static_cast<std::int64_t>(rng.uniform() * static_cast<double>(spec.max_order));
    order = std::min(order, spec.max_order);
    std::vector<MultiIndex::Entry> entries;
    for (std::int64_t k = 0; k < order; ++k) {
      auto j = static_cast<std::uint32_t>(1 + std::min<double>(spec.dim - 1, rng.uniform() * spec.dim));
      entries.push_back({j, 1});
    }
    MultiIndex nu(std::move(entries));
    switch (spec.spectrum) {
      case SpectrumClass::Analytic: break;
      case SpectrumClass::PMAnalytic:
        if (rng.uniform() < 0.5) nu = -nu;
        break;
      case SpectrumClass::Big: {
        // flip one coordinate of a multi-coordinate term while keeping s(nu) >= 0
        if (nu.size() >= 2 && rng.uniform() < 0.5) {
          auto e = nu.entries();
          e.front().exponent = -e.front().exponent;
          MultiIndex cand(e);
          if (cand.diagonal_sum() >= 0) nu = cand;
        }
        break;
      }
      case SpectrumClass::General:
        if (rng.uniform() < 0.5) {
          auto e = nu.entries();
          e.front().exponent = -e.front().exponent;
          nu = MultiIndex(e);
        }
        break;
    }
    f.add(nu, draw_coeff());
  }
  if (spec.constant_min > 0.0) {
    double mod = rng.uniform(spec.constant_min, 1.0);
    f.set(MultiIndex(), std::polar(mod, rng.angle()));
  } else {
    f.add(MultiIndex(), draw_coeff());
  }
  return f;
}

}  // namespace polydisc
