#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <vector>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include "polydisc/errors.hpp"
#include "polydisc/multi_index.hpp"
#include "polydisc/series.hpp"

namespace polydisc {

/// Smooth even cutoff: 1 on |t| <= plateau, 0 on |t| >= support, and in
/// between the blend S(y) = 1/(1 + exp(1/y - 1/(1-y))) of y = (support - |t|)/(support - plateau).
struct BumpProfile {
  double plateau = 0.25;
  double support = 0.5;

  double width() const noexcept { return support - plateau; }

  double operator()(double t) const {
    double a = std::abs(t);
    if (a <= plateau) return 1.0;
    if (a >= support) return 0.0;
    return blend((support - a) / width());
  }

  /// d psi / dt
  double derivative(double t) const {
    double a = std::abs(t);
    if (a <= plateau || a >= support) return 0.0;
    double d = blend_derivative((support - a) / width()) / width();
    return t > 0 ? -d : d;
  }

  static double blend(double y) {
    if (y <= 0.0) return 0.0;
    if (y >= 1.0) return 1.0;
    double e = 1.0 / y - 1.0 / (1.0 - y);
    return 1.0 / (1.0 + std::exp(e));
  }

  /// S'(y) = S(1-S)(1/y^2 + 1/(1-y)^2), with S(1-S) = 1/(4 cosh^2(e/2)).
  static double blend_derivative(double y) {
    if (y <= 0.0 || y >= 1.0) return 0.0;
    double e = 1.0 / y - 1.0 / (1.0 - y);
    if (std::abs(e) > 1400.0) return 0.0;
    double c = std::cosh(0.5 * e);
    return (1.0 / (y * y) + 1.0 / ((1.0 - y) * (1.0 - y))) / (4.0 * c * c);
  }
};

inline double psi(const BumpProfile& profile, double t) { return profile(t); }

namespace detail {

inline boost::math::quadrature::tanh_sinh<double>& tanh_sinh_rule() {
  thread_local boost::math::quadrature::tanh_sinh<double> rule(12);
  return rule;
}

/// integral of f over [a, b] split at the interior breakpoints
template <class F>
double integrate_split(const F& f, double a, double b, std::vector<double> breaks, double tol = 1e-11) {
  breaks.push_back(a);
  breaks.push_back(b);
  std::sort(breaks.begin(), breaks.end());
  double sum = 0.0;
  double lo = a;
  for (double x : breaks) {
    if (x <= lo || x > b) continue;
    sum += tanh_sinh_rule().integrate(f, lo, x, tol);
    lo = x;
  }
  return sum;
}

}  // namespace detail

/// integral of psi over [-support, support]
inline double profile_mass(const BumpProfile& p = {}) {
  double transition = detail::integrate_split([&](double t) { return p(t); }, p.plateau, p.support, {});
  return 2.0 * (p.plateau + transition);
}

/// delta_n = ((n+2) ln^2(n+2))^{-1}
inline double bump_width(std::uint32_t n) {
  if (n == 0) throw DomainError("bump factors are indexed from 1");
  double x = static_cast<double>(n) + 2.0;
  double l = std::log(x);
  return 1.0 / (x * l * l);
}

inline std::uint64_t default_fourier_cutoff(std::uint32_t n) {
  double k = 2048.0 * std::ceil(1.0 / bump_width(n));
  return static_cast<std::uint64_t>(std::min(k, 1048576.0));
}

struct CounterexampleParams {
  std::uint32_t N = 200;
  std::uint64_t K = 0;  ///< Fourier cutoff for the cosine-series route; 0 picks default_fourier_cutoff(n)
  BumpProfile profile{};
};

/// Cosine coefficients of t -> psi(t/delta_n) on [-pi, pi).
struct BumpFourier {
  std::vector<double> c;  ///< c_0..c_K
  double tail = 0.0;      ///< largest |c_k| over the last tenth of the computed range
};

/// c_0 = (1/P) sum psi(t_i/delta), c_k = (2/P) sum psi(t_i/delta) cos(k t_i) on the
/// P = 4096 max(1, ceil(1/delta)) point periodic trapezoid rule.
inline BumpFourier u_n_fourier(std::uint32_t n, std::uint64_t K, const BumpProfile& profile = {}) {
  if (K == 0) throw ConfigError("u_n_fourier needs K >= 1");
  double delta = bump_width(n);
  auto P = static_cast<std::uint64_t>(4096.0 * std::max(1.0, std::ceil(1.0 / delta)));
  double h = 2.0 * std::numbers::pi / static_cast<double>(P);
  std::vector<double> weight;
  std::vector<Complex> rot;
  auto half = static_cast<std::int64_t>(std::ceil(profile.support * delta / h)) + 1;
  for (std::int64_t i = -half; i <= half; ++i) {
    double t = static_cast<double>(i) * h;
    double w = profile(t / delta);
    if (w == 0.0) continue;
    weight.push_back(w);
    rot.push_back(std::polar(1.0, t));
  }
  BumpFourier out;
  out.c.assign(K + 1, 0.0);
  std::vector<Complex> power(weight.size(), Complex(1.0, 0.0));
  for (std::uint64_t k = 0; k <= K; ++k) {
    double s = 0.0;
    for (std::size_t i = 0; i < weight.size(); ++i) {
      s += weight[i] * power[i].real();
      power[i] *= rot[i];
    }
    if (k % 64 == 63)
      for (auto& p : power) p /= std::abs(p);
    out.c[k] = (k == 0 ? 1.0 : 2.0) * s / static_cast<double>(P);
  }
  for (std::uint64_t k = K - K / 10; k <= K; ++k) out.tail = std::max(out.tail, std::abs(out.c[k]));
  return out;
}

namespace detail {

/// Immutable-after-insert cache of bump coefficient tables keyed by (n, K).
class BumpFourierCache {
 public:
  static BumpFourierCache& instance() {
    static BumpFourierCache cache;
    return cache;
  }

  std::shared_ptr<const BumpFourier> get(std::uint32_t n, std::uint64_t K) {
    {
      std::lock_guard lock(mu_);
      auto it = tables_.find({n, K});
      if (it != tables_.end()) return it->second;
    }
    auto table = std::make_shared<const BumpFourier>(u_n_fourier(n, K));
    std::lock_guard lock(mu_);
    return tables_.try_emplace({n, K}, std::move(table)).first->second;
  }

 private:
  std::mutex mu_;
  std::map<std::pair<std::uint32_t, std::uint64_t>, std::shared_ptr<const BumpFourier>> tables_;
};

inline std::pair<double, double> cosine_route(std::uint32_t n, double rho, double t, std::uint64_t K) {
  if (!(rho >= 0.0 && rho < 1.0)) throw DomainError("the cosine series route needs 0 <= rho < 1");
  if (K == 0) K = default_fourier_cutoff(n);
  auto table = BumpFourierCache::instance().get(n, K);
  const auto& c = table->c;
  double u = c[0];
  double v = 0.0;
  Complex step = std::polar(rho, t);
  Complex w = step;
  for (std::size_t k = 1; k < c.size(); ++k) {
    u += c[k] * w.real();
    v += c[k] * w.imag();
    w *= step;
    if (std::abs(w) < 1e-300) break;
  }
  return {u, v};
}

}  // namespace detail

/// c_0 + sum_{k <= K} c_k rho^k cos(kt); K = 0 picks the default cutoff.
inline double u_n_value(std::uint32_t n, double rho, double t, std::uint64_t K = 0) {
  return detail::cosine_route(n, rho, t, K).first;
}

/// sum_{k <= K} c_k rho^k sin(kt)
inline double u_n_conjugate(std::uint32_t n, double rho, double t, std::uint64_t K = 0) {
  return detail::cosine_route(n, rho, t, K).second;
}

/// Harmonic extension of psi(t/delta) and its conjugate, evaluated as Poisson
/// integrals after one integration by parts:
///   u  = (1/2pi) int psi'(x) [A(t - delta x) - A(t + delta x)] dx over x in [1/4, 1/2]
///   ~u = (1/2pi) int psi'(x) [L(t - delta x) - L(t + delta x)] dx
/// with A' = Poisson kernel, A(0) = 0, and L(x) = log(1 - 2 rho cos x + rho^2).
/// Far from the bump (distance above kFarField * delta) the kernels are
/// replaced by c_0 P_rho(t) and c_0 Q_rho(t), relative error O((delta/dist)^2).
class BumpHarmonic {
 public:
  static constexpr double kFarField = 5000.0;

  explicit BumpHarmonic(double delta, const BumpProfile& profile = {}) : delta_(delta), profile_(profile) {
    if (!(delta > 0.0 && profile.support * delta < std::numbers::pi)) throw DomainError("bump width out of range");
    c0_ = delta * mass(profile) / (2.0 * std::numbers::pi);
  }
  static BumpHarmonic factor(std::uint32_t n, const BumpProfile& profile = {}) {
    return BumpHarmonic(bump_width(n), profile);
  }

  double delta() const noexcept { return delta_; }
  double c0() const noexcept { return c0_; }

  /// u(rho e^{it}), rho in [0, 1]; rho = 1 gives psi(t/delta).
  double value(double rho, double t) const {
    check(rho);
    if (rho == 0.0) return c0_;
    double s = wrap(t);
    if (rho == 1.0) return profile_(s / delta_);
    if (far(rho, s)) return c0_ * poisson(rho, s);
    auto A = [rho](double x) {
      double k = std::round(x / (2.0 * std::numbers::pi));
      double y = x - 2.0 * std::numbers::pi * k;
      return 2.0 * std::numbers::pi * k + 2.0 * std::atan2((1.0 + rho) * std::sin(0.5 * y), (1.0 - rho) * std::cos(0.5 * y));
    };
    return transition_integral([&](double x) { return A(s - delta_ * x) - A(s + delta_ * x); }, s);
  }

  /// ~u(rho e^{it}) normalized by ~u(0) = 0; rho = 1 is the boundary conjugate.
  double conjugate(double rho, double t) const {
    check(rho);
    if (rho == 0.0) return 0.0;
    double s = wrap(t);
    if (far(rho, s)) return c0_ * conjugate_poisson(rho, s);
    auto L = [rho](double x) {
      double h = std::sin(0.5 * x);
      return std::log((1.0 - rho) * (1.0 - rho) + 4.0 * rho * h * h);
    };
    return transition_integral([&](double x) { return L(s - delta_ * x) - L(s + delta_ * x); }, s);
  }

  static double mass(const BumpProfile& p) {
    static const double standard = profile_mass(BumpProfile{});
    return p.plateau == 0.25 && p.support == 0.5 ? standard : profile_mass(p);
  }

  /// (1 - rho^2) / (1 - 2 rho cos t + rho^2)
  static double poisson(double rho, double t) {
    double h = std::sin(0.5 * t);
    return (1.0 - rho) * (1.0 + rho) / ((1.0 - rho) * (1.0 - rho) + 4.0 * rho * h * h);
  }
  /// 2 rho sin t / (1 - 2 rho cos t + rho^2)
  static double conjugate_poisson(double rho, double t) {
    double h = std::sin(0.5 * t);
    return 2.0 * rho * std::sin(t) / ((1.0 - rho) * (1.0 - rho) + 4.0 * rho * h * h);
  }

 private:
  static void check(double rho) {
    if (!(rho >= 0.0 && rho <= 1.0)) throw DomainError("bump harmonic needs 0 <= rho <= 1");
  }
  static double wrap(double t) {
    double s = std::remainder(t, 2.0 * std::numbers::pi);
    return s;
  }
  bool far(double rho, double s) const { return std::max(std::abs(s), 1.0 - rho) >= kFarField * delta_; }

  template <class G>
  double transition_integral(const G& g, double s) const {
    double x0 = std::abs(s) / delta_;
    std::vector<double> breaks;
    if (x0 > profile_.plateau && x0 < profile_.support) breaks.push_back(x0);
    double I = detail::integrate_split([&](double x) { return profile_.derivative(x) * g(x); }, profile_.plateau,
                                       profile_.support, breaks);
    return I / (2.0 * std::numbers::pi);
  }

  double delta_;
  BumpProfile profile_;
  double c0_;
};

/// Oracle n, theta, r -> u_n(r e^{i theta}) for adaptive_block_path.
inline auto bump_oracle(const BumpProfile& profile = {}) {
  return [profile](std::uint32_t n, double theta, double r) { return BumpHarmonic::factor(n, profile).value(r, theta); };
}

/// Sums of u_n and ~u_n over the factors of the counterexample.
struct CounterexampleLog {
  double sum_u = 0.0;
  double sum_conj = 0.0;
};

/// prod_{n <= N} exp(-u_n(z_n) - i ~u_n(z_n)); coordinates past z.size() are 0.
inline Complex counterexample_f(const PolydiscPoint& z, const CounterexampleParams& params = {},
                                CounterexampleLog* log = nullptr) {
  if (params.N == 0) throw ConfigError("counterexample needs N >= 1");
  Complex f(1.0, 0.0);
  CounterexampleLog acc;
  for (std::uint32_t n = 1; n <= params.N; ++n) {
    Complex zn = n <= z.size() ? z[n - 1] : Complex{};
    double rho = std::min(1.0, std::abs(zn));
    double t = std::arg(zn);
    BumpHarmonic h = BumpHarmonic::factor(n, params.profile);
    double u = h.value(rho, t);
    double v = h.conjugate(rho, t);
    acc.sum_u += u;
    acc.sum_conj += v;
    f *= std::polar(std::exp(-u), -v);
  }
  if (log) *log = acc;
  return f;
}

/// exp(-sum_n u_n) at the boundary point theta: u_n = psi(theta_n / delta_n), no quadrature.
inline double counterexample_boundary_modulus(const TorusPoint& theta, std::uint32_t N, const BumpProfile& profile = {}) {
  double s = 0.0;
  for (std::uint32_t n = 1; n <= N && n <= theta.size(); ++n)
    s += profile(std::remainder(theta[n - 1], 2.0 * std::numbers::pi) / bump_width(n));
  return std::exp(-s);
}

/// C_1 in |f(z)| >= exp(-C_1 sum delta_n / (1 - |z_n|)): Harnack gives
/// u_n <= (1+rho)/(1-rho) c_0(n) <= 2 c_0(n)/(1-rho) and c_0 = delta_n mass / (2 pi).
inline double counterexample_C1(const BumpProfile& profile = {}) { return BumpHarmonic::mass(profile) / std::numbers::pi; }

/// g(z) = sum_n z_n / n
inline Complex example_g(const PolydiscPoint& z) {
  Complex s{};
  for (std::size_t n = 0; n < z.size(); ++n) s += z[n] / static_cast<double>(n + 1);
  return s;
}

/// u(z) = prod_n (1 + i (z_n + conj z_n) / (2n))
inline Complex example_u(const PolydiscPoint& z) {
  Complex p(1.0, 0.0);
  for (std::size_t n = 0; n < z.size(); ++n) p *= Complex(1.0, z[n].real() / static_cast<double>(n + 1));
  return p;
}

/// prod_{j=1..J} (1 + cos(q^j theta)); density of a probability measure on the circle.
class RieszProductMeasure {
 public:
  explicit RieszProductMeasure(std::uint32_t q = 3, std::uint32_t J = 12) : q_(q), J_(J) {
    if (q < 3) throw ConfigError("Riesz product base must be >= 3");
    double top = std::pow(static_cast<double>(q), static_cast<double>(J) + 1.0);
    if (top > 0x1.0p52) throw ConfigError("Riesz product q^(J+1) exceeds exact double range");
  }

  std::uint32_t q() const noexcept { return q_; }
  std::uint32_t depth() const noexcept { return J_; }

  /// q + q^2 + ... + q^J, the largest frequency in the support
  std::int64_t max_frequency() const {
    std::int64_t s = 0;
    std::int64_t p = 1;
    for (std::uint32_t j = 1; j <= J_; ++j) {
      p *= q_;
      s += p;
    }
    return s;
  }

  double density(double theta) const {
    double p = 1.0;
    double f = 1.0;
    for (std::uint32_t j = 1; j <= J_; ++j) {
      f *= q_;
      p *= 1.0 + std::cos(std::fmod(f * theta, 2.0 * std::numbers::pi));
    }
    return p;
  }

 private:
  std::uint32_t q_;
  std::uint32_t J_;
};

/// 2^{-#nonzero digits} when k = sum_{j=1..J} e_j q^j with e_j in {-1,0,1}, else 0.
inline double riesz_coeff(const RieszProductMeasure& mu, std::int64_t k) {
  if (k == 0) return 1.0;
  std::int64_t q = mu.q();
  std::int64_t x = k < 0 ? -k : k;
  if (x > mu.max_frequency()) return 0.0;
  int nonzero = 0;
  for (std::uint32_t pos = 0; x != 0; ++pos) {
    std::int64_t d = x % q;
    if (d > q / 2) d -= q;
    if (d != 0) {
      if (pos == 0 || pos > mu.depth() || (d != 1 && d != -1)) return 0.0;
      ++nonzero;
    }
    x = (x - d) / q;
  }
  return std::ldexp(1.0, -nonzero);
}

/// The measure as a series in the first coordinate.
inline FourierSeries riesz_series(const RieszProductMeasure& mu) {
  FourierSeries f;
  std::vector<std::int64_t> freqs{0};
  std::int64_t p = 1;
  for (std::uint32_t j = 1; j <= mu.depth(); ++j) {
    p *= mu.q();
    std::vector<std::int64_t> next;
    for (auto k : freqs) {
      next.push_back(k);
      next.push_back(k + p);
      next.push_back(k - p);
    }
    freqs = std::move(next);
  }
  for (auto k : freqs) {
    if (k == 0) {
      f.set(MultiIndex(), 1.0);
    } else {
      f.set(MultiIndex::unit(1, k), riesz_coeff(mu, k));
    }
  }
  return f;
}

namespace detail {

/// w^n for w = r e^{i theta} with the phase reduced before exponentiation.
inline Complex power_polar(double r, double theta, double n) {
  if (n == 0.0) return {1.0, 0.0};
  if (r == 0.0) return {};
  return std::polar(std::pow(r, n), std::fmod(n * theta, 2.0 * std::numbers::pi));
}

}  // namespace detail

/// Poisson extension sum_k riesz_coeff(k) r^{|k|} e^{ik theta} in closed form:
/// the positive frequencies whose top digit sits at position j contribute
/// (1/2) w^{D_j} prod_{i<j} (w^{q^i} + (w^{2q^i} + 1)/2) with
/// D_j = q^j - sum_{i<j} q^i, so the value is 1 + 2 Re of the sum over j.
inline double measure_radial_value(const RieszProductMeasure& mu, double r, double theta) {
  if (!(r >= 0.0 && r < 1.0)) throw DomainError("measure_radial_value needs 0 <= r < 1");
  Complex sum{};
  Complex prod(1.0, 0.0);
  double qj = 1.0;
  double lower = 0.0;  // sum_{i<j} q^i
  for (std::uint32_t j = 1; j <= mu.depth(); ++j) {
    qj *= mu.q();
    sum += 0.5 * detail::power_polar(r, theta, qj - lower) * prod;
    Complex wq = detail::power_polar(r, theta, qj);
    Complex w2q = detail::power_polar(r, theta, 2.0 * qj);
    prod *= wq + 0.5 * (w2q + 1.0);
    lower += qj;
  }
  return 1.0 + 2.0 * sum.real();
}

}  // namespace polydisc
