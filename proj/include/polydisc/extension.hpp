#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "polydisc/errors.hpp"
#include "polydisc/scheme.hpp"
#include "polydisc/series.hpp"

namespace polydisc {

/// Multipliers below this modulus are dropped from twisted series.
inline constexpr double kMultiplierFloor = 1e-300;

/// Coefficientwise twist F -> F_xi: a_nu r^{w_m(nu)} e^{i t sigma_m(nu)} with xi = r e^{it}.
///
/// For the diagonal scheme this is F(xi z_1, xi^2 z_2, ...) restricted to the torus.
inline FourierSeries twist(const FourierSeries& f, Complex xi, const RadialScheme& scheme = {}) {
  double r = std::abs(xi);
  if (!(r <= 1.0 + PolydiscPoint::kBoundarySlack)) throw DomainError("twist: |xi| = " + format_double(r) + " > 1");
  r = std::min(r, 1.0);
  double t = std::arg(xi);
  double log_r = std::log(r);
  FourierSeries out;
  for (const auto& [nu, c] : f.terms()) {
    std::int64_t w = nu.weighted_degree(scheme);
    std::int64_t sigma = nu.diagonal_signature(scheme);
    double mod = 1.0;
    if (w > 0) {
      if (r == 0.0) continue;
      mod = std::exp(static_cast<double>(w) * log_r);
      if (mod < kMultiplierFloor) continue;
    }
    out.set(nu, c * std::polar(mod, t * static_cast<double>(sigma)));
  }
  return out;
}

/// Fast repeated evaluation of r -> f_r(e^{i theta}) at one boundary point.
class RadialSection {
 public:
  RadialSection(const FourierSeries& f, const TorusPoint& theta, const RadialScheme& scheme = {}) {
    terms_.reserve(f.size());
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
      if (vanishes) continue;
      terms_.push_back({c * std::polar(1.0, phase), static_cast<double>(nu.weighted_degree(scheme))});
    }
  }

  Complex operator()(double r) const {
    if (!(r >= 0.0 && r <= 1.0)) throw DomainError("radial section needs r in [0,1]");
    double log_r = std::log(r);
    Complex s{};
    for (const auto& t : terms_) {
      if (t.weight == 0.0) {
        s += t.boundary;
      } else if (r > 0.0) {
        double mod = std::exp(t.weight * log_r);
        if (mod >= kMultiplierFloor) s += t.boundary * mod;
      }
    }
    return s;
  }

  /// Boundary value (r = 1).
  Complex boundary() const {
    Complex s{};
    for (const auto& t : terms_) s += t.boundary;
    return s;
  }

  /// Largest weighted degree among the surviving terms.
  double max_weight() const {
    double w = 0.0;
    for (const auto& t : terms_) w = std::max(w, t.weight);
    return w;
  }

 private:
  struct Term {
    Complex boundary;
    double weight;
  };
  std::vector<Term> terms_;
};

/// f_r(e^{i theta}) = evaluate(twist(F, r), theta).
inline Complex radial_section(const FourierSeries& f, double r, const TorusPoint& theta,
                              const RadialScheme& scheme = {}) {
  if (f.dim() > theta.size()) throw ConfigError("radial_section: theta shorter than dim(F)");
  return RadialSection(f, theta, scheme)(r);
}

/// prod_{j>=1} (1+|xi|^j)/(1-|xi|^j), truncated once the log-tail bound
/// sum_{j>J} 2|xi|^j/(1-|xi|) drops below tol.
inline double wiener_bound(Complex xi, double tol = 1e-12) {
  double a = std::abs(xi);
  if (!(a < 1.0)) throw DomainError("wiener_bound diverges for |xi| >= 1");
  if (!(tol > 0.0)) throw ConfigError("wiener_bound needs tol > 0");
  if (a == 0.0) return 1.0;
  double log_prod = 0.0;
  double power = a;  // a^j
  for (std::size_t j = 1;; ++j) {
    log_prod += std::log1p(power) - std::log1p(-power);
    double next = power * a;
    // sum_{i>j} 2 a^i / (1-a) = 2 a^{j+1} / (1-a)^2
    if (2.0 * next / ((1.0 - a) * (1.0 - a)) < tol) break;
    power = next;
    if (j > 100'000'000) throw ResourceError("wiener_bound: truncation did not converge");
  }
  return std::exp(log_prod);
}

namespace detail {

/// (1 - rho^2) / (1 - 2 rho cos(theta) + rho^2) with rho = r^m, written in
/// cancellation-free form (1-rho)(1+rho) / ((1-rho)^2 + 4 rho sin^2(theta/2)).
inline double poisson_factor(double log_r, std::uint64_t m, double theta) {
  if (log_r == -INFINITY) return 1.0;
  double x = static_cast<double>(m) * log_r;
  double one_minus = -std::expm1(x);
  double rho = std::exp(x);
  double s = std::sin(0.5 * theta);
  return one_minus * (1.0 + rho) / (one_minus * one_minus + 4.0 * rho * s * s);
}

}  // namespace detail

/// prod_{n <= len(theta)} of the one-variable Poisson kernel at radius r^{m_n}.
inline double product_poisson_kernel(double r, const TorusPoint& theta, const RadialScheme& scheme = {}) {
  if (!(r >= 0.0 && r < 1.0)) throw DomainError("product_poisson_kernel needs 0 <= r < 1");
  double log_r = std::log(r);
  double p = 1.0;
  for (std::size_t n = 0; n < theta.size(); ++n)
    p *= detail::poisson_factor(log_r, scheme(static_cast<std::uint32_t>(n + 1)), theta[n]);
  return p;
}

/// r_k = 1 - 2^{-k}, k = 1..count.
inline std::vector<double> default_radius_grid(int count = 40) {
  std::vector<double> g;
  for (int k = 1; k <= count; ++k) g.push_back(1.0 - std::ldexp(1.0, -k));
  return g;
}

/// Grid proxy for sup_r |f_r(e^{i theta})|: the maximum over the supplied radii.
inline double radial_maximal(const FourierSeries& f, const TorusPoint& theta, const std::vector<double>& grid,
                             const RadialScheme& scheme = {}) {
  if (grid.empty()) throw ConfigError("radial_maximal needs a nonempty radius grid");
  RadialSection section(f, theta, scheme);
  double best = 0.0;
  for (double r : grid) {
    if (!(r >= 0.0 && r < 1.0)) throw ConfigError("radius grid must lie in [0,1)");
    best = std::max(best, std::abs(section(r)));
  }
  return best;
}

}  // namespace polydisc
