#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <boost/math/special_functions/gamma.hpp>

#include "polydisc/errors.hpp"
#include "polydisc/extension.hpp"
#include "polydisc/format.hpp"
#include "polydisc/rng.hpp"
#include "polydisc/scheme.hpp"
#include "polydisc/series.hpp"

namespace polydisc {

/// A(r) = sum_j r^{m_j} and A'(r) = sum_j m_j r^{m_j - 1}, as partial sums
/// plus certified upper bounds on the omitted tails.
struct Admissibility {
  double A = 0.0;
  double dA = 0.0;
  double A_tail = 0.0;   ///< bound on sum_{j > terms} r^{m_j}
  double dA_tail = 0.0;  ///< bound on sum_{j > terms} m_j r^{m_j - 1}
  std::uint64_t terms = 0;

  double A_upper() const noexcept { return A + A_tail; }
  double dA_upper() const noexcept { return dA + dA_tail; }
};

namespace detail {

struct TailBounds {
  double A = INFINITY;
  double dA = INFINITY;
};

/// Tails past index J. Diagonal tails are geometric; Power tails are bounded
/// by integrals of the decreasing envelopes r^{x^a} and x^a r^{x^a - 1},
/// which is valid once J^a >= 1/(-ln r).
inline TailBounds scheme_tail(const RadialScheme& scheme, double r, std::uint64_t J) {
  TailBounds t;
  if (scheme.kind() != RadialScheme::Kind::Power) {
    if (J < scheme.table().size()) return t;
    double Jd = static_cast<double>(J);
    double rJ = std::pow(r, Jd);
    t.A = rJ * r / (1.0 - r);
    t.dA = rJ * (Jd + 1.0 - Jd * r) / ((1.0 - r) * (1.0 - r));
    return t;
  }
  double a = scheme.alpha();
  double c = -std::log(r);
  double x = c * std::pow(static_cast<double>(J), a);
  if (x < 1.0) return t;
  t.A = boost::math::tgamma(1.0 / a, x) / (a * std::pow(c, 1.0 / a));
  t.dA = boost::math::tgamma(1.0 / a + 1.0, x) / (a * std::pow(c, 1.0 / a + 1.0) * r);
  return t;
}

}  // namespace detail

inline Admissibility admissibility_A(const RadialScheme& scheme, double r, double tol = 1e-12) {
  if (!(r >= 0.0 && r < 1.0)) throw DomainError("admissibility_A needs 0 <= r < 1");
  if (!(tol > 0.0)) throw ConfigError("admissibility_A needs tol > 0");
  Admissibility out;
  if (r == 0.0) {
    // only exponents m_j = 1 contribute to A'(0)
    std::uint64_t ones = 0;
    if (scheme.kind() == RadialScheme::Kind::Explicit) {
      for (auto m : scheme.table()) ones += (m == 1);
      if (scheme.table().empty()) ones = 1;
    } else {
      ones = 1;
    }
    out.dA = static_cast<double>(ones);
    out.terms = scheme.kind() == RadialScheme::Kind::Explicit ? scheme.table().size() : 1;
    return out;
  }
  double log_r = std::log(r);
  constexpr std::uint64_t kMaxTerms = 2'000'000'000ULL;
  const std::uint64_t check_every = scheme.kind() == RadialScheme::Kind::Power ? 256 : 1;
  for (std::uint64_t j = 1;; ++j) {
    double m = static_cast<double>(scheme(static_cast<std::uint32_t>(std::min<std::uint64_t>(j, UINT32_MAX))));
    double term = std::exp(m * log_r);
    out.A += term;
    out.dA += m * std::exp((m - 1.0) * log_r);
    if (j % check_every == 0 || j >= scheme.table().size()) {
      if (j % check_every == 0 || scheme.kind() != RadialScheme::Kind::Power) {
        detail::TailBounds tail = detail::scheme_tail(scheme, r, j);
        if (tail.A < tol && tail.dA < tol) {
          out.A_tail = tail.A;
          out.dA_tail = tail.dA;
          out.terms = j;
          return out;
        }
      }
    }
    if (j >= kMaxTerms || j >= UINT32_MAX) throw ResourceError("admissibility_A: tail did not fall below tol");
  }
}

/// r_k = 1 - k^{-1/3}, k = 1..K.
inline std::vector<double> mz_default_sequence(std::uint64_t K) {
  if (K == 0) throw ConfigError("mz_default_sequence needs K >= 1");
  std::vector<double> r(K);
  for (std::uint64_t k = 1; k <= K; ++k) r[k - 1] = 1.0 - 1.0 / std::cbrt(static_cast<double>(k));
  return r;
}

/// Summand (r_{k+1} - r_k) / (1 - r_{k+1})^4 for the default sequence.
inline double mz_summand_bound(std::uint64_t k) {
  if (k == 0) throw ConfigError("mz_summand_bound needs k >= 1");
  double a = 1.0 / std::cbrt(static_cast<double>(k));
  double b = 1.0 / std::cbrt(static_cast<double>(k + 1));
  return (a - b) / (b * b * b * b);
}

/// Radii start + j*step for j = 1..count (fused multiply-add, one rounding).
struct MzSegment {
  double start = 0.0;
  double step = 0.0;
  std::uint64_t count = 0;
  bool complete_fill = true;  ///< false only for a final fill cut short at the target

  double at(std::uint64_t j) const { return std::fma(static_cast<double>(j), step, start); }
  double last() const { return at(count); }
};

/// Output of build_mz_sequence. Fills near 1 contain astronomically many
/// equally spaced radii, so the sequence is stored as arithmetic segments.
class MzSequence {
 public:
  MzSequence() = default;
  MzSequence(double first, std::vector<MzSegment> segments) : first_(first), segments_(std::move(segments)) {
    std::uint64_t total = 1;
    for (const auto& s : segments_) {
      offsets_.push_back(total);
      total += s.count;
    }
    size_ = total;
  }

  double first() const noexcept { return first_; }
  double last() const noexcept { return segments_.empty() ? first_ : segments_.back().last(); }
  const std::vector<MzSegment>& segments() const noexcept { return segments_; }
  std::uint64_t size() const noexcept { return size_; }

  /// Element i (0-based).
  double operator[](std::uint64_t i) const {
    if (i >= size_) throw RangeError("MzSequence index out of range");
    if (i == 0) return first_;
    auto it = std::upper_bound(offsets_.begin(), offsets_.end(), i);
    std::size_t seg = static_cast<std::size_t>(it - offsets_.begin()) - 1;
    return segments_[seg].at(i - offsets_[seg] + 1);
  }

  std::vector<double> materialize(std::uint64_t cap = 10'000'000) const {
    if (size_ > cap) throw ResourceError("MzSequence has " + std::to_string(size_) + " elements (cap " + std::to_string(cap) + ")");
    std::vector<double> out;
    out.reserve(size_);
    out.push_back(first_);
    for (const auto& s : segments_)
      for (std::uint64_t j = 1; j <= s.count; ++j) out.push_back(s.at(j));
    return out;
  }

 private:
  double first_ = 0.5;
  std::vector<MzSegment> segments_;
  std::vector<std::uint64_t> offsets_;
  std::uint64_t size_ = 1;
};

namespace detail {

/// Certified lower bound for (1-r)^2 / A'(r).
inline double mz_step_bound(const RadialScheme& scheme, double r) {
  Admissibility a = admissibility_A(scheme, r, 1e-9);
  double d = a.dA_upper() * (1.0 + 1e-12);
  return (1.0 - r) * (1.0 - r) / d;
}

/// Worst-case rounding excess of a computed consecutive difference over the exact step.
inline constexpr double kPairSlack = 0x1.0p-53;

}  // namespace detail

/// Halving-and-filling construction started at r_1 = 1/2. From r_n the
/// target r' = (1 + r_n)/2 is reached in one step when that step satisfies
/// the bound b = (1-r')^2/A'(r'); otherwise floor((r'-r_n)/b) steps of size b
/// are inserted. Stops at the first radius above target.
///
/// The step used is b shrunk by a relative 1e-9 and an absolute 2^-52 so the
/// inequality survives rounding of the stored radii.
inline MzSequence build_mz_sequence(const RadialScheme& scheme, double target, std::size_t max_fills = 4096) {
  if (!(target > 0.5 && target < 1.0)) throw DomainError("build_mz_sequence needs target in (1/2, 1)");
  std::vector<MzSegment> segs;
  double r = 0.5;
  while (r <= target) {
    if (segs.size() >= max_fills)
      throw ResourceError("build_mz_sequence: " + std::to_string(max_fills) + " fills without reaching " +
                          format_double(target) + " (last radius " + format_double(r) + ")");
    double next = 0.5 * (1.0 + r);
    double b = detail::mz_step_bound(scheme, next) * (1.0 - 1e-9) - 0x1.0p-52;
    if (b < 0x1.0p-50)
      throw ResourceError("build_mz_sequence: step bound " + format_double(b) + " at radius " + format_double(r) +
                          " is below double resolution");
    MzSegment s;
    s.start = r;
    if (next - r <= b) {
      s.step = next - r;
      s.count = 1;
    } else {
      s.step = b;
      double ell = std::floor((next - r) / b);
      if (ell > 9e18) throw ResourceError("build_mz_sequence: fill length overflows");
      s.count = static_cast<std::uint64_t>(ell);
    }
    if (s.last() > target) {
      // shortest prefix of the fill that passes the target
      auto j = static_cast<std::uint64_t>(std::floor((target - r) / s.step)) + 1;
      while (j > 1 && s.at(j - 1) > target) --j;
      while (s.at(j) <= target) ++j;
      if (j < s.count) {
        s.count = j;
        s.complete_fill = false;
      }
    }
    segs.push_back(s);
    r = s.last();
  }
  return MzSequence(0.5, std::move(segs));
}

/// Post hoc audit of a built sequence.
struct MzAudit {
  bool pairs_ok = true;        ///< r_{k+1} - r_k <= (1 - r_{k+1})^2 / A'(r_{k+1}) for every pair
  bool increasing = true;      ///< strictly increasing
  bool gap_decay_ok = true;    ///< 1 - r_end <= (3/4)(1 - r_start) for every complete fill
  double worst_ratio = 0.0;    ///< max over segments of (step + slack) / bound
  double worst_gap_ratio = 0.0;
};

/// Audits segment by segment: within a fill the computed differences are at
/// most step + 2^-53 and the bound decreases in r, so it suffices to compare
/// against the bound at the segment's last radius.
inline MzAudit audit_mz_sequence(const MzSequence& seq, const RadialScheme& scheme) {
  MzAudit a;
  double prev = seq.first();
  for (const auto& s : seq.segments()) {
    if (s.start != prev) a.increasing = false;
    double last = s.last();
    double bound = detail::mz_step_bound(scheme, last);
    double ratio = (s.step + detail::kPairSlack) / bound;
    a.worst_ratio = std::max(a.worst_ratio, ratio);
    if (ratio > 1.0) a.pairs_ok = false;
    if (!(s.step > 2.0 * detail::kPairSlack) || !(s.at(1) > s.start) || !(last > s.at(s.count > 1 ? s.count - 1 : 0)))
      a.increasing = false;
    if (s.complete_fill) {
      double g = (1.0 - last) / (1.0 - s.start);
      a.worst_gap_ratio = std::max(a.worst_gap_ratio, g);
      if (g > 0.75) a.gap_decay_ok = false;
    }
    prev = last;
  }
  return a;
}

/// Direct pairwise audit of an explicit radius list (for small sequences).
inline bool pairs_satisfy_step_bound(const std::vector<double>& radii, const RadialScheme& scheme) {
  for (std::size_t k = 0; k + 1 < radii.size(); ++k) {
    double d = radii[k + 1] - radii[k];
    if (!(d > 0.0)) return false;
    if (d > detail::mz_step_bound(scheme, radii[k + 1])) return false;
  }
  return true;
}

/// P_r(theta) / P_{r_k}(theta), accumulated factor by factor in log space as
/// sum log((1-rho^2)/(1-rho_k^2)) + log(D(rho_k)/D(rho)) with
/// D(rho) = (1-rho)^2 + 4 rho sin^2(theta/2).
inline double kernel_ratio(double r, double r_k, const TorusPoint& theta, const RadialScheme& scheme = {}) {
  if (!(r >= 0.0 && r < 1.0) || !(r_k >= 0.0 && r_k < 1.0)) throw DomainError("kernel_ratio needs radii in [0,1)");
  double lr = std::log(r);
  double lk = std::log(r_k);
  auto log_parts = [](double log_base, double m, double s2) {
    if (log_base == -INFINITY) return std::pair<double, double>{0.0, 0.0};
    double x = m * log_base;
    double one_minus = -std::expm1(x);
    double rho = std::exp(x);
    double one_minus_sq = -std::expm1(2.0 * x);
    return std::pair<double, double>{std::log(one_minus_sq), std::log(one_minus * one_minus + 4.0 * rho * s2)};
  };
  double log_ratio = 0.0;
  for (std::size_t n = 0; n < theta.size(); ++n) {
    double m = static_cast<double>(scheme(static_cast<std::uint32_t>(n + 1)));
    double s = std::sin(0.5 * theta[n]);
    auto [num_r, den_r] = log_parts(lr, m, s * s);
    auto [num_k, den_k] = log_parts(lk, m, s * s);
    log_ratio += (num_r - num_k) + (den_k - den_r);
  }
  return std::exp(log_ratio);
}

/// One step of an approach path: coordinates 1..h at the head radius, then
/// the block radii, then zeros.
struct PathStep {
  std::uint32_t head_len = 0;
  double head_radius = 0.0;
  std::vector<double> block;

  double radius(std::uint32_t n) const {
    if (n == 0) throw DomainError("coordinates are 1-based");
    if (n <= head_len) return head_radius;
    std::size_t i = n - head_len - 1;
    return i < block.size() ? block[i] : 0.0;
  }
  std::uint32_t extent() const { return head_len + static_cast<std::uint32_t>(block.size()); }

  friend bool operator==(const PathStep&, const PathStep&) = default;
};

struct ApproachPath {
  std::vector<PathStep> steps;
  bool monotone = false;

  std::uint32_t extent() const {
    std::uint32_t e = 0;
    for (const auto& s : steps) e = std::max(e, s.extent());
    return e;
  }
  /// Radii of step k for coordinates 1..m.
  std::vector<double> radii(std::size_t k, std::uint32_t m) const {
    std::vector<double> r(m);
    for (std::uint32_t n = 1; n <= m; ++n) r[n - 1] = steps.at(k).radius(n);
    return r;
  }
};

/// True when every coordinate's radius is nondecreasing along the steps.
inline bool coordinatewise_monotone(const ApproachPath& p) {
  std::uint32_t e = p.extent();
  for (std::uint32_t n = 1; n <= e; ++n)
    for (std::size_t k = 1; k < p.steps.size(); ++k)
      if (p.steps[k].radius(n) < p.steps[k - 1].radius(n)) return false;
  return true;
}

/// Weaker check: each coordinate is nondecreasing from the first step in
/// which it belongs to the head. This is what block paths satisfy.
inline bool monotone_after_freeze(const ApproachPath& p) {
  std::uint32_t e = p.extent();
  for (std::uint32_t n = 1; n <= e; ++n) {
    bool frozen = false;
    for (std::size_t k = 0; k < p.steps.size(); ++k) {
      if (!frozen) {
        frozen = n <= p.steps[k].head_len;
        continue;
      }
      if (p.steps[k].radius(n) < p.steps[k - 1].radius(n)) return false;
    }
  }
  return true;
}

inline bool radii_in_unit_interval(const ApproachPath& p, bool allow_one = false) {
  auto ok = [&](double r) { return r >= 0.0 && (allow_one ? r <= 1.0 : r < 1.0); };
  for (const auto& s : p.steps) {
    if (s.head_len > 0 && !ok(s.head_radius)) return false;
    for (double r : s.block)
      if (!ok(r)) return false;
  }
  return true;
}

/// "head_len h r_head | b1,b2,..." per step.
inline void write_path(std::ostream& os, const ApproachPath& p) {
  for (const auto& s : p.steps) {
    os << "head_len " << s.head_len << ' ' << format_double(s.head_radius) << " |";
    for (std::size_t i = 0; i < s.block.size(); ++i) os << (i ? "," : " ") << format_double(s.block[i]);
    os << '\n';
  }
}

inline std::string to_text(const ApproachPath& p) {
  std::ostringstream os;
  write_path(os, p);
  return os.str();
}

inline ApproachPath read_path(std::istream& is) {
  ApproachPath p;
  std::string line;
  while (std::getline(is, line)) {
    std::string_view v = trim(line);
    if (v.empty() || v.front() == '#') continue;
    std::size_t bar = v.find('|');
    if (!v.starts_with("head_len ") || bar == std::string_view::npos)
      throw ConfigError("malformed path line '" + std::string(v) + "'");
    auto head = split(trim(v.substr(9, bar - 9)), ' ');
    std::vector<std::string_view> parts;
    for (auto h : head)
      if (!trim(h).empty()) parts.push_back(trim(h));
    if (parts.size() != 2) throw ConfigError("path line needs 'head_len h r_head |'");
    PathStep s;
    double h = parse_double(parts[0]);
    if (h < 0 || h != std::floor(h) || h > UINT32_MAX) throw ConfigError("head length must be a nonnegative integer");
    s.head_len = static_cast<std::uint32_t>(h);
    s.head_radius = parse_double(parts[1]);
    std::string_view rest = trim(v.substr(bar + 1));
    if (!rest.empty()) s.block = parse_double_list(rest);
    p.steps.push_back(std::move(s));
  }
  p.monotone = coordinatewise_monotone(p);
  return p;
}

inline ApproachPath path_from_text(const std::string& text) {
  std::istringstream is(text);
  return read_path(is);
}

/// Head radius of the block path once the first m coordinates are frozen.
inline double reciprocal_head(std::uint32_t m) { return m == 0 ? 0.0 : 1.0 - 1.0 / static_cast<double>(m); }

namespace detail {

inline void check_boundaries(const std::vector<std::uint32_t>& b) {
  if (b.empty()) throw ConfigError("block boundaries must be nonempty");
  std::uint32_t prev = 0;
  for (auto m : b) {
    if (m <= prev) throw ConfigError("block boundaries must be strictly increasing positive integers");
    prev = m;
  }
}

}  // namespace detail

inline constexpr std::uint32_t kBlockWidthCap = 20;

/// Point-independent block path: while the k-th block (m_{k-1}, m_k] runs
/// through every tuple over the alphabet, coordinates 1..m_{k-1} sit at
/// head(m_{k-1}) and later coordinates at 0. Tuples are enumerated in
/// mixed-radix order with the first block coordinate varying fastest.
///
/// Re-enumerating a block necessarily lowers some of its coordinates again,
/// so the strict coordinatewise scan fails for any block of width >= 2; the
/// flag reports that scan honestly.
inline ApproachPath block_path(const std::vector<std::uint32_t>& boundaries,
                               const std::function<double(std::uint32_t)>& head = reciprocal_head,
                               const std::vector<double>& alphabet = {0.0, 0.5}) {
  detail::check_boundaries(boundaries);
  if (alphabet.empty()) throw ConfigError("block alphabet must be nonempty");
  for (double a : alphabet)
    if (!(a >= 0.0 && a < 1.0)) throw ConfigError("block alphabet values must lie in [0,1)");
  ApproachPath p;
  std::uint32_t prev = 0;
  for (auto m : boundaries) {
    std::uint32_t width = m - prev;
    double combos = std::pow(static_cast<double>(alphabet.size()), width);
    if (width > kBlockWidthCap || combos > std::pow(2.0, kBlockWidthCap))
      throw ConfigError("block (" + std::to_string(prev) + "," + std::to_string(m) + "] has width " +
                        std::to_string(width) + " above the enumeration cap " + std::to_string(kBlockWidthCap) +
                        "; use sampled_block_path");
    double h = head(prev);
    if (!(h >= 0.0 && h < 1.0)) throw ConfigError("head rule must return radii in [0,1)");
    auto total = static_cast<std::uint64_t>(combos);
    for (std::uint64_t code = 0; code < total; ++code) {
      PathStep s;
      s.head_len = prev;
      s.head_radius = prev == 0 ? 0.0 : h;
      s.block.resize(width);
      std::uint64_t c = code;
      for (std::uint32_t i = 0; i < width; ++i) {
        s.block[i] = alphabet[c % alphabet.size()];
        c /= alphabet.size();
      }
      p.steps.push_back(std::move(s));
    }
    prev = m;
  }
  p.monotone = coordinatewise_monotone(p);
  return p;
}

/// Block path with `tuples` random tuples per block instead of all of them.
inline ApproachPath sampled_block_path(const std::vector<std::uint32_t>& boundaries, std::size_t tuples,
                                       RandomStream& rng,
                                       const std::function<double(std::uint32_t)>& head = reciprocal_head,
                                       const std::vector<double>& alphabet = {0.0, 0.5}) {
  detail::check_boundaries(boundaries);
  if (alphabet.empty() || tuples == 0) throw ConfigError("sampled_block_path needs an alphabet and tuples >= 1");
  ApproachPath p;
  std::uint32_t prev = 0;
  for (auto m : boundaries) {
    double h = head(prev);
    for (std::size_t t = 0; t < tuples; ++t) {
      PathStep s;
      s.head_len = prev;
      s.head_radius = prev == 0 ? 0.0 : h;
      s.block.resize(m - prev);
      for (auto& r : s.block)
        r = alphabet[std::min(alphabet.size() - 1, static_cast<std::size_t>(rng.uniform() * alphabet.size()))];
      p.steps.push_back(std::move(s));
    }
    prev = m;
  }
  p.monotone = coordinatewise_monotone(p);
  return p;
}

inline constexpr std::uint64_t kBlockSearchCap = 1'000'000;

/// Smallest N such that the empirical probability of
/// sum_{m_k < n <= N} |cos theta_n| / n >= 1 is at least p0. Each sample
/// draws its angles from streams.derive(m_k).stream(sample), so the answer is
/// a fixed order statistic of fixed hitting times and grows with p0.
inline std::uint64_t choose_blocks_mc(std::uint64_t m_k, double p0, std::size_t samples, const StreamFamily& streams,
                                      std::uint64_t cap = kBlockSearchCap) {
  if (!(p0 >= 0.0 && p0 < 1.0)) throw ConfigError("choose_blocks_mc needs p0 in [0,1)");
  if (samples < 100) throw ConfigError("choose_blocks_mc needs at least 100 samples");
  if (p0 == 0.0) return m_k + 1;
  StreamFamily fam = streams.derive(m_k);
  std::vector<std::uint64_t> hits(samples);
  for (std::size_t s = 0; s < samples; ++s) {
    RandomStream rng = fam.stream(s);
    double sum = 0.0;
    std::uint64_t n = m_k;
    while (sum < 1.0 && n <= cap) {
      ++n;
      sum += std::abs(std::cos(rng.angle())) / static_cast<double>(n);
    }
    hits[s] = sum >= 1.0 ? n : cap + 1;
  }
  std::sort(hits.begin(), hits.end());
  auto rank = static_cast<std::size_t>(std::ceil(p0 * static_cast<double>(samples)));
  std::uint64_t N = hits[std::max<std::size_t>(rank, 1) - 1];
  if (N > cap)
    throw ResourceError("choose_blocks_mc: block after " + std::to_string(m_k) + " needs more than " +
                        std::to_string(cap) + " coordinates");
  return N;
}

struct BlockChoice {
  std::vector<std::uint32_t> boundaries;
  std::vector<std::uint64_t> unclipped;  ///< choose_blocks_mc output before the width clip
};

/// Chains choose_blocks_mc from m_0 = 0, clipping each width at width_cap.
inline BlockChoice mc_block_boundaries(std::size_t blocks, double p0, std::size_t samples, const StreamFamily& streams,
                                       std::uint32_t width_cap = kBlockWidthCap) {
  if (blocks == 0 || width_cap == 0) throw ConfigError("mc_block_boundaries needs blocks >= 1 and width_cap >= 1");
  BlockChoice out;
  std::uint64_t m = 0;
  for (std::size_t k = 0; k < blocks; ++k) {
    std::uint64_t N = choose_blocks_mc(m, p0, samples, streams);
    out.unclipped.push_back(N);
    m = std::min<std::uint64_t>(N, m + width_cap);
    out.boundaries.push_back(static_cast<std::uint32_t>(m));
  }
  return out;
}

/// (n, theta_n, r) -> u_n(r e^{i theta_n})
using TermOracle = std::function<double(std::uint32_t, double, double)>;

struct AdaptiveOptions {
  int levels = 3;
  double level_base = 4.0;  ///< level l needs a block sum >= level_base^l
  std::vector<double> radius_grid = default_radius_grid(30);
  double head_cap = 1.0 - 1e-6;
  std::uint32_t coordinate_cap = 100'000;
};

struct AdaptiveResult {
  ApproachPath path;
  std::vector<std::uint32_t> nu;         ///< block ends nu_1 < nu_2 < ...
  std::vector<double> level_sums;        ///< achieved block sums (last one partial when incomplete)
  std::vector<double> chosen_radius;     ///< r'_n for n = 1..coordinates used
  std::vector<double> chosen_value;      ///< oracle value at r'_n
  int levels_reached = 0;
  bool complete = false;
};

/// Three-zone adaptive path: step l puts coordinates 1..nu_{l-1} at the
/// head cap, block (nu_{l-1}, nu_l] at the oracle-maximizing radii r'_n and
/// later coordinates at 0; nu_l is the first index where the block sum
/// reaches level_base^l. Grid radii above the head cap are skipped so no
/// coordinate ever moves down when it joins the head.
inline AdaptiveResult adaptive_block_path(const TermOracle& oracle, const TorusPoint& theta,
                                          const AdaptiveOptions& opt = {}) {
  if (opt.levels < 1) throw ConfigError("adaptive_block_path needs at least one level");
  if (!(opt.head_cap > 0.0 && opt.head_cap < 1.0)) throw ConfigError("head cap must lie in (0,1)");
  std::vector<double> grid;
  for (double r : opt.radius_grid) {
    if (!(r >= 0.0 && r < 1.0)) throw ConfigError("adaptive radius grid must lie in [0,1)");
    if (r <= opt.head_cap) grid.push_back(r);
  }
  if (grid.empty()) throw ConfigError("adaptive radius grid is empty below the head cap");
  std::uint32_t cap = std::min<std::uint32_t>(opt.coordinate_cap, static_cast<std::uint32_t>(theta.size()));
  AdaptiveResult res;
  std::uint32_t n = 0;
  for (int level = 1; level <= opt.levels; ++level) {
    double target = std::pow(opt.level_base, level);
    std::uint32_t block_start = n;
    double sum = 0.0;
    while (sum < target && n < cap) {
      ++n;
      double best_r = grid.front();
      double best = -INFINITY;
      for (double r : grid) {
        double v = oracle(n, theta[n - 1], r);
        if (v > best) {
          best = v;
          best_r = r;
        }
      }
      res.chosen_radius.push_back(best_r);
      res.chosen_value.push_back(best);
      sum += best;
    }
    PathStep s;
    s.head_len = block_start;
    s.head_radius = block_start == 0 ? 0.0 : opt.head_cap;
    s.block.assign(res.chosen_radius.begin() + block_start, res.chosen_radius.begin() + n);
    res.path.steps.push_back(std::move(s));
    res.level_sums.push_back(sum);
    if (sum < target) break;
    res.nu.push_back(n);
    res.levels_reached = level;
  }
  res.complete = res.levels_reached == opt.levels;
  res.path.monotone = coordinatewise_monotone(res.path);
  return res;
}

}  // namespace polydisc
