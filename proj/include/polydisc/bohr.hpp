#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "polydisc/errors.hpp"
#include "polydisc/multi_index.hpp"
#include "polydisc/series.hpp"

namespace polydisc {

namespace detail {

/// Smallest-prime-factor sieve up to kSieveLimit, built once on first use.
class PrimeTable {
 public:
  static constexpr std::uint32_t kSieveLimit = 1'000'000;

  static const PrimeTable& instance() {
    static const PrimeTable table;
    return table;
  }

  std::uint32_t smallest_factor(std::uint32_t n) const { return spf_[n]; }
  const std::vector<std::uint32_t>& primes() const noexcept { return primes_; }

  /// 1-based position of prime p in the list of primes.
  std::uint32_t index_of_prime(std::uint64_t p) const {
    auto it = std::lower_bound(primes_.begin(), primes_.end(), p);
    return static_cast<std::uint32_t>(it - primes_.begin()) + 1;
  }

  /// The j-th prime (1-based).
  std::uint64_t prime(std::uint32_t j) const {
    if (j == 0 || j > primes_.size())
      throw RangeError("coordinate " + std::to_string(j) + " is beyond the cached prime table (" +
                       std::to_string(primes_.size()) + " primes)");
    return primes_[j - 1];
  }

 private:
  PrimeTable() : spf_(kSieveLimit + 1, 0) {
    for (std::uint32_t i = 2; i <= kSieveLimit; ++i) {
      if (spf_[i] == 0) {
        spf_[i] = i;
        primes_.push_back(i);
      }
      for (std::uint32_t p : primes_) {
        std::uint64_t next = static_cast<std::uint64_t>(p) * i;
        if (p > spf_[i] || next > kSieveLimit) break;
        spf_[next] = p;
      }
    }
  }

  std::vector<std::uint32_t> spf_;
  std::vector<std::uint32_t> primes_;
};

}  // namespace detail

/// Finite Dirichlet series sum a_n n^{-s}.
class DirichletSeries {
 public:
  using Terms = std::map<std::uint64_t, Complex>;

  DirichletSeries() = default;
  DirichletSeries(std::initializer_list<std::pair<std::uint64_t, Complex>> terms) {
    for (const auto& [n, c] : terms) add(n, c);
  }

  void add(std::uint64_t n, Complex c) {
    if (n == 0) throw DomainError("Dirichlet series indices start at 1");
    if (c == Complex{}) return;
    auto [it, inserted] = terms_.try_emplace(n, c);
    if (!inserted) {
      it->second += c;
      if (it->second == Complex{}) terms_.erase(it);
    }
  }
  void set(std::uint64_t n, Complex c) {
    if (n == 0) throw DomainError("Dirichlet series indices start at 1");
    if (c == Complex{}) {
      terms_.erase(n);
    } else {
      terms_[n] = c;
    }
  }
  Complex coeff(std::uint64_t n) const {
    auto it = terms_.find(n);
    return it == terms_.end() ? Complex{} : it->second;
  }
  const Terms& terms() const noexcept { return terms_; }
  bool empty() const noexcept { return terms_.empty(); }
  std::uint64_t max_index() const noexcept { return terms_.empty() ? 0 : terms_.rbegin()->first; }

  friend bool operator==(const DirichletSeries&, const DirichletSeries&) = default;

 private:
  Terms terms_;
};

/// Exponent vector of the prime factorization n = p_1^{nu_1} ... p_k^{nu_k}.
///
/// Prime factors larger than the sieve bound have no cached index and raise RangeError.
inline MultiIndex index_of_integer(std::uint64_t n) {
  if (n == 0) throw DomainError("index_of_integer: n must be >= 1");
  const auto& table = detail::PrimeTable::instance();
  std::vector<MultiIndex::Entry> entries;
  auto push = [&](std::uint64_t p) {
    std::uint32_t j = table.index_of_prime(p);
    if (!entries.empty() && entries.back().coord == j) {
      ++entries.back().exponent;
    } else {
      entries.push_back({j, 1});
    }
  };
  if (n > detail::PrimeTable::kSieveLimit) {
    for (std::uint32_t p : table.primes()) {
      if (static_cast<std::uint64_t>(p) * p > n) break;
      while (n % p == 0) {
        push(p);
        n /= p;
      }
    }
    if (n > detail::PrimeTable::kSieveLimit)
      throw RangeError("prime factor " + std::to_string(n) + " exceeds the cached sieve bound");
  }
  while (n > 1) {
    std::uint32_t p = table.smallest_factor(static_cast<std::uint32_t>(n));
    push(p);
    n /= p;
  }
  return MultiIndex(std::move(entries));
}

/// Inverse of index_of_integer, with overflow checking.
inline std::uint64_t integer_of_index(const MultiIndex& nu) {
  const auto& table = detail::PrimeTable::instance();
  std::uint64_t n = 1;
  for (const auto& e : nu.entries()) {
    if (e.exponent < 0) throw DomainError("integer_of_index: negative exponent at coordinate " + std::to_string(e.coord));
    std::uint64_t p = table.prime(e.coord);
    for (std::int64_t k = 0; k < e.exponent; ++k) {
      if (__builtin_mul_overflow(n, p, &n)) throw RangeError("integer_of_index: result overflows 64 bits");
    }
  }
  return n;
}

/// Bohr lift: a_n becomes the coefficient of the exponent vector of n.
inline FourierSeries lift_dirichlet(const DirichletSeries& d) {
  FourierSeries f;
  for (const auto& [n, c] : d.terms()) f.set(index_of_integer(n), c);
  return f;
}

inline DirichletSeries unlift(const FourierSeries& f) {
  DirichletSeries d;
  for (const auto& [nu, c] : f.terms()) {
    if (!nu.nonnegative() && !nu.empty())
      throw SpectrumError("unlift: index " + nu.to_string() + " has a negative exponent");
    d.set(integer_of_index(nu), c);
  }
  return d;
}

/// sum_{n <= cutoff} a_n n^{-s}
inline Complex dirichlet_eval(const DirichletSeries& d, Complex s, std::uint64_t cutoff) {
  if (cutoff < d.max_index()) throw ConfigError("dirichlet_eval: cutoff below the largest index");
  Complex sum{};
  for (const auto& [n, c] : d.terms()) {
    if (n > cutoff) break;
    sum += c * std::exp(-s * std::log(static_cast<double>(n)));
  }
  return sum;
}

/// (a * b)_n = sum_{de = n} a_d b_e
inline DirichletSeries dirichlet_convolve(const DirichletSeries& a, const DirichletSeries& b) {
  DirichletSeries out;
  for (const auto& [n, ca] : a.terms())
    for (const auto& [m, cb] : b.terms()) {
      std::uint64_t nm;
      if (__builtin_mul_overflow(n, m, &nm)) throw RangeError("dirichlet_convolve: index overflow");
      out.add(nm, ca * cb);
    }
  return out;
}

}  // namespace polydisc
