#pragma once

#include <algorithm>
#include <compare>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <initializer_list>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "polydisc/errors.hpp"

namespace polydisc {

/// Finitely supported integer exponent sequence. Coordinates are 1-based.
///
/// Stored canonically: coordinates strictly increasing, no zero exponent.
/// Two indices compare equal exactly when they describe the same sequence.
class MultiIndex {
 public:
  struct Entry {
    std::uint32_t coord;
    std::int64_t exponent;
    friend bool operator==(const Entry&, const Entry&) = default;
    friend auto operator<=>(const Entry&, const Entry&) = default;
  };

  MultiIndex() = default;

  /// Accepts entries in any order; repeated coordinates are summed, zeros dropped.
  MultiIndex(std::initializer_list<Entry> entries) : MultiIndex(std::vector<Entry>(entries)) {}

  explicit MultiIndex(std::vector<Entry> entries) : entries_(std::move(entries)) { canonicalize(); }

  /// Dense exponent vector (nu_1, ..., nu_k).
  static MultiIndex from_dense(std::span<const std::int64_t> exponents) {
    std::vector<Entry> e;
    for (std::size_t i = 0; i < exponents.size(); ++i) {
      if (exponents[i] != 0) e.push_back({static_cast<std::uint32_t>(i + 1), exponents[i]});
    }
    MultiIndex out;
    out.entries_ = std::move(e);
    return out;
  }

  static MultiIndex unit(std::uint32_t coord, std::int64_t exponent = 1) {
    return MultiIndex({Entry{coord, exponent}});
  }

  const std::vector<Entry>& entries() const noexcept { return entries_; }
  bool empty() const noexcept { return entries_.empty(); }
  std::size_t size() const noexcept { return entries_.size(); }

  std::int64_t exponent(std::uint32_t coord) const noexcept {
    auto it = std::lower_bound(entries_.begin(), entries_.end(), coord,
                               [](const Entry& e, std::uint32_t c) { return e.coord < c; });
    return (it != entries_.end() && it->coord == coord) ? it->exponent : 0;
  }

  /// Largest coordinate carrying a nonzero exponent (0 for the empty index).
  std::uint32_t dim() const noexcept { return entries_.empty() ? 0 : entries_.back().coord; }

  /// |nu|_1
  std::int64_t order() const noexcept {
    std::int64_t s = 0;
    for (const auto& e : entries_) s += std::llabs(e.exponent);
    return s;
  }

  /// s(nu) = sum nu_j
  std::int64_t diagonal_sum() const noexcept {
    std::int64_t s = 0;
    for (const auto& e : entries_) s += e.exponent;
    return s;
  }

  /// w_m(nu) = sum m_j |nu_j| for coordinate weights `m(j)`.
  template <class Weights>
  std::int64_t weighted_degree(const Weights& m) const {
    std::int64_t s = 0;
    for (const auto& e : entries_) s += static_cast<std::int64_t>(m(e.coord)) * std::llabs(e.exponent);
    return s;
  }

  /// sigma_m(nu) = sum m_j nu_j
  template <class Weights>
  std::int64_t diagonal_signature(const Weights& m) const {
    std::int64_t s = 0;
    for (const auto& e : entries_) s += static_cast<std::int64_t>(m(e.coord)) * e.exponent;
    return s;
  }

  bool nonnegative() const noexcept {
    return std::all_of(entries_.begin(), entries_.end(), [](const Entry& e) { return e.exponent > 0; });
  }
  bool nonpositive() const noexcept {
    return std::all_of(entries_.begin(), entries_.end(), [](const Entry& e) { return e.exponent < 0; });
  }

  /// Keeps only coordinates <= m.
  MultiIndex truncated(std::uint32_t m) const {
    MultiIndex out;
    for (const auto& e : entries_) {
      if (e.coord > m) break;
      out.entries_.push_back(e);
    }
    return out;
  }

  bool supported_in(std::uint32_t m) const noexcept { return dim() <= m; }

  friend MultiIndex operator+(const MultiIndex& a, const MultiIndex& b) {
    std::vector<Entry> merged = a.entries_;
    merged.insert(merged.end(), b.entries_.begin(), b.entries_.end());
    return MultiIndex(std::move(merged));
  }

  friend MultiIndex operator-(const MultiIndex& a) {
    MultiIndex out = a;
    for (auto& e : out.entries_) e.exponent = -e.exponent;
    return out;
  }

  friend bool operator==(const MultiIndex&, const MultiIndex&) = default;
  friend std::strong_ordering operator<=>(const MultiIndex& a, const MultiIndex& b) {
    return std::lexicographical_compare_three_way(a.entries_.begin(), a.entries_.end(), b.entries_.begin(),
                                                  b.entries_.end());
  }

  /// "j1:e1,j2:e2"; the empty index renders as the empty string.
  std::string to_string() const {
    std::string s;
    for (std::size_t i = 0; i < entries_.size(); ++i) {
      if (i) s += ',';
      s += std::to_string(entries_[i].coord);
      s += ':';
      s += std::to_string(entries_[i].exponent);
    }
    return s;
  }

  static MultiIndex parse(std::string_view text) {
    std::vector<Entry> out;
    auto trim = [](std::string_view v) {
      while (!v.empty() && (v.front() == ' ' || v.front() == '\t')) v.remove_prefix(1);
      while (!v.empty() && (v.back() == ' ' || v.back() == '\t')) v.remove_suffix(1);
      return v;
    };
    text = trim(text);
    if (text.empty()) return MultiIndex();
    std::size_t pos = 0;
    std::uint32_t last = 0;
    while (pos <= text.size()) {
      std::size_t comma = text.find(',', pos);
      std::string_view item = trim(text.substr(pos, comma == std::string_view::npos ? text.npos : comma - pos));
      std::size_t colon = item.find(':');
      if (colon == std::string_view::npos) throw ConfigError("multi-index entry without ':' in '" + std::string(text) + "'");
      std::string cs(trim(item.substr(0, colon)));
      std::string es(trim(item.substr(colon + 1)));
      char* end = nullptr;
      unsigned long long c = std::strtoull(cs.c_str(), &end, 10);
      if (cs.empty() || *end != '\0' || c == 0 || c > 0xffffffffULL)
        throw ConfigError("bad coordinate '" + cs + "'");
      long long e = std::strtoll(es.c_str(), &end, 10);
      if (es.empty() || *end != '\0') throw ConfigError("bad exponent '" + es + "'");
      if (e == 0) throw ConfigError("zero exponent is not canonical");
      if (c <= last) throw ConfigError("coordinates must be strictly increasing");
      last = static_cast<std::uint32_t>(c);
      out.push_back({static_cast<std::uint32_t>(c), e});
      if (comma == std::string_view::npos) break;
      pos = comma + 1;
    }
    MultiIndex m;
    m.entries_ = std::move(out);
    return m;
  }

 private:
  void canonicalize() {
    std::sort(entries_.begin(), entries_.end(), [](const Entry& a, const Entry& b) { return a.coord < b.coord; });
    std::vector<Entry> out;
    out.reserve(entries_.size());
    for (const auto& e : entries_) {
      if (e.coord == 0) throw DomainError("multi-index coordinates are 1-based");
      if (!out.empty() && out.back().coord == e.coord) {
        out.back().exponent += e.exponent;
      } else {
        out.push_back(e);
      }
    }
    std::erase_if(out, [](const Entry& e) { return e.exponent == 0; });
    entries_ = std::move(out);
  }

  std::vector<Entry> entries_;
};

}  // namespace polydisc

template <>
struct std::hash<polydisc::MultiIndex> {
  std::size_t operator()(const polydisc::MultiIndex& m) const noexcept {
    std::uint64_t h = 1469598103934665603ULL;
    for (const auto& e : m.entries()) {
      h = (h ^ e.coord) * 1099511628211ULL;
      h = (h ^ static_cast<std::uint64_t>(e.exponent)) * 1099511628211ULL;
    }
    return static_cast<std::size_t>(h);
  }
};
