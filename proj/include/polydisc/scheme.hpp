#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "polydisc/errors.hpp"
#include "polydisc/format.hpp"

namespace polydisc {

/// Coordinate exponents (m_j) of the approach (r^{m_1} z_1, r^{m_2} z_2, ...).
///
/// Every kind satisfies A(r) = sum_j r^{m_j} < inf for r < 1: Diagonal and
/// Power by construction, Explicit because only the diagonal tail is allowed
/// past its table.
class RadialScheme {
 public:
  enum class Kind { Diagonal, Power, Explicit };

  RadialScheme() = default;

  static RadialScheme diagonal() { return RadialScheme(); }

  /// m_j = ceil(j^alpha)
  static RadialScheme power(double alpha) {
    if (!(alpha > 0.0) || !std::isfinite(alpha)) throw ConfigError("power scheme needs alpha > 0");
    RadialScheme s;
    s.kind_ = Kind::Power;
    s.alpha_ = alpha;
    return s;
  }

  /// m_j = table[j-1] for j <= table.size(), m_j = j beyond.
  static RadialScheme explicit_table(std::vector<std::uint64_t> table) {
    for (auto m : table)
      if (m == 0) throw ConfigError("explicit scheme exponents must be positive integers");
    RadialScheme s;
    s.kind_ = Kind::Explicit;
    s.table_ = std::move(table);
    return s;
  }

  Kind kind() const noexcept { return kind_; }
  double alpha() const noexcept { return alpha_; }
  const std::vector<std::uint64_t>& table() const noexcept { return table_; }

  std::uint64_t operator()(std::uint32_t j) const {
    switch (kind_) {
      case Kind::Diagonal: return j;
      case Kind::Power: return static_cast<std::uint64_t>(std::ceil(std::pow(static_cast<double>(j), alpha_)));
      case Kind::Explicit: return j <= table_.size() ? table_[j - 1] : j;
    }
    return j;
  }

  /// "diagonal", "power:<alpha>", "explicit:m1,m2,...[;tail=diagonal]"
  std::string describe() const {
    switch (kind_) {
      case Kind::Diagonal: return "diagonal";
      case Kind::Power: return "power:" + format_double(alpha_);
      case Kind::Explicit: {
        std::string s = "explicit:";
        for (std::size_t i = 0; i < table_.size(); ++i) s += (i ? "," : "") + std::to_string(table_[i]);
        return s + ";tail=diagonal";
      }
    }
    return "diagonal";
  }

  static RadialScheme parse(std::string_view text) {
    text = trim(text);
    if (text.empty() || text == "diagonal") return diagonal();
    if (text.starts_with("power:")) return power(parse_double(text.substr(6)));
    if (text.starts_with("explicit:")) {
      std::string_view body = text.substr(9);
      std::size_t semi = body.find(';');
      if (semi != std::string_view::npos) {
        std::string_view tail = trim(body.substr(semi + 1));
        if (tail != "tail=diagonal")
          throw ConfigError("explicit schemes only accept a diagonal tail (got '" + std::string(tail) + "')");
        body = body.substr(0, semi);
      }
      std::vector<std::uint64_t> table;
      for (double v : parse_double_list(body)) {
        if (v < 1 || v != std::floor(v)) throw ConfigError("explicit scheme entries must be positive integers");
        table.push_back(static_cast<std::uint64_t>(v));
      }
      return explicit_table(std::move(table));
    }
    throw ConfigError("unknown radial scheme '" + std::string(text) + "'");
  }

  friend bool operator==(const RadialScheme&, const RadialScheme&) = default;

 private:
  Kind kind_ = Kind::Diagonal;
  double alpha_ = 1.0;
  std::vector<std::uint64_t> table_;
};

}  // namespace polydisc
