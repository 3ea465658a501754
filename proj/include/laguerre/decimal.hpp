#pragma once

#include <algorithm>
#include <array>
#include <charconv>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>

namespace laguerre {

/// Exact finite decimal `mantissa * 10^exponent`.
///
/// Model parameters are carried as decimals so that boundary cases of the
/// rate classification (sums hitting 1/2 or 1 exactly) are decided without
/// floating rounding.
class Decimal {
 public:
  constexpr Decimal() = default;
  constexpr Decimal(std::int64_t mantissa, int exponent) : mantissa_(mantissa), exponent_(exponent) {}

  /// Parses `[+-]digits[.digits][e[+-]digits]`.
  static Decimal parse(std::string_view text) {
    std::string_view s = text;
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
    if (s.empty()) throw std::invalid_argument("empty decimal");
    bool negative = false;
    if (s.front() == '+' || s.front() == '-') {
      negative = s.front() == '-';
      s.remove_prefix(1);
    }
    __int128 mant = 0;
    int exponent = 0;
    int digits = 0;
    bool seen_point = false;
    bool any_digit = false;
    std::size_t i = 0;
    for (; i < s.size(); ++i) {
      const char c = s[i];
      if (c == '.') {
        if (seen_point) throw std::invalid_argument("malformed decimal: " + std::string(text));
        seen_point = true;
        continue;
      }
      if (c == 'e' || c == 'E') break;
      if (c < '0' || c > '9') throw std::invalid_argument("malformed decimal: " + std::string(text));
      any_digit = true;
      if (mant == 0 && c == '0') {
        if (seen_point) --exponent;
        continue;
      }
      if (++digits > 18) throw std::invalid_argument("decimal has too many digits: " + std::string(text));
      mant = mant * 10 + (c - '0');
      if (seen_point) --exponent;
    }
    if (!any_digit) throw std::invalid_argument("malformed decimal: " + std::string(text));
    if (i < s.size()) {
      std::string_view e = s.substr(i + 1);
      if (!e.empty() && e.front() == '+') e.remove_prefix(1);
      int shift = 0;
      auto [ptr, ec] = std::from_chars(e.data(), e.data() + e.size(), shift);
      if (ec != std::errc{} || ptr != e.data() + e.size())
        throw std::invalid_argument("malformed exponent: " + std::string(text));
      exponent += shift;
    }
    if (mant == 0) exponent = 0;
    Decimal d(static_cast<std::int64_t>(negative ? -mant : mant), exponent);
    d.normalize();
    return d;
  }

  /// Shortest decimal that round-trips to `value`.
  static Decimal from_double(double value) {
    std::array<char, 64> buf{};
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    if (ec != std::errc{}) throw std::invalid_argument("cannot represent value as decimal");
    return parse(std::string_view(buf.data(), static_cast<std::size_t>(ptr - buf.data())));
  }

  [[nodiscard]] constexpr std::int64_t mantissa() const { return mantissa_; }
  [[nodiscard]] constexpr int exponent() const { return exponent_; }

  [[nodiscard]] double to_double() const {
    // from_chars yields the correctly rounded binary value.
    const std::string s = to_string();
    double v = 0.0;
    std::from_chars(s.data(), s.data() + s.size(), v);
    return v;
  }

  [[nodiscard]] std::string to_string() const {
    return std::to_string(mantissa_) + "e" + std::to_string(exponent_);
  }

  /// Three-way comparison of `sum(terms) + offset_num / offset_den` against
  /// zero, computed exactly. Returns -1, 0 or +1.
  static int sign_of_sum(std::span<const Decimal> terms, std::int64_t offset_num, std::int64_t offset_den) {
    int min_exp = 0;
    for (const auto& t : terms) min_exp = std::min(min_exp, t.exponent_);
    if (min_exp < -19) throw std::invalid_argument("decimal precision too fine for exact comparison");
    // Express everything over den * 10^-min_exp.
    __int128 total = 0;
    for (const auto& t : terms) {
      if (t.exponent_ - min_exp > 19) throw std::invalid_argument("decimal range too wide for exact comparison");
      __int128 v = t.mantissa_;
      for (int k = t.exponent_; k > min_exp; --k) v *= 10;
      total += v * offset_den;
    }
    __int128 off = offset_num;
    for (int k = 0; k > min_exp; --k) off *= 10;
    total += off;
    return total > 0 ? 1 : (total < 0 ? -1 : 0);
  }

  friend bool operator==(const Decimal&, const Decimal&) = default;

 private:
  void normalize() {
    while (mantissa_ != 0 && mantissa_ % 10 == 0) {
      mantissa_ /= 10;
      ++exponent_;
    }
    if (exponent_ > 18) throw std::invalid_argument("decimal magnitude too large");
  }

  std::int64_t mantissa_ = 0;
  int exponent_ = 0;
};

}  // namespace laguerre
