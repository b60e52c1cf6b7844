#pragma once

#include <cstdint>
#include <numeric>
#include <optional>

namespace erci {

/// Exact nonnegative rational, used only to check that transition
/// distributions given as num/den pairs sum to exactly one. All solver
/// arithmetic is double based.
struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;

  static std::optional<Rational> make(std::int64_t n, std::int64_t d) {
    if (d <= 0 || n < 0) return std::nullopt;
    std::int64_t g = std::gcd(n, d);
    if (g == 0) return Rational{0, 1};
    return Rational{n / g, d / g};
  }

  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
};

__extension__ typedef __int128 int128;

/// Sum with overflow detection; nullopt means the exact check is not possible
/// (caller falls back to the double tolerance).
inline std::optional<Rational> rational_add(const Rational& a, const Rational& b) {
  auto gcd128 = [](int128 x, int128 y) {
    while (y != 0) {
      int128 t = x % y;
      x = y;
      y = t;
    }
    return x < 0 ? -x : x;
  };
  int128 n = static_cast<int128>(a.num) * b.den + static_cast<int128>(b.num) * a.den;
  int128 d = static_cast<int128>(a.den) * b.den;
  int128 r = gcd128(n, d);
  if (r > 1) {
    n /= r;
    d /= r;
  }
  if (n > INT64_MAX || d > INT64_MAX) return std::nullopt;
  return Rational{static_cast<std::int64_t>(n), static_cast<std::int64_t>(d)};
}

inline bool rational_is_one(const Rational& a) { return a.num == a.den; }

}  // namespace erci
