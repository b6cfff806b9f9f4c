#pragma once

// Test-only helpers: an exact rational type for hand-expansion oracles and a
// seeded problem generator that shares no code with the library.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <span>
#include <vector>

#include "redist/core.hpp"

namespace redist::testing {

struct Fraction {
  std::int64_t num = 0;
  std::int64_t den = 1;

  Fraction(std::int64_t n = 0, std::int64_t d = 1) : num(n), den(d) { normalize(); }

  void normalize() {
    if (den < 0) {
      num = -num;
      den = -den;
    }
    const std::int64_t g = std::gcd(num < 0 ? -num : num, den);
    if (g > 1) {
      num /= g;
      den /= g;
    }
  }

  double value() const { return static_cast<double>(num) / static_cast<double>(den); }

  friend Fraction operator+(Fraction a, Fraction b) {
    return {a.num * b.den + b.num * a.den, a.den * b.den};
  }
  friend Fraction operator-(Fraction a, Fraction b) {
    return {a.num * b.den - b.num * a.den, a.den * b.den};
  }
  friend Fraction operator*(Fraction a, Fraction b) { return {a.num * b.num, a.den * b.den}; }
  friend Fraction operator/(Fraction a, Fraction b) { return {a.num * b.den, a.den * b.num}; }
  friend bool operator==(Fraction a, Fraction b) { return a.num == b.num && a.den == b.den; }
};

/// Term-by-term expansion l1 y_i + l2 Y/n + (1 - l1 - l2)(z_i + (Y - Z)/n)
/// in exact arithmetic.
inline std::vector<Fraction> lambda_rule_exact(const std::vector<Fraction>& y,
                                               const std::vector<Fraction>& z, Fraction l1,
                                               Fraction l2) {
  const Fraction n(static_cast<std::int64_t>(y.size()));
  Fraction total_y, total_z;
  for (auto v : y) total_y = total_y + v;
  for (auto v : z) total_z = total_z + v;
  const Fraction l3 = Fraction(1) - l1 - l2;
  std::vector<Fraction> out;
  for (std::size_t i = 0; i < y.size(); ++i) {
    out.push_back(l1 * y[i] + l2 * (total_y / n) + l3 * (z[i] + (total_y - total_z) / n));
  }
  return out;
}

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : engine_(seed) {}

  double uniform(double lo, double hi) {
    return lo + (hi - lo) * (static_cast<double>(engine_() >> 11) * 0x1.0p-53);
  }
  std::int64_t integer(std::int64_t lo, std::int64_t hi) {
    return lo + static_cast<std::int64_t>(engine_() % static_cast<std::uint64_t>(hi - lo + 1));
  }
  template <typename T>
  const T& pick(std::span<const T> items) {
    return items[static_cast<std::size_t>(engine_() % items.size())];
  }

  /// Incomes in [-100, 100], needs in [0, 100].
  Problem problem(std::size_t n) {
    std::vector<double> y(n), z(n);
    for (std::size_t i = 0; i < n; ++i) {
      y[i] = uniform(-100.0, 100.0);
      z[i] = uniform(0.0, 100.0);
    }
    return Problem(std::move(y), std::move(z));
  }

  /// Small integers with deliberate ties; about a third of the draws shift
  /// one agent so the mean lands exactly on some agent.
  Problem tie_heavy_problem(std::size_t n) {
    std::vector<double> y(n), z(n);
    for (std::size_t i = 0; i < n; ++i) {
      y[i] = static_cast<double>(integer(-3, 6));
      z[i] = static_cast<double>(integer(0, 4));
    }
    if (integer(0, 2) == 0) {
      // Make every value equal the mean for a random subset: set the last
      // agents to the rounded mean of the rest so Y/n is an integer.
      const double s = std::accumulate(y.begin(), y.end() - 1, 0.0);
      y.back() = static_cast<double>(n) * std::round(s / static_cast<double>(n - 1)) - s;
      const double t = std::accumulate(z.begin(), z.end() - 1, 0.0);
      const double zl = static_cast<double>(n) * std::round(t / static_cast<double>(n - 1)) - t;
      if (zl >= 0.0) z.back() = zl;
    }
    return Problem(std::move(y), std::move(z));
  }

  LambdaParams lambda(double bound = 2.0) {
    return LambdaParams{uniform(-bound, bound), uniform(-bound, bound)};
  }

 private:
  std::mt19937_64 engine_;
};

/// |a - b| <= tol * max(1, |a|, |b|).
inline bool close(double a, double b, double tol = 1e-9) {
  return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)});
}

inline bool all_close(std::span<const double> a, std::span<const double> b, double tol = 1e-9) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!close(a[i], b[i], tol)) return false;
  }
  return true;
}

}  // namespace redist::testing
