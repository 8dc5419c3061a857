#pragma once

// Test-only helpers: a seeded generator and oracles that recompute quantities
// through a route independent of the library.

#include <cmath>
#include <cstdint>
#include <limits>
#include <utility>

#include "trimer/model.hpp"

namespace trimer::testing {

// splitmix64; small, seedable, identical on every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double log_uniform(double lo, double hi) {
    return std::exp(uniform(std::log(lo), std::log(hi)));
  }
  std::size_t index(std::size_t n) { return static_cast<std::size_t>(next() % n); }

  Complex complex(double scale) { return {uniform(-scale, scale), uniform(-scale, scale)}; }

  StateVector state(double scale) {
    StateVector s;
    for (auto& z : s.psi) z = complex(scale);
    return s;
  }

 private:
  std::uint64_t state_;
};

// Single-path stationarity from the 2:1 start. With x = N_g, atom counting
// gives N_a = 2/3 - 2x and N_b = 1/3 - x; squaring the source balance gives
//   A2 path: eta^2 N_a^2 = N_b x
//   AB path: eta^2 N_a N_b = N_a x
// both quadratics in x. One root is the exhausted-reservoir point x = 1/3;
// the dark state is the smallest root in [0, 1/3].
inline long double single_path_oracle(long double eta, bool aa_path) {
  const long double third = 1.0L / 3.0L;
  const long double e2 = eta * eta;
  long double a, b, c;
  if (aa_path) {
    // e2 (2/3 - 2x)^2 - (1/3 - x) x
    a = 4.0L * e2 + 1.0L;
    b = -(8.0L * e2 / 3.0L + third);
    c = 4.0L * e2 / 9.0L;
  } else {
    // e2 (2/3 - 2x)(1/3 - x) - (2/3 - 2x) x
    a = 2.0L * e2 + 2.0L;
    b = -(4.0L * e2 / 3.0L + 2.0L / 3.0L);
    c = 2.0L * e2 / 9.0L;
  }
  auto p = [&](long double x) { return (a * x + b) * x + c; };
  auto dp = [&](long double x) { return 2.0L * a * x + b; };
  long double disc = b * b - 4.0L * a * c;
  if (disc < 0.0L) disc = 0.0L;
  const long double q = -0.5L * (b + (b < 0 ? -1.0L : 1.0L) * std::sqrt(disc));
  long double r1 = q / a;
  long double r2 = q != 0.0L ? c / q : r1;
  long double x = std::min(r1, r2);
  if (x < 0.0L) x = std::max(r1, r2);
  for (int it = 0; it < 50; ++it) {
    const long double d = dp(x);
    if (d == 0.0L) break;
    const long double step = p(x) / d;
    x -= step;
    if (std::abs(step) <= 1e-22L * std::max(1.0L, std::abs(x))) break;
  }
  return x;
}

struct DualOracle {
  long double n_a, n_b, n_g;
};

// Two-path stationarity with positive amplitudes:
//   eta1 a^2 = b g,  eta2 b = g,  a^2 + b^2 + 3 g^2 = 1.
// For a trial b the first two fix g and a; the norm grows monotonically in b,
// so bisection on b finds the unique solution.
inline DualOracle dual_path_oracle(long double eta1, long double eta2) {
  auto build = [&](long double b) {
    const long double g = eta2 * b;
    const long double a2 = b * g / eta1;
    return DualOracle{a2, b * b, g * g};
  };
  auto excess = [&](long double b) {
    const auto s = build(b);
    return s.n_a + s.n_b + 3.0L * s.n_g - 1.0L;
  };
  long double lo = 0.0L;
  long double hi = 1.0L;
  for (int it = 0; it < 400 && hi - lo > 0.0L; ++it) {
    const long double mid = 0.5L * (lo + hi);
    if (mid == lo || mid == hi) break;
    (excess(mid) > 0.0L ? hi : lo) = mid;
  }
  return build(0.5L * (lo + hi));
}

}  // namespace trimer::testing
