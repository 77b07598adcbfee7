#pragma once

// Deterministic randomness utilities.
//
// All randomness in the library flows through SplitMix64, a named 64-bit
// generator with a documented algorithm:
//
//   state += 0x9E3779B97F4A7C15                  (golden-ratio increment)
//   z = state
//   z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//   z = (z ^ (z >> 27)) * 0x94D049BB133111EB
//   output = z ^ (z >> 31)
//
// The output function is a bijective mixer, so the generator is effectively
// counter-based: draw k of seed s equals mix(s + (k+1)*gamma). Child streams
// for runs, games, and draws are derived with the same mixer (derive_seed
// below), which makes every computation reproducible across platforms and
// thread schedules.

#include <cstdint>
#include <initializer_list>
#include <stdexcept>
#include <vector>
#include <cmath>

namespace symgame {

constexpr std::uint64_t kSplitMix64Gamma = 0x9E3779B97F4A7C15ULL;

// SplitMix64 output mixer (a bijection on 64-bit integers).
constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() { return mix64(state_ += kSplitMix64Gamma); }

  // Uniform on [0, 1) with 53 random bits.
  double next_double() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // Uniform on [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

  // Uniform integer in [0, n).
  std::uint64_t next_below(std::uint64_t n) {
    // Multiply-shift; bias is < 2^-53 per draw, irrelevant at our sample sizes.
    return static_cast<std::uint64_t>(next_double() * static_cast<double>(n));
  }

 private:
  std::uint64_t state_;
};

// Deterministic, order-sensitive child-seed derivation:
//   h <- mix64(h ^ mix64(part + gamma))   for each path component.
// The +gamma offset keeps the all-zero path away from mix64's fixed point 0.
inline std::uint64_t derive_seed(std::uint64_t base,
                                 std::initializer_list<std::uint64_t> path) {
  std::uint64_t h = base;
  for (std::uint64_t part : path) {
    h = mix64(h ^ mix64(part + kSplitMix64Gamma));
  }
  return h;
}

// Uniform sample from the probability simplex (flat Dirichlet): draw unit-rate
// exponentials and normalize.
inline std::vector<double> random_simplex(int dim, SplitMix64& rng) {
  if (dim < 1) throw std::invalid_argument("random_simplex: dim must be >= 1");
  std::vector<double> x(static_cast<std::size_t>(dim));
  double sum = 0.0;
  for (auto& xi : x) {
    // -log(1-u) with u in [0,1) stays finite.
    xi = -std::log1p(-rng.next_double());
    sum += xi;
  }
  if (sum <= 0.0) {
    // All draws hit exactly zero; fall back to the barycenter.
    for (auto& xi : x) xi = 1.0 / dim;
    return x;
  }
  for (auto& xi : x) xi /= sum;
  return x;
}

}  // namespace symgame
