#pragma once

// Probability-simplex helpers: exact Euclidean projection (sort-based) and
// validation.

#include <algorithm>
#include <cstddef>
#include <span>
#include <vector>

namespace symgame {

// Euclidean projection of v onto the probability simplex.
// Sort-based exact algorithm: w_i = max(v_i - theta, 0) with theta chosen from
// the sorted prefix sums so that sum(w) = 1.
inline std::vector<double> project_to_simplex(std::span<const double> v) {
  const std::size_t n = v.size();
  std::vector<double> sorted(v.begin(), v.end());
  std::sort(sorted.begin(), sorted.end(), std::greater<double>());
  double running_sum = 0.0;
  double theta = sorted.empty() ? 0.0 : sorted[0] - 1.0;
  for (std::size_t k = 0; k < n; ++k) {
    running_sum += sorted[k];
    const double candidate = (running_sum - 1.0) / static_cast<double>(k + 1);
    if (k + 1 == n || sorted[k + 1] <= candidate) {
      theta = candidate;
      break;
    }
  }
  std::vector<double> w(n);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    w[i] = std::max(v[i] - theta, 0.0);
    total += w[i];
  }
  // Guard against accumulated rounding; total is 1 up to a few ulp.
  if (total > 0.0) {
    for (auto& wi : w) wi /= total;
  }
  return w;
}

inline bool is_simplex(std::span<const double> x, double tol = 1e-9) {
  double sum = 0.0;
  for (double xi : x) {
    if (!(xi >= -tol)) return false;
    sum += xi;
  }
  return std::abs(sum - 1.0) <= tol;
}

}  // namespace symgame
