#pragma once

// Hungarian algorithm (potentials, O(n^3)) used as an independent oracle for
// maximum-weight assignment. Weights are negated to reuse the min-cost form.

#include <cstdint>
#include <limits>
#include <vector>

namespace hymos::testing {

/// Maximum total weight of a perfect assignment on an n x n row-major matrix.
inline int64_t hungarian_max_weight(const std::vector<int64_t>& w, std::size_t n) {
  if (n == 0) return 0;
  const int64_t inf = std::numeric_limits<int64_t>::max() / 4;
  auto cost = [&](std::size_t i, std::size_t j) { return -w[(i - 1) * n + (j - 1)]; };
  std::vector<int64_t> u(n + 1, 0), v(n + 1, 0);
  std::vector<std::size_t> p(n + 1, 0), way(n + 1, 0);
  for (std::size_t i = 1; i <= n; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::vector<int64_t> minv(n + 1, inf);
    std::vector<bool> used(n + 1, false);
    do {
      used[j0] = true;
      std::size_t i0 = p[j0], j1 = 0;
      int64_t delta = inf;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        int64_t cur = cost(i0, j) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  int64_t total = 0;
  for (std::size_t j = 1; j <= n; ++j) total += w[(p[j] - 1) * n + (j - 1)];
  return total;
}

}  // namespace hymos::testing
