#include "hymos/sched/matching.hpp"

#include <algorithm>
#include <array>
#include <mutex>
#include <numeric>
#include <string>

#include "hymos/error.hpp"

namespace hymos::sched {

MatchingSet::MatchingSet(std::size_t n) : n_(n) {
  if (n < 1 || n > kMaxMatchingSize) throw ValidationError("matching size must be in [1, 8], got " + std::to_string(n));
  perms_.resize(n + 1);
  for (std::size_t k = 1; k <= n; ++k) {
    std::vector<uint8_t> p(k);
    std::iota(p.begin(), p.end(), uint8_t{0});
    do {
      perms_[k].insert(perms_[k].end(), p.begin(), p.end());
    } while (std::next_permutation(p.begin(), p.end()));
  }
}

std::shared_ptr<const MatchingSet> enumerate_matchings(std::size_t n) {
  if (n < 1 || n > kMaxMatchingSize) throw ValidationError("matching size must be in [1, 8], got " + std::to_string(n));
  static std::mutex mu;
  static std::array<std::shared_ptr<const MatchingSet>, kMaxMatchingSize + 1> cache;
  std::lock_guard lock(mu);
  if (!cache[n]) cache[n] = std::make_shared<const MatchingSet>(n);
  return cache[n];
}

MatchResult max_weight_matching(std::span<const uint64_t> w, std::size_t n, std::span<const uint32_t> avail_in,
                                std::span<const uint32_t> avail_out, const MatchingSet& ms) {
  if (w.size() != n * n) throw ValidationError("weight matrix is not n x n");
  if (avail_in.size() != avail_out.size()) throw ValidationError("available input and output sets differ in size");
  const std::size_t k = avail_in.size();
  if (k > ms.max_size()) throw ValidationError("matching set too small for " + std::to_string(k) + " cards");
  for (std::size_t r = 0; r < k; ++r) {
    if (avail_in[r] >= n || avail_out[r] >= n) throw ValidationError("available card index out of range");
  }
  MatchResult best;
  if (k == 0) return best;

  // Restrict to the available submatrix once so the inner loop is a gather.
  std::array<uint64_t, kMaxMatchingSize * kMaxMatchingSize> sub{};
  for (std::size_t r = 0; r < k; ++r) {
    for (std::size_t c = 0; c < k; ++c) sub[r * k + c] = w[avail_in[r] * n + avail_out[c]];
  }
  std::size_t best_index = 0;
  uint64_t best_weight = 0;
  const std::size_t count = ms.count(k);
  for (std::size_t idx = 0; idx < count; ++idx) {
    auto perm = ms.permutation(k, idx);
    uint64_t total = 0;
    for (std::size_t r = 0; r < k; ++r) total += sub[r * k + perm[r]];
    if (total > best_weight) {
      best_weight = total;
      best_index = idx;
    }
  }
  if (best_weight == 0) return best;
  best.weight = best_weight;
  auto perm = ms.permutation(k, best_index);
  for (std::size_t r = 0; r < k; ++r) {
    if (sub[r * k + perm[r]] > 0) best.edges.push_back({avail_in[r], avail_out[perm[r]]});
  }
  return best;
}

}  // namespace hymos::sched
