#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <utility>
#include <vector>

namespace hymos::sched {

inline constexpr std::size_t kMaxMatchingSize = 8;

/// All k! permutations for every k in [1, N], lexicographic, built once.
class MatchingSet {
 public:
  explicit MatchingSet(std::size_t n);

  std::size_t max_size() const noexcept { return n_; }
  /// Permutations of size k, each stored as k consecutive bytes.
  std::size_t count(std::size_t k) const { return perms_.at(k).size() / k; }
  std::span<const uint8_t> permutation(std::size_t k, std::size_t index) const {
    return {perms_.at(k).data() + index * k, k};
  }

 private:
  std::size_t n_;
  std::vector<std::vector<uint8_t>> perms_;  // indexed by k
};

/// Memoized per N. Throws ValidationError unless 1 <= n <= 8.
std::shared_ptr<const MatchingSet> enumerate_matchings(std::size_t n);

struct Edge {
  uint32_t in = 0;
  uint32_t out = 0;
  bool operator==(const Edge&) const = default;
};

struct MatchResult {
  std::vector<Edge> edges;  // zero-weight edges removed
  uint64_t weight = 0;
};

/// Best permutation over the available rows and columns of the n x n
/// row-major matrix `w`. First maximum in lexicographic order wins. Throws
/// ValidationError on dimension mismatch.
MatchResult max_weight_matching(std::span<const uint64_t> w, std::size_t n, std::span<const uint32_t> avail_in,
                                std::span<const uint32_t> avail_out, const MatchingSet& ms);

}  // namespace hymos::sched
