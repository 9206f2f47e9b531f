#pragma once

#include <array>
#include <cstdint>
#include <vector>

namespace hymos::sched {

inline constexpr std::size_t kPriorityCount = 8;

/// Eight priority-indexed N x N matrices of queued bytes; diagonals stay 0.
class DemandMatrixSet {
 public:
  DemandMatrixSet() = default;
  explicit DemandMatrixSet(std::size_t n);

  std::size_t size() const noexcept { return n_; }
  uint64_t at(std::size_t p, std::size_t i, std::size_t j) const { return m_[p][i * n_ + j]; }
  /// Throws InvariantError for diagonal writes of non-zero values.
  void set(std::size_t p, std::size_t i, std::size_t j, uint64_t bytes);
  void add(std::size_t p, std::size_t i, std::size_t j, uint64_t bytes) { set(p, i, j, at(p, i, j) + bytes); }
  const std::vector<uint64_t>& matrix(std::size_t p) const { return m_[p]; }
  bool empty() const;

  bool operator==(const DemandMatrixSet&) const = default;

 private:
  std::size_t n_ = 0;
  std::array<std::vector<uint64_t>, kPriorityCount> m_;
};

}  // namespace hymos::sched
