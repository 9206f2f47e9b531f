#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "hymos/sched/demand.hpp"
#include "hymos/sched/matching.hpp"

namespace hymos::sched {

struct Grant {
  uint32_t in = 0;
  uint32_t out = 0;
  uint8_t priority = 0;
  uint64_t byte_budget = 0;
  bool operator==(const Grant&) const = default;
};

struct GrantSet {
  uint64_t slot = 0;
  std::vector<Grant> grants;
};

using PriorityOrder = std::array<uint8_t, kPriorityCount>;

/// Highest first: 7, 6, ..., 0.
inline constexpr PriorityOrder kNumericOrder = {7, 6, 5, 4, 3, 2, 1, 0};
/// 802.1p traffic-type ordering, where PCP 1 (background) ranks below PCP 0.
inline constexpr PriorityOrder kIeee8021pOrder = {7, 6, 5, 4, 3, 0, 2, 1};

struct ScheduleOptions {
  PriorityOrder order = kNumericOrder;
  /// N x N per-pair byte budgets; empty means unlimited.
  std::vector<uint64_t> pair_budget;
};

/// Greedy per-priority maximum-weight matching over unmarked cards.
GrantSet schedule(const DemandMatrixSet& d, const MatchingSet& ms, const ScheduleOptions& opts = {});

struct GrantCheck {
  std::size_t matching_violations = 0;  // an input or output granted twice
  std::size_t zero_grants = 0;          // granted pair had no demand at that priority
  std::size_t priority_violations = 0;  // pair also had demand at a higher-ranked priority
  bool ok() const { return matching_violations == 0 && zero_grants == 0 && priority_violations == 0; }
};

/// Independent per-slot audit of a GrantSet against the snapshot it came from.
GrantCheck check_grants(const GrantSet& g, const DemandMatrixSet& snapshot, const PriorityOrder& order = kNumericOrder);

}  // namespace hymos::sched
