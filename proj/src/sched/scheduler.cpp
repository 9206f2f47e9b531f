#include "hymos/sched/scheduler.hpp"

#include <limits>

#include "hymos/error.hpp"

namespace hymos::sched {

GrantSet schedule(const DemandMatrixSet& d, const MatchingSet& ms, const ScheduleOptions& opts) {
  const std::size_t n = d.size();
  if (!opts.pair_budget.empty() && opts.pair_budget.size() != n * n) {
    throw ValidationError("pair budget matrix is not n x n");
  }
  GrantSet out;
  std::array<bool, kMaxMatchingSize> in_marked{}, out_marked{};
  std::size_t marked = 0;
  std::vector<uint32_t> avail_in, avail_out;
  for (auto p : opts.order) {
    if (marked == n) break;
    const auto& m = d.matrix(p);
    avail_in.clear();
    avail_out.clear();
    for (uint32_t i = 0; i < n; ++i) {
      if (!in_marked[i]) avail_in.push_back(i);
      if (!out_marked[i]) avail_out.push_back(i);
    }
    bool any = false;
    for (auto i : avail_in) {
      for (auto j : avail_out) any = any || m[i * n + j] > 0;
    }
    if (!any) continue;
    auto match = max_weight_matching(m, n, avail_in, avail_out, ms);
    for (const auto& e : match.edges) {
      in_marked[e.in] = out_marked[e.out] = true;
      ++marked;
      uint64_t budget = opts.pair_budget.empty() ? std::numeric_limits<uint64_t>::max() : opts.pair_budget[e.in * n + e.out];
      out.grants.push_back({e.in, e.out, p, budget});
    }
  }
  return out;
}

GrantCheck check_grants(const GrantSet& g, const DemandMatrixSet& snapshot, const PriorityOrder& order) {
  GrantCheck c;
  const std::size_t n = snapshot.size();
  std::vector<int> ins(n, 0), outs(n, 0);
  std::array<std::size_t, kPriorityCount> rank{};
  for (std::size_t r = 0; r < order.size(); ++r) rank[order[r]] = r;
  for (const auto& gr : g.grants) {
    if (gr.in >= n || gr.out >= n || ++ins[gr.in] > 1 || ++outs[gr.out] > 1) {
      ++c.matching_violations;
      continue;
    }
    if (snapshot.at(gr.priority, gr.in, gr.out) == 0) ++c.zero_grants;
    for (std::size_t q = 0; q < kPriorityCount; ++q) {
      if (rank[q] < rank[gr.priority] && snapshot.at(q, gr.in, gr.out) > 0) {
        ++c.priority_violations;
        break;
      }
    }
  }
  return c;
}

}  // namespace hymos::sched
