#include "hymos/switchcore/capacity.hpp"

#include <algorithm>
#include <cmath>

namespace hymos::switchcore {

std::vector<CardCapacity> check_nonblocking(const xlate::Topology& topo, BandwidthModel model) {
  std::vector<CardCapacity> out;
  for (const auto& c : topo.cards) {
    CardCapacity cap;
    cap.card = c.id;
    for (const auto& p : c.ports) cap.port_sum_gbps += p.rate_gbps;
    cap.link_gbps = c.link.per_direction_gbytes(model) * 8;
    cap.utilization = cap.port_sum_gbps / cap.link_gbps;
    cap.nonblocking = cap.port_sum_gbps <= cap.link_gbps;
    out.push_back(cap);
  }
  return out;
}

std::vector<uint64_t> pair_slot_budgets(const xlate::Topology& topo, double slot_ns, BandwidthModel model) {
  const auto n = topo.card_count();
  std::vector<uint64_t> b(n * n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      // GB/s is bytes per ns.
      double rate = std::min(topo.cards[i].link.per_direction_gbytes(model), topo.cards[j].link.per_direction_gbytes(model));
      b[i * n + j] = static_cast<uint64_t>(std::floor(rate * slot_ns + 1e-9));
    }
  }
  return b;
}

}  // namespace hymos::switchcore
