#pragma once

#include <cstdint>
#include <vector>

#include "hymos/switchcore/pcie.hpp"
#include "hymos/xlate/topology.hpp"

namespace hymos::switchcore {

struct CardCapacity {
  uint32_t card = 0;
  double port_sum_gbps = 0;
  double link_gbps = 0;  // per direction
  double utilization = 0;
  bool nonblocking = true;
};

/// Per card: sum of port rates against the link's per-direction capacity.
/// Cards without ports are trivially non-blocking.
std::vector<CardCapacity> check_nonblocking(const xlate::Topology& topo,
                                            BandwidthModel model = BandwidthModel::kTablePerDirection);

/// N x N bytes one card may send another per slot: slot time at the slower
/// of the two links. Diagonal is 0.
std::vector<uint64_t> pair_slot_budgets(const xlate::Topology& topo, double slot_ns,
                                        BandwidthModel model = BandwidthModel::kTablePerDirection);

}  // namespace hymos::switchcore
