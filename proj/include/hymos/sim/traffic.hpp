#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "hymos/sim/config.hpp"

namespace hymos::sim {

struct Arrival {
  double time_ns = 0;
  uint32_t port = 0;
  uint32_t size = 0;
  uint8_t pcp = 0;
  std::size_t destination = 0;  // index into the group's destination list
  uint32_t dst_ip = 0;
  std::vector<uint8_t> frame;   // header stack only
};

/// Deterministic generator for one source port, seeded from (seed, port).
class PortSource {
 public:
  PortSource(const SourceGroup& group, uint32_t port, double rate_gbps, uint64_t seed);

  /// Appends every arrival with time < `until_ns`, in time order.
  void generate_until(double until_ns, std::vector<Arrival>& out);

  /// Time between packet starts under CBR for a packet of `bytes`.
  double cbr_gap_ns(uint32_t bytes) const;

 private:
  double uniform();  // [0, 1)
  template <typename T>
  std::size_t pick(const std::vector<Weighted<T>>& items, const std::vector<double>& cumulative);
  Arrival make(double t, bool build);

  const SourceGroup* group_;
  uint32_t port_;
  double rate_gbps_;
  std::mt19937_64 rng_;
  std::vector<double> size_cdf_, dest_cdf_, pcp_cdf_;
  double next_ns_ = 0;
  uint32_t next_size_ = 0;
};

}  // namespace hymos::sim
