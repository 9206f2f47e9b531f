#include "hymos/sim/traffic.hpp"

#include <algorithm>
#include <limits>

#include "hymos/net/frame.hpp"

namespace hymos::sim {
namespace {

template <typename T>
std::vector<double> cumulative(const std::vector<Weighted<T>>& items) {
  std::vector<double> c;
  double total = 0;
  for (const auto& i : items) c.push_back(total += i.weight);
  for (auto& x : c) x /= total;
  return c;
}

}  // namespace

PortSource::PortSource(const SourceGroup& group, uint32_t port, double rate_gbps, uint64_t seed)
    : group_(&group), port_(port), rate_gbps_(rate_gbps) {
  std::seed_seq seq{static_cast<uint32_t>(seed), static_cast<uint32_t>(seed >> 32), port, 0x5eedu};
  rng_.seed(seq);
  size_cdf_ = cumulative(group.sizes);
  dest_cdf_ = cumulative(group.destinations);
  if (!group.pcp.empty()) pcp_cdf_ = cumulative(group.pcp);
  if (group.load <= 0) {
    next_ns_ = std::numeric_limits<double>::infinity();
    return;
  }
  next_size_ = group.sizes[pick(group.sizes, size_cdf_)].value;
  // Random phase so sources sharing a sink do not start in lockstep.
  next_ns_ = group.process == ArrivalProcess::kCbr ? uniform() * cbr_gap_ns(next_size_) : 0;
}

double PortSource::uniform() { return static_cast<double>(rng_() >> 11) * 0x1.0p-53; }

template <typename T>
std::size_t PortSource::pick(const std::vector<Weighted<T>>& items, const std::vector<double>& cdf) {
  if (items.empty()) {
    rng_();
    return 0;
  }
  double u = uniform();
  auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
  return std::min<std::size_t>(static_cast<std::size_t>(it - cdf.begin()), items.size() - 1);
}

double PortSource::cbr_gap_ns(uint32_t bytes) const { return bytes * 8.0 / (rate_gbps_ * group_->load); }

Arrival PortSource::make(double t, bool build) {
  // Fixed number of draws per call so Bernoulli cells stay aligned across loads.
  Arrival a;
  a.time_ns = t;
  a.port = port_;
  a.size = next_size_;
  a.destination = pick(group_->destinations, dest_cdf_);
  uint64_t host_draw = rng_();
  std::size_t pcp_index = pick(group_->pcp, pcp_cdf_);
  const auto& subnet = group_->destinations[a.destination].value;
  uint32_t host_bits = 32 - subnet.prefix_len;
  uint32_t host_mask = host_bits == 32 ? 0xFFFFFFFFu : (uint32_t{1} << host_bits) - 1;
  a.dst_ip = (subnet.address & ~host_mask) | (static_cast<uint32_t>(host_draw) & host_mask);
  a.pcp = pcp_cdf_.empty() ? 0 : group_->pcp[pcp_index].value;
  if (!build) return a;

  net::FrameSpec f;
  f.dst_mac = 0x02aa00000000ULL | port_;
  f.src_mac = 0x02cc00000000ULL | port_;
  if (group_->vlan) f.vlan = net::VlanTag{a.pcp, 1};
  f.src_ip = 0xC0A80000u | port_;  // 192.168.0.<port>
  f.dst_ip = a.dst_ip;
  f.src_port = static_cast<uint16_t>(1024 + port_);
  f.dst_port = 5001;
  f.wire_size = a.size;
  a.frame = net::build_frame(f);
  return a;
}

void PortSource::generate_until(double until_ns, std::vector<Arrival>& out) {
  while (next_ns_ < until_ns) {
    double t = next_ns_;
    if (group_->process == ArrivalProcess::kCbr) {
      double gap = cbr_gap_ns(next_size_);
      out.push_back(make(t, true));
      next_ns_ = t + gap;
    } else {
      // One cell per serialization time; each cell carries a packet with probability `load`.
      // Every cell consumes the same draws whether or not it carries a packet,
      // so with a shared seed a higher load adds packets without moving others.
      double cell = next_size_ * 8.0 / rate_gbps_;
      bool hit = uniform() < group_->load;
      auto a = make(t, hit);
      if (hit) out.push_back(std::move(a));
      next_ns_ = t + cell;
    }
    next_size_ = group_->sizes[pick(group_->sizes, size_cdf_)].value;
  }
}

}  // namespace hymos::sim
