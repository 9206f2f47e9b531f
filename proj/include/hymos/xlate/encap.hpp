#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "hymos/xlate/translate.hpp"

namespace hymos::xlate {

/// Locally administered MAC prefix; the low octet carries a global port id.
inline constexpr uint64_t kFabricMacPrefix = 0x020000000000ULL;
inline constexpr std::size_t kOuterHeaderBytes = 14;

/// 02:00:00:00:00:pp. Throws InvariantError for ports above 255.
uint64_t mac_encode(uint32_t port);
uint32_t mac_decode(uint64_t mac);

bool is_internal_frame(std::span<const uint8_t> frame, uint16_t ether_type = kDefaultInternalEtherType);

/// Prepends the outer Ethernet header. Throws InvariantError if the frame is
/// already internal or a port does not fit in one octet.
std::vector<uint8_t> encapsulate(std::span<const uint8_t> frame, uint32_t ingress_port, uint32_t egress_port,
                                 uint16_t ether_type = kDefaultInternalEtherType);

struct Decapsulated {
  std::vector<uint8_t> frame;
  uint32_t orig_ingress_port = 0;
  uint32_t egress_port = 0;
};

/// Strips the outer header. Throws InvariantError if the frame is truncated
/// or does not carry the internal EtherType.
Decapsulated decapsulate(std::span<const uint8_t> frame, uint16_t ether_type = kDefaultInternalEtherType);

}  // namespace hymos::xlate
