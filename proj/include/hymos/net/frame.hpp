#pragma once

#include <cstdint>
#include <optional>
#include <vector>

namespace hymos::net {

inline constexpr uint16_t kEtherTypeIpv4 = 0x0800;
inline constexpr uint16_t kEtherTypeVlan = 0x8100;
inline constexpr uint8_t kIpProtoUdp = 17;

inline constexpr std::size_t kEthernetBytes = 14;
inline constexpr std::size_t kVlanBytes = 4;
inline constexpr std::size_t kIpv4Bytes = 20;
inline constexpr std::size_t kUdpBytes = 8;

struct VlanTag {
  uint8_t pcp = 0;
  uint16_t vid = 1;
};

/// Ethernet / optional 802.1Q / IPv4 / UDP frame description.
struct FrameSpec {
  uint64_t dst_mac = 0;
  uint64_t src_mac = 0;
  std::optional<VlanTag> vlan;
  uint32_t src_ip = 0;
  uint32_t dst_ip = 0;
  uint8_t ttl = 64;
  uint16_t src_port = 0;
  uint16_t dst_port = 0;
  /// Bytes on the wire; headers are padded with zero payload up to this size
  /// when `materialize_payload` is set.
  std::size_t wire_size = 64;
};

std::size_t header_bytes(const FrameSpec& spec);

/// Serializes the header stack; appends zero payload iff `materialize_payload`.
std::vector<uint8_t> build_frame(const FrameSpec& spec, bool materialize_payload = false);

}  // namespace hymos::net
