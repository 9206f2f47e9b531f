#include "hymos/net/frame.hpp"

namespace hymos::net {
namespace {

void put(std::vector<uint8_t>& out, uint64_t v, int bytes) {
  for (int i = bytes - 1; i >= 0; --i) out.push_back(static_cast<uint8_t>(v >> (8 * i)));
}

}  // namespace

std::size_t header_bytes(const FrameSpec& spec) {
  return kEthernetBytes + (spec.vlan ? kVlanBytes : 0) + kIpv4Bytes + kUdpBytes;
}

std::vector<uint8_t> build_frame(const FrameSpec& spec, bool materialize_payload) {
  std::vector<uint8_t> out;
  auto hdr = header_bytes(spec);
  out.reserve(materialize_payload && spec.wire_size > hdr ? spec.wire_size : hdr);
  put(out, spec.dst_mac, 6);
  put(out, spec.src_mac, 6);
  if (spec.vlan) {
    put(out, kEtherTypeVlan, 2);
    put(out, (uint64_t{spec.vlan->pcp} << 13) | (spec.vlan->vid & 0x0FFF), 2);
  }
  put(out, kEtherTypeIpv4, 2);
  std::size_t l2 = kEthernetBytes + (spec.vlan ? kVlanBytes : 0);
  uint64_t ip_len = spec.wire_size > l2 ? spec.wire_size - l2 : kIpv4Bytes + kUdpBytes;
  put(out, 0x45, 1);  // version 4, ihl 5
  put(out, 0, 1);
  put(out, ip_len & 0xFFFF, 2);
  put(out, 0, 2);
  put(out, 0x4000, 2);  // DF
  put(out, spec.ttl, 1);
  put(out, kIpProtoUdp, 1);
  put(out, 0, 2);
  put(out, spec.src_ip, 4);
  put(out, spec.dst_ip, 4);
  put(out, spec.src_port, 2);
  put(out, spec.dst_port, 2);
  put(out, (ip_len - kIpv4Bytes) & 0xFFFF, 2);
  put(out, 0, 2);
  if (materialize_payload && spec.wire_size > out.size()) out.resize(spec.wire_size, 0);
  return out;
}

}  // namespace hymos::net
