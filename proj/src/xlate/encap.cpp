#include "hymos/xlate/encap.hpp"

#include <string>

#include "hymos/error.hpp"

namespace hymos::xlate {
namespace {

void put_mac(std::vector<uint8_t>& out, uint64_t mac) {
  for (int shift = 40; shift >= 0; shift -= 8) out.push_back(static_cast<uint8_t>(mac >> shift));
}

uint64_t get_be(std::span<const uint8_t> b, std::size_t off, std::size_t n) {
  uint64_t v = 0;
  for (std::size_t i = 0; i < n; ++i) v = (v << 8) | b[off + i];
  return v;
}

}  // namespace

uint64_t mac_encode(uint32_t port) {
  if (port > kMaxGlobalPort) throw InvariantError("port " + std::to_string(port) + " does not fit in a fabric MAC");
  return kFabricMacPrefix | port;
}

uint32_t mac_decode(uint64_t mac) { return static_cast<uint32_t>(mac & 0xFF); }

bool is_internal_frame(std::span<const uint8_t> frame, uint16_t ether_type) {
  return frame.size() >= kOuterHeaderBytes && get_be(frame, 12, 2) == ether_type;
}

std::vector<uint8_t> encapsulate(std::span<const uint8_t> frame, uint32_t ingress_port, uint32_t egress_port,
                                 uint16_t ether_type) {
  if (is_internal_frame(frame, ether_type)) throw InvariantError("frame is already encapsulated");
  std::vector<uint8_t> out;
  out.reserve(frame.size() + kOuterHeaderBytes);
  put_mac(out, mac_encode(egress_port));
  put_mac(out, mac_encode(ingress_port));
  out.push_back(static_cast<uint8_t>(ether_type >> 8));
  out.push_back(static_cast<uint8_t>(ether_type));
  out.insert(out.end(), frame.begin(), frame.end());
  return out;
}

Decapsulated decapsulate(std::span<const uint8_t> frame, uint16_t ether_type) {
  if (frame.size() < kOuterHeaderBytes) {
    throw InvariantError("truncated fabric frame: " + std::to_string(frame.size()) + " bytes");
  }
  if (get_be(frame, 12, 2) != ether_type) throw InvariantError("frame does not carry the internal EtherType");
  Decapsulated d;
  d.egress_port = mac_decode(get_be(frame, 0, 6));
  d.orig_ingress_port = mac_decode(get_be(frame, 6, 6));
  d.frame.assign(frame.begin() + kOuterHeaderBytes, frame.end());
  return d;
}

}  // namespace hymos::xlate
