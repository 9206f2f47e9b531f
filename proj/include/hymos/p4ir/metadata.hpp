#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>

namespace hymos::p4ir {

/// Standard metadata keys. `fabric_dest` is reserved for translated card
/// programs: it names the destination line card of a fabric-bound packet.
enum class MetaKey : uint8_t {
  kIngressPort,
  kEgressSpec,
  kPcp,
  kIsInternal,
  kOrigIngressPort,
  kFabricDest,
};

inline constexpr std::size_t kMetaKeyCount = 6;

inline constexpr uint64_t kEgressUnset = 0xFFFF;
inline constexpr uint64_t kEgressDrop = 0xFFFE;
inline constexpr uint64_t kFabricDestUnset = 0xFF;

std::optional<MetaKey> meta_key_from_name(std::string_view name);
std::string_view meta_key_name(MetaKey key);
unsigned meta_key_width(MetaKey key);

struct Metadata {
  uint64_t ingress_port = 0;
  uint64_t egress_spec = kEgressUnset;
  uint64_t pcp = 0;
  uint64_t is_internal = 0;
  uint64_t orig_ingress_port = 0;
  uint64_t fabric_dest = kFabricDestUnset;

  uint64_t get(MetaKey key) const;
  /// Truncates `value` to the key's width.
  void set(MetaKey key, uint64_t value);

  bool operator==(const Metadata&) const = default;
};

}  // namespace hymos::p4ir
