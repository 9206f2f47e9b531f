#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "hymos/switchcore/pcie.hpp"

namespace hymos::xlate {

inline constexpr std::size_t kMinCards = 2;
inline constexpr std::size_t kMaxCards = 8;
/// Global port ids are carried in one MAC octet.
inline constexpr uint32_t kMaxGlobalPort = 255;
/// Fabric arrivals at a card are seen on the virtual port of the sending card.
inline constexpr uint32_t kVirtualPortBase = 256;

constexpr uint32_t virtual_port(uint32_t card) { return kVirtualPortBase + card; }

struct PortSpec {
  uint32_t global_id = 0;
  double rate_gbps = 10;
};

struct LineCardSpec {
  uint32_t id = 0;
  switchcore::PcieLink link;
  std::vector<PortSpec> ports;
};

struct Topology {
  std::vector<LineCardSpec> cards;

  std::size_t card_count() const { return cards.size(); }
  std::vector<uint32_t> all_ports() const;
};

/// Parses `{cards:[{id, link:{gen,lanes}, ports:[{global_id, rate_gbps}]}]}`.
Topology load_topology(std::string_view text);
Topology topology_from_json(const nlohmann::json& doc);
nlohmann::ordered_json topology_to_json(const Topology& topo);

/// Throws ValidationError: card ids must be 0..N-1 in order, 2 <= N <= 8,
/// global ports unique and <= 255, links valid. With `require_ports` every
/// card must also own at least one port (needed for switching, not for
/// capacity checks).
void validate_topology(const Topology& topo, bool require_ports = true);

/// Bijection global port <-> (card, local index), derived from a Topology.
class PortMap {
 public:
  struct Location {
    uint32_t card = 0;
    uint32_t local = 0;
    bool operator==(const Location&) const = default;
  };

  explicit PortMap(const Topology& topo);

  std::optional<Location> locate(uint32_t global) const;
  uint32_t global(uint32_t card, uint32_t local) const { return by_card_.at(card).at(local); }
  std::size_t card_count() const { return by_card_.size(); }
  const std::vector<uint32_t>& ports_of(uint32_t card) const { return by_card_.at(card); }

 private:
  std::array<std::optional<Location>, kMaxGlobalPort + 1> by_global_{};
  std::vector<std::vector<uint32_t>> by_card_;
};

}  // namespace hymos::xlate
