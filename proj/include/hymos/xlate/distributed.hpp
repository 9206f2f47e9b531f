#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "hymos/p4ir/interpreter.hpp"
#include "hymos/xlate/translate.hpp"

namespace hymos::xlate {

struct DistributedResult {
  p4ir::Disposition disposition;
  std::vector<uint8_t> bytes;
  uint32_t ingress_card = 0;
  uint32_t egress_card = 0;
  bool crossed_fabric = false;
  std::vector<uint8_t> fabric_frame;  // what travelled over the fabric, if anything
};

/// Functional (untimed) model of a translated switch: the ingress card's
/// program, then, for fabric-bound packets, the egress card's program on the
/// virtual port of the sending card.
class DistributedSwitch {
 public:
  DistributedSwitch(const TranslationResult& translation, const Topology& topo,
                    std::span<const p4ir::TableEntry> original_entries);

  /// Packets on unknown ports, and packets steered to a port the chosen card
  /// does not own, are dropped.
  DistributedResult process(std::span<const uint8_t> frame, uint32_t ingress_port) const;

  const p4ir::ProgramInstance& card(uint32_t c) const { return cards_.at(c); }
  const PortMap& ports() const noexcept { return ports_; }

 private:
  PortMap ports_;
  uint16_t ether_type_;
  std::vector<p4ir::ProgramInstance> cards_;
};

}  // namespace hymos::xlate
