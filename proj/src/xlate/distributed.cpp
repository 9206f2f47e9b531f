#include "hymos/xlate/distributed.hpp"

#include "hymos/p4ir/metadata.hpp"

namespace hymos::xlate {

DistributedSwitch::DistributedSwitch(const TranslationResult& translation, const Topology& topo,
                                     std::span<const p4ir::TableEntry> original_entries)
    : ports_(topo), ether_type_(translation.internal_ether_type) {
  for (const auto& cp : translation.cards) {
    auto entries = translation.card_entries(cp.card, original_entries);
    cards_.emplace_back(cp.program, entries);
  }
}

DistributedResult DistributedSwitch::process(std::span<const uint8_t> frame, uint32_t ingress_port) const {
  DistributedResult out;
  out.disposition = p4ir::Disposition::drop();
  auto loc = ports_.locate(ingress_port);
  if (!loc) return out;
  out.ingress_card = out.egress_card = loc->card;

  auto first = cards_[loc->card].execute(frame, ingress_port);
  if (!first.disposition.is_forward()) return out;

  const auto& owner = [&](uint32_t port) { return ports_.locate(port); };
  if (first.meta.fabric_dest == p4ir::kFabricDestUnset) {
    auto dst = owner(first.disposition.port);
    if (!dst || dst->card != loc->card) return out;
    out.disposition = first.disposition;
    out.bytes = std::move(first.bytes);
    return out;
  }

  auto dest_card = static_cast<uint32_t>(first.meta.fabric_dest);
  if (dest_card >= cards_.size()) return out;
  out.crossed_fabric = true;
  out.egress_card = dest_card;
  out.fabric_frame = first.bytes;
  auto second = cards_[dest_card].execute(first.bytes, virtual_port(loc->card));
  if (!second.disposition.is_forward()) return out;
  auto dst = owner(second.disposition.port);
  if (!dst || dst->card != dest_card) return out;
  out.disposition = second.disposition;
  out.bytes = std::move(second.bytes);
  return out;
}

}  // namespace hymos::xlate
