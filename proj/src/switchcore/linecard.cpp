#include "hymos/switchcore/linecard.hpp"

#include <algorithm>
#include <string>

#include "hymos/error.hpp"
#include "hymos/p4ir/metadata.hpp"
#include "hymos/xlate/encap.hpp"

namespace hymos::switchcore {

uint32_t Packet::fabric_size() const {
  return wire_size + (internal ? static_cast<uint32_t>(xlate::kOuterHeaderBytes) : 0);
}

LineCard::LineCard(uint32_t id, std::size_t card_count, std::shared_ptr<const p4ir::ProgramInstance> program,
                   std::span<const xlate::PortSpec> ports, std::optional<uint64_t> voq_cap_bytes)
    : id_(id), card_count_(card_count), program_(std::move(program)), voq_cap_(voq_cap_bytes) {
  if (card_count == 0 || id >= card_count) throw InvariantError("line card id out of range");
  voqs_.resize(sched::kPriorityCount * (card_count - 1));
  for (const auto& p : ports) ports_.push_back(EgressPort{p.global_id, p.rate_gbps, {}, 0});
}

std::size_t LineCard::voq_index(uint32_t dest, uint8_t pcp) const {
  if (dest == id_ || dest >= card_count_ || pcp >= sched::kPriorityCount) {
    throw InvariantError("no VOQ from card " + std::to_string(id_) + " to card " + std::to_string(dest) + " pcp " +
                         std::to_string(pcp));
  }
  std::size_t d = dest < id_ ? dest : dest - 1;
  return d * sched::kPriorityCount + pcp;
}

Voq& LineCard::voq(uint32_t dest, uint8_t pcp) { return voqs_[voq_index(dest, pcp)]; }
const Voq& LineCard::voq(uint32_t dest, uint8_t pcp) const { return voqs_[voq_index(dest, pcp)]; }

uint64_t LineCard::max_voq_bytes() const {
  uint64_t m = 0;
  for (const auto& v : voqs_) m = std::max(m, v.bytes);
  return m;
}

std::optional<std::size_t> LineCard::local_index(uint32_t global) const {
  for (std::size_t i = 0; i < ports_.size(); ++i) {
    if (ports_[i].global_id == global) return i;
  }
  return std::nullopt;
}

std::size_t LineCard::queued_packets() const {
  std::size_t n = 0;
  for (const auto& v : voqs_) n += v.packets.size();
  for (const auto& p : ports_) n += p.fifo.size();
  return n;
}

IngressOutcome card_ingress(LineCard& card, Packet&& pkt, double now_ns, double processing_ns) {
  auto r = card.program().execute(pkt.bytes, pkt.ingress_port);
  if (r.parse_failed) return IngressOutcome::kParseError;
  if (!r.disposition.is_forward()) return IngressOutcome::kDropped;

  // Header rewrites (tag push/pop, fabric header) change the carried size.
  auto before = static_cast<int64_t>(pkt.bytes.size());
  pkt.bytes = std::move(r.bytes);
  pkt.pcp = static_cast<uint8_t>(r.meta.pcp);
  pkt.egress_port = r.disposition.port;
  pkt.ready_ns = now_ns + processing_ns;

  if (r.meta.fabric_dest != p4ir::kFabricDestUnset) {
    pkt.internal = true;
    auto delta = static_cast<int64_t>(pkt.bytes.size()) - before - static_cast<int64_t>(xlate::kOuterHeaderBytes);
    pkt.wire_size = static_cast<uint32_t>(static_cast<int64_t>(pkt.wire_size) + delta);
    auto dest = static_cast<uint32_t>(r.meta.fabric_dest);
    if (dest >= card.card_count() || dest == card.id()) return IngressOutcome::kMisrouted;
    auto& q = card.voq(dest, pkt.pcp);
    auto size = pkt.fabric_size();
    if (card.voq_cap_bytes() && q.bytes + size > *card.voq_cap_bytes()) return IngressOutcome::kTailDrop;
    q.bytes += size;
    q.packets.push_back(std::move(pkt));
    return IngressOutcome::kFabric;
  }

  pkt.wire_size = static_cast<uint32_t>(static_cast<int64_t>(pkt.wire_size) + static_cast<int64_t>(pkt.bytes.size()) - before);
  auto local = card.local_index(pkt.egress_port);
  if (!local) return IngressOutcome::kMisrouted;
  card.port(*local).fifo.push_back(std::move(pkt));
  return IngressOutcome::kLocal;
}

TransferResult fabric_transfer(const sched::Grant& grant, LineCard& src, LineCard& dst, uint64_t budget,
                               double ready_ns, uint16_t ether_type) {
  if (grant.in != src.id() || grant.out != dst.id()) throw InvariantError("grant does not name these cards");
  TransferResult res;
  auto& q = src.voq(dst.id(), grant.priority);
  if (q.packets.empty()) {
    res.wasted = true;
    return res;
  }
  while (!q.packets.empty()) {
    auto size = q.packets.front().fabric_size();
    if (res.packets > 0 && res.bytes + size > budget) break;
    Packet pkt = std::move(q.packets.front());
    q.packets.pop_front();
    q.bytes -= size;
    res.bytes += size;
    ++res.packets;

    auto d = xlate::decapsulate(pkt.bytes, ether_type);
    auto local = dst.local_index(d.egress_port);
    if (!local) {
      throw InvariantError("packet for port " + std::to_string(d.egress_port) + " delivered to card " +
                           std::to_string(dst.id()));
    }
    pkt.bytes = std::move(d.frame);
    pkt.internal = false;
    pkt.ready_ns = ready_ns;
    dst.port(*local).fifo.push_back(std::move(pkt));
  }
  return res;
}

std::size_t card_egress_drain(LineCard& card, std::size_t local, double slot_end_ns, std::vector<Packet>& emitted) {
  auto& port = card.port(local);
  std::size_t n = 0;
  while (!port.fifo.empty()) {
    auto& head = port.fifo.front();
    double start = std::max(head.ready_ns, port.free_at_ns);
    if (start >= slot_end_ns) break;
    port.free_at_ns = start + port.serialization_ns(head.wire_size);
    head.departure_ns = port.free_at_ns;
    emitted.push_back(std::move(head));
    port.fifo.pop_front();
    ++n;
  }
  return n;
}

sched::DemandMatrixSet snapshot_demand(std::span<const LineCard> cards) {
  sched::DemandMatrixSet d(cards.size());
  for (uint32_t i = 0; i < cards.size(); ++i) {
    for (uint32_t j = 0; j < cards.size(); ++j) {
      if (i == j) continue;
      for (uint8_t p = 0; p < sched::kPriorityCount; ++p) d.set(p, i, j, cards[i].voq(j, p).bytes);
    }
  }
  return d;
}

}  // namespace hymos::switchcore
