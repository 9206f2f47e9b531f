#pragma once

#include <cstdint>
#include <deque>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "hymos/p4ir/interpreter.hpp"
#include "hymos/sched/demand.hpp"
#include "hymos/sched/scheduler.hpp"
#include "hymos/xlate/topology.hpp"
#include "hymos/xlate/translate.hpp"

namespace hymos::switchcore {

inline constexpr double kUnsetTime = -1;

struct Packet {
  uint64_t id = 0;
  std::vector<uint8_t> bytes;  // header stack as carried now, fabric header included
  uint32_t wire_size = 0;      // bytes on the wire, fabric header excluded
  uint32_t offered_size = 0;   // wire size when it entered the switch
  uint32_t ingress_port = 0;
  uint32_t egress_port = 0;
  uint8_t pcp = 0;
  bool internal = false;  // carries the fabric header
  bool measured = false;
  double arrival_ns = 0;
  double ready_ns = 0;
  double departure_ns = kUnsetTime;

  uint32_t fabric_size() const;
};

struct Voq {
  std::deque<Packet> packets;
  uint64_t bytes = 0;
};

struct EgressPort {
  uint32_t global_id = 0;
  double rate_gbps = 10;
  std::deque<Packet> fifo;
  double free_at_ns = 0;

  double serialization_ns(uint32_t bytes) const { return bytes * 8.0 / rate_gbps; }
};

/// One line card: its program, 8(N-1) VOQs and one egress FIFO per port.
/// A single-card instance with N = 1 models the monolithic baseline.
class LineCard {
 public:
  LineCard(uint32_t id, std::size_t card_count, std::shared_ptr<const p4ir::ProgramInstance> program,
           std::span<const xlate::PortSpec> ports, std::optional<uint64_t> voq_cap_bytes = std::nullopt);

  uint32_t id() const noexcept { return id_; }
  std::size_t card_count() const noexcept { return card_count_; }
  const p4ir::ProgramInstance& program() const noexcept { return *program_; }
  std::optional<uint64_t> voq_cap_bytes() const noexcept { return voq_cap_; }

  std::size_t voq_count() const noexcept { return voqs_.size(); }
  /// Throws InvariantError for the card's own id or an out-of-range card.
  Voq& voq(uint32_t dest, uint8_t pcp);
  const Voq& voq(uint32_t dest, uint8_t pcp) const;
  uint64_t max_voq_bytes() const;

  std::size_t port_count() const noexcept { return ports_.size(); }
  EgressPort& port(std::size_t local) { return ports_.at(local); }
  const EgressPort& port(std::size_t local) const { return ports_.at(local); }
  std::optional<std::size_t> local_index(uint32_t global) const;

  /// Packets held in VOQs and egress FIFOs.
  std::size_t queued_packets() const;

 private:
  std::size_t voq_index(uint32_t dest, uint8_t pcp) const;

  uint32_t id_;
  std::size_t card_count_;
  std::shared_ptr<const p4ir::ProgramInstance> program_;
  std::optional<uint64_t> voq_cap_;
  std::vector<Voq> voqs_;
  std::vector<EgressPort> ports_;
};

enum class IngressOutcome { kLocal, kFabric, kDropped, kParseError, kTailDrop, kMisrouted };

/// Runs the card's program on `pkt` (arrived on a local port at `now`).
/// Local forwards go to the egress FIFO, fabric-bound packets to
/// VOQ(dest card, pcp). The packet is consumed either way.
IngressOutcome card_ingress(LineCard& card, Packet&& pkt, double now_ns, double processing_ns = 0);

struct TransferResult {
  std::size_t packets = 0;
  uint64_t bytes = 0;
  bool wasted = false;
};

/// Moves whole packets from the granted VOQ while the running total stays
/// within `budget` (the head always moves), strips the fabric header and
/// appends them to dst's egress FIFO ready at `ready_ns`. Throws
/// InvariantError if a packet decodes to a port dst does not own.
TransferResult fabric_transfer(const sched::Grant& grant, LineCard& src, LineCard& dst, uint64_t budget,
                               double ready_ns, uint16_t ether_type = xlate::kDefaultInternalEtherType);

/// Serializes FIFO heads whose transmission starts before `slot_end_ns`;
/// appends them (with departure_ns set) to `emitted`.
std::size_t card_egress_drain(LineCard& card, std::size_t local, double slot_end_ns, std::vector<Packet>& emitted);

/// D_p[i][j] = fabric bytes queued in VOQ(i -> j, p).
sched::DemandMatrixSet snapshot_demand(std::span<const LineCard> cards);

}  // namespace hymos::switchcore
