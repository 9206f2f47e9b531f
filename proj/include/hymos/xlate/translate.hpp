#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hymos/error.hpp"
#include "hymos/p4ir/program.hpp"
#include "hymos/xlate/topology.hpp"

namespace hymos::xlate {

/// Names beginning with this prefix belong to the translator.
inline constexpr std::string_view kReservedPrefix = "hymos_";
/// Local-experimental EtherType used for fabric frames.
inline constexpr uint16_t kDefaultInternalEtherType = 0x88B5;

inline constexpr std::string_view kOuterHeader = "hymos_outer";
inline constexpr std::string_view kIngressMapTable = "hymos_ingress_map";
inline constexpr std::string_view kFabricLookupTable = "hymos_fabric_lookup";
inline constexpr std::string_view kEgressPrologueTable = "hymos_egress_prologue";

class TranslateError : public Error {
 public:
  using Error::Error;
};

struct TranslateOptions {
  uint16_t internal_ether_type = kDefaultInternalEtherType;
};

struct CardProgram {
  uint32_t card = 0;
  p4ir::Program program;
  std::vector<p4ir::TableEntry> synthesized_entries;
};

struct TranslationResult {
  std::vector<CardProgram> cards;
  uint16_t internal_ether_type = kDefaultInternalEtherType;

  /// Original entries followed by the card's synthesized entries.
  std::vector<p4ir::TableEntry> card_entries(uint32_t card, std::span<const p4ir::TableEntry> original) const;
};

/// Produces one program per line card. Original entries are shared by all
/// cards unchanged; the synthesized entries bind global ports to cards.
/// Throws ValidationError for an invalid program or topology and
/// TranslateError for reserved names or entries naming unknown ports.
TranslationResult translate(const p4ir::Program& program, std::span<const p4ir::TableEntry> entries,
                            const Topology& topo, const TranslateOptions& options = {});

}  // namespace hymos::xlate
