#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "hymos/p4ir/program.hpp"
#include "hymos/sched/scheduler.hpp"
#include "hymos/switchcore/pcie.hpp"
#include "hymos/xlate/topology.hpp"

namespace hymos::sim {

enum class Mode { kHymos, kBaseline };
enum class ArrivalProcess { kCbr, kBernoulli };

struct Subnet {
  uint32_t address = 0;
  unsigned prefix_len = 32;
};

template <typename T>
struct Weighted {
  T value{};
  double weight = 1;
};

/// Traffic shared by a set of source ports.
struct SourceGroup {
  std::vector<uint32_t> sources;
  ArrivalProcess process = ArrivalProcess::kCbr;
  double load = 0;  // fraction of the port rate
  std::vector<Weighted<uint32_t>> sizes;
  std::vector<Weighted<Subnet>> destinations;
  std::vector<Weighted<uint8_t>> pcp;  // empty: untagged, priority 0
  bool vlan = false;                   // tag frames even without a pcp mix
};

struct ExperimentConfig {
  xlate::Topology topology;
  p4ir::Program program;
  std::vector<p4ir::TableEntry> entries;
  std::vector<SourceGroup> traffic;

  Mode mode = Mode::kHymos;
  uint64_t seed = 1;
  double slot_ns = 1200;
  uint32_t pipeline_depth = 1;
  uint64_t duration_slots = 10000;
  uint64_t warmup_slots = 1000;
  /// Slots allowed after `duration_slots` for queues to empty (no new arrivals).
  uint64_t max_drain_slots = 10000;
  double processing_ns = 0;
  std::optional<uint64_t> voq_cap_bytes;
  switchcore::BandwidthModel bandwidth_model = switchcore::BandwidthModel::kTablePerDirection;
  sched::PriorityOrder priority_order = sched::kNumericOrder;
  uint16_t internal_ether_type = 0x88B5;
  uint32_t min_packet_bytes = 64;
  uint32_t max_packet_bytes = 1518;
};

/// Parses an experiment document. Relative file names are resolved against
/// `base_dir`. Throws SchemaError / ConfigError.
ExperimentConfig experiment_from_json(const nlohmann::json& doc, const std::filesystem::path& base_dir);
ExperimentConfig load_experiment(const std::filesystem::path& path);

/// Throws ConfigError for inconsistent settings (ports absent from the
/// topology, loads outside [0, 1], bad windows, sizes out of bounds, ...).
void validate_experiment(const ExperimentConfig& cfg);

Subnet parse_subnet(std::string_view text);

}  // namespace hymos::sim
