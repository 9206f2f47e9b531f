#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hymos/sched/demand.hpp"
#include "hymos/sim/config.hpp"

namespace hymos::sim {

struct PriorityStats {
  uint64_t packets = 0;
  double mean_latency_us = 0;
};

/// Per-run audit counters; all zero in a correct run.
struct InvariantCounters {
  uint64_t conservation = 0;    // slots where in != out + dropped + queued
  uint64_t matching = 0;        // grants reusing an input or output in a slot
  uint64_t zero_grants = 0;     // grants on pairs without snapshot demand
  uint64_t priority = 0;        // grants on pairs with higher-priority snapshot demand
  uint64_t reordering = 0;      // departures out of order within (in port, out port, pcp)
  uint64_t leaked_internal = 0; // emitted frames still carrying the fabric header
  uint64_t latency_floor = 0;   // latency below the egress serialization time
  bool ok() const {
    return conservation == 0 && matching == 0 && zero_grants == 0 && priority == 0 && reordering == 0 &&
           leaked_internal == 0 && latency_floor == 0;
  }
};

/// Statistics cover packets arriving in [warmup, duration). Throughput counts
/// those that left by the end of `duration`; latency counts every measured
/// packet that left before the drain limit.
struct StatsReport {
  std::string param;
  double offered_gbps = 0;
  double delivered_gbps = 0;
  double mean_lat_us = 0;
  double p50_us = 0;
  double p99_us = 0;
  uint64_t wasted_grants = 0;
  uint64_t drops = 0;
  uint64_t max_voq_bytes = 0;
  std::array<PriorityStats, sched::kPriorityCount> per_priority{};

  uint64_t packets_offered = 0;
  uint64_t packets_delivered = 0;
  uint64_t latency_samples = 0;
  uint64_t grants = 0;
  uint64_t in_flight_at_end = 0;
  InvariantCounters invariants;
  /// Largest VOQ occupancy (bytes, any card) after each slot's arrivals, drain excluded.
  std::vector<uint64_t> max_voq_trace;
};

/// Runs cfg in its configured mode. Throws ConfigError / ValidationError /
/// TranslateError before the first slot if the setup is inconsistent.
StatsReport run(const ExperimentConfig& cfg);
/// Same traffic through the untranslated program on one logical card.
StatsReport run_baseline(const ExperimentConfig& cfg);

enum class SweepParam { kLoad, kPacketSize };
SweepParam sweep_param_from_name(std::string_view name);
std::string_view sweep_param_name(SweepParam p);

/// Copy of cfg with every traffic group's load or packet size set to `value`.
ExperimentConfig with_param(const ExperimentConfig& cfg, SweepParam param, double value);

struct SweepRow {
  double value = 0;
  StatsReport hymos;
  std::optional<StatsReport> baseline;
  /// hymos / baseline mean latency; empty if no baseline or no baseline samples.
  std::optional<double> norm_latency;
};

/// One row per value, in input order. Every point uses the configured seed,
/// so rows differ only in the swept parameter. `jobs` = 0 picks the hardware
/// concurrency. Throws ConfigError for empty or non-monotone value lists.
std::vector<SweepRow> sweep(const ExperimentConfig& cfg, SweepParam param, std::span<const double> values,
                            bool with_baseline, unsigned jobs = 0);

/// Compact representation of a swept value ("0.2", "800").
std::string format_param(double value);

}  // namespace hymos::sim
