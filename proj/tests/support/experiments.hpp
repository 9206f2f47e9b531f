#pragma once

#include "hymos/sim/config.hpp"
#include "support/test_data.hpp"

namespace hymos::testing {

/// A bundled experiment with its duration scaled down for unit tests.
inline sim::ExperimentConfig experiment(const std::string& name, uint64_t duration = 0, uint64_t warmup = 0) {
  auto cfg = sim::load_experiment(data_path(name));
  if (duration) {
    cfg.duration_slots = duration;
    cfg.warmup_slots = warmup ? warmup : duration / 10;
    cfg.max_drain_slots = duration;
  }
  return cfg;
}

}  // namespace hymos::testing
