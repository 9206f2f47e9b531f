#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "hymos/sim/engine.hpp"

namespace hymos::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitInput = 1,     // unreadable, invalid or untranslatable input
  kExitUsage = 2,     // bad flags
  kExitCapacity = 3,  // check found a blocking card
};

inline constexpr const char* kCsvHeader =
    "param,offered_gbps,delivered_gbps,mean_lat_us,p50_us,p99_us,wasted_grants,drops,max_voq_bytes";

/// Header plus one line per row; norm_latency is appended iff `with_baseline`.
std::string format_csv(std::span<const sim::SweepRow> rows, bool with_baseline);

/// Entry point for the `hymos` tool. `env_seed` stands in for $HYMOS_SEED.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
            const char* env_seed = nullptr);

}  // namespace hymos::cli
