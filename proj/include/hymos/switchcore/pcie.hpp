#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

namespace hymos::switchcore {

/// How the printed PCI-e bandwidth table maps to usable capacity per direction.
enum class BandwidthModel {
  kTablePerDirection,  // table value is the capacity of each direction (default)
  kTableAggregate,     // table value covers both directions; each gets half
  kPhysical,           // line-coding adjusted per-lane rate, per direction
};

BandwidthModel bandwidth_model_from_name(std::string_view name);
std::string_view bandwidth_model_name(BandwidthModel m);

struct PcieLink {
  unsigned generation = 3;
  unsigned lanes = 8;

  /// Table value in GB/s. Throws ValidationError for unsupported combinations.
  double bandwidth_gbytes() const;
  /// Usable GB/s in one direction under `model`.
  double per_direction_gbytes(BandwidthModel model = BandwidthModel::kTablePerDirection) const;
};

/// PCI Express evolution table: generation 1..3, lanes x1/x2/x4/x8/x16, GB/s.
double link_bandwidth(unsigned generation, unsigned lanes);

}  // namespace hymos::switchcore
