#include "hymos/switchcore/pcie.hpp"

#include <array>
#include <string>

#include "hymos/error.hpp"

namespace hymos::switchcore {
namespace {

constexpr std::array<unsigned, 5> kLanes = {1, 2, 4, 8, 16};
// Gen3 cells are printed as approximations; they are used as exact values.
constexpr std::array<std::array<double, 5>, 3> kTable = {{
    {0.5, 1, 2, 4, 8},
    {1, 2, 4, 8, 16},
    {2, 4, 8, 16, 32},
}};
// Per-lane, per-direction payload rate after 8b/10b (Gen1/2) or 128b/130b (Gen3).
constexpr std::array<double, 3> kPhysicalPerLane = {0.25, 0.5, 8.0 * 128.0 / 130.0 / 8.0};

std::size_t lane_index(unsigned lanes) {
  for (std::size_t i = 0; i < kLanes.size(); ++i) {
    if (kLanes[i] == lanes) return i;
  }
  throw ValidationError("unsupported PCI-e link width x" + std::to_string(lanes));
}

}  // namespace

double link_bandwidth(unsigned generation, unsigned lanes) {
  if (generation < 1 || generation > 3) throw ValidationError("unsupported PCI-e generation " + std::to_string(generation));
  return kTable[generation - 1][lane_index(lanes)];
}

double PcieLink::bandwidth_gbytes() const { return link_bandwidth(generation, lanes); }

double PcieLink::per_direction_gbytes(BandwidthModel model) const {
  switch (model) {
    case BandwidthModel::kTablePerDirection: return bandwidth_gbytes();
    case BandwidthModel::kTableAggregate: return bandwidth_gbytes() / 2;
    case BandwidthModel::kPhysical:
      bandwidth_gbytes();  // range check
      return kPhysicalPerLane[generation - 1] * lanes;
  }
  return bandwidth_gbytes();
}

BandwidthModel bandwidth_model_from_name(std::string_view name) {
  if (name == "table") return BandwidthModel::kTablePerDirection;
  if (name == "table_aggregate") return BandwidthModel::kTableAggregate;
  if (name == "physical") return BandwidthModel::kPhysical;
  throw ValidationError("unknown bandwidth model '" + std::string(name) + "'");
}

std::string_view bandwidth_model_name(BandwidthModel m) {
  switch (m) {
    case BandwidthModel::kTablePerDirection: return "table";
    case BandwidthModel::kTableAggregate: return "table_aggregate";
    case BandwidthModel::kPhysical: return "physical";
  }
  return "table";
}

}  // namespace hymos::switchcore
