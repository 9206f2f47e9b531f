#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>

namespace hymos::p4ir {

/// Parses "1234", "0x88B5", "10.1.2.3" or "02:00:00:00:00:0c".
/// Throws std::invalid_argument on anything else.
uint64_t parse_value(std::string_view text);

std::string format_ipv4(uint32_t addr);
std::string format_mac(uint64_t mac);
std::string format_hex(uint64_t v);

/// Mask with the low `width` bits set; width may be 64.
constexpr uint64_t low_mask(unsigned width) {
  return width >= 64 ? ~uint64_t{0} : ((uint64_t{1} << width) - 1);
}

}  // namespace hymos::p4ir
