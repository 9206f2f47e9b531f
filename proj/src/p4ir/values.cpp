#include "hymos/p4ir/values.hpp"

#include <charconv>
#include <cstdio>
#include <stdexcept>
#include <vector>

namespace hymos::p4ir {
namespace {

uint64_t parse_int(std::string_view s, int base) {
  if (s.empty()) throw std::invalid_argument("empty number");
  uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v, base);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    throw std::invalid_argument("bad number '" + std::string(s) + "'");
  }
  return v;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= s.size(); ++i) {
    if (i == s.size() || s[i] == sep) {
      out.push_back(s.substr(start, i - start));
      start = i + 1;
    }
  }
  return out;
}

}  // namespace

uint64_t parse_value(std::string_view text) {
  if (text.size() > 2 && text[0] == '0' && (text[1] == 'x' || text[1] == 'X')) {
    return parse_int(text.substr(2), 16);
  }
  if (text.find(':') != std::string_view::npos) {
    auto parts = split(text, ':');
    if (parts.size() != 6) throw std::invalid_argument("bad MAC '" + std::string(text) + "'");
    uint64_t v = 0;
    for (auto p : parts) {
      uint64_t octet = parse_int(p, 16);
      if (p.size() > 2 || octet > 0xFF) throw std::invalid_argument("bad MAC octet");
      v = (v << 8) | octet;
    }
    return v;
  }
  if (text.find('.') != std::string_view::npos) {
    auto parts = split(text, '.');
    if (parts.size() != 4) throw std::invalid_argument("bad IPv4 '" + std::string(text) + "'");
    uint64_t v = 0;
    for (auto p : parts) {
      uint64_t octet = parse_int(p, 10);
      if (octet > 255) throw std::invalid_argument("bad IPv4 octet");
      v = (v << 8) | octet;
    }
    return v;
  }
  return parse_int(text, 10);
}

std::string format_ipv4(uint32_t addr) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%u.%u.%u.%u", addr >> 24, (addr >> 16) & 0xFF,
                (addr >> 8) & 0xFF, addr & 0xFF);
  return buf;
}

std::string format_mac(uint64_t mac) {
  char buf[18];
  std::snprintf(buf, sizeof buf, "%02x:%02x:%02x:%02x:%02x:%02x",
                static_cast<unsigned>((mac >> 40) & 0xFF), static_cast<unsigned>((mac >> 32) & 0xFF),
                static_cast<unsigned>((mac >> 24) & 0xFF), static_cast<unsigned>((mac >> 16) & 0xFF),
                static_cast<unsigned>((mac >> 8) & 0xFF), static_cast<unsigned>(mac & 0xFF));
  return buf;
}

std::string format_hex(uint64_t v) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "0x%llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace hymos::p4ir
