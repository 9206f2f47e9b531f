#include "hymos/p4ir/program.hpp"

#include <algorithm>

#include "hymos/p4ir/metadata.hpp"
#include "hymos/p4ir/values.hpp"

namespace hymos::p4ir {
namespace {

template <typename T>
const T* find_named(const std::vector<T>& items, std::string_view name) {
  auto it = std::find_if(items.begin(), items.end(), [&](const T& x) { return x.name == name; });
  return it == items.end() ? nullptr : &*it;
}

constexpr std::array<std::string_view, kMetaKeyCount> kMetaNames = {
    "ingress_port", "egress_spec", "pcp", "is_internal", "orig_ingress_port", "fabric_dest"};
constexpr std::array<unsigned, kMetaKeyCount> kMetaWidths = {16, 16, 3, 1, 16, 8};

}  // namespace

const HeaderType* Program::find_header(std::string_view name) const { return find_named(headers, name); }
const Action* Program::find_action(std::string_view name) const { return find_named(actions, name); }
const Table* Program::find_table(std::string_view name) const { return find_named(tables, name); }
const ParserState* Program::find_state(std::string_view name) const { return find_named(parser.states, name); }

void collect_applied_tables(const Block& block, std::vector<std::string>& out) {
  for (const auto& stmt : block) {
    if (const auto* a = std::get_if<ApplyStmt>(&stmt.node)) {
      out.push_back(a->table);
    } else {
      const auto& branch = std::get<IfStmt>(stmt.node);
      collect_applied_tables(branch.then_block, out);
      collect_applied_tables(branch.else_block, out);
    }
  }
}

std::optional<MetaKey> meta_key_from_name(std::string_view name) {
  for (std::size_t i = 0; i < kMetaKeyCount; ++i) {
    if (kMetaNames[i] == name) return static_cast<MetaKey>(i);
  }
  return std::nullopt;
}

std::string_view meta_key_name(MetaKey key) { return kMetaNames[static_cast<std::size_t>(key)]; }
unsigned meta_key_width(MetaKey key) { return kMetaWidths[static_cast<std::size_t>(key)]; }

uint64_t Metadata::get(MetaKey key) const {
  switch (key) {
    case MetaKey::kIngressPort: return ingress_port;
    case MetaKey::kEgressSpec: return egress_spec;
    case MetaKey::kPcp: return pcp;
    case MetaKey::kIsInternal: return is_internal;
    case MetaKey::kOrigIngressPort: return orig_ingress_port;
    case MetaKey::kFabricDest: return fabric_dest;
  }
  return 0;
}

void Metadata::set(MetaKey key, uint64_t value) {
  value &= low_mask(meta_key_width(key));
  switch (key) {
    case MetaKey::kIngressPort: ingress_port = value; break;
    case MetaKey::kEgressSpec: egress_spec = value; break;
    case MetaKey::kPcp: pcp = value; break;
    case MetaKey::kIsInternal: is_internal = value; break;
    case MetaKey::kOrigIngressPort: orig_ingress_port = value; break;
    case MetaKey::kFabricDest: fabric_dest = value; break;
  }
}

}  // namespace hymos::p4ir
