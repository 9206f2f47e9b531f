#include "hymos/xlate/topology.hpp"

#include <set>
#include <string>

#include "hymos/error.hpp"

namespace hymos::xlate {
namespace {

using nlohmann::json;

void only_keys(const json& node, const std::string& path, std::initializer_list<const char*> keys) {
  if (!node.is_object()) throw SchemaError(path, "expected an object");
  for (auto it = node.begin(); it != node.end(); ++it) {
    bool known = false;
    for (const auto* k : keys) known = known || it.key() == k;
    if (!known) throw SchemaError(path + "." + it.key(), "unknown key");
  }
  for (const auto* k : keys) {
    if (!node.contains(k)) throw SchemaError(path + "." + k, "missing required key");
  }
}

uint32_t uint_at(const json& node, const char* key, const std::string& path) {
  const auto& v = node.at(key);
  if (!v.is_number_integer() || v.get<int64_t>() < 0) throw SchemaError(path + "." + key, "expected a non-negative integer");
  return static_cast<uint32_t>(v.get<int64_t>());
}

}  // namespace

std::vector<uint32_t> Topology::all_ports() const {
  std::vector<uint32_t> out;
  for (const auto& c : cards) {
    for (const auto& p : c.ports) out.push_back(p.global_id);
  }
  return out;
}

Topology topology_from_json(const json& doc) {
  only_keys(doc, "$", {"cards"});
  if (!doc["cards"].is_array()) throw SchemaError("$.cards", "expected an array");
  Topology t;
  for (std::size_t i = 0; i < doc["cards"].size(); ++i) {
    const auto& c = doc["cards"][i];
    auto cp = "$.cards[" + std::to_string(i) + "]";
    only_keys(c, cp, {"id", "link", "ports"});
    LineCardSpec card;
    card.id = uint_at(c, "id", cp);
    only_keys(c["link"], cp + ".link", {"gen", "lanes"});
    card.link.generation = uint_at(c["link"], "gen", cp + ".link");
    card.link.lanes = uint_at(c["link"], "lanes", cp + ".link");
    if (!c["ports"].is_array()) throw SchemaError(cp + ".ports", "expected an array");
    for (std::size_t k = 0; k < c["ports"].size(); ++k) {
      const auto& p = c["ports"][k];
      auto pp = cp + ".ports[" + std::to_string(k) + "]";
      only_keys(p, pp, {"global_id", "rate_gbps"});
      if (!p["rate_gbps"].is_number() || p["rate_gbps"].get<double>() <= 0) {
        throw SchemaError(pp + ".rate_gbps", "expected a positive number");
      }
      card.ports.push_back({uint_at(p, "global_id", pp), p["rate_gbps"].get<double>()});
    }
    t.cards.push_back(std::move(card));
  }
  return t;
}

Topology load_topology(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw SchemaError("$", std::string("malformed JSON: ") + e.what());
  }
  return topology_from_json(doc);
}

nlohmann::ordered_json topology_to_json(const Topology& topo) {
  nlohmann::ordered_json cards = nlohmann::ordered_json::array();
  for (const auto& c : topo.cards) {
    nlohmann::ordered_json ports = nlohmann::ordered_json::array();
    for (const auto& p : c.ports) ports.push_back({{"global_id", p.global_id}, {"rate_gbps", p.rate_gbps}});
    cards.push_back({{"id", c.id}, {"link", {{"gen", c.link.generation}, {"lanes", c.link.lanes}}}, {"ports", ports}});
  }
  return {{"cards", cards}};
}

void validate_topology(const Topology& topo, bool require_ports) {
  auto n = topo.card_count();
  if (n < kMinCards || n > kMaxCards) {
    throw ValidationError("topology must have between 2 and 8 line cards, got " + std::to_string(n));
  }
  std::set<uint32_t> seen;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& c = topo.cards[i];
    if (c.id != i) throw ValidationError("card ids must be 0..N-1 in order; card #" + std::to_string(i) + " has id " + std::to_string(c.id));
    c.link.bandwidth_gbytes();
    if (require_ports && c.ports.empty()) throw ValidationError("card " + std::to_string(c.id) + " has no ports");
    for (const auto& p : c.ports) {
      if (p.global_id > kMaxGlobalPort) throw ValidationError("global port " + std::to_string(p.global_id) + " exceeds 255");
      if (!seen.insert(p.global_id).second) throw ValidationError("duplicate global port " + std::to_string(p.global_id));
      if (!(p.rate_gbps > 0)) throw ValidationError("port " + std::to_string(p.global_id) + " has a non-positive rate");
    }
  }
}

PortMap::PortMap(const Topology& topo) {
  by_card_.resize(topo.card_count());
  for (std::size_t c = 0; c < topo.cards.size(); ++c) {
    for (std::size_t k = 0; k < topo.cards[c].ports.size(); ++k) {
      auto g = topo.cards[c].ports[k].global_id;
      if (g > kMaxGlobalPort) throw ValidationError("global port " + std::to_string(g) + " exceeds 255");
      by_global_[g] = Location{static_cast<uint32_t>(c), static_cast<uint32_t>(k)};
      by_card_[c].push_back(g);
    }
  }
}

std::optional<PortMap::Location> PortMap::locate(uint32_t global) const {
  if (global > kMaxGlobalPort) return std::nullopt;
  return by_global_[global];
}

}  // namespace hymos::xlate
