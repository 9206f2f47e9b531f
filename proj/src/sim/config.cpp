#include "hymos/sim/config.hpp"

#include <set>
#include <string>

#include "hymos/error.hpp"
#include "hymos/io.hpp"
#include "hymos/p4ir/json_io.hpp"
#include "hymos/p4ir/values.hpp"

namespace hymos::sim {
namespace {

using nlohmann::json;

void check_keys(const json& node, const std::string& path, std::initializer_list<const char*> required,
                std::initializer_list<const char*> optional) {
  if (!node.is_object()) throw SchemaError(path, "expected an object");
  for (auto it = node.begin(); it != node.end(); ++it) {
    bool known = false;
    for (const auto* k : required) known = known || it.key() == k;
    for (const auto* k : optional) known = known || it.key() == k;
    if (!known) throw SchemaError(path + "." + it.key(), "unknown key");
  }
  for (const auto* k : required) {
    if (!node.contains(k)) throw SchemaError(path + "." + k, "missing required key");
  }
}

double number(const json& v, const std::string& path) {
  if (!v.is_number()) throw SchemaError(path, "expected a number");
  return v.get<double>();
}

uint64_t uint(const json& v, const std::string& path) {
  if (v.is_number_unsigned()) return v.get<uint64_t>();
  if (v.is_number_integer() && v.get<int64_t>() >= 0) return static_cast<uint64_t>(v.get<int64_t>());
  if (v.is_string()) {
    try {
      return p4ir::parse_value(v.get<std::string>());
    } catch (const std::exception&) {
    }
  }
  throw SchemaError(path, "expected a non-negative integer");
}

std::string string(const json& v, const std::string& path) {
  if (!v.is_string()) throw SchemaError(path, "expected a string");
  return v.get<std::string>();
}

// Either a bare value or a list of {<key>: value, weight}.
template <typename T, typename F>
std::vector<Weighted<T>> weighted(const json& v, const std::string& path, const char* key, F parse) {
  std::vector<Weighted<T>> out;
  if (!v.is_array()) {
    out.push_back({parse(v, path), 1});
    return out;
  }
  if (v.empty()) throw SchemaError(path, "expected a non-empty list");
  for (std::size_t i = 0; i < v.size(); ++i) {
    auto ip = path + "[" + std::to_string(i) + "]";
    if (v[i].is_object()) {
      check_keys(v[i], ip, {key}, {"weight"});
      double w = v[i].contains("weight") ? number(v[i]["weight"], ip + ".weight") : 1.0;
      out.push_back({parse(v[i][key], ip + "." + key), w});
    } else {
      out.push_back({parse(v[i], ip), 1});
    }
  }
  return out;
}

SourceGroup group_from_json(const json& g, const std::string& path) {
  check_keys(g, path, {"sources", "load", "packet_size", "destinations"}, {"process", "pcp", "vlan"});
  SourceGroup s;
  if (!g["sources"].is_array()) throw SchemaError(path + ".sources", "expected an array of ports");
  for (std::size_t i = 0; i < g["sources"].size(); ++i) {
    s.sources.push_back(static_cast<uint32_t>(uint(g["sources"][i], path + ".sources[" + std::to_string(i) + "]")));
  }
  s.load = number(g["load"], path + ".load");
  if (g.contains("process")) {
    auto p = string(g["process"], path + ".process");
    if (p == "cbr") {
      s.process = ArrivalProcess::kCbr;
    } else if (p == "bernoulli") {
      s.process = ArrivalProcess::kBernoulli;
    } else {
      throw SchemaError(path + ".process", "expected \"cbr\" or \"bernoulli\"");
    }
  }
  s.sizes = weighted<uint32_t>(g["packet_size"], path + ".packet_size", "bytes",
                               [](const json& v, const std::string& p) { return static_cast<uint32_t>(uint(v, p)); });
  s.destinations = weighted<Subnet>(g["destinations"], path + ".destinations", "subnet",
                                    [](const json& v, const std::string& p) {
                                      try {
                                        return parse_subnet(string(v, p));
                                      } catch (const ConfigError& e) {
                                        throw SchemaError(p, e.what());
                                      }
                                    });
  if (g.contains("pcp")) {
    s.pcp = weighted<uint8_t>(g["pcp"], path + ".pcp", "value", [](const json& v, const std::string& p) {
      auto x = uint(v, p);
      if (x > 7) throw SchemaError(p, "pcp must be in 0..7");
      return static_cast<uint8_t>(x);
    });
    s.vlan = true;
  }
  if (g.contains("vlan")) {
    if (!g["vlan"].is_boolean()) throw SchemaError(path + ".vlan", "expected a boolean");
    s.vlan = s.vlan || g["vlan"].get<bool>();
  }
  return s;
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& name) {
  std::filesystem::path p(name);
  return p.is_absolute() ? p : base / p;
}

}  // namespace

Subnet parse_subnet(std::string_view text) {
  Subnet s;
  auto slash = text.find('/');
  try {
    s.address = static_cast<uint32_t>(p4ir::parse_value(text.substr(0, slash)));
    s.prefix_len = slash == std::string_view::npos ? 32 : static_cast<unsigned>(std::stoul(std::string(text.substr(slash + 1))));
  } catch (const std::exception&) {
    throw ConfigError("malformed subnet '" + std::string(text) + "'");
  }
  if (s.prefix_len > 32) throw ConfigError("malformed subnet '" + std::string(text) + "'");
  return s;
}

ExperimentConfig experiment_from_json(const json& doc, const std::filesystem::path& base_dir) {
  check_keys(doc, "$", {"topology", "program", "entries", "traffic"},
             {"mode", "seed", "slot_ns", "pipeline_depth", "duration_slots", "warmup_slots", "max_drain_slots",
              "processing_ns", "voq_cap_bytes", "bandwidth_model", "priority_order", "internal_ether_type",
              "packet_bounds"});
  ExperimentConfig c;
  c.topology = xlate::load_topology(read_text_file(resolve(base_dir, string(doc["topology"], "$.topology"))));
  c.program = p4ir::load_program(read_text_file(resolve(base_dir, string(doc["program"], "$.program"))));
  c.entries = p4ir::load_entries(read_text_file(resolve(base_dir, string(doc["entries"], "$.entries"))), c.program);

  if (!doc["traffic"].is_array()) throw SchemaError("$.traffic", "expected an array of source groups");
  for (std::size_t i = 0; i < doc["traffic"].size(); ++i) {
    c.traffic.push_back(group_from_json(doc["traffic"][i], "$.traffic[" + std::to_string(i) + "]"));
  }
  if (doc.contains("mode")) {
    auto m = string(doc["mode"], "$.mode");
    if (m == "hymos") {
      c.mode = Mode::kHymos;
    } else if (m == "baseline") {
      c.mode = Mode::kBaseline;
    } else {
      throw SchemaError("$.mode", "expected \"hymos\" or \"baseline\"");
    }
  }
  if (doc.contains("seed")) c.seed = uint(doc["seed"], "$.seed");
  if (doc.contains("slot_ns")) c.slot_ns = number(doc["slot_ns"], "$.slot_ns");
  if (doc.contains("pipeline_depth")) c.pipeline_depth = static_cast<uint32_t>(uint(doc["pipeline_depth"], "$.pipeline_depth"));
  if (doc.contains("duration_slots")) c.duration_slots = uint(doc["duration_slots"], "$.duration_slots");
  c.warmup_slots = doc.contains("warmup_slots") ? uint(doc["warmup_slots"], "$.warmup_slots") : c.duration_slots / 10;
  c.max_drain_slots = doc.contains("max_drain_slots") ? uint(doc["max_drain_slots"], "$.max_drain_slots") : c.duration_slots;
  if (doc.contains("processing_ns")) c.processing_ns = number(doc["processing_ns"], "$.processing_ns");
  if (doc.contains("voq_cap_bytes") && !doc["voq_cap_bytes"].is_null()) c.voq_cap_bytes = uint(doc["voq_cap_bytes"], "$.voq_cap_bytes");
  if (doc.contains("bandwidth_model")) {
    try {
      c.bandwidth_model = switchcore::bandwidth_model_from_name(string(doc["bandwidth_model"], "$.bandwidth_model"));
    } catch (const ValidationError& e) {
      throw SchemaError("$.bandwidth_model", e.what());
    }
  }
  if (doc.contains("priority_order")) {
    const auto& o = doc["priority_order"];
    if (o.is_string() && o.get<std::string>() == "numeric") {
      c.priority_order = sched::kNumericOrder;
    } else if (o.is_string() && o.get<std::string>() == "ieee802.1p") {
      c.priority_order = sched::kIeee8021pOrder;
    } else if (o.is_array() && o.size() == sched::kPriorityCount) {
      std::set<uint64_t> seen;
      for (std::size_t i = 0; i < o.size(); ++i) {
        auto v = uint(o[i], "$.priority_order[" + std::to_string(i) + "]");
        if (v > 7 || !seen.insert(v).second) throw SchemaError("$.priority_order", "expected a permutation of 0..7");
        c.priority_order[i] = static_cast<uint8_t>(v);
      }
    } else {
      throw SchemaError("$.priority_order", "expected \"numeric\", \"ieee802.1p\" or a permutation of 0..7");
    }
  }
  if (doc.contains("internal_ether_type")) {
    auto v = uint(doc["internal_ether_type"], "$.internal_ether_type");
    if (v > 0xFFFF) throw SchemaError("$.internal_ether_type", "expected a 16-bit value");
    c.internal_ether_type = static_cast<uint16_t>(v);
  }
  if (doc.contains("packet_bounds")) {
    const auto& b = doc["packet_bounds"];
    check_keys(b, "$.packet_bounds", {"min", "max"}, {});
    c.min_packet_bytes = static_cast<uint32_t>(uint(b["min"], "$.packet_bounds.min"));
    c.max_packet_bytes = static_cast<uint32_t>(uint(b["max"], "$.packet_bounds.max"));
  }
  return c;
}

ExperimentConfig load_experiment(const std::filesystem::path& path) {
  auto text = read_text_file(path);
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw SchemaError("$", std::string("malformed JSON: ") + e.what());
  }
  return experiment_from_json(doc, path.parent_path());
}

void validate_experiment(const ExperimentConfig& cfg) {
  if (!(cfg.slot_ns > 0)) throw ConfigError("slot_ns must be positive");
  if (cfg.duration_slots == 0 || cfg.warmup_slots >= cfg.duration_slots) {
    throw ConfigError("need duration_slots > warmup_slots >= 0");
  }
  if (cfg.pipeline_depth > 64) throw ConfigError("pipeline_depth must be at most 64");
  if (cfg.processing_ns < 0) throw ConfigError("processing_ns must be non-negative");
  if (cfg.min_packet_bytes < 64 || cfg.min_packet_bytes > cfg.max_packet_bytes) {
    throw ConfigError("packet bounds must satisfy 64 <= min <= max");
  }
  if (cfg.voq_cap_bytes && *cfg.voq_cap_bytes == 0) throw ConfigError("voq_cap_bytes must be positive");
  try {
    xlate::validate_topology(cfg.topology);
  } catch (const ValidationError& e) {
    throw ConfigError(std::string("topology: ") + e.what());
  }
  xlate::PortMap ports(cfg.topology);
  std::set<uint32_t> used;
  for (std::size_t g = 0; g < cfg.traffic.size(); ++g) {
    const auto& grp = cfg.traffic[g];
    auto where = "traffic group " + std::to_string(g) + ": ";
    if (grp.sources.empty()) throw ConfigError(where + "no source ports");
    for (auto s : grp.sources) {
      if (!ports.locate(s)) throw ConfigError(where + "source port " + std::to_string(s) + " is not in the topology");
      if (!used.insert(s).second) throw ConfigError(where + "source port " + std::to_string(s) + " appears in two groups");
    }
    if (!(grp.load >= 0 && grp.load <= 1)) throw ConfigError(where + "load must be in [0, 1]");
    auto positive = [&](const auto& list, const char* what) {
      if (list.empty()) throw ConfigError(where + "empty " + what + " list");
      for (const auto& w : list) {
        if (!(w.weight > 0)) throw ConfigError(where + what + " weights must be positive");
      }
    };
    positive(grp.sizes, "packet size");
    positive(grp.destinations, "destination");
    if (!grp.pcp.empty()) positive(grp.pcp, "pcp");
    for (const auto& s : grp.sizes) {
      if (s.value < cfg.min_packet_bytes || s.value > cfg.max_packet_bytes) {
        throw ConfigError(where + "packet size " + std::to_string(s.value) + " outside [" +
                          std::to_string(cfg.min_packet_bytes) + ", " + std::to_string(cfg.max_packet_bytes) + "]");
      }
    }
  }
}

}  // namespace hymos::sim
