#include "hymos/p4ir/json_io.hpp"

#include <algorithm>
#include <initializer_list>
#include <stdexcept>
#include <string>

#include "hymos/error.hpp"
#include "hymos/p4ir/values.hpp"

namespace hymos::p4ir {
namespace {

using nlohmann::json;
using nlohmann::ordered_json;

std::string at(const std::string& path, std::string_view key) { return path + "." + std::string(key); }
std::string at(const std::string& path, std::size_t index) {
  return path + "[" + std::to_string(index) + "]";
}

// Rejects keys outside `allowed` and checks that every key in `required` exists.
void check_keys(const json& node, const std::string& path, std::initializer_list<std::string_view> required,
                std::initializer_list<std::string_view> optional = {}) {
  if (!node.is_object()) throw SchemaError(path, "expected an object");
  for (auto it = node.begin(); it != node.end(); ++it) {
    const auto& key = it.key();
    bool known = std::find(required.begin(), required.end(), key) != required.end() ||
                 std::find(optional.begin(), optional.end(), key) != optional.end();
    if (!known) throw SchemaError(at(path, key), "unknown key");
  }
  for (auto key : required) {
    if (!node.contains(std::string(key))) throw SchemaError(at(path, key), "missing required key");
  }
}

const json& array_at(const json& node, std::string_view key, const std::string& path) {
  const auto& v = node.at(std::string(key));
  if (!v.is_array()) throw SchemaError(at(path, key), "expected an array");
  return v;
}

std::string string_of(const json& v, const std::string& path) {
  if (!v.is_string()) throw SchemaError(path, "expected a string");
  return v.get<std::string>();
}

uint64_t value_of(const json& v, const std::string& path) {
  if (v.is_number_unsigned()) return v.get<uint64_t>();
  if (v.is_number_integer()) {
    auto i = v.get<int64_t>();
    if (i < 0) throw SchemaError(path, "negative value");
    return static_cast<uint64_t>(i);
  }
  if (v.is_string()) {
    try {
      return parse_value(v.get<std::string>());
    } catch (const std::invalid_argument& e) {
      throw SchemaError(path, e.what());
    }
  }
  throw SchemaError(path, "expected a number or value string");
}

unsigned width_of(const json& v, const std::string& path) {
  if (!v.is_number_unsigned() && !v.is_number_integer()) throw SchemaError(path, "expected an integer");
  auto w = v.get<int64_t>();
  if (w < 0 || w > 4096) throw SchemaError(path, "width out of range");
  return static_cast<unsigned>(w);
}

bool optional_key(const json& node, std::string_view key) { return node.contains(std::string(key)); }

Operand operand_from(const json& node, const std::string& path) {
  if (!node.is_object()) return Operand::constant(value_of(node, path));
  check_keys(node, path, {}, {"const", "param", "field", "add", "and", "or"});
  int bases = static_cast<int>(optional_key(node, "const")) + static_cast<int>(optional_key(node, "param")) +
              static_cast<int>(optional_key(node, "field"));
  if (bases != 1) throw SchemaError(path, "operand needs exactly one of const/param/field");
  Operand op;
  if (optional_key(node, "const")) {
    op = Operand::constant(value_of(node["const"], at(path, "const")));
  } else if (optional_key(node, "param")) {
    op = Operand::param(string_of(node["param"], at(path, "param")));
  } else {
    op = Operand::field(string_of(node["field"], at(path, "field")));
  }
  if (optional_key(node, "add")) {
    if (!node["add"].is_number_integer()) throw SchemaError(at(path, "add"), "expected an integer");
    op.add = node["add"].get<int64_t>();
  }
  if (optional_key(node, "and")) op.and_mask = value_of(node["and"], at(path, "and"));
  if (optional_key(node, "or")) op.or_mask = value_of(node["or"], at(path, "or"));
  return op;
}

ordered_json operand_to(const Operand& op) {
  ordered_json j;
  switch (op.kind) {
    case Operand::Kind::kConst: j["const"] = op.value; break;
    case Operand::Kind::kParam: j["param"] = op.name; break;
    case Operand::Kind::kField: j["field"] = op.name; break;
  }
  if (op.add != 0) j["add"] = op.add;
  if (op.and_mask) j["and"] = format_hex(*op.and_mask);
  if (op.or_mask) j["or"] = format_hex(*op.or_mask);
  return j;
}

HeaderType header_from(const json& node, const std::string& path) {
  check_keys(node, path, {"name", "fields"});
  HeaderType h;
  h.name = string_of(node["name"], at(path, "name"));
  const auto& fields = array_at(node, "fields", path);
  for (std::size_t i = 0; i < fields.size(); ++i) {
    auto fp = at(at(path, "fields"), i);
    check_keys(fields[i], fp, {"name", "width"});
    h.fields.push_back({string_of(fields[i]["name"], at(fp, "name")), width_of(fields[i]["width"], at(fp, "width"))});
  }
  return h;
}

ParserState state_from(const json& node, const std::string& path) {
  check_keys(node, path, {"name"}, {"extract", "set", "select", "cases", "default"});
  ParserState s;
  s.name = string_of(node["name"], at(path, "name"));
  if (optional_key(node, "extract")) s.extract = string_of(node["extract"], at(path, "extract"));
  if (optional_key(node, "set")) {
    const auto& sets = array_at(node, "set", path);
    for (std::size_t i = 0; i < sets.size(); ++i) {
      auto sp = at(at(path, "set"), i);
      check_keys(sets[i], sp, {"meta", "value"});
      s.assignments.push_back({string_of(sets[i]["meta"], at(sp, "meta")), operand_from(sets[i]["value"], at(sp, "value"))});
    }
  }
  if (optional_key(node, "select")) {
    const auto& sel = node["select"];
    auto sp = at(path, "select");
    check_keys(sel, sp, {}, {"field", "lookahead"});
    ParserSelect ps;
    if (optional_key(sel, "field")) ps.field = string_of(sel["field"], at(sp, "field"));
    if (optional_key(sel, "lookahead")) {
      auto lp = at(sp, "lookahead");
      check_keys(sel["lookahead"], lp, {"offset", "width"});
      ps.lookahead = ParserSelect::Lookahead{width_of(sel["lookahead"]["offset"], at(lp, "offset")),
                                             width_of(sel["lookahead"]["width"], at(lp, "width"))};
    }
    if (ps.field.has_value() == ps.lookahead.has_value()) {
      throw SchemaError(sp, "select needs exactly one of field/lookahead");
    }
    s.select = ps;
  }
  if (optional_key(node, "cases")) {
    const auto& cases = array_at(node, "cases", path);
    for (std::size_t i = 0; i < cases.size(); ++i) {
      auto cp = at(at(path, "cases"), i);
      check_keys(cases[i], cp, {"value", "next"});
      s.cases.push_back({value_of(cases[i]["value"], at(cp, "value")), string_of(cases[i]["next"], at(cp, "next"))});
    }
  }
  if (optional_key(node, "default")) s.default_next = string_of(node["default"], at(path, "default"));
  return s;
}

Primitive primitive_from(const json& node, const std::string& path) {
  if (!node.is_object() || !node.contains("op")) throw SchemaError(at(path, "op"), "missing required key");
  auto op = string_of(node["op"], at(path, "op"));
  Primitive p;
  if (op == "set_field") {
    check_keys(node, path, {"op", "field", "value"});
    p.op = PrimitiveOp::kSetField;
    p.target = string_of(node["field"], at(path, "field"));
    p.value = operand_from(node["value"], at(path, "value"));
  } else if (op == "set_egress") {
    check_keys(node, path, {"op", "value"});
    p.op = PrimitiveOp::kSetEgress;
    p.value = operand_from(node["value"], at(path, "value"));
  } else if (op == "set_meta") {
    check_keys(node, path, {"op", "meta", "value"});
    p.op = PrimitiveOp::kSetMeta;
    p.target = string_of(node["meta"], at(path, "meta"));
    p.value = operand_from(node["value"], at(path, "value"));
  } else if (op == "push_header" || op == "pop_header") {
    check_keys(node, path, {"op", "header"});
    p.op = op == "push_header" ? PrimitiveOp::kPushHeader : PrimitiveOp::kPopHeader;
    p.target = string_of(node["header"], at(path, "header"));
  } else if (op == "drop" || op == "no_op") {
    check_keys(node, path, {"op"});
    p.op = op == "drop" ? PrimitiveOp::kDrop : PrimitiveOp::kNoOp;
  } else {
    throw SchemaError(at(path, "op"), "unknown primitive '" + op + "'");
  }
  return p;
}

ordered_json primitive_to(const Primitive& p) {
  ordered_json j;
  switch (p.op) {
    case PrimitiveOp::kSetField:
      j["op"] = "set_field";
      j["field"] = p.target;
      j["value"] = operand_to(p.value);
      break;
    case PrimitiveOp::kSetEgress:
      j["op"] = "set_egress";
      j["value"] = operand_to(p.value);
      break;
    case PrimitiveOp::kSetMeta:
      j["op"] = "set_meta";
      j["meta"] = p.target;
      j["value"] = operand_to(p.value);
      break;
    case PrimitiveOp::kPushHeader:
      j["op"] = "push_header";
      j["header"] = p.target;
      break;
    case PrimitiveOp::kPopHeader:
      j["op"] = "pop_header";
      j["header"] = p.target;
      break;
    case PrimitiveOp::kDrop: j["op"] = "drop"; break;
    case PrimitiveOp::kNoOp: j["op"] = "no_op"; break;
  }
  return j;
}

// Params may be positional (array) or named (object, ordered by the action's
// declaration). Named params of an undeclared action cannot be ordered.
std::vector<uint64_t> args_from(const json& node, const std::string& path, const std::string& action,
                                const std::vector<Action>& actions) {
  std::vector<uint64_t> args;
  if (node.is_array()) {
    for (std::size_t i = 0; i < node.size(); ++i) args.push_back(value_of(node[i], at(path, i)));
    return args;
  }
  if (!node.is_object()) throw SchemaError(path, "expected an object or array of parameters");
  auto it = std::find_if(actions.begin(), actions.end(), [&](const Action& a) { return a.name == action; });
  if (it == actions.end()) {
    if (node.empty()) return args;
    throw SchemaError(path, "named parameters for undeclared action '" + action + "'");
  }
  for (auto kv = node.begin(); kv != node.end(); ++kv) {
    bool declared = std::any_of(it->params.begin(), it->params.end(),
                                [&](const ActionParam& p) { return p.name == kv.key(); });
    if (!declared) throw SchemaError(at(path, kv.key()), "unknown parameter of action '" + action + "'");
  }
  for (const auto& p : it->params) {
    if (!node.contains(p.name)) throw SchemaError(at(path, p.name), "missing parameter");
    args.push_back(value_of(node[p.name], at(path, p.name)));
  }
  return args;
}

ordered_json args_to(const ActionCall& call, const std::vector<Action>& actions) {
  auto it = std::find_if(actions.begin(), actions.end(), [&](const Action& a) { return a.name == call.action; });
  if (it == actions.end() || it->params.size() != call.args.size()) {
    ordered_json arr = ordered_json::array();
    for (auto v : call.args) arr.push_back(v);
    return arr;
  }
  ordered_json obj = ordered_json::object();
  for (std::size_t i = 0; i < call.args.size(); ++i) obj[it->params[i].name] = call.args[i];
  return obj;
}

Action action_from(const json& node, const std::string& path) {
  check_keys(node, path, {"name", "primitives"}, {"params"});
  Action a;
  a.name = string_of(node["name"], at(path, "name"));
  if (optional_key(node, "params")) {
    const auto& params = array_at(node, "params", path);
    for (std::size_t i = 0; i < params.size(); ++i) {
      auto pp = at(at(path, "params"), i);
      check_keys(params[i], pp, {"name", "width"});
      a.params.push_back({string_of(params[i]["name"], at(pp, "name")), width_of(params[i]["width"], at(pp, "width"))});
    }
  }
  const auto& prims = array_at(node, "primitives", path);
  for (std::size_t i = 0; i < prims.size(); ++i) a.primitives.push_back(primitive_from(prims[i], at(at(path, "primitives"), i)));
  return a;
}

MatchKind match_kind_from(const json& v, const std::string& path) {
  auto s = string_of(v, path);
  if (s == "exact") return MatchKind::kExact;
  if (s == "lpm") return MatchKind::kLpm;
  if (s == "ternary") return MatchKind::kTernary;
  throw SchemaError(path, "unknown match kind '" + s + "'");
}

std::string_view match_kind_name(MatchKind k) {
  switch (k) {
    case MatchKind::kExact: return "exact";
    case MatchKind::kLpm: return "lpm";
    case MatchKind::kTernary: return "ternary";
  }
  return "exact";
}

Table table_from(const json& node, const std::string& path, const std::vector<Action>& actions) {
  check_keys(node, path, {"name", "keys", "actions", "default_action"});
  Table t;
  t.name = string_of(node["name"], at(path, "name"));
  const auto& keys = array_at(node, "keys", path);
  for (std::size_t i = 0; i < keys.size(); ++i) {
    auto kp = at(at(path, "keys"), i);
    check_keys(keys[i], kp, {"field", "match"});
    t.keys.push_back({string_of(keys[i]["field"], at(kp, "field")), match_kind_from(keys[i]["match"], at(kp, "match"))});
  }
  const auto& allowed = array_at(node, "actions", path);
  for (std::size_t i = 0; i < allowed.size(); ++i) t.allowed_actions.push_back(string_of(allowed[i], at(at(path, "actions"), i)));
  auto dp = at(path, "default_action");
  check_keys(node["default_action"], dp, {"name"}, {"params"});
  t.default_action.action = string_of(node["default_action"]["name"], at(dp, "name"));
  if (optional_key(node["default_action"], "params")) {
    t.default_action.args = args_from(node["default_action"]["params"], at(dp, "params"), t.default_action.action, actions);
  }
  return t;
}

Block block_from(const json& node, const std::string& path);

Statement statement_from(const json& node, const std::string& path) {
  if (node.is_object() && node.contains("apply")) {
    check_keys(node, path, {"apply"});
    return Statement{ApplyStmt{string_of(node["apply"], at(path, "apply"))}};
  }
  check_keys(node, path, {"if", "then"}, {"else"});
  auto cp = at(path, "if");
  check_keys(node["if"], cp, {"meta", "op", "value"});
  IfStmt s;
  s.cond.meta = string_of(node["if"]["meta"], at(cp, "meta"));
  auto op = string_of(node["if"]["op"], at(cp, "op"));
  if (op == "==") {
    s.cond.op = CompareOp::kEq;
  } else if (op == "!=") {
    s.cond.op = CompareOp::kNe;
  } else {
    throw SchemaError(at(cp, "op"), "expected '==' or '!='");
  }
  s.cond.value = value_of(node["if"]["value"], at(cp, "value"));
  s.then_block = block_from(node["then"], at(path, "then"));
  if (optional_key(node, "else")) s.else_block = block_from(node["else"], at(path, "else"));
  return Statement{std::move(s)};
}

Block block_from(const json& node, const std::string& path) {
  if (!node.is_array()) throw SchemaError(path, "expected an array");
  Block b;
  for (std::size_t i = 0; i < node.size(); ++i) b.push_back(statement_from(node[i], at(path, i)));
  return b;
}

ordered_json block_to(const Block& block) {
  ordered_json arr = ordered_json::array();
  for (const auto& stmt : block) {
    ordered_json j;
    if (const auto* a = std::get_if<ApplyStmt>(&stmt.node)) {
      j["apply"] = a->table;
    } else {
      const auto& s = std::get<IfStmt>(stmt.node);
      j["if"] = {{"meta", s.cond.meta}, {"op", s.cond.op == CompareOp::kEq ? "==" : "!="}, {"value", s.cond.value}};
      j["then"] = block_to(s.then_block);
      if (!s.else_block.empty()) j["else"] = block_to(s.else_block);
    }
    arr.push_back(std::move(j));
  }
  return arr;
}

json parse_json(std::string_view text) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw SchemaError("$", std::string("malformed JSON: ") + e.what());
  }
}

}  // namespace

Program program_from_json(const json& doc) {
  const std::string root = "$";
  check_keys(doc, root, {"headers", "parser", "tables", "ingress", "egress"}, {"actions"});
  Program p;
  const auto& headers = array_at(doc, "headers", root);
  for (std::size_t i = 0; i < headers.size(); ++i) p.headers.push_back(header_from(headers[i], at(at(root, "headers"), i)));

  auto pp = at(root, "parser");
  check_keys(doc["parser"], pp, {"start", "states"});
  p.parser.start = string_of(doc["parser"]["start"], at(pp, "start"));
  const auto& states = array_at(doc["parser"], "states", pp);
  for (std::size_t i = 0; i < states.size(); ++i) p.parser.states.push_back(state_from(states[i], at(at(pp, "states"), i)));

  if (optional_key(doc, "actions")) {
    const auto& actions = array_at(doc, "actions", root);
    for (std::size_t i = 0; i < actions.size(); ++i) p.actions.push_back(action_from(actions[i], at(at(root, "actions"), i)));
  }
  const auto& tables = array_at(doc, "tables", root);
  for (std::size_t i = 0; i < tables.size(); ++i) p.tables.push_back(table_from(tables[i], at(at(root, "tables"), i), p.actions));
  p.ingress = block_from(doc["ingress"], at(root, "ingress"));
  p.egress = block_from(doc["egress"], at(root, "egress"));
  return p;
}

Program load_program(std::string_view text) { return program_from_json(parse_json(text)); }

ordered_json program_to_json(const Program& p) {
  ordered_json doc;
  ordered_json headers = ordered_json::array();
  for (const auto& h : p.headers) {
    ordered_json fields = ordered_json::array();
    for (const auto& f : h.fields) fields.push_back({{"name", f.name}, {"width", f.width}});
    headers.push_back({{"name", h.name}, {"fields", fields}});
  }
  doc["headers"] = headers;

  ordered_json states = ordered_json::array();
  for (const auto& s : p.parser.states) {
    ordered_json j;
    j["name"] = s.name;
    if (s.extract) j["extract"] = *s.extract;
    if (!s.assignments.empty()) {
      ordered_json sets = ordered_json::array();
      for (const auto& a : s.assignments) sets.push_back({{"meta", a.meta}, {"value", operand_to(a.value)}});
      j["set"] = sets;
    }
    if (s.select) {
      if (s.select->field) {
        j["select"] = {{"field", *s.select->field}};
      } else {
        j["select"] = {{"lookahead", {{"offset", s.select->lookahead->offset_bits}, {"width", s.select->lookahead->width}}}};
      }
    }
    if (!s.cases.empty()) {
      ordered_json cases = ordered_json::array();
      for (const auto& c : s.cases) cases.push_back({{"value", format_hex(c.value)}, {"next", c.next}});
      j["cases"] = cases;
    }
    j["default"] = s.default_next;
    states.push_back(std::move(j));
  }
  doc["parser"] = {{"start", p.parser.start}, {"states", states}};

  ordered_json actions = ordered_json::array();
  for (const auto& a : p.actions) {
    ordered_json params = ordered_json::array();
    for (const auto& prm : a.params) params.push_back({{"name", prm.name}, {"width", prm.width}});
    ordered_json prims = ordered_json::array();
    for (const auto& prim : a.primitives) prims.push_back(primitive_to(prim));
    actions.push_back({{"name", a.name}, {"params", params}, {"primitives", prims}});
  }
  doc["actions"] = actions;

  ordered_json tables = ordered_json::array();
  for (const auto& t : p.tables) {
    ordered_json keys = ordered_json::array();
    for (const auto& k : t.keys) keys.push_back({{"field", k.field}, {"match", match_kind_name(k.match)}});
    tables.push_back({{"name", t.name},
                      {"keys", keys},
                      {"actions", t.allowed_actions},
                      {"default_action", {{"name", t.default_action.action}, {"params", args_to(t.default_action, p.actions)}}}});
  }
  doc["tables"] = tables;
  doc["ingress"] = block_to(p.ingress);
  doc["egress"] = block_to(p.egress);
  return doc;
}

std::vector<TableEntry> entries_from_json(const json& doc, const Program& program) {
  const std::string root = "$";
  check_keys(doc, root, {"entries"});
  const auto& arr = array_at(doc, "entries", root);
  std::vector<TableEntry> out;
  for (std::size_t i = 0; i < arr.size(); ++i) {
    auto ep = at(at(root, "entries"), i);
    const auto& node = arr[i];
    check_keys(node, ep, {"table", "match", "action"}, {"params", "priority"});
    TableEntry e;
    e.table = string_of(node["table"], at(ep, "table"));
    const auto& match = array_at(node, "match", ep);
    for (std::size_t k = 0; k < match.size(); ++k) {
      auto mp = at(at(ep, "match"), k);
      const auto& m = match[k];
      if (m.is_object() && m.contains("prefix_len")) {
        check_keys(m, mp, {"value", "prefix_len"});
        e.match.emplace_back(LpmMatch{value_of(m["value"], at(mp, "value")), width_of(m["prefix_len"], at(mp, "prefix_len"))});
      } else if (m.is_object()) {
        check_keys(m, mp, {"value", "mask"});
        e.match.emplace_back(TernaryMatch{value_of(m["value"], at(mp, "value")), value_of(m["mask"], at(mp, "mask"))});
      } else if (m.is_string() && m.get<std::string>().find('/') != std::string::npos) {
        auto s = m.get<std::string>();
        auto slash = s.find('/');
        uint64_t v = 0;
        uint64_t len = 0;
        try {
          v = parse_value(s.substr(0, slash));
          len = parse_value(s.substr(slash + 1));
        } catch (const std::invalid_argument& err) {
          throw SchemaError(mp, err.what());
        }
        e.match.emplace_back(LpmMatch{v, static_cast<unsigned>(len)});
      } else {
        e.match.emplace_back(value_of(m, mp));
      }
    }
    e.action.action = string_of(node["action"], at(ep, "action"));
    if (optional_key(node, "params")) e.action.args = args_from(node["params"], at(ep, "params"), e.action.action, program.actions);
    if (optional_key(node, "priority")) {
      auto pr = value_of(node["priority"], at(ep, "priority"));
      if (pr > 0xFFFFFFFFu) throw SchemaError(at(ep, "priority"), "priority out of range");
      e.priority = static_cast<uint32_t>(pr);
    }
    out.push_back(std::move(e));
  }
  return out;
}

std::vector<TableEntry> load_entries(std::string_view text, const Program& program) {
  return entries_from_json(parse_json(text), program);
}

ordered_json entries_to_json(std::span<const TableEntry> entries, const Program& program) {
  ordered_json arr = ordered_json::array();
  for (const auto& e : entries) {
    ordered_json j;
    j["table"] = e.table;
    ordered_json match = ordered_json::array();
    for (const auto& m : e.match) {
      if (const auto* exact = std::get_if<uint64_t>(&m)) {
        match.push_back(*exact);
      } else if (const auto* lpm = std::get_if<LpmMatch>(&m)) {
        match.push_back({{"value", lpm->value}, {"prefix_len", lpm->prefix_len}});
      } else {
        const auto& t = std::get<TernaryMatch>(m);
        match.push_back({{"value", format_hex(t.value)}, {"mask", format_hex(t.mask)}});
      }
    }
    j["match"] = match;
    j["action"] = e.action.action;
    j["params"] = args_to(e.action, program.actions);
    if (e.priority) j["priority"] = *e.priority;
    arr.push_back(std::move(j));
  }
  ordered_json doc;
  doc["entries"] = arr;
  return doc;
}

}  // namespace hymos::p4ir
