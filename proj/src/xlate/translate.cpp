#include "hymos/xlate/translate.hpp"

#include <set>

#include "hymos/p4ir/metadata.hpp"
#include "hymos/p4ir/validate.hpp"
#include "hymos/xlate/encap.hpp"

namespace hymos::xlate {
namespace {

using namespace p4ir;

const std::string kNop = "hymos_nop";
const std::string kDrop = "hymos_drop";
const std::string kLocal = "hymos_local_forward";
const std::string kEncap = "hymos_encap";
const std::string kDecap = "hymos_decap";
const std::string kStart = "hymos_start";
const std::string kParseOuter = "hymos_parse_outer";

bool reserved(std::string_view name) { return name.starts_with(kReservedPrefix); }

void check_reserved(const Program& p) {
  auto fail = [](const char* kind, const std::string& n) {
    throw TranslateError(std::string(kind) + " '" + n + "' uses the reserved prefix '" + std::string(kReservedPrefix) + "'");
  };
  for (const auto& h : p.headers) if (reserved(h.name)) fail("header", h.name);
  for (const auto& s : p.parser.states) if (reserved(s.name)) fail("parser state", s.name);
  for (const auto& a : p.actions) if (reserved(a.name)) fail("action", a.name);
  for (const auto& t : p.tables) if (reserved(t.name)) fail("table", t.name);
}

void check_port(const PortMap& ports, uint64_t port, const std::string& where) {
  if (port == kEgressDrop || port == kEgressUnset) return;
  if (!ports.locate(static_cast<uint32_t>(port))) {
    throw TranslateError(where + " names port " + std::to_string(port) + ", which is not in the topology");
  }
}

void check_call_ports(const Program& p, const ActionCall& call, const PortMap& ports, const std::string& where) {
  const Action* a = p.find_action(call.action);
  if (!a) return;  // rejected later by the interpreter with a precise message
  for (const auto& prim : a->primitives) {
    if (prim.op != PrimitiveOp::kSetEgress) continue;
    const auto& v = prim.value;
    if (v.kind == Operand::Kind::kConst) {
      check_port(ports, v.value, where + " (action '" + a->name + "')");
    } else if (v.kind == Operand::Kind::kParam && v.add == 0 && !v.and_mask && !v.or_mask) {
      for (std::size_t i = 0; i < a->params.size() && i < call.args.size(); ++i) {
        if (a->params[i].name == v.name) check_port(ports, call.args[i], where + " (action '" + a->name + "')");
      }
    }
  }
}

void check_entry_ports(const Program& p, std::span<const TableEntry> entries, const PortMap& ports) {
  for (const auto& t : p.tables) check_call_ports(p, t.default_action, ports, "default action of table '" + t.name + "'");
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const auto& e = entries[i];
    auto where = "entry #" + std::to_string(i) + " of table '" + e.table + "'";
    check_call_ports(p, e.action, ports, where);
    const Table* t = p.find_table(e.table);
    if (!t) continue;
    for (std::size_t k = 0; k < t->keys.size() && k < e.match.size(); ++k) {
      const auto& key = t->keys[k];
      if (key.match != MatchKind::kExact) continue;
      if (key.field != "meta.egress_spec" && key.field != "meta.ingress_port") continue;
      if (const auto* v = std::get_if<uint64_t>(&e.match[k])) check_port(ports, *v, where);
    }
  }
}

Operand masked_field(std::string field, uint64_t and_mask) {
  auto o = Operand::field(std::move(field));
  o.and_mask = and_mask;
  return o;
}

Operand mac_of_meta(std::string meta_ref) {
  auto o = Operand::field(std::move(meta_ref));
  o.and_mask = 0xFF;
  o.or_mask = kFabricMacPrefix;
  return o;
}

Statement apply(std::string_view t) { return Statement{ApplyStmt{std::string(t)}}; }

Statement if_external(Block then_block) {
  return Statement{IfStmt{MetaPredicate{"is_internal", CompareOp::kEq, 0}, std::move(then_block), {}}};
}

TableEntry exact(std::string_view table, std::vector<uint64_t> keys, std::string action,
                 std::vector<uint64_t> args = {}) {
  TableEntry e;
  e.table = std::string(table);
  for (auto k : keys) e.match.emplace_back(k);
  e.action = ActionCall{std::move(action), std::move(args)};
  return e;
}

Program card_program(const Program& orig, uint16_t ether_type) {
  Program p;
  p.headers.push_back(HeaderType{std::string(kOuterHeader), {{"dstAddr", 48}, {"srcAddr", 48}, {"etherType", 16}}});
  p.headers.insert(p.headers.end(), orig.headers.begin(), orig.headers.end());

  // hymos_start peeks at the EtherType without consuming anything.
  ParserState start;
  start.name = kStart;
  start.select = ParserSelect{std::nullopt, ParserSelect::Lookahead{96, 16}};
  start.cases.push_back({ether_type, kParseOuter});
  start.default_next = orig.parser.start;

  const std::string outer(kOuterHeader);
  ParserState outer_state;
  outer_state.name = kParseOuter;
  outer_state.extract = outer;
  outer_state.assignments = {
      {"is_internal", Operand::constant(1)},
      {"orig_ingress_port", masked_field(outer + ".srcAddr", 0xFF)},
      {"egress_spec", masked_field(outer + ".dstAddr", 0xFF)},
  };
  outer_state.default_next = orig.parser.start;

  p.parser.start = kStart;
  p.parser.states = {start, outer_state};
  p.parser.states.insert(p.parser.states.end(), orig.parser.states.begin(), orig.parser.states.end());

  p.actions = orig.actions;
  p.actions.push_back(Action{kNop, {}, {}});
  // Marking the packet internal keeps the original pipelines from overriding the drop.
  p.actions.push_back(Action{kDrop,
                             {},
                             {Primitive{PrimitiveOp::kDrop, {}, {}},
                              Primitive{PrimitiveOp::kSetMeta, "is_internal", Operand::constant(1)}}});
  p.actions.push_back(Action{kLocal, {}, {}});
  p.actions.push_back(Action{kEncap,
                             {{"dest_card", 8}},
                             {
                                 Primitive{PrimitiveOp::kPushHeader, outer, {}},
                                 Primitive{PrimitiveOp::kSetField, outer + ".dstAddr", mac_of_meta("meta.egress_spec")},
                                 Primitive{PrimitiveOp::kSetField, outer + ".srcAddr", mac_of_meta("meta.ingress_port")},
                                 Primitive{PrimitiveOp::kSetField, outer + ".etherType", Operand::constant(ether_type)},
                                 Primitive{PrimitiveOp::kSetMeta, "fabric_dest", Operand::param("dest_card")},
                             }});
  p.actions.push_back(Action{kDecap, {}, {Primitive{PrimitiveOp::kPopHeader, outer, {}}}});

  p.tables = orig.tables;
  p.tables.push_back(Table{std::string(kIngressMapTable),
                           {{"meta.ingress_port", MatchKind::kExact}, {"meta.is_internal", MatchKind::kExact}},
                           {kNop, kDrop},
                           {kDrop, {}}});
  p.tables.push_back(Table{std::string(kFabricLookupTable),
                           {{"meta.egress_spec", MatchKind::kExact}},
                           {kLocal, kEncap},
                           {kLocal, {}}});
  p.tables.push_back(Table{std::string(kEgressPrologueTable),
                           {{"meta.ingress_port", MatchKind::kExact}},
                           {kNop, kDecap},
                           {kNop, {}}});

  Block ingress_body = orig.ingress;
  ingress_body.push_back(apply(kFabricLookupTable));
  p.ingress = {apply(kIngressMapTable), if_external(std::move(ingress_body))};
  p.egress = {apply(kEgressPrologueTable), if_external(orig.egress)};
  return p;
}

std::vector<TableEntry> card_entries(uint32_t card, const Topology& topo) {
  std::vector<TableEntry> out;
  const auto& mine = topo.cards[card];
  for (const auto& port : mine.ports) out.push_back(exact(kIngressMapTable, {port.global_id, 0}, kNop));
  for (uint32_t c = 0; c < topo.card_count(); ++c) {
    if (c != card) out.push_back(exact(kIngressMapTable, {virtual_port(c), 1}, kNop));
  }
  for (uint32_t c = 0; c < topo.card_count(); ++c) {
    for (const auto& port : topo.cards[c].ports) {
      out.push_back(c == card ? exact(kFabricLookupTable, {port.global_id}, kLocal)
                              : exact(kFabricLookupTable, {port.global_id}, kEncap, {c}));
    }
  }
  for (uint32_t c = 0; c < topo.card_count(); ++c) {
    if (c != card) out.push_back(exact(kEgressPrologueTable, {virtual_port(c)}, kDecap));
  }
  return out;
}

}  // namespace

std::vector<TableEntry> TranslationResult::card_entries(uint32_t card, std::span<const TableEntry> original) const {
  std::vector<TableEntry> out(original.begin(), original.end());
  const auto& extra = cards.at(card).synthesized_entries;
  out.insert(out.end(), extra.begin(), extra.end());
  return out;
}

TranslationResult translate(const Program& program, std::span<const TableEntry> entries, const Topology& topo,
                            const TranslateOptions& options) {
  require_valid(program);
  validate_topology(topo);
  check_reserved(program);
  PortMap ports(topo);
  check_entry_ports(program, entries, ports);

  TranslationResult r;
  r.internal_ether_type = options.internal_ether_type;
  for (uint32_t c = 0; c < topo.card_count(); ++c) {
    CardProgram cp;
    cp.card = c;
    cp.program = card_program(program, options.internal_ether_type);
    require_valid(cp.program);
    cp.synthesized_entries = xlate::card_entries(c, topo);
    r.cards.push_back(std::move(cp));
  }
  return r;
}

}  // namespace hymos::xlate
