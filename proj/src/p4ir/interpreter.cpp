#include "hymos/p4ir/interpreter.hpp"

#include <algorithm>
#include <functional>

#include "hymos/p4ir/validate.hpp"
#include "hymos/p4ir/values.hpp"

namespace hymos::p4ir {

struct CompiledProgram::CompiledHeader {
  std::string name;
  std::vector<unsigned> widths;
  std::size_t first_field = 0;
  std::size_t bytes = 0;
};

struct CompiledProgram::CompiledOperand {
  Operand::Kind kind = Operand::Kind::kConst;
  uint64_t value = 0;
  std::size_t param = 0;
  FieldSlot field;
  int64_t add = 0;
  uint64_t and_mask = ~uint64_t{0};
  uint64_t or_mask = 0;
};

struct CompiledProgram::CompiledPrimitive {
  PrimitiveOp op = PrimitiveOp::kNoOp;
  FieldSlot target;
  std::size_t header = 0;
  CompiledOperand value;
};

struct CompiledProgram::CompiledAction {
  std::vector<CompiledPrimitive> primitives;
};

namespace {
constexpr std::ptrdiff_t kNextAccept = -1;
constexpr std::ptrdiff_t kNextReject = -2;
}  // namespace

struct CompiledProgram::CompiledState {
  std::string name;
  std::ptrdiff_t extract = -1;
  std::vector<std::pair<MetaKey, CompiledOperand>> assignments;
  enum class Select { kNone, kField, kLookahead } select = Select::kNone;
  FieldSlot select_field;
  unsigned look_offset = 0;
  unsigned look_width = 0;
  std::vector<std::pair<uint64_t, std::ptrdiff_t>> cases;
  std::ptrdiff_t default_next = kNextAccept;
};

struct CompiledProgram::CompiledNode {
  bool is_apply = true;
  std::size_t table = 0;
  MetaKey meta{};
  CompareOp op = CompareOp::kEq;
  uint64_t value = 0;
  std::vector<CompiledNode> then_block;
  std::vector<CompiledNode> else_block;
};

namespace {

uint64_t read_bits(std::span<const uint8_t> bytes, std::size_t bit_offset, unsigned width) {
  uint64_t v = 0;
  for (unsigned i = 0; i < width; ++i) {
    std::size_t bit = bit_offset + i;
    v = (v << 1) | ((bytes[bit >> 3] >> (7 - (bit & 7))) & 1u);
  }
  return v;
}

// Byte-aligned fast path for the common case of whole-octet fields.
uint64_t read_field(std::span<const uint8_t> bytes, std::size_t bit_offset, unsigned width) {
  if ((bit_offset & 7) == 0 && (width & 7) == 0) {
    uint64_t v = 0;
    std::size_t byte = bit_offset >> 3;
    for (unsigned i = 0; i < width / 8; ++i) v = (v << 8) | bytes[byte + i];
    return v;
  }
  return read_bits(bytes, bit_offset, width);
}

void write_bits(std::vector<uint8_t>& out, std::size_t bit_offset, unsigned width, uint64_t v) {
  for (unsigned i = 0; i < width; ++i) {
    std::size_t bit = bit_offset + i;
    uint8_t b = static_cast<uint8_t>((v >> (width - 1 - i)) & 1u);
    auto& byte = out[bit >> 3];
    byte = static_cast<uint8_t>((byte & ~(1u << (7 - (bit & 7)))) | (b << (7 - (bit & 7))));
  }
}

}  // namespace

CompiledProgram::~CompiledProgram() = default;

CompiledProgram::CompiledProgram(Program program) : program_(std::move(program)) {
  require_valid(program_);
  if (program_.headers.size() > 64) throw ValidationError("at most 64 header types are supported");

  for (const auto& h : program_.headers) {
    CompiledHeader ch;
    ch.name = h.name;
    ch.first_field = field_count_;
    for (const auto& f : h.fields) ch.widths.push_back(f.width);
    ch.bytes = h.total_bits() / 8;
    field_count_ += h.fields.size();
    headers_.push_back(std::move(ch));
  }

  auto compile_operand = [&](const Operand& op, const Action* action) {
    CompiledOperand co;
    co.kind = op.kind;
    co.value = op.value;
    co.add = op.add;
    if (op.and_mask) co.and_mask = *op.and_mask;
    if (op.or_mask) co.or_mask = *op.or_mask;
    if (op.kind == Operand::Kind::kParam) {
      for (std::size_t i = 0; i < action->params.size(); ++i) {
        if (action->params[i].name == op.name) co.param = i;
      }
    } else if (op.kind == Operand::Kind::kField) {
      co.field = slot(op.name);
    }
    return co;
  };

  auto state_index = [&](const std::string& name) -> std::ptrdiff_t {
    if (name == kAccept) return kNextAccept;
    if (name == kReject) return kNextReject;
    for (std::size_t i = 0; i < program_.parser.states.size(); ++i) {
      if (program_.parser.states[i].name == name) return static_cast<std::ptrdiff_t>(i);
    }
    return kNextReject;
  };

  for (const auto& s : program_.parser.states) {
    CompiledState cs;
    cs.name = s.name;
    if (s.extract) cs.extract = static_cast<std::ptrdiff_t>(header_index(*s.extract));
    for (const auto& a : s.assignments) cs.assignments.emplace_back(*meta_key_from_name(a.meta), compile_operand(a.value, nullptr));
    if (s.select) {
      if (s.select->field) {
        cs.select = CompiledState::Select::kField;
        cs.select_field = slot(*s.select->field);
      } else {
        cs.select = CompiledState::Select::kLookahead;
        cs.look_offset = s.select->lookahead->offset_bits;
        cs.look_width = s.select->lookahead->width;
      }
    }
    for (const auto& c : s.cases) cs.cases.emplace_back(c.value, state_index(c.next));
    cs.default_next = state_index(s.default_next);
    states_.push_back(std::move(cs));
  }
  start_state_ = static_cast<std::size_t>(state_index(program_.parser.start));

  for (const auto& a : program_.actions) {
    CompiledAction ca;
    for (const auto& prim : a.primitives) {
      CompiledPrimitive cp;
      cp.op = prim.op;
      switch (prim.op) {
        case PrimitiveOp::kSetField:
          cp.target = slot(prim.target);
          cp.value = compile_operand(prim.value, &a);
          break;
        case PrimitiveOp::kSetMeta:
          cp.target.is_meta = true;
          cp.target.meta = *meta_key_from_name(prim.target);
          cp.target.width = meta_key_width(cp.target.meta);
          cp.value = compile_operand(prim.value, &a);
          break;
        case PrimitiveOp::kSetEgress:
          cp.value = compile_operand(prim.value, &a);
          break;
        case PrimitiveOp::kPushHeader:
        case PrimitiveOp::kPopHeader:
          cp.header = header_index(prim.target);
          break;
        case PrimitiveOp::kDrop:
        case PrimitiveOp::kNoOp:
          break;
      }
      ca.primitives.push_back(std::move(cp));
    }
    actions_.push_back(std::move(ca));
  }

  std::function<std::vector<CompiledNode>(const Block&)> compile_block = [&](const Block& block) {
    std::vector<CompiledNode> out;
    for (const auto& stmt : block) {
      CompiledNode n;
      if (const auto* a = std::get_if<ApplyStmt>(&stmt.node)) {
        n.is_apply = true;
        n.table = table_index(a->table);
      } else {
        const auto& s = std::get<IfStmt>(stmt.node);
        n.is_apply = false;
        n.meta = *meta_key_from_name(s.cond.meta);
        n.op = s.cond.op;
        n.value = s.cond.value;
        n.then_block = compile_block(s.then_block);
        n.else_block = compile_block(s.else_block);
      }
      out.push_back(std::move(n));
    }
    return out;
  };
  ingress_ = compile_block(program_.ingress);
  egress_ = compile_block(program_.egress);
}

FieldSlot CompiledProgram::slot(std::string_view ref) const {
  auto dot = ref.find('.');
  if (dot == std::string_view::npos) throw ValidationError("bad field reference '" + std::string(ref) + "'");
  auto hdr = ref.substr(0, dot);
  auto fld = ref.substr(dot + 1);
  FieldSlot s;
  if (hdr == kMetaHeader) {
    auto key = meta_key_from_name(fld);
    if (!key) throw ValidationError("unknown metadata key '" + std::string(fld) + "'");
    s.is_meta = true;
    s.meta = *key;
    s.width = meta_key_width(*key);
    return s;
  }
  auto h = header_index(hdr);
  const auto& decl = program_.headers[h];
  for (std::size_t i = 0; i < decl.fields.size(); ++i) {
    if (decl.fields[i].name == fld) {
      s.header = static_cast<uint16_t>(h);
      s.index = static_cast<uint16_t>(headers_[h].first_field + i);
      s.width = decl.fields[i].width;
      return s;
    }
  }
  throw ValidationError("unknown field '" + std::string(ref) + "'");
}

std::size_t CompiledProgram::header_index(std::string_view name) const {
  for (std::size_t i = 0; i < program_.headers.size(); ++i) {
    if (program_.headers[i].name == name) return i;
  }
  throw ValidationError("unknown header '" + std::string(name) + "'");
}

std::size_t CompiledProgram::table_index(std::string_view name) const {
  for (std::size_t i = 0; i < program_.tables.size(); ++i) {
    if (program_.tables[i].name == name) return i;
  }
  throw ValidationError("unknown table '" + std::string(name) + "'");
}

std::size_t CompiledProgram::action_index(std::string_view name) const {
  for (std::size_t i = 0; i < program_.actions.size(); ++i) {
    if (program_.actions[i].name == name) return i;
  }
  throw ValidationError("unknown action '" + std::string(name) + "'");
}

uint64_t CompiledProgram::read(const PacketState& st, const FieldSlot& s) const {
  if (s.is_meta) return st.meta.get(s.meta);
  // Fields of invalid headers read as zero.
  return st.is_valid(s.header) ? st.fields[s.index] : 0;
}

PacketState CompiledProgram::parse(std::span<const uint8_t> bytes, uint64_t ingress_port) const {
  PacketState st;
  st.fields.assign(field_count_, 0);
  st.meta.set(MetaKey::kIngressPort, ingress_port);
  std::size_t cursor = 0;  // bytes
  std::size_t steps = 0;
  std::ptrdiff_t cur = static_cast<std::ptrdiff_t>(start_state_);
  while (cur >= 0) {
    const auto& s = states_[static_cast<std::size_t>(cur)];
    if (++steps > states_.size()) throw ParseError(s.name, "parser did not terminate");
    if (s.extract >= 0) {
      const auto& h = headers_[static_cast<std::size_t>(s.extract)];
      if (cursor + h.bytes > bytes.size()) throw ParseError(s.name, "packet too short to extract '" + h.name + "'");
      std::size_t bit = cursor * 8;
      for (std::size_t f = 0; f < h.widths.size(); ++f) {
        st.fields[h.first_field + f] = read_field(bytes, bit, h.widths[f]);
        bit += h.widths[f];
      }
      st.valid |= uint64_t{1} << s.extract;
      cursor += h.bytes;
    }
    for (const auto& [key, op] : s.assignments) {
      uint64_t v = op.kind == Operand::Kind::kField ? read(st, op.field) : op.value;
      v = ((v + static_cast<uint64_t>(op.add)) & op.and_mask) | op.or_mask;
      st.meta.set(key, v);
    }
    uint64_t sel = 0;
    switch (s.select) {
      case CompiledState::Select::kNone:
        if (s.default_next == kNextReject) throw ParseError(s.name, "transition to reject");
        cur = s.default_next;
        continue;
      case CompiledState::Select::kField:
        sel = read(st, s.select_field);
        break;
      case CompiledState::Select::kLookahead:
        if (cursor * 8 + s.look_offset + s.look_width > bytes.size() * 8) {
          throw ParseError(s.name, "lookahead past the end of the packet");
        }
        sel = read_bits(bytes, cursor * 8 + s.look_offset, s.look_width);
        break;
    }
    auto next = s.default_next;
    for (const auto& [value, target] : s.cases) {
      if (value == sel) {
        next = target;
        break;
      }
    }
    if (next == kNextReject) throw ParseError(s.name, "transition to reject");
    cur = next;
  }
  st.payload.assign(bytes.begin() + static_cast<std::ptrdiff_t>(cursor), bytes.end());
  return st;
}

std::vector<uint8_t> CompiledProgram::deparse(const PacketState& st) const {
  std::size_t total = st.payload.size();
  for (std::size_t h = 0; h < headers_.size(); ++h) {
    if (st.is_valid(h)) total += headers_[h].bytes;
  }
  std::vector<uint8_t> out(total, 0);
  std::size_t cursor = 0;
  for (std::size_t h = 0; h < headers_.size(); ++h) {
    if (!st.is_valid(h)) continue;
    const auto& hd = headers_[h];
    std::size_t bit = cursor * 8;
    for (std::size_t f = 0; f < hd.widths.size(); ++f) {
      auto w = hd.widths[f];
      auto v = st.fields[hd.first_field + f];
      if ((bit & 7) == 0 && (w & 7) == 0) {
        for (unsigned i = 0; i < w / 8; ++i) out[(bit >> 3) + i] = static_cast<uint8_t>(v >> (w - 8 * (i + 1)));
      } else {
        write_bits(out, bit, w, v);
      }
      bit += w;
    }
    cursor += hd.bytes;
  }
  std::copy(st.payload.begin(), st.payload.end(), out.begin() + static_cast<std::ptrdiff_t>(cursor));
  return out;
}

// --- InstalledTable -------------------------------------------------------

namespace {

uint64_t hash_key(std::span<const uint64_t> values) {
  uint64_t h = 1469598103934665603ull;
  for (auto v : values) {
    h ^= v + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
  }
  return h;
}

}  // namespace

InstalledTable::InstalledTable(const CompiledProgram& cp, const Table& table, std::span<const TableEntry> entries)
    : table_(&table) {
  bool has_ternary = false;
  exact_only_ = true;
  for (const auto& k : table.keys) {
    keys_.push_back(cp.slot(k.field));
    if (k.match == MatchKind::kTernary) has_ternary = true;
    if (k.match != MatchKind::kExact) exact_only_ = false;
  }
  const auto& prog = cp.program();
  auto check_call = [&](const ActionCall& call, const std::string& where) {
    auto ai = cp.action_index(call.action);
    if (std::find(table.allowed_actions.begin(), table.allowed_actions.end(), call.action) == table.allowed_actions.end()) {
      throw ConfigError(where + ": action '" + call.action + "' is not allowed in table '" + table.name + "'");
    }
    const auto& decl = prog.actions[ai];
    if (decl.params.size() != call.args.size()) {
      throw ConfigError(where + ": action '" + call.action + "' expects " + std::to_string(decl.params.size()) +
                        " parameters, got " + std::to_string(call.args.size()));
    }
    return ai;
  };
  default_action_ = check_call(table.default_action, "table '" + table.name + "' default action");
  default_args_ = table.default_action.args;

  std::size_t order = 0;
  for (const auto& e : entries) {
    if (e.table != table.name) continue;
    std::string where = "entry #" + std::to_string(order) + " of table '" + table.name + "'";
    if (e.match.size() != table.keys.size()) {
      throw ConfigError(where + ": expected " + std::to_string(table.keys.size()) + " match values, got " +
                        std::to_string(e.match.size()));
    }
    if (has_ternary != e.priority.has_value()) {
      throw ConfigError(where + (has_ternary ? ": ternary tables require a priority" : ": priority given for a table without ternary keys"));
    }
    Row row;
    row.priority = e.priority.value_or(0);
    row.order = order++;
    row.action = check_call(e.action, where);
    row.args = e.action.args;
    for (std::size_t k = 0; k < table.keys.size(); ++k) {
      auto width = keys_[k].width;
      auto full = low_mask(width);
      const auto& m = e.match[k];
      switch (table.keys[k].match) {
        case MatchKind::kExact: {
          const auto* v = std::get_if<uint64_t>(&m);
          if (!v) throw ConfigError(where + ": key " + std::to_string(k) + " needs an exact value");
          if (*v & ~full) throw ConfigError(where + ": exact value wider than the key");
          row.value.push_back(*v);
          row.mask.push_back(full);
          break;
        }
        case MatchKind::kLpm: {
          const auto* v = std::get_if<LpmMatch>(&m);
          if (!v) throw ConfigError(where + ": key " + std::to_string(k) + " needs a value/prefix_len");
          if (v->prefix_len > width) throw ConfigError(where + ": prefix longer than the key");
          uint64_t mask = v->prefix_len == 0 ? 0 : (full & ~low_mask(width - v->prefix_len));
          row.value.push_back(v->value & mask);
          row.mask.push_back(mask);
          row.prefix_len = v->prefix_len;
          break;
        }
        case MatchKind::kTernary: {
          const auto* v = std::get_if<TernaryMatch>(&m);
          if (!v) throw ConfigError(where + ": key " + std::to_string(k) + " needs a value/mask");
          row.value.push_back(v->value & v->mask & full);
          row.mask.push_back(v->mask & full);
          break;
        }
      }
    }
    rows_.push_back(std::move(row));
  }
  std::stable_sort(rows_.begin(), rows_.end(), [](const Row& a, const Row& b) {
    if (a.prefix_len != b.prefix_len) return a.prefix_len > b.prefix_len;
    if (a.priority != b.priority) return a.priority > b.priority;
    return a.order < b.order;
  });
  if (exact_only_) {
    for (std::size_t i = 0; i < rows_.size(); ++i) exact_index_.emplace(hash_key(rows_[i].value), i);
  }
}

InstalledTable::Selected InstalledTable::lookup(const CompiledProgram& cp, const PacketState& st) const {
  uint64_t key_buf[16];
  std::vector<uint64_t> key_heap;
  uint64_t* key = key_buf;
  if (keys_.size() > 16) {
    key_heap.resize(keys_.size());
    key = key_heap.data();
  }
  for (std::size_t k = 0; k < keys_.size(); ++k) key[k] = cp.read(st, keys_[k]);

  if (exact_only_) {
    std::span<const uint64_t> kv(key, keys_.size());
    auto [lo, hi] = exact_index_.equal_range(hash_key(kv));
    const Row* best = nullptr;
    for (auto it = lo; it != hi; ++it) {
      const auto& row = rows_[it->second];
      if (std::equal(row.value.begin(), row.value.end(), kv.begin()) && (!best || row.order < best->order)) best = &row;
    }
    if (best) return {best->action, &best->args, true};
    return {default_action_, &default_args_, false};
  }
  for (const auto& row : rows_) {
    bool ok = true;
    for (std::size_t k = 0; k < keys_.size() && ok; ++k) ok = (key[k] & row.mask[k]) == row.value[k];
    if (ok) return {row.action, &row.args, true};
  }
  return {default_action_, &default_args_, false};
}

// --- ProgramInstance -------------------------------------------------------

ProgramInstance::ProgramInstance(std::shared_ptr<const CompiledProgram> program, std::span<const TableEntry> entries)
    : program_(std::move(program)) {
  const auto& prog = program_->program();
  for (const auto& e : entries) {
    if (!prog.find_table(e.table)) throw ConfigError("entry targets undeclared table '" + e.table + "'");
  }
  tables_.reserve(prog.tables.size());
  for (const auto& t : prog.tables) tables_.emplace_back(*program_, t, entries);
}

ProgramInstance::ProgramInstance(const Program& program, std::span<const TableEntry> entries)
    : ProgramInstance(std::make_shared<const CompiledProgram>(program), entries) {}

const InstalledTable& ProgramInstance::table(std::string_view name) const {
  return tables_[program_->table_index(name)];
}

void ProgramInstance::run_action(std::size_t action, const std::vector<uint64_t>& args, PacketState& st) const {
  const auto& cp = *program_;
  auto eval = [&](const CompiledProgram::CompiledOperand& op) {
    uint64_t v = 0;
    switch (op.kind) {
      case Operand::Kind::kConst: v = op.value; break;
      case Operand::Kind::kParam: v = args[op.param]; break;
      case Operand::Kind::kField: v = cp.read(st, op.field); break;
    }
    return ((v + static_cast<uint64_t>(op.add)) & op.and_mask) | op.or_mask;
  };
  for (const auto& prim : cp.actions_[action].primitives) {
    switch (prim.op) {
      case PrimitiveOp::kSetField:
        // Writes to an invalid header are ignored.
        if (st.is_valid(prim.target.header)) st.fields[prim.target.index] = eval(prim.value) & low_mask(prim.target.width);
        break;
      case PrimitiveOp::kSetMeta:
        st.meta.set(prim.target.meta, eval(prim.value));
        break;
      case PrimitiveOp::kSetEgress:
        st.meta.set(MetaKey::kEgressSpec, eval(prim.value));
        break;
      case PrimitiveOp::kPushHeader:
        if (!st.is_valid(prim.header)) {
          const auto& h = cp.headers_[prim.header];
          std::fill_n(st.fields.begin() + static_cast<std::ptrdiff_t>(h.first_field), h.widths.size(), 0);
          st.valid |= uint64_t{1} << prim.header;
        }
        break;
      case PrimitiveOp::kPopHeader:
        st.valid &= ~(uint64_t{1} << prim.header);
        break;
      case PrimitiveOp::kDrop:
        st.meta.egress_spec = kEgressDrop;
        break;
      case PrimitiveOp::kNoOp:
        break;
    }
  }
}

void ProgramInstance::run_block(const std::vector<CompiledProgram::CompiledNode>& block, PacketState& st) const {
  for (const auto& node : block) {
    if (node.is_apply) {
      auto sel = tables_[node.table].lookup(*program_, st);
      run_action(sel.action, *sel.args, st);
    } else {
      bool eq = st.meta.get(node.meta) == node.value;
      bool cond = node.op == CompareOp::kEq ? eq : !eq;
      run_block(cond ? node.then_block : node.else_block, st);
    }
  }
}

ExecResult ProgramInstance::execute(std::span<const uint8_t> bytes, uint64_t ingress_port) const {
  ExecResult r;
  PacketState st;
  try {
    st = program_->parse(bytes, ingress_port);
  } catch (const ParseError& e) {
    r.disposition = Disposition::drop();
    r.parse_failed = true;
    r.parse_error_state = e.state();
    r.meta.ingress_port = ingress_port;
    return r;
  }
  run_block(program_->ingress_, st);
  run_block(program_->egress_, st);
  r.meta = st.meta;
  r.disposition = disposition_of(st.meta);
  r.bytes = program_->deparse(st);
  return r;
}

ActionCall ProgramInstance::apply_table(std::string_view table, const PacketState& st) const {
  auto sel = this->table(table).lookup(*program_, st);
  return ActionCall{program_->program().actions[sel.action].name, *sel.args};
}

Disposition disposition_of(const Metadata& meta) {
  if (meta.egress_spec == kEgressUnset || meta.egress_spec == kEgressDrop) return Disposition::drop();
  return Disposition::forward(static_cast<uint32_t>(meta.egress_spec));
}

PacketState parse_packet(const Program& p, std::span<const uint8_t> bytes, uint64_t ingress_port) {
  return CompiledProgram(p).parse(bytes, ingress_port);
}

ActionCall apply_table(const Program& p, std::string_view table, std::span<const TableEntry> entries,
                       const PacketState& st) {
  return ProgramInstance(p, entries).apply_table(table, st);
}

ExecResult execute_pipeline(const Program& p, std::span<const TableEntry> entries, std::span<const uint8_t> bytes,
                            uint64_t ingress_port) {
  return ProgramInstance(p, entries).execute(bytes, ingress_port);
}

}  // namespace hymos::p4ir
