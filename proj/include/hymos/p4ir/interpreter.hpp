#pragma once

// Reference interpreter for the P4-subset IR. A Program is compiled once
// (names resolved to slots) and paired with installed table entries in a
// ProgramInstance, which is what the simulator drives per packet. The free
// functions at the bottom are one-shot conveniences over the same machinery.

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "hymos/error.hpp"
#include "hymos/p4ir/metadata.hpp"
#include "hymos/p4ir/program.hpp"

namespace hymos::p4ir {

/// Raised when the parser reaches `reject` or runs out of bytes mid-extract.
class ParseError : public Error {
 public:
  ParseError(std::string state, const std::string& what)
      : Error("parse error in state '" + state + "': " + what), state_(std::move(state)) {}
  const std::string& state() const noexcept { return state_; }

 private:
  std::string state_;
};

struct Disposition {
  enum class Kind { kForward, kDrop };
  Kind kind = Kind::kDrop;
  uint32_t port = 0;  // meaningful for kForward

  static Disposition forward(uint32_t p) { return {Kind::kForward, p}; }
  static Disposition drop() { return {Kind::kDrop, 0}; }
  bool is_forward() const { return kind == Kind::kForward; }
  bool operator==(const Disposition&) const = default;
};

/// Extracted header stack plus metadata. Field values live in one flat array
/// indexed through CompiledProgram's field slots.
struct PacketState {
  std::vector<uint64_t> fields;
  uint64_t valid = 0;  // bit h set iff header h is valid
  Metadata meta;
  std::vector<uint8_t> payload;  // bytes following the parsed headers

  bool is_valid(std::size_t header) const { return (valid >> header) & 1u; }
};

/// A resolved "header.field" or "meta.key" reference.
struct FieldSlot {
  bool is_meta = false;
  MetaKey meta{};
  uint16_t header = 0;
  uint16_t index = 0;  // into PacketState::fields
  unsigned width = 0;
};

class CompiledProgram {
 public:
  /// Throws ValidationError unless validate(program) reports no errors.
  explicit CompiledProgram(Program program);

  const Program& program() const noexcept { return program_; }

  /// Throws ValidationError for references that do not resolve.
  FieldSlot slot(std::string_view ref) const;
  std::size_t header_index(std::string_view name) const;
  std::size_t table_index(std::string_view name) const;
  std::size_t action_index(std::string_view name) const;

  uint64_t read(const PacketState& st, const FieldSlot& s) const;
  uint64_t read(const PacketState& st, std::string_view ref) const { return read(st, slot(ref)); }

  /// Runs the parser. Throws ParseError.
  PacketState parse(std::span<const uint8_t> bytes, uint64_t ingress_port) const;
  /// Emits valid headers in declaration order followed by the payload.
  std::vector<uint8_t> deparse(const PacketState& st) const;

  struct CompiledOperand;
  struct CompiledPrimitive;
  struct CompiledAction;
  struct CompiledState;
  struct CompiledNode;
  struct CompiledHeader;

 private:
  friend class ProgramInstance;
  friend class InstalledTable;

  Program program_;
  std::vector<CompiledHeader> headers_;
  std::vector<CompiledState> states_;
  std::size_t start_state_ = 0;
  std::vector<CompiledAction> actions_;
  std::vector<CompiledNode> ingress_;
  std::vector<CompiledNode> egress_;
  std::size_t field_count_ = 0;

 public:
  ~CompiledProgram();
  CompiledProgram(const CompiledProgram&) = delete;
  CompiledProgram& operator=(const CompiledProgram&) = delete;
};

/// One table with its entries installed. Entries are checked at install time
/// (match shape, action membership and arity, priority presence).
class InstalledTable {
 public:
  InstalledTable(const CompiledProgram& cp, const Table& table, std::span<const TableEntry> entries);

  struct Selected {
    std::size_t action = 0;  // index into the program's actions
    const std::vector<uint64_t>* args = nullptr;
    bool hit = false;
  };

  Selected lookup(const CompiledProgram& cp, const PacketState& st) const;
  const Table& table() const noexcept { return *table_; }
  std::size_t size() const noexcept { return rows_.size(); }

 private:
  struct Row {
    std::vector<uint64_t> value;  // pre-masked
    std::vector<uint64_t> mask;
    unsigned prefix_len = 0;
    uint32_t priority = 0;
    std::size_t order = 0;
    std::size_t action = 0;
    std::vector<uint64_t> args;
  };

  const Table* table_;
  std::vector<FieldSlot> keys_;
  std::vector<Row> rows_;  // sorted: longest prefix, highest priority, earliest install
  bool exact_only_ = false;
  std::unordered_multimap<uint64_t, std::size_t> exact_index_;
  std::size_t default_action_ = 0;
  std::vector<uint64_t> default_args_;
};

struct ExecResult {
  Disposition disposition;
  std::vector<uint8_t> bytes;  // deparsed output; empty when dropped by a parse failure
  Metadata meta;
  bool parse_failed = false;
  std::string parse_error_state;
};

/// A compiled program plus installed entries for every table.
class ProgramInstance {
 public:
  ProgramInstance(std::shared_ptr<const CompiledProgram> program, std::span<const TableEntry> entries);
  ProgramInstance(const Program& program, std::span<const TableEntry> entries);

  const CompiledProgram& compiled() const noexcept { return *program_; }
  const InstalledTable& table(std::string_view name) const;

  /// Parse, ingress pipeline, egress pipeline, deparse. A parse failure yields
  /// Drop with `parse_failed` set.
  ExecResult execute(std::span<const uint8_t> bytes, uint64_t ingress_port) const;

  /// Runs a single table on an already parsed packet and returns the chosen action.
  ActionCall apply_table(std::string_view table, const PacketState& st) const;

 private:
  void run_block(const std::vector<CompiledProgram::CompiledNode>& block, PacketState& st) const;
  void run_action(std::size_t action, const std::vector<uint64_t>& args, PacketState& st) const;

  std::shared_ptr<const CompiledProgram> program_;
  std::vector<InstalledTable> tables_;
};

// One-shot conveniences (compile on every call).
PacketState parse_packet(const Program& p, std::span<const uint8_t> bytes, uint64_t ingress_port);
ActionCall apply_table(const Program& p, std::string_view table, std::span<const TableEntry> entries,
                       const PacketState& st);
ExecResult execute_pipeline(const Program& p, std::span<const TableEntry> entries, std::span<const uint8_t> bytes,
                            uint64_t ingress_port);

/// Resolves egress_spec to the final disposition (UNSET and DROP both drop).
Disposition disposition_of(const Metadata& meta);

}  // namespace hymos::p4ir
