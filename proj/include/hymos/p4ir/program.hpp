#pragma once

// P4-subset intermediate representation. Everything here is plain data keyed
// by name; CompiledProgram (interpreter.hpp) resolves names to indices.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace hymos::p4ir {

inline constexpr std::string_view kAccept = "accept";
inline constexpr std::string_view kReject = "reject";
/// Prefix of field references that name standard metadata, e.g. `meta.pcp`.
inline constexpr std::string_view kMetaHeader = "meta";

struct FieldDef {
  std::string name;
  unsigned width = 0;  // bits, 1..64
};

struct HeaderType {
  std::string name;
  std::vector<FieldDef> fields;

  unsigned total_bits() const {
    unsigned n = 0;
    for (const auto& f : fields) n += f.width;
    return n;
  }
};

/// Arithmetic applied to an operand's base value, in order: add, and, or.
/// The result is truncated to the width of whatever receives it.
struct Operand {
  enum class Kind { kConst, kParam, kField };
  Kind kind = Kind::kConst;
  uint64_t value = 0;  // kConst
  std::string name;    // kParam: parameter name; kField: "header.field" or "meta.key"
  int64_t add = 0;
  std::optional<uint64_t> and_mask;
  std::optional<uint64_t> or_mask;

  static Operand constant(uint64_t v) { return Operand{Kind::kConst, v, {}, 0, {}, {}}; }
  static Operand param(std::string n) { return Operand{Kind::kParam, 0, std::move(n), 0, {}, {}}; }
  static Operand field(std::string n) { return Operand{Kind::kField, 0, std::move(n), 0, {}, {}}; }
};

struct ParserSelect {
  std::optional<std::string> field;  // "header.field" or "meta.key"
  // Bits peeked relative to the current cursor without consuming them.
  struct Lookahead {
    unsigned offset_bits = 0;
    unsigned width = 0;
  };
  std::optional<Lookahead> lookahead;
};

struct ParserCase {
  uint64_t value = 0;
  std::string next;
};

/// Metadata assignment executed when a parser state is entered (after extract).
struct MetaAssign {
  std::string meta;  // metadata key without the "meta." prefix
  Operand value;
};

struct ParserState {
  std::string name;
  std::optional<std::string> extract;  // header name
  std::vector<MetaAssign> assignments;
  std::optional<ParserSelect> select;
  std::vector<ParserCase> cases;
  std::string default_next{kAccept};
};

struct Parser {
  std::string start;
  std::vector<ParserState> states;
};

struct ActionParam {
  std::string name;
  unsigned width = 0;
};

enum class PrimitiveOp { kSetField, kSetEgress, kPushHeader, kPopHeader, kSetMeta, kDrop, kNoOp };

struct Primitive {
  PrimitiveOp op = PrimitiveOp::kNoOp;
  std::string target;  // set_field: "h.f"; set_meta: key; push/pop: header name
  Operand value;       // set_field, set_egress, set_meta
};

struct Action {
  std::string name;
  std::vector<ActionParam> params;
  std::vector<Primitive> primitives;
};

enum class MatchKind { kExact, kLpm, kTernary };

struct TableKey {
  std::string field;
  MatchKind match = MatchKind::kExact;
};

/// Action name plus values bound to its parameters (in declaration order).
struct ActionCall {
  std::string action;
  std::vector<uint64_t> args;

  bool operator==(const ActionCall&) const = default;
};

struct Table {
  std::string name;
  std::vector<TableKey> keys;
  std::vector<std::string> allowed_actions;
  ActionCall default_action;
};

struct Statement;
using Block = std::vector<Statement>;

enum class CompareOp { kEq, kNe };

/// `meta.<key> == value` or `meta.<key> != value`.
struct MetaPredicate {
  std::string meta;
  CompareOp op = CompareOp::kEq;
  uint64_t value = 0;
};

struct ApplyStmt {
  std::string table;
};

struct IfStmt {
  MetaPredicate cond;
  Block then_block;
  Block else_block;
};

struct Statement {
  std::variant<ApplyStmt, IfStmt> node;
};

struct Program {
  std::vector<HeaderType> headers;
  Parser parser;
  std::vector<Action> actions;
  std::vector<Table> tables;
  Block ingress;
  Block egress;

  const HeaderType* find_header(std::string_view name) const;
  const Action* find_action(std::string_view name) const;
  const Table* find_table(std::string_view name) const;
  const ParserState* find_state(std::string_view name) const;
};

struct LpmMatch {
  uint64_t value = 0;
  unsigned prefix_len = 0;
};

struct TernaryMatch {
  uint64_t value = 0;
  uint64_t mask = 0;
};

using MatchValue = std::variant<uint64_t, LpmMatch, TernaryMatch>;

struct TableEntry {
  std::string table;
  std::vector<MatchValue> match;  // one per table key, same order
  std::optional<uint32_t> priority;
  ActionCall action;
};

/// Counts the tables applied anywhere in a block (including nested branches).
void collect_applied_tables(const Block& block, std::vector<std::string>& out);

}  // namespace hymos::p4ir
