#include "hymos/p4ir/validate.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "hymos/error.hpp"
#include "hymos/p4ir/metadata.hpp"
#include "hymos/p4ir/values.hpp"

namespace hymos::p4ir {
namespace {

std::string idx(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

class Checker {
 public:
  explicit Checker(const Program& p) : p_(p) {}

  std::vector<Diagnostic> run() {
    check_headers();
    check_parser();
    check_actions();
    check_tables();
    check_block(p_.ingress, "$.ingress");
    check_block(p_.egress, "$.egress");
    return std::move(diags_);
  }

 private:
  void error(std::string loc, std::string msg) { diags_.push_back({Severity::kError, std::move(loc), std::move(msg)}); }

  // Width of a "header.field" / "meta.key" reference, or 0 if it does not resolve.
  unsigned field_width(const std::string& ref) const {
    auto dot = ref.find('.');
    if (dot == std::string::npos) return 0;
    auto hdr = ref.substr(0, dot);
    auto fld = ref.substr(dot + 1);
    if (hdr == kMetaHeader) {
      auto key = meta_key_from_name(fld);
      return key ? meta_key_width(*key) : 0;
    }
    const auto* h = p_.find_header(hdr);
    if (!h) return 0;
    for (const auto& f : h->fields) {
      if (f.name == fld) return f.width;
    }
    return 0;
  }

  void check_operand(const Operand& op, const Action* action, const std::string& loc, unsigned target_width) {
    switch (op.kind) {
      case Operand::Kind::kConst:
        if (target_width != 0 && op.add == 0 && !op.or_mask && (op.value & ~low_mask(target_width)) != 0) {
          error(loc, "literal " + format_hex(op.value) + " does not fit in " + std::to_string(target_width) + " bits");
        }
        break;
      case Operand::Kind::kParam: {
        bool ok = action && std::any_of(action->params.begin(), action->params.end(),
                                        [&](const ActionParam& prm) { return prm.name == op.name; });
        if (!ok) error(loc, "operand references undeclared parameter '" + op.name + "'");
        break;
      }
      case Operand::Kind::kField:
        if (field_width(op.name) == 0) error(loc, "unresolved field reference '" + op.name + "'");
        break;
    }
  }

  void check_headers() {
    std::set<std::string> names;
    for (std::size_t i = 0; i < p_.headers.size(); ++i) {
      const auto& h = p_.headers[i];
      auto loc = idx("$.headers", i);
      if (h.name.empty() || h.name.find('.') != std::string::npos || h.name == kMetaHeader) {
        error(loc + ".name", "invalid header name '" + h.name + "'");
      }
      if (!names.insert(h.name).second) error(loc + ".name", "duplicate header '" + h.name + "'");
      if (h.fields.empty()) error(loc + ".fields", "header has no fields");
      std::set<std::string> fields;
      for (std::size_t f = 0; f < h.fields.size(); ++f) {
        const auto& fd = h.fields[f];
        auto floc = idx(loc + ".fields", f);
        if (!fields.insert(fd.name).second) error(floc, "duplicate field '" + fd.name + "' in header '" + h.name + "'");
        if (fd.width < 1 || fd.width > 64) error(floc + ".width", "field width must be 1..64 bits");
      }
      if (h.total_bits() % 8 != 0) error(loc, "header '" + h.name + "' width is not a multiple of 8 bits");
    }
  }

  bool is_terminal(const std::string& n) const { return n == kAccept || n == kReject; }

  void check_parser() {
    const auto& states = p_.parser.states;
    std::set<std::string> names;
    for (std::size_t i = 0; i < states.size(); ++i) {
      if (!names.insert(states[i].name).second) error(idx("$.parser.states", i) + ".name", "duplicate parser state '" + states[i].name + "'");
    }
    if (!p_.find_state(p_.parser.start)) error("$.parser.start", "start state '" + p_.parser.start + "' is not declared");

    for (std::size_t i = 0; i < states.size(); ++i) {
      const auto& s = states[i];
      auto loc = idx("$.parser.states", i);
      if (s.extract && !p_.find_header(*s.extract)) error(loc + ".extract", "extracts undeclared header '" + *s.extract + "'");
      for (std::size_t a = 0; a < s.assignments.size(); ++a) {
        const auto& as = s.assignments[a];
        auto aloc = idx(loc + ".set", a);
        auto key = meta_key_from_name(as.meta);
        if (!key) error(aloc + ".meta", "unknown metadata key '" + as.meta + "'");
        check_operand(as.value, nullptr, aloc + ".value", key ? meta_key_width(*key) : 0);
      }
      unsigned sel_width = 0;
      if (s.select) {
        if (s.select->field) {
          sel_width = field_width(*s.select->field);
          if (sel_width == 0) error(loc + ".select", "unresolved field reference '" + *s.select->field + "'");
        } else {
          sel_width = s.select->lookahead->width;
          if (sel_width < 1 || sel_width > 64) error(loc + ".select.lookahead", "lookahead width must be 1..64 bits");
        }
      } else if (!s.cases.empty()) {
        error(loc + ".cases", "cases without a select");
      }
      for (std::size_t c = 0; c < s.cases.size(); ++c) {
        const auto& cs = s.cases[c];
        auto cloc = idx(loc + ".cases", c);
        if (!is_terminal(cs.next) && !p_.find_state(cs.next)) error(cloc + ".next", "unknown next state '" + cs.next + "'");
        if (sel_width > 0 && sel_width < 64 && (cs.value & ~low_mask(sel_width)) != 0) {
          error(cloc + ".value", "case value does not fit the select width");
        }
      }
      if (!is_terminal(s.default_next) && !p_.find_state(s.default_next)) {
        error(loc + ".default", "unknown next state '" + s.default_next + "'");
      }
    }
    if (!p_.find_state(p_.parser.start)) return;

    // Acyclicity, then the per-path extraction rule (only meaningful on a DAG).
    std::map<std::string, int> color;
    std::string cycle_at;
    std::function<bool(const ParserState&)> dfs = [&](const ParserState& s) {
      color[s.name] = 1;
      auto visit = [&](const std::string& next) {
        if (is_terminal(next)) return false;
        const auto* ns = p_.find_state(next);
        if (!ns) return false;
        if (color[next] == 1) {
          cycle_at = next;
          return true;
        }
        return color[next] == 0 && dfs(*ns);
      };
      for (const auto& c : s.cases) {
        if (visit(c.next)) return true;
      }
      if (visit(s.default_next)) return true;
      color[s.name] = 2;
      return false;
    };
    bool cyclic = false;
    for (const auto& s : states) {
      if (color[s.name] == 0 && dfs(s)) {
        cyclic = true;
        break;
      }
    }
    if (cyclic) {
      error("$.parser", "violates invariant: parser graph is acyclic (cycle through state '" + cycle_at + "')");
      return;
    }

    std::set<std::string> reported;
    std::vector<std::string> extracted;
    std::function<void(const ParserState&)> walk = [&](const ParserState& s) {
      bool pushed = false;
      if (s.extract) {
        if (std::find(extracted.begin(), extracted.end(), *s.extract) != extracted.end()) {
          if (reported.insert(*s.extract).second) {
            error("$.parser", "header '" + *s.extract + "' is extracted twice on a parser path (state '" + s.name + "')");
          }
        } else {
          extracted.push_back(*s.extract);
          pushed = true;
        }
      }
      std::set<std::string> seen;
      auto go = [&](const std::string& next) {
        if (is_terminal(next) || !seen.insert(next).second) return;
        if (const auto* ns = p_.find_state(next)) walk(*ns);
      };
      for (const auto& c : s.cases) go(c.next);
      go(s.default_next);
      if (pushed) extracted.pop_back();
    };
    walk(*p_.find_state(p_.parser.start));
  }

  void check_actions() {
    std::set<std::string> names;
    for (std::size_t i = 0; i < p_.actions.size(); ++i) {
      const auto& a = p_.actions[i];
      auto loc = idx("$.actions", i);
      if (!names.insert(a.name).second) error(loc + ".name", "duplicate action '" + a.name + "'");
      std::set<std::string> params;
      for (std::size_t k = 0; k < a.params.size(); ++k) {
        auto ploc = idx(loc + ".params", k);
        if (!params.insert(a.params[k].name).second) error(ploc, "duplicate parameter '" + a.params[k].name + "'");
        if (a.params[k].width < 1 || a.params[k].width > 64) error(ploc + ".width", "parameter width must be 1..64 bits");
      }
      for (std::size_t k = 0; k < a.primitives.size(); ++k) {
        const auto& prim = a.primitives[k];
        auto ploc = idx(loc + ".primitives", k);
        switch (prim.op) {
          case PrimitiveOp::kSetField: {
            unsigned w = 0;
            if (prim.target.rfind(std::string(kMetaHeader) + ".", 0) == 0) {
              error(ploc + ".field", "set_field cannot target metadata; use set_meta");
            } else {
              w = field_width(prim.target);
              if (w == 0) error(ploc + ".field", "unresolved field reference '" + prim.target + "'");
            }
            check_operand(prim.value, &a, ploc + ".value", w);
            break;
          }
          case PrimitiveOp::kSetEgress:
            check_operand(prim.value, &a, ploc + ".value", meta_key_width(MetaKey::kEgressSpec));
            break;
          case PrimitiveOp::kSetMeta: {
            auto key = meta_key_from_name(prim.target);
            if (!key) error(ploc + ".meta", "unknown metadata key '" + prim.target + "'");
            check_operand(prim.value, &a, ploc + ".value", key ? meta_key_width(*key) : 0);
            break;
          }
          case PrimitiveOp::kPushHeader:
          case PrimitiveOp::kPopHeader:
            if (!p_.find_header(prim.target)) error(ploc + ".header", "undeclared header '" + prim.target + "'");
            break;
          case PrimitiveOp::kDrop:
          case PrimitiveOp::kNoOp:
            break;
        }
      }
    }
  }

  void check_tables() {
    std::set<std::string> names;
    for (std::size_t i = 0; i < p_.tables.size(); ++i) {
      const auto& t = p_.tables[i];
      auto loc = idx("$.tables", i);
      if (!names.insert(t.name).second) error(loc + ".name", "duplicate table '" + t.name + "'");
      int lpm = 0;
      for (std::size_t k = 0; k < t.keys.size(); ++k) {
        if (field_width(t.keys[k].field) == 0) error(idx(loc + ".keys", k) + ".field", "unresolved field reference '" + t.keys[k].field + "'");
        if (t.keys[k].match == MatchKind::kLpm) ++lpm;
      }
      if (lpm > 1) error(loc + ".keys", "table '" + t.name + "' has " + std::to_string(lpm) + " lpm keys; at most one is allowed");
      for (std::size_t k = 0; k < t.allowed_actions.size(); ++k) {
        if (!p_.find_action(t.allowed_actions[k])) error(idx(loc + ".actions", k), "undeclared action '" + t.allowed_actions[k] + "'");
      }
      const auto& def = t.default_action;
      const auto* a = p_.find_action(def.action);
      if (!a) {
        error(loc + ".default_action", "undeclared default action '" + def.action + "'");
      } else {
        if (a->params.size() != def.args.size()) {
          error(loc + ".default_action.params", "default action '" + def.action + "' expects " +
                                                    std::to_string(a->params.size()) + " parameters, got " +
                                                    std::to_string(def.args.size()));
        }
        if (std::find(t.allowed_actions.begin(), t.allowed_actions.end(), def.action) == t.allowed_actions.end()) {
          error(loc + ".default_action", "default action '" + def.action + "' is not in the table's action list");
        }
      }
    }
  }

  void check_block(const Block& block, const std::string& loc) {
    for (std::size_t i = 0; i < block.size(); ++i) {
      auto sloc = idx(loc, i);
      if (const auto* a = std::get_if<ApplyStmt>(&block[i].node)) {
        if (!p_.find_table(a->table)) error(sloc + ".apply", "pipeline applies undeclared table '" + a->table + "'");
      } else {
        const auto& s = std::get<IfStmt>(block[i].node);
        if (!meta_key_from_name(s.cond.meta)) error(sloc + ".if.meta", "unknown metadata key '" + s.cond.meta + "'");
        check_block(s.then_block, sloc + ".then");
        check_block(s.else_block, sloc + ".else");
      }
    }
  }

  const Program& p_;
  std::vector<Diagnostic> diags_;
};

}  // namespace

std::vector<Diagnostic> validate(const Program& program) { return Checker(program).run(); }

bool has_errors(const std::vector<Diagnostic>& diags) {
  return std::any_of(diags.begin(), diags.end(), [](const Diagnostic& d) { return d.severity == Severity::kError; });
}

std::string format_diagnostics(const std::vector<Diagnostic>& diags) {
  std::ostringstream os;
  for (const auto& d : diags) {
    os << (d.severity == Severity::kError ? "error" : "warning") << ": " << d.location << ": " << d.message << "\n";
  }
  return os.str();
}

void require_valid(const Program& program) {
  auto diags = validate(program);
  if (has_errors(diags)) throw ValidationError("program failed validation:\n" + format_diagnostics(diags));
}

}  // namespace hymos::p4ir
