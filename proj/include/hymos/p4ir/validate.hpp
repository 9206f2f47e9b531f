#pragma once

#include <string>
#include <vector>

#include "hymos/p4ir/program.hpp"

namespace hymos::p4ir {

enum class Severity { kError, kWarning };

struct Diagnostic {
  Severity severity = Severity::kError;
  std::string location;  // JSON-path style, e.g. "$.tables[1].keys"
  std::string message;
};

/// Checks every structural invariant of the IR. Returns an empty list iff the
/// program is usable by the interpreter and the translator.
std::vector<Diagnostic> validate(const Program& program);

bool has_errors(const std::vector<Diagnostic>& diags);
std::string format_diagnostics(const std::vector<Diagnostic>& diags);

/// Throws ValidationError carrying the formatted diagnostics if any error is found.
void require_valid(const Program& program);

}  // namespace hymos::p4ir
