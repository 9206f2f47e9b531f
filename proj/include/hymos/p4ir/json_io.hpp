#pragma once

#include <span>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "hymos/p4ir/program.hpp"

namespace hymos::p4ir {

/// Loads a program document. Checks only the schema shape: unknown keys,
/// missing required keys and wrong JSON types raise SchemaError with the
/// JSON-path of the offending node. Name resolution is left to validate().
Program load_program(std::string_view text);
Program program_from_json(const nlohmann::json& doc);
nlohmann::ordered_json program_to_json(const Program& program);

/// Loads `{"entries": [...]}`. Named action parameters are ordered using the
/// action declarations of `program`.
std::vector<TableEntry> load_entries(std::string_view text, const Program& program);
std::vector<TableEntry> entries_from_json(const nlohmann::json& doc, const Program& program);
nlohmann::ordered_json entries_to_json(std::span<const TableEntry> entries, const Program& program);

}  // namespace hymos::p4ir
