#pragma once

#include <string>

#include "hymos/io.hpp"

namespace hymos::testing {

inline std::string data_path(const std::string& name) { return std::string(HYMOS_DATA_DIR) + "/" + name; }
inline std::string data_file(const std::string& name) { return read_text_file(data_path(name)); }

}  // namespace hymos::testing
