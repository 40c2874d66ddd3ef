#pragma once

#include <nlohmann/json.hpp>

#include <string>

namespace testforge {

// Guest output is arbitrary bytes; invalid UTF-8 is replaced instead of
// throwing at serialization time.
inline std::string dump_json(const nlohmann::json& j, int indent = -1) {
  return j.dump(indent, ' ', false, nlohmann::json::error_handler_t::replace);
}

}  // namespace testforge
