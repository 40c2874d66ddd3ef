#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "testforge/sandbox/sandbox.hpp"
#include "testforge/toolchain/toolchain.hpp"

namespace testforge::fixtures {

inline std::filesystem::path fixture_dir() { return TESTFORGE_FIXTURE_DIR; }

inline std::string read_text(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::string fixture(const std::string& rel) { return read_text(fixture_dir() / rel); }

inline const toolchain::ProfileRegistry& registry() {
  static toolchain::ProfileRegistry r(TESTFORGE_PROFILE_DIR);
  return r;
}

inline std::filesystem::path sandbox_root() { return sandbox::default_sandbox_root(); }

}  // namespace testforge::fixtures
