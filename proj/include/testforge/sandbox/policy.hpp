#pragma once

#include <filesystem>
#include <string>

#include "testforge/sandbox/syscalls.hpp"

namespace testforge::sandbox {

inline constexpr unsigned kDefaultSandboxUid = 1536;
inline constexpr unsigned kDefaultSandboxGid = 1536;

struct IsolationPolicy {
  // Profile the whitelist was built for ("cpp", "python3", ...).
  std::string profile;
  SyscallSet syscall_whitelist;
  unsigned drop_to_uid = kDefaultSandboxUid;
  unsigned drop_to_gid = kDefaultSandboxGid;
  bool network_isolated = true;
  bool readonly_root = true;
  // When set it must name the execution workdir, the only writable mount.
  std::filesystem::path writable_workdir;

  /// Throws InputError on an empty whitelist or a root uid/gid.
  void validate() const;
};

}  // namespace testforge::sandbox
