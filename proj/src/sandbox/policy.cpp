#include "testforge/sandbox/policy.hpp"

#include "testforge/errors.hpp"
#include "testforge/sandbox/limits.hpp"

namespace testforge::sandbox {

ExecutionLimits ExecutionLimits::unrestricted() {
  ExecutionLimits l;
  l.unlimited = true;
  l.wall_time_ms = 300'000;
  l.output_cap_bytes = 256 * kMiB;
  return l;
}

void ExecutionLimits::validate() const {
  auto positive = [](std::int64_t v, const char* what) {
    if (v <= 0) throw InputError(std::string("limit must be positive: ") + what);
  };
  positive(cpu_time_ms, "cpu_time_ms");
  positive(wall_time_ms, "wall_time_ms");
  positive(memory_bytes, "memory_bytes");
  positive(file_size_bytes, "file_size_bytes");
  positive(stack_bytes, "stack_bytes");
  positive(output_cap_bytes, "output_cap_bytes");
}

void IsolationPolicy::validate() const {
  if (syscall_whitelist.empty()) {
    throw InputError("isolation policy has an empty syscall whitelist");
  }
  if (drop_to_uid == 0 || drop_to_gid == 0) {
    throw InputError("isolation policy must not run guests as root");
  }
}

}  // namespace testforge::sandbox
