#pragma once

#include <cstdint>

namespace testforge::sandbox {

inline constexpr std::int64_t kMiB = std::int64_t{1} << 20;
inline constexpr std::int64_t kGiB = std::int64_t{1} << 30;

struct ExecutionLimits {
  std::int64_t cpu_time_ms = 2000;
  std::int64_t wall_time_ms = 10000;
  // Applied as both the address-space and data-segment rlimit.
  std::int64_t memory_bytes = 512 * kMiB;
  std::int64_t file_size_bytes = 64 * kMiB;
  std::int64_t stack_bytes = 256 * kMiB;
  std::int64_t output_cap_bytes = 64 * kMiB;
  // Disables cpu and memory caps. Wall time and output caps stay in force.
  bool unlimited = false;

  /// Host-protection profile for generator runs: no cpu/memory caps, a
  /// 300 s wall backstop and a 256 MiB output cap.
  static ExecutionLimits unrestricted();

  /// Throws InputError when any limit is non-positive.
  void validate() const;

  bool operator==(const ExecutionLimits&) const = default;
};

struct ResourceUsage {
  double cpu_time_ms = 0;
  double wall_time_ms = 0;
  std::int64_t peak_memory_bytes = 0;
  // Full sizes written by the guest, before truncation at the output cap.
  std::int64_t bytes_written_stdout = 0;
  std::int64_t bytes_written_stderr = 0;
  bool stdout_truncated = false;
  bool stderr_truncated = false;
};

}  // namespace testforge::sandbox
