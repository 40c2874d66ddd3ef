#pragma once

#include <optional>
#include <string>
#include <variant>

#include "testforge/sandbox/limits.hpp"

namespace testforge::sandbox {

namespace termination {

struct Exited {
  int code = 0;
  bool operator==(const Exited&) const = default;
};
struct Signaled {
  int signal = 0;
  bool operator==(const Signaled&) const = default;
};
struct CpuTimeViolation {
  bool operator==(const CpuTimeViolation&) const = default;
};
struct WallTimeViolation {
  bool operator==(const WallTimeViolation&) const = default;
};
struct MemoryViolation {
  bool operator==(const MemoryViolation&) const = default;
};
struct OutputViolation {
  bool operator==(const OutputViolation&) const = default;
};
struct IllegalSyscall {
  std::string identifier;
  bool operator==(const IllegalSyscall&) const = default;
};
struct IsolationSetupFailure {
  std::string reason;
  bool operator==(const IsolationSetupFailure&) const = default;
};

}  // namespace termination

using TerminationKind =
    std::variant<termination::Exited, termination::Signaled,
                 termination::CpuTimeViolation, termination::WallTimeViolation,
                 termination::MemoryViolation, termination::OutputViolation,
                 termination::IllegalSyscall,
                 termination::IsolationSetupFailure>;

/// Short tag: "exited", "signaled", "cpu_time", "wall_time", "memory",
/// "output", "illegal_syscall", "isolation_setup_failure".
std::string kind_tag(const TerminationKind& kind);

/// Human-readable form, e.g. "Exited(0)" or "IllegalSyscall(socket)".
std::string describe(const TerminationKind& kind);

/// Maps a finished child's raw wait status and measured usage to exactly one
/// termination kind. Limit violations take precedence over the signal they
/// manifest as: memory > cpu > wall > output > illegal syscall > signal >
/// exit. `illegal_syscall` carries the tracer's kill reason, if any.
TerminationKind classify_termination(
    int raw_wait_status, const ResourceUsage& usage,
    const ExecutionLimits& limits,
    const std::optional<std::string>& illegal_syscall = std::nullopt);

}  // namespace testforge::sandbox
