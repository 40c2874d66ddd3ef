#include "testforge/sandbox/termination.hpp"

#include <sys/wait.h>

#include <csignal>
#include <cstring>

namespace testforge::sandbox {

namespace t = termination;

namespace {
template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
}  // namespace

std::string kind_tag(const TerminationKind& kind) {
  return std::visit(
      overloaded{
          [](const t::Exited&) { return std::string("exited"); },
          [](const t::Signaled&) { return std::string("signaled"); },
          [](const t::CpuTimeViolation&) { return std::string("cpu_time"); },
          [](const t::WallTimeViolation&) { return std::string("wall_time"); },
          [](const t::MemoryViolation&) { return std::string("memory"); },
          [](const t::OutputViolation&) { return std::string("output"); },
          [](const t::IllegalSyscall&) {
            return std::string("illegal_syscall");
          },
          [](const t::IsolationSetupFailure&) {
            return std::string("isolation_setup_failure");
          },
      },
      kind);
}

std::string describe(const TerminationKind& kind) {
  return std::visit(
      overloaded{
          [](const t::Exited& e) {
            return "Exited(" + std::to_string(e.code) + ")";
          },
          [](const t::Signaled& s) {
            const char* abbrev = sigabbrev_np(s.signal);
            return "Signaled(" +
                   (abbrev ? std::string("SIG") + abbrev
                           : std::to_string(s.signal)) +
                   ")";
          },
          [](const t::CpuTimeViolation&) {
            return std::string("CpuTimeViolation");
          },
          [](const t::WallTimeViolation&) {
            return std::string("WallTimeViolation");
          },
          [](const t::MemoryViolation&) {
            return std::string("MemoryViolation");
          },
          [](const t::OutputViolation&) {
            return std::string("OutputViolation");
          },
          [](const t::IllegalSyscall& i) {
            return "IllegalSyscall(" + i.identifier + ")";
          },
          [](const t::IsolationSetupFailure& f) {
            return "IsolationSetupFailure(" + f.reason + ")";
          },
      },
      kind);
}

TerminationKind classify_termination(
    int raw_wait_status, const ResourceUsage& usage,
    const ExecutionLimits& limits,
    const std::optional<std::string>& illegal_syscall) {
  const bool signaled = WIFSIGNALED(raw_wait_status);
  const int sig = signaled ? WTERMSIG(raw_wait_status) : 0;

  if (!limits.unlimited && usage.peak_memory_bytes > limits.memory_bytes) {
    return t::MemoryViolation{};
  }
  if (!limits.unlimited &&
      (usage.cpu_time_ms >= static_cast<double>(limits.cpu_time_ms) ||
       sig == SIGXCPU)) {
    return t::CpuTimeViolation{};
  }
  if (usage.wall_time_ms >= static_cast<double>(limits.wall_time_ms)) {
    return t::WallTimeViolation{};
  }
  if (usage.bytes_written_stdout > limits.output_cap_bytes ||
      usage.bytes_written_stderr > limits.output_cap_bytes ||
      sig == SIGXFSZ) {
    return t::OutputViolation{};
  }
  if (illegal_syscall) return t::IllegalSyscall{*illegal_syscall};
  if (signaled) return t::Signaled{sig};
  if (WIFEXITED(raw_wait_status)) return t::Exited{WEXITSTATUS(raw_wait_status)};
  // Stopped/continued statuses never reach classification; report the raw
  // value as a signal so the mapping stays total.
  return t::Signaled{raw_wait_status & 0x7f};
}

}  // namespace testforge::sandbox
