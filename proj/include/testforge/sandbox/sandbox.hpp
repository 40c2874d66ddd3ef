#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "testforge/sandbox/limits.hpp"
#include "testforge/sandbox/policy.hpp"
#include "testforge/sandbox/termination.hpp"

namespace testforge::sandbox {

struct ExecutionOutcome {
  TerminationKind termination;
  std::string stdout_data;  // truncated at the output cap
  std::string stderr_data;  // truncated at the output cap
  ResourceUsage usage;
};

/// Syscalls observed during an audited run (audit mode never kills).
struct SyscallAudit {
  std::set<std::string> observed;
};

struct ExecuteOptions {
  // Extra environment entries; PATH, HOME, TMPDIR and LANG are always set.
  std::map<std::string, std::string> env;
  // When non-null the whitelist is not enforced and every syscall the guest
  // makes is recorded instead. Used to build whitelist files.
  SyscallAudit* audit = nullptr;
};

/// Runs `command` as an untrusted guest inside `workdir`.
///
/// The child gets fresh network and mount namespaces (read-only root, the
/// workdir the only writable mount), rlimits, and the policy's uid/gid
/// before exec. Every syscall is intercepted with ptrace and checked against
/// the whitelist; the first disallowed call kills the guest's process group.
/// Streams go through `stdin.txt`, `stdout.txt` and `stderr.txt` inside the
/// workdir. If any isolation step fails the guest never runs and the outcome
/// is IsolationSetupFailure.
///
/// Must be called from the thread that will consume all trace events for
/// the child; concurrent calls from different threads are independent.
/// Throws InputError for invalid limits, policy or workdir.
ExecutionOutcome execute(std::span<const std::string> command,
                         std::string_view stdin_data,
                         const ExecutionLimits& limits,
                         const IsolationPolicy& policy,
                         const std::filesystem::path& workdir,
                         const ExecuteOptions& options = {});

/// Locates `program` on the guest PATH unless it already contains a slash.
std::filesystem::path resolve_command(const std::string& program,
                                      const std::filesystem::path& workdir);

/// Observer invoked with the workdir of every execution right before the
/// guest is forked. Intended for isolation audits in tests.
using ExecutionObserver = std::function<void(const std::filesystem::path&)>;
void set_execution_observer(ExecutionObserver observer);

/// A uniquely named directory under `root`, owned by the sandbox identity and
/// removed recursively on destruction.
class Workdir {
 public:
  static Workdir create(const std::filesystem::path& root,
                        unsigned uid = kDefaultSandboxUid,
                        unsigned gid = kDefaultSandboxGid);

  Workdir(Workdir&& other) noexcept;
  Workdir& operator=(Workdir&& other) noexcept;
  Workdir(const Workdir&) = delete;
  Workdir& operator=(const Workdir&) = delete;
  ~Workdir();

  const std::filesystem::path& path() const { return path_; }

  /// Writes `content` to `name` inside the workdir, readable by the guest.
  std::filesystem::path write_file(const std::string& name,
                                   std::string_view content) const;

 private:
  explicit Workdir(std::filesystem::path path) : path_(std::move(path)) {}
  std::filesystem::path path_;
};

/// Default root for workdirs: $TESTFORGE_SANDBOX_ROOT or
/// <temp>/testforge-sandbox, created on first use.
std::filesystem::path default_sandbox_root();

}  // namespace testforge::sandbox
