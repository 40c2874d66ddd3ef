#pragma once

#include <condition_variable>
#include <cstddef>
#include <filesystem>
#include <functional>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>

#include "testforge/judge/types.hpp"
#include "testforge/toolchain/toolchain.hpp"

namespace testforge::judge {

enum class Comparison { Equal, NotEqual };

/// CRLF becomes LF, trailing whitespace on each line and trailing blank lines
/// are dropped.
std::string normalize_output(std::string_view text);
Comparison compare_outputs(std::string_view actual, std::string_view expected);

enum class CheckerVerdict { Accept, Reject, Error };

struct CheckerResult {
  CheckerVerdict verdict = CheckerVerdict::Error;
  std::string detail;
};

/// Interprets a finished checker run. Anything but a clean exit whose last
/// non-empty stdout line is exactly True or False is an error.
CheckerResult interpret_checker_output(const sandbox::ExecutionOutcome& outcome);

/// Linux caps a single argv string at 32 pages; checker arguments beyond
/// this cannot be passed and fail closed.
inline constexpr std::size_t kMaxCheckerArgBytes = 32 * 4096 - 1;

/// Counting semaphore bounding concurrent sandbox executions.
class ExecutionSlots {
 public:
  explicit ExecutionSlots(std::size_t slots);
  void acquire();
  void release();
  std::size_t capacity() const { return capacity_; }

 private:
  std::mutex mutex_;
  std::condition_variable cv_;
  std::size_t free_;
  std::size_t capacity_;
};

struct JudgeConfig {
  std::filesystem::path sandbox_root;
  std::string checker_language = "python3";
  sandbox::ExecutionLimits checker_limits = default_checker_limits();
  // Upper bound on sandbox executions in flight across all calls.
  std::size_t max_concurrent_executions = 64;

  /// 10 s cpu, 20 s wall, 512 MiB.
  static sandbox::ExecutionLimits default_checker_limits();
};

struct SuiteOptions {
  std::size_t parallelism = 1;
  // Halt after the first non-Accepted case. Cases before it still run, so
  // the reported prefix is the same at every parallelism level.
  bool early_stop = false;
};

/// Verdict engine. Safe for concurrent use; every call is independent.
class Judge {
 public:
  Judge(std::shared_ptr<const toolchain::ProfileRegistry> registry, JudgeConfig config);

  const JudgeConfig& config() const { return config_; }
  const toolchain::ProfileRegistry& registry() const { return *registry_; }

  /// Throws UnknownLanguage.
  toolchain::CompileResult compile(std::string_view source, std::string_view language) const;

  /// One sandboxed run of `artifact`, counted against the execution slots.
  sandbox::ExecutionOutcome run(const toolchain::CompiledArtifact& artifact,
                                std::string_view stdin_data,
                                const sandbox::ExecutionLimits& limits,
                                const std::vector<std::string>& extra_args = {}) const;

  /// Prepares a checker for repeated use. Throws InfrastructureError when the
  /// checker language profile cannot load it.
  toolchain::CompiledArtifact prepare_checker(const CheckerProgram& checker) const;

  CheckerResult run_checker(const toolchain::CompiledArtifact& checker, std::string_view input,
                            std::string_view actual, std::string_view reference) const;
  CheckerResult run_checker(const CheckerProgram& checker, std::string_view input,
                            std::string_view actual, std::string_view reference) const;

  /// Maps an execution outcome to a verdict, consulting `checker` (if any)
  /// on a clean exit and compare_outputs otherwise.
  CaseResult verdict_for(const sandbox::ExecutionOutcome& outcome, const TestCase& test,
                         const toolchain::CompiledArtifact* checker) const;

  CaseResult judge_case(const toolchain::CompiledArtifact& artifact, const TestCase& test,
                        const TestSuite& suite) const;
  CaseResult judge_case(const toolchain::CompiledArtifact& artifact, const TestCase& test,
                        const TestSuite& suite, const toolchain::CompiledArtifact* checker) const;

  /// Compiles once and judges every case. Throws InputError on an empty suite.
  JudgeReport judge_suite(std::string_view source, std::string_view language,
                          const TestSuite& suite, const SuiteOptions& options = {}) const;
  JudgeReport judge_artifact(const toolchain::CompiledArtifact& artifact, const TestSuite& suite,
                             const SuiteOptions& options = {}) const;

 private:
  std::shared_ptr<const toolchain::ProfileRegistry> registry_;
  JudgeConfig config_;
  std::unique_ptr<ExecutionSlots> slots_;
};

/// Folds per-case results into a report (pass counts, aggregate, first
/// failure). `total` is the suite size.
JudgeReport assemble_report(std::string problem_id, std::vector<CaseResult> per_case,
                            std::size_t total);

/// Runs fn(i) for i in [0, n) on up to `workers` threads. The first
/// exception thrown by any call is rethrown after all threads finish.
void parallel_for(std::size_t n, std::size_t workers, const std::function<void(std::size_t)>& fn);

}  // namespace testforge::judge
