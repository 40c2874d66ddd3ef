#include "testforge/judge/judge.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <thread>

#include "testforge/errors.hpp"

namespace testforge::judge {

namespace t = sandbox::termination;

namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\v' || c == '\f'; }

std::string_view rstrip(std::string_view s) {
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

class SlotGuard {
 public:
  explicit SlotGuard(ExecutionSlots& slots) : slots_(slots) { slots_.acquire(); }
  ~SlotGuard() { slots_.release(); }
  SlotGuard(const SlotGuard&) = delete;
  SlotGuard& operator=(const SlotGuard&) = delete;

 private:
  ExecutionSlots& slots_;
};

}  // namespace

std::string normalize_output(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto nl = text.find('\n', start);
    if (nl == std::string_view::npos) nl = text.size();
    lines.push_back(rstrip(text.substr(start, nl - start)));
    start = nl + 1;
  }
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  std::string out;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (i) out += '\n';
    out += lines[i];
  }
  return out;
}

Comparison compare_outputs(std::string_view actual, std::string_view expected) {
  return normalize_output(actual) == normalize_output(expected) ? Comparison::Equal
                                                                : Comparison::NotEqual;
}

CheckerResult interpret_checker_output(const sandbox::ExecutionOutcome& outcome) {
  const auto* exited = std::get_if<t::Exited>(&outcome.termination);
  if (!exited || exited->code != 0) {
    return {CheckerVerdict::Error, "checker " + sandbox::describe(outcome.termination)};
  }
  const std::string normalized = normalize_output(outcome.stdout_data);
  std::string_view out = normalized;
  auto nl = out.rfind('\n');
  std::string_view last = nl == std::string_view::npos ? out : out.substr(nl + 1);
  while (!last.empty() && is_space(last.front())) last.remove_prefix(1);
  if (last == "True") return {CheckerVerdict::Accept, ""};
  if (last == "False") return {CheckerVerdict::Reject, ""};
  return {CheckerVerdict::Error, "checker printed no True/False verdict"};
}

ExecutionSlots::ExecutionSlots(std::size_t slots) : free_(slots), capacity_(slots) {
  if (slots == 0) throw InputError("execution slots must be positive");
}

void ExecutionSlots::acquire() {
  std::unique_lock lk(mutex_);
  cv_.wait(lk, [this] { return free_ > 0; });
  --free_;
}

void ExecutionSlots::release() {
  {
    std::lock_guard lk(mutex_);
    ++free_;
  }
  cv_.notify_one();
}

sandbox::ExecutionLimits JudgeConfig::default_checker_limits() {
  sandbox::ExecutionLimits l;
  l.cpu_time_ms = 10000;
  l.wall_time_ms = 20000;
  l.memory_bytes = 512 * sandbox::kMiB;
  return l;
}

Judge::Judge(std::shared_ptr<const toolchain::ProfileRegistry> registry, JudgeConfig config)
    : registry_(std::move(registry)), config_(std::move(config)) {
  if (!registry_) throw InputError("judge needs a profile registry");
  if (config_.sandbox_root.empty()) config_.sandbox_root = sandbox::default_sandbox_root();
  config_.checker_limits.validate();
  slots_ = std::make_unique<ExecutionSlots>(config_.max_concurrent_executions);
}

toolchain::CompileResult Judge::compile(std::string_view source, std::string_view language) const {
  auto profile = registry_->resolve(language);
  SlotGuard slot(*slots_);
  return toolchain::compile(source, *profile, config_.sandbox_root);
}

sandbox::ExecutionOutcome Judge::run(const toolchain::CompiledArtifact& artifact,
                                     std::string_view stdin_data,
                                     const sandbox::ExecutionLimits& limits,
                                     const std::vector<std::string>& extra_args) const {
  SlotGuard slot(*slots_);
  return toolchain::run_artifact(artifact, stdin_data, limits, config_.sandbox_root, extra_args);
}

toolchain::CompiledArtifact Judge::prepare_checker(const CheckerProgram& checker) const {
  if (checker.source.empty()) throw InputError("checker source is empty");
  auto result = compile(checker.source, config_.checker_language);
  if (auto* failure = std::get_if<toolchain::CompileFailure>(&result)) {
    throw InfrastructureError("checker could not be prepared: " + failure->log);
  }
  return std::get<toolchain::CompiledArtifact>(std::move(result));
}

CheckerResult Judge::run_checker(const toolchain::CompiledArtifact& checker,
                                 std::string_view input, std::string_view actual,
                                 std::string_view reference) const {
  for (auto arg : {input, actual, reference}) {
    if (arg.size() > kMaxCheckerArgBytes) {
      return {CheckerVerdict::Error, "checker argument exceeds the argv size limit"};
    }
    if (arg.find('\0') != std::string_view::npos) {
      return {CheckerVerdict::Error, "checker argument contains a NUL byte"};
    }
  }
  auto outcome = run(checker, "", config_.checker_limits,
                     {std::string(input), std::string(actual), std::string(reference)});
  return interpret_checker_output(outcome);
}

CheckerResult Judge::run_checker(const CheckerProgram& checker, std::string_view input,
                                 std::string_view actual, std::string_view reference) const {
  return run_checker(prepare_checker(checker), input, actual, reference);
}

CaseResult Judge::verdict_for(const sandbox::ExecutionOutcome& outcome, const TestCase& test,
                              const toolchain::CompiledArtifact* checker) const {
  CaseResult r;
  r.usage = outcome.usage;
  const auto& term = outcome.termination;
  if (std::holds_alternative<t::IsolationSetupFailure>(term)) {
    r.verdict = Verdict::JudgeError;
  } else if (std::holds_alternative<t::CpuTimeViolation>(term) ||
             std::holds_alternative<t::WallTimeViolation>(term)) {
    r.verdict = Verdict::TimeLimitExceeded;
  } else if (std::holds_alternative<t::MemoryViolation>(term)) {
    r.verdict = Verdict::MemoryLimitExceeded;
  } else if (std::holds_alternative<t::IllegalSyscall>(term)) {
    r.verdict = Verdict::IllegalOperation;
  } else if (auto* e = std::get_if<t::Exited>(&term); e && e->code == 0) {
    if (checker) {
      auto c = run_checker(*checker, test.input, outcome.stdout_data, test.expected_output);
      r.verdict = c.verdict == CheckerVerdict::Accept   ? Verdict::Accepted
                  : c.verdict == CheckerVerdict::Reject ? Verdict::WrongAnswer
                                                        : Verdict::CheckerError;
      r.detail = c.detail;
    } else {
      r.verdict = compare_outputs(outcome.stdout_data, test.expected_output) == Comparison::Equal
                      ? Verdict::Accepted
                      : Verdict::WrongAnswer;
    }
    return r;
  } else {
    // Signals, nonzero exits and output-cap overruns.
    r.verdict = Verdict::RuntimeError;
  }
  r.detail = sandbox::describe(term);
  return r;
}

CaseResult Judge::judge_case(const toolchain::CompiledArtifact& artifact, const TestCase& test,
                             const TestSuite& suite,
                             const toolchain::CompiledArtifact* checker) const {
  return verdict_for(run(artifact, test.input, suite.limits), test, checker);
}

CaseResult Judge::judge_case(const toolchain::CompiledArtifact& artifact, const TestCase& test,
                             const TestSuite& suite) const {
  if (!suite.checker) return judge_case(artifact, test, suite, nullptr);
  auto checker = prepare_checker(*suite.checker);
  return judge_case(artifact, test, suite, &checker);
}

JudgeReport Judge::judge_suite(std::string_view source, std::string_view language,
                               const TestSuite& suite, const SuiteOptions& options) const {
  if (suite.cases.empty()) throw InputError("suite " + suite.problem_id + " has no cases");
  auto compiled = compile(source, language);
  if (auto* failure = std::get_if<toolchain::CompileFailure>(&compiled)) {
    std::vector<CaseResult> per_case(suite.cases.size());
    for (std::size_t i = 0; i < per_case.size(); ++i) {
      per_case[i].index = i;
      per_case[i].verdict = Verdict::CompileError;
    }
    auto report = assemble_report(suite.problem_id, std::move(per_case), suite.cases.size());
    report.compile_log = failure->log;
    return report;
  }
  return judge_artifact(std::get<toolchain::CompiledArtifact>(compiled), suite, options);
}

JudgeReport Judge::judge_artifact(const toolchain::CompiledArtifact& artifact,
                                  const TestSuite& suite, const SuiteOptions& options) const {
  if (suite.cases.empty()) throw InputError("suite " + suite.problem_id + " has no cases");
  if (options.parallelism == 0) throw InputError("parallelism must be positive");
  suite.limits.validate();

  std::optional<toolchain::CompiledArtifact> checker;
  if (suite.checker) checker = prepare_checker(*suite.checker);

  const std::size_t n = suite.cases.size();
  std::vector<std::optional<CaseResult>> results(n);
  std::atomic<std::size_t> stop_after{n};
  parallel_for(n, options.parallelism, [&](std::size_t i) {
    if (options.early_stop && i > stop_after.load()) return;
    auto r = judge_case(artifact, suite.cases[i], suite, checker ? &*checker : nullptr);
    r.index = i;
    if (options.early_stop && r.verdict != Verdict::Accepted) {
      auto cur = stop_after.load();
      while (i < cur && !stop_after.compare_exchange_weak(cur, i)) {
      }
    }
    results[i] = std::move(r);
  });

  std::vector<CaseResult> per_case;
  bool stopped = false;
  for (auto& r : results) {
    if (!r) break;
    per_case.push_back(std::move(*r));
    if (options.early_stop && per_case.back().verdict != Verdict::Accepted) {
      stopped = per_case.size() < n;
      break;
    }
  }
  auto report = assemble_report(suite.problem_id, std::move(per_case), n);
  report.early_stopped = stopped;
  report.compile_log = artifact.compile_log;
  return report;
}

JudgeReport assemble_report(std::string problem_id, std::vector<CaseResult> per_case,
                            std::size_t total) {
  if (total == 0) throw InputError("report total must be positive");
  JudgeReport r;
  r.problem_id = std::move(problem_id);
  r.total = total;
  for (const auto& c : per_case) {
    if (c.verdict == Verdict::Accepted) {
      ++r.pass_count;
    } else if (verdict_severity(c.verdict) > verdict_severity(r.aggregate)) {
      r.aggregate = c.verdict;
      r.first_failure_index = c.index;
    }
  }
  r.pass_rate = static_cast<double>(r.pass_count) / static_cast<double>(total);
  r.per_case = std::move(per_case);
  return r;
}

void parallel_for(std::size_t n, std::size_t workers,
                  const std::function<void(std::size_t)>& fn) {
  workers = std::max<std::size_t>(1, std::min(workers, n));
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < n;) {
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lk(error_mutex);
        if (!error) error = std::current_exception();
        next.store(n);
      }
    }
  };
  std::vector<std::thread> threads;
  threads.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) threads.emplace_back(worker);
  for (auto& th : threads) th.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace testforge::judge
