#pragma once

#include <nlohmann/json.hpp>

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "testforge/sandbox/limits.hpp"

namespace testforge::judge {

enum class Verdict {
  Accepted,
  WrongAnswer,
  TimeLimitExceeded,
  MemoryLimitExceeded,
  RuntimeError,
  CompileError,
  IllegalOperation,
  CheckerError,
  JudgeError,
};

std::string_view verdict_name(Verdict v);
/// Throws InputError on an unknown name.
Verdict parse_verdict(std::string_view name);

/// Aggregate precedence, highest first: CompileError, JudgeError,
/// IllegalOperation, MLE, TLE, RE, CheckerError, WA. Accepted ranks lowest.
int verdict_severity(Verdict v);

enum class CaseKind { Regular, Corner };
enum class CaseOrigin { Public, Generated };

std::string_view case_kind_name(CaseKind k);
CaseKind parse_case_kind(std::string_view name);

struct TestCase {
  std::string input;
  std::string expected_output;
  CaseKind kind = CaseKind::Regular;
  CaseOrigin origin = CaseOrigin::Public;
  int round = 0;  // generation round; 0 for public cases
};

enum class CheckerStage { Generated, Repaired };

/// A special-judge script. It receives argv [input, output, reference] and
/// prints True or False as its last non-empty stdout line.
struct CheckerProgram {
  std::string source;
  CheckerStage stage = CheckerStage::Generated;
  std::optional<double> validation_pass_rate;
  std::optional<bool> valid;

  /// Records a measured pass rate; valid becomes pass_rate > 0.95.
  void record_validation(double pass_rate);
};

/// Strict gate: more than 95% of validation cases accepted.
inline constexpr double kCheckerValidityThreshold = 0.95;
inline bool checker_pass_rate_valid(double pass_rate) {
  return pass_rate > kCheckerValidityThreshold;
}

struct TestSuite {
  std::string problem_id;
  std::vector<TestCase> cases;
  std::optional<CheckerProgram> checker;
  sandbox::ExecutionLimits limits;
  // Free-form provenance (synthesis flags, rounds used); carried through I/O.
  nlohmann::json metadata = nlohmann::json::object();
};

struct CaseResult {
  std::size_t index = 0;
  Verdict verdict = Verdict::JudgeError;
  sandbox::ResourceUsage usage;
  std::string detail;
};

struct JudgeReport {
  std::string problem_id;
  std::vector<CaseResult> per_case;  // case order; a prefix when early-stopped
  std::size_t pass_count = 0;
  std::size_t total = 0;
  double pass_rate = 0;
  Verdict aggregate = Verdict::Accepted;
  // Lowest-index case carrying the aggregate verdict.
  std::optional<std::size_t> first_failure_index;
  bool early_stopped = false;
  std::string compile_log;
};

void to_json(nlohmann::json& j, const TestCase& c);
void from_json(const nlohmann::json& j, TestCase& c);
void to_json(nlohmann::json& j, const CheckerProgram& c);
void from_json(const nlohmann::json& j, CheckerProgram& c);
void to_json(nlohmann::json& j, const TestSuite& s);
void from_json(const nlohmann::json& j, TestSuite& s);

/// Usage figures jitter between runs; leaving them out gives a byte-stable
/// serialization for deterministic guests.
nlohmann::json report_to_json(const JudgeReport& report, bool include_usage = true);

/// Reads a suite from a single JSON document, or from JSONL where one line
/// holds the header ({problem_id, limits, checker?}) and every other line is
/// a case. Throws InputError.
TestSuite load_suite(const std::string& path);
void save_suite(const std::string& path, const TestSuite& suite);

}  // namespace testforge::judge
