#pragma once

#include <nlohmann/json.hpp>

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "testforge/judge/judge.hpp"
#include "testforge/testgen/llm.hpp"
#include "testforge/testgen/problem.hpp"
#include "testforge/testgen/prompts.hpp"

namespace testforge::testgen {

using judge::CaseKind;

enum class FeedbackCategory {
  FormatError,
  GeneratorExecutionError,
  TimeLimit,
  MemoryLimit,
  InconsistentOutput,
  Other,
};

std::string_view category_name(FeedbackCategory c);

/// Which repair prompt a record feeds: generator-side failures (the
/// generator did not produce a usable list) or validation-side failures
/// (gold solutions rejected some inputs).
enum class FeedbackStage { Generation, Validation };

struct FeedbackRecord {
  FeedbackCategory category = FeedbackCategory::Other;
  std::string detail;
  FeedbackStage stage = FeedbackStage::Generation;
};

struct GeneratorProgram {
  CaseKind kind = CaseKind::Regular;
  std::string source;
  int round = 1;
  std::vector<FeedbackRecord> feedback_history;
};

struct TestInput {
  std::string data;
  CaseKind kind = CaseKind::Regular;
};

struct SynthesisConfig {
  std::size_t regular_count = 80;
  std::size_t corner_count = 20;
  int max_rounds = 3;
  sandbox::ExecutionLimits generator_limits = sandbox::ExecutionLimits::unrestricted();
  std::string generator_language = "python3";
  // Concurrent gold runs during validation.
  std::size_t parallelism = 4;

  std::size_t quota(CaseKind kind) const {
    return kind == CaseKind::Regular ? regular_count : corner_count;
  }
  /// Throws InputError on zero counts or max_rounds < 1.
  void validate() const;
};

// Prompts ------------------------------------------------------------------

struct RepairContext {
  const GeneratorProgram* generator;
  const FeedbackRecord* feedback;
};

/// Initial generator request for `kind`, or, with `repair`, the repair
/// prompt matching the feedback's stage. Only the input-format example that
/// applies to the problem is included in initial prompts.
std::string build_generator_prompt(const PromptLibrary& prompts, const Problem& problem,
                                   const Solution& gold, CaseKind kind,
                                   const RepairContext* repair = nullptr);

// Generator execution --------------------------------------------------------

using GeneratorOutput = std::variant<std::vector<std::string>, FeedbackRecord>;

/// Parses generator stdout: a JSON array of strings, or failing that a
/// Python list literal of strings (whole output or its last non-empty
/// line). Anything else is a FormatError record.
GeneratorOutput parse_generator_output(std::string_view stdout_data);

/// Runs the generator without cpu/memory caps and returns its inputs,
/// de-duplicated and capped at the kind's quota. Empty strings are dropped.
std::variant<std::vector<TestInput>, FeedbackRecord> run_generator(
    const judge::Judge& engine, const GeneratorProgram& gen, const SynthesisConfig& config);

// Validation ---------------------------------------------------------------

/// Two gold solutions, compiled, in the order their outputs are used: the
/// first supplies expected outputs.
struct GoldPair {
  std::array<std::size_t, 2> index{0, 1};  // positions in Problem::gold_solutions
  std::array<toolchain::CompiledArtifact, 2> artifact;
};

/// With exactly two golds, both in order. With more, the two with the
/// lowest total cpu time over the public tests (ties by position). Throws
/// PipelineError when a selected gold does not compile.
GoldPair select_gold_pair(const judge::Judge& engine, const Problem& problem);

struct Rejection {
  TestInput input;
  FeedbackRecord feedback;
};

struct ValidationResult {
  std::vector<judge::TestCase> valid;
  std::vector<Rejection> rejected;
};

/// Runs every input through both golds under the problem limits. Agreement
/// (checker when the problem has one, compare_outputs otherwise) yields a
/// case whose expected output is the first gold's stdout. Input order is
/// preserved in both lists.
ValidationResult consistency_validate(const judge::Judge& engine,
                                      const std::vector<TestInput>& inputs,
                                      const Problem& problem, const GoldPair& golds,
                                      std::size_t parallelism = 4, int round = 0);

// Orchestration --------------------------------------------------------------

struct SynthesisLogRecord {
  std::string problem_id;
  CaseKind kind;
  int round;
  FeedbackRecord feedback;
};

nlohmann::json to_json(const SynthesisLogRecord& r);

using SynthesisLogger = std::function<void(const SynthesisLogRecord&)>;

struct KindSummary {
  int rounds_used = 0;
  int llm_requests = 0;
  bool failed = false;
  std::vector<GeneratorProgram> generators;  // one per round, with history
};

struct SynthesisResult {
  judge::TestSuite suite;
  KindSummary regular;
  KindSummary corner;
};

struct SynthesisFailed {
  std::string problem_id;
  KindSummary regular;
  KindSummary corner;
  std::vector<FeedbackRecord> history;
};

using SynthesisOutcome = std::variant<SynthesisResult, SynthesisFailed>;

/// The generate, execute, validate, repair loop for both case kinds. Each
/// kind gets at most `max_rounds` LLM requests. The suite succeeds if any
/// kind produced a valid case; a kind with none is flagged as failed in the
/// suite metadata. Throws LLMError when the client fails.
SynthesisOutcome synthesize_suite(const judge::Judge& engine, const Problem& problem,
                                  LLMClient& llm, const SynthesisConfig& config,
                                  const PromptLibrary& prompts = default_prompts(),
                                  const SynthesisLogger& log = {});

}  // namespace testforge::testgen
