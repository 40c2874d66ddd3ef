#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "testforge/judge/judge.hpp"
#include "testforge/testgen/llm.hpp"
#include "testforge/testgen/problem.hpp"
#include "testforge/testgen/prompts.hpp"

namespace testforge::spjgen {

using judge::CheckerProgram;
using testgen::Problem;

struct CheckerDecision {
  bool needed = false;
  std::string reason;  // never empty
};

struct CheckerGeneration {
  CheckerDecision decision;
  std::optional<CheckerProgram> checker;  // present iff decision.needed
};

/// Reads a stage-one answer: the Yes/No decision line, the reason and, for
/// Yes, the script. Throws PipelineError (raw response kept) when the
/// decision line is missing or a needed script is absent.
CheckerGeneration parse_generation_response(std::string_view response);

struct ReviewAnswer {
  bool has_problems = false;
  std::string reason;
  std::optional<std::string> corrected_source;  // present iff has_problems
};

/// Reads a stage-two answer. Throws PipelineError like the above.
ReviewAnswer parse_review_response(std::string_view response);

std::string generation_prompt(const testgen::PromptLibrary& prompts, const Problem& problem);
std::string review_prompt(const testgen::PromptLibrary& prompts, const Problem& problem,
                          const CheckerProgram& checker);

/// Stage one: asks whether the problem needs a checker and, if so, for one.
CheckerGeneration generate_checker(const Problem& problem, testgen::LLMClient& llm,
                                   const testgen::PromptLibrary& prompts =
                                       testgen::default_prompts());

/// Stage two: reviews a generated checker. The result always has
/// stage Repaired; its source is unchanged when the review finds nothing.
/// Throws InputError if `checker` was already reviewed.
CheckerProgram review_checker(const Problem& problem, const CheckerProgram& checker,
                              testgen::LLMClient& llm,
                              const testgen::PromptLibrary& prompts = testgen::default_prompts());

/// Runs `gold` on every suite case and asks the checker to accept its output
/// against the case's expected output. Returns the checker with its pass
/// rate recorded. A gold that does not compile or does not exit cleanly on
/// a case throws PipelineError: the suite and the gold disagree.
CheckerProgram validate_checker(const judge::Judge& engine, const CheckerProgram& checker,
                                const Problem& problem, const judge::TestSuite& suite,
                                const testgen::Solution& gold, std::size_t parallelism = 4);

struct SpecialJudgeOutcome {
  CheckerDecision decision;
  std::optional<CheckerProgram> generated;  // validated when a suite was given
  std::optional<CheckerProgram> reviewed;   // validated when a suite was given
};

/// Both stages, then validation of each stage's script against `suite`
/// (skipped when the suite is empty). Uses the problem's first gold.
SpecialJudgeOutcome build_special_judge(const judge::Judge& engine, const Problem& problem,
                                        const judge::TestSuite& suite, testgen::LLMClient& llm,
                                        const testgen::PromptLibrary& prompts =
                                            testgen::default_prompts(),
                                        std::size_t parallelism = 4);

}  // namespace testforge::spjgen
