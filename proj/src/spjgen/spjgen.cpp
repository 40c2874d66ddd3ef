#include "testforge/spjgen/spjgen.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>

#include "testforge/errors.hpp"

namespace testforge::spjgen {

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

// Yes/No following `label` (matched case-insensitively, after any markdown
// emphasis). nullopt when the label or a recognizable answer is missing.
std::optional<bool> yes_no_after(std::string_view response, std::string_view label) {
  const std::string text = lower(response);
  auto pos = text.find(lower(label));
  if (pos == std::string::npos) return std::nullopt;
  std::string_view rest = std::string_view(text).substr(pos + label.size());
  while (!rest.empty() && (rest.front() == ' ' || rest.front() == '*' || rest.front() == '\t')) {
    rest.remove_prefix(1);
  }
  if (rest.substr(0, 3) == "yes") return true;
  if (rest.substr(0, 2) == "no") return false;
  return std::nullopt;
}

// Text after "Reason:" up to the next blank line or code fence.
std::string reason_after(std::string_view response) {
  const std::string text = lower(response);
  auto pos = text.find("reason:");
  if (pos == std::string::npos) return {};
  std::string_view rest = response.substr(pos + 7);
  auto end = std::min(rest.find("\n\n"), rest.find("```"));
  return std::string(trim(rest.substr(0, end)));
}

// Script in the response. A model that wraps its whole answer in one fence
// puts the answer lines inside the block; keep only what follows them.
std::optional<std::string> script_in(std::string_view response, std::string_view answer_label) {
  auto code = testgen::extract_code_block(response);
  if (!code) return std::nullopt;
  const std::string l = lower(*code);
  if (l.find(lower(answer_label)) != std::string::npos) {
    auto colon = l.find("script:");
    if (colon == std::string::npos) return std::nullopt;
    auto body = std::string(trim(std::string_view(*code).substr(colon + 7)));
    if (body.empty()) return std::nullopt;
    return body + "\n";
  }
  if (trim(*code).empty()) return std::nullopt;
  return code;
}

constexpr std::string_view kNeededLabel = "Whether custom checker is needed:";
constexpr std::string_view kProblemsLabel = "Does the Checker have problems:";

std::map<std::string, std::string> problem_fields(const Problem& p) {
  return {{"description", p.statement},
          {"input_format", p.input_format},
          {"output_format", p.output_format},
          {"examples", testgen::examples_text(p)}};
}

}  // namespace

CheckerGeneration parse_generation_response(std::string_view response) {
  auto needed = yes_no_after(response, kNeededLabel);
  if (!needed) {
    throw PipelineError("checker generation answer has no Yes/No decision", std::string(response));
  }
  CheckerGeneration g;
  g.decision.needed = *needed;
  g.decision.reason = reason_after(response);
  if (g.decision.reason.empty()) g.decision.reason = "no reason given";
  if (*needed) {
    auto script = script_in(response, kNeededLabel);
    if (!script) {
      throw PipelineError("checker needed but no script in the answer", std::string(response));
    }
    CheckerProgram c;
    c.source = std::move(*script);
    g.checker = std::move(c);
  }
  return g;
}

ReviewAnswer parse_review_response(std::string_view response) {
  auto problems = yes_no_after(response, kProblemsLabel);
  if (!problems) {
    throw PipelineError("checker review answer has no Yes/No verdict", std::string(response));
  }
  ReviewAnswer a;
  a.has_problems = *problems;
  a.reason = reason_after(response);
  if (*problems) {
    a.corrected_source = script_in(response, kProblemsLabel);
    if (!a.corrected_source) {
      throw PipelineError("review found problems but gave no corrected script",
                          std::string(response));
    }
  }
  return a;
}

std::string generation_prompt(const testgen::PromptLibrary& prompts, const Problem& problem) {
  return prompts.render("checker_generation", problem_fields(problem));
}

std::string review_prompt(const testgen::PromptLibrary& prompts, const Problem& problem,
                          const CheckerProgram& checker) {
  auto fields = problem_fields(problem);
  fields["checker_code"] = checker.source;
  return prompts.render("checker_review", fields);
}

CheckerGeneration generate_checker(const Problem& problem, testgen::LLMClient& llm,
                                   const testgen::PromptLibrary& prompts) {
  if (problem.statement.empty()) throw InputError("problem " + problem.id + " has no statement");
  return parse_generation_response(llm.complete(generation_prompt(prompts, problem)));
}

CheckerProgram review_checker(const Problem& problem, const CheckerProgram& checker,
                              testgen::LLMClient& llm, const testgen::PromptLibrary& prompts) {
  if (checker.stage != judge::CheckerStage::Generated) {
    throw InputError("checker for " + problem.id + " was already reviewed");
  }
  auto answer = parse_review_response(llm.complete(review_prompt(prompts, problem, checker)));
  CheckerProgram out;
  out.source = answer.corrected_source ? *answer.corrected_source : checker.source;
  out.stage = judge::CheckerStage::Repaired;
  return out;
}

CheckerProgram validate_checker(const judge::Judge& engine, const CheckerProgram& checker,
                                const Problem& problem, const judge::TestSuite& suite,
                                const testgen::Solution& gold, std::size_t parallelism) {
  if (suite.cases.empty()) throw InputError("validation suite for " + problem.id + " is empty");
  auto compiled = engine.compile(gold.source, gold.language);
  if (auto* f = std::get_if<toolchain::CompileFailure>(&compiled)) {
    throw PipelineError("gold solution for " + problem.id + " does not compile", f->log);
  }
  const auto& gold_artifact = std::get<toolchain::CompiledArtifact>(compiled);
  const auto checker_artifact = engine.prepare_checker(checker);
  const auto limits = problem.limits();

  std::atomic<std::size_t> accepted{0};
  judge::parallel_for(suite.cases.size(), parallelism, [&](std::size_t i) {
    const auto& test = suite.cases[i];
    auto run = engine.run(gold_artifact, test.input, limits);
    auto* exited = std::get_if<sandbox::termination::Exited>(&run.termination);
    if (!exited || exited->code != 0) {
      throw PipelineError("gold solution for " + problem.id + " failed on validated case " +
                              std::to_string(i) + ": " + sandbox::describe(run.termination),
                          run.stderr_data);
    }
    auto verdict =
        engine.run_checker(checker_artifact, test.input, run.stdout_data, test.expected_output);
    if (verdict.verdict == judge::CheckerVerdict::Accept) ++accepted;
  });

  CheckerProgram out = checker;
  out.record_validation(static_cast<double>(accepted.load()) /
                        static_cast<double>(suite.cases.size()));
  return out;
}

SpecialJudgeOutcome build_special_judge(const judge::Judge& engine, const Problem& problem,
                                        const judge::TestSuite& suite, testgen::LLMClient& llm,
                                        const testgen::PromptLibrary& prompts,
                                        std::size_t parallelism) {
  SpecialJudgeOutcome out;
  auto generation = generate_checker(problem, llm, prompts);
  out.decision = generation.decision;
  if (!generation.checker) return out;
  out.generated = generation.checker;
  out.reviewed = review_checker(problem, *out.generated, llm, prompts);
  if (!suite.cases.empty()) {
    if (problem.gold_solutions.empty()) throw InputError("problem " + problem.id + " has no gold");
    const auto& gold = problem.gold_solutions.front();
    out.generated = validate_checker(engine, *out.generated, problem, suite, gold, parallelism);
    out.reviewed = validate_checker(engine, *out.reviewed, problem, suite, gold, parallelism);
  }
  return out;
}

}  // namespace testforge::spjgen
