#pragma once

#include <nlohmann/json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "testforge/judge/types.hpp"

namespace testforge::testgen {

struct Solution {
  std::string language;
  std::string source;
  // Where the solution came from (sampling model, author); used for grouping.
  std::string origin;
};

struct Example {
  std::string input;
  std::string output;
};

struct Problem {
  std::string id;
  std::string statement;
  std::string input_format;
  std::string output_format;
  std::vector<Example> examples;
  std::int64_t time_limit_ms = 2000;
  std::int64_t memory_limit_bytes = 256 * sandbox::kMiB;
  std::vector<Solution> gold_solutions;
  std::vector<judge::TestCase> public_tests;
  std::optional<judge::CheckerProgram> checker;
  // Overrides the keyword scan deciding whether the first input line is a
  // test count.
  std::optional<bool> multi_test;

  /// Problem time and memory constraints as sandbox limits. Wall time is
  /// three times cpu time, at least one second more.
  sandbox::ExecutionLimits limits() const;

  /// Throws InputError unless the statement is non-empty and there are at
  /// least two gold solutions.
  void validate() const;
};

/// Statement, formats and examples as one block of prompt text.
std::string problem_text(const Problem& p);
std::string examples_text(const Problem& p);

/// True when the input format says the first line holds the number of test
/// cases. Problem::multi_test wins when set.
bool first_line_is_test_count(const Problem& p);

void to_json(nlohmann::json& j, const Solution& s);
void from_json(const nlohmann::json& j, Solution& s);
void to_json(nlohmann::json& j, const Problem& p);
/// Lenient: missing fields keep their defaults. Call validate() to enforce
/// the pipeline invariants.
void from_json(const nlohmann::json& j, Problem& p);

/// One Problem per non-blank line. Throws InputError with the line number.
std::vector<Problem> load_problems(const std::string& path);
void save_problems(const std::string& path, const std::vector<Problem>& problems);

}  // namespace testforge::testgen
