#include <gtest/gtest.h>

#include <fstream>

#include "support.hpp"
#include "testforge/errors.hpp"
#include "testforge/testgen/synthesis.hpp"

using namespace testforge;
using namespace testforge::testgen;
using judge::CaseKind;

namespace {

const judge::Judge& engine() {
  static judge::Judge j(std::shared_ptr<const toolchain::ProfileRegistry>(
                            &fixtures::registry(), [](const toolchain::ProfileRegistry*) {}),
                        judge::JudgeConfig{});
  return j;
}

Problem sum_problem() {
  Problem p;
  p.id = "sum";
  p.statement = "Given two integers a and b, print a + b.";
  p.input_format = "One line with two integers a and b.";
  p.output_format = "A single integer.";
  p.examples = {{"1 2\n", "3\n"}};
  p.time_limit_ms = 1000;
  p.gold_solutions = {{"cpp", fixtures::fixture("toy/sum_a.cpp"), ""},
                      {"cpp", fixtures::fixture("toy/sum_b.cpp"), ""}};
  p.public_tests = {judge::TestCase{"1 2\n", "3\n"}};
  return p;
}

SynthesisConfig small_config() {
  SynthesisConfig c;
  c.generator_limits.wall_time_ms = 20000;
  return c;
}

std::vector<TestInput> inputs_of(std::initializer_list<const char*> xs) {
  std::vector<TestInput> out;
  for (auto x : xs) out.push_back({x, CaseKind::Regular});
  return out;
}

}  // namespace

TEST(Prompts, RegularAndCornerAnchors) {
  auto p = sum_problem();
  auto regular = build_generator_prompt(default_prompts(), p, p.gold_solutions[0], CaseKind::Regular);
  EXPECT_NE(regular.find("provide me with 80 unit test inputs"), std::string::npos);
  EXPECT_NE(regular.find(p.statement), std::string::npos);
  EXPECT_NE(regular.find(p.gold_solutions[0].source), std::string::npos);
  auto corner = build_generator_prompt(default_prompts(), p, p.gold_solutions[0], CaseKind::Corner);
  EXPECT_NE(corner.find("generate 20 strictly boundary unit test inputs"), std::string::npos);
}

TEST(Prompts, FormatBlockFollowsTestCountDetection) {
  auto p = sum_problem();
  EXPECT_FALSE(first_line_is_test_count(p));
  auto single = build_generator_prompt(default_prompts(), p, p.gold_solutions[0], CaseKind::Regular);
  EXPECT_NE(single.find("##Format 1:"), std::string::npos);
  EXPECT_EQ(single.find("##Format 2:"), std::string::npos);

  p.input_format = "The first line contains T, the number of test cases.";
  EXPECT_TRUE(first_line_is_test_count(p));
  auto multi = build_generator_prompt(default_prompts(), p, p.gold_solutions[0], CaseKind::Regular);
  EXPECT_NE(multi.find("##Format 2:"), std::string::npos);
  EXPECT_EQ(multi.find("##Format 1:"), std::string::npos);

  p.multi_test = false;
  EXPECT_FALSE(first_line_is_test_count(p));
}

TEST(Prompts, RepairTemplatesFollowStage) {
  auto p = sum_problem();
  GeneratorProgram gen;
  gen.source = "print('oops')";
  FeedbackRecord fb{FeedbackCategory::FormatError, "stdout was: oops", FeedbackStage::Generation};
  RepairContext ctx{&gen, &fb};
  auto repair = build_generator_prompt(default_prompts(), p, p.gold_solutions[0], CaseKind::Regular, &ctx);
  EXPECT_NE(repair.find("analyze the error type"), std::string::npos);
  EXPECT_NE(repair.find("'FormatError: stdout was: oops'"), std::string::npos);
  EXPECT_NE(repair.find("print('oops')"), std::string::npos);
  EXPECT_NE(repair.find("Generator Code Execution Error"), std::string::npos);

  fb = {FeedbackCategory::InconsistentOutput, "x", FeedbackStage::Validation};
  auto validation = build_generator_prompt(default_prompts(), p, p.gold_solutions[0], CaseKind::Regular, &ctx);
  EXPECT_NE(validation.find("**Inconsistent Output:**"), std::string::npos);
}

TEST(Prompts, RenderIsSinglePass) {
  EXPECT_EQ(render_template("{a} {b} {c}", {{"a", "{b}"}, {"b", "2"}}), "{b} 2 {c}");
}

TEST(GeneratorOutput, JsonArray) {
  auto r = parse_generator_output("[\"1\\n\", \"2 3\\n\"]\n");
  auto& v = std::get<std::vector<std::string>>(r);
  EXPECT_EQ(v, (std::vector<std::string>{"1\n", "2 3\n"}));
}

TEST(GeneratorOutput, PythonListLiteral) {
  auto r = parse_generator_output("debug line\n['1\\n', \"it's\\t\", '\\x41\\u00e9']\n");
  auto& v = std::get<std::vector<std::string>>(r);
  EXPECT_EQ(v, (std::vector<std::string>{"1\n", "it's\t", "A\xC3\xA9"}));
}

TEST(GeneratorOutput, RejectsNonLists) {
  for (const char* s : {"not a list", "[1, 2]", "['a' 'b']", "", "['unterminated]"}) {
    auto r = parse_generator_output(s);
    ASSERT_TRUE(std::holds_alternative<FeedbackRecord>(r)) << s;
    EXPECT_EQ(std::get<FeedbackRecord>(r).category, FeedbackCategory::FormatError);
  }
}

TEST(RunGenerator, CapsAndDeduplicates) {
  GeneratorProgram gen;
  gen.kind = CaseKind::Corner;
  gen.source = "print(['a', 'a', ''] + [str(i) for i in range(50)])\n";
  auto r = run_generator(engine(), gen, small_config());
  auto& v = std::get<std::vector<TestInput>>(r);
  ASSERT_EQ(v.size(), 20u);
  EXPECT_EQ(v[0].data, "a");
  EXPECT_EQ(v[1].data, "0");
  EXPECT_EQ(v[0].kind, CaseKind::Corner);
}

TEST(RunGenerator, CrashCarriesTraceback) {
  GeneratorProgram gen;
  gen.source = "print(1 // 0)\n";
  auto r = run_generator(engine(), gen, small_config());
  auto& fb = std::get<FeedbackRecord>(r);
  EXPECT_EQ(fb.category, FeedbackCategory::GeneratorExecutionError);
  EXPECT_NE(fb.detail.find("ZeroDivisionError"), std::string::npos);
}

TEST(Validate, AgreementAndDisagreement) {
  auto p = sum_problem();
  p.gold_solutions[1] = {"python3", "a, b = map(int, input().split())\nprint(a + b if a != 7 else a - b)\n", ""};
  auto golds = select_gold_pair(engine(), p);
  auto r = consistency_validate(engine(), inputs_of({"40 2\n", "7 1\n", "1 1\n"}), p, golds, 2, 1);
  ASSERT_EQ(r.valid.size(), 2u);
  EXPECT_EQ(r.valid[0].expected_output, "42\n");
  EXPECT_EQ(r.valid[0].round, 1);
  EXPECT_EQ(r.valid[0].origin, judge::CaseOrigin::Generated);
  ASSERT_EQ(r.rejected.size(), 1u);
  EXPECT_EQ(r.rejected[0].input.data, "7 1\n");
  EXPECT_EQ(r.rejected[0].feedback.category, FeedbackCategory::InconsistentOutput);
}

TEST(Validate, GoldTimeLimitRejects) {
  auto p = sum_problem();
  p.gold_solutions[1] = {"python3", fixtures::fixture("toy/sum_slow.py"), ""};
  auto golds = select_gold_pair(engine(), p);
  auto r = consistency_validate(engine(), inputs_of({"1 2\n", "0 1000000000\n"}), p, golds);
  ASSERT_EQ(r.valid.size(), 1u);
  ASSERT_EQ(r.rejected.size(), 1u);
  EXPECT_EQ(r.rejected[0].feedback.category, FeedbackCategory::TimeLimit);
}

TEST(Validate, CheckerDecidesAgreement) {
  auto p = sum_problem();
  p.gold_solutions = {{"python3", "print('1 2')\n", ""}, {"python3", "print('2 1')\n", ""}};
  auto golds = select_gold_pair(engine(), p);
  EXPECT_EQ(consistency_validate(engine(), inputs_of({"x\n"}), p, golds).rejected.size(), 1u);
  judge::CheckerProgram c;
  c.source = "import sys\nprint(sorted(sys.argv[2].split()) == sorted(sys.argv[3].split()))\n";
  p.checker = c;
  auto r = consistency_validate(engine(), inputs_of({"x\n"}), p, golds);
  ASSERT_EQ(r.valid.size(), 1u);
  EXPECT_EQ(r.valid[0].expected_output, "1 2\n");
}

TEST(Validate, GoldCompileFailureIsHardError) {
  auto p = sum_problem();
  p.gold_solutions[1] = {"cpp", "int main( {", ""};
  EXPECT_THROW(select_gold_pair(engine(), p), PipelineError);
}

TEST(Validate, PicksFastestTwoOfThree) {
  auto p = sum_problem();
  p.public_tests = {judge::TestCase{"3 400000\n", "400003\n"}};
  p.gold_solutions.insert(p.gold_solutions.begin(), {"python3", fixtures::fixture("toy/sum_slow.py"), ""});
  auto golds = select_gold_pair(engine(), p);
  EXPECT_EQ(golds.index[0], 1u);
  EXPECT_EQ(golds.index[1], 2u);
}

TEST(Mock, MatchingConsumesInOrder) {
  auto m = MockLLM::from_jsonl(
      "{\"match\": \"a\", \"response\": \"1\"}\n"
      "{\"match\": [\"a\", \"b\"], \"response\": \"2\", \"repeat\": 2}\n"
      "{\"match\": \"\", \"response\": \"any\", \"repeat\": 0}\n");
  EXPECT_EQ(m->complete("ab"), "1");
  EXPECT_EQ(m->complete("ab"), "2");
  EXPECT_EQ(m->complete("xa"), "any");
  EXPECT_EQ(m->complete("ba"), "2");
  EXPECT_EQ(m->complete("ba"), "any");
  EXPECT_EQ(m->transcript().size(), 5u);
  auto strict = MockLLM::from_jsonl("{\"match\": \"z\", \"response\": \"1\"}\n");
  EXPECT_THROW(strict->complete("q"), LLMError);
}

TEST(Mock, CodeExtraction) {
  EXPECT_EQ(extract_code_block("a\n```\nx\n```\nb\n```python\ny\n```\n```\nz\n```"), "y\n");
  EXPECT_EQ(extract_code_block("```\nz\n```"), "z\n");
  EXPECT_FALSE(extract_code_block("no code").has_value());
}

TEST(Mock, UriSchemes) {
  EXPECT_THROW(make_llm_client("ftp://x"), InputError);
  auto client = make_llm_client("http://localhost:9/v1/chat/completions?model=m&retries=0");
  auto* http = dynamic_cast<HttpLLM*>(client.get());
  ASSERT_NE(http, nullptr);
  EXPECT_EQ(http->config().port, 9);
  EXPECT_EQ(http->config().model, "m");
  EXPECT_THROW(client->complete("hi"), LLMError);
}

TEST(Synthesize, FirstRoundSuccess) {
  auto mock = MockLLM::from_file(fixtures::fixture_dir() / "mock/first_round.jsonl");
  std::vector<SynthesisLogRecord> log;
  auto out = synthesize_suite(engine(), sum_problem(), *mock, small_config(), default_prompts(),
                              [&](const SynthesisLogRecord& r) { log.push_back(r); });
  auto& res = std::get<SynthesisResult>(out);
  std::size_t regular = 0, corner = 0;
  for (const auto& c : res.suite.cases) (c.kind == CaseKind::Regular ? regular : corner)++;
  EXPECT_EQ(regular, 80u);
  EXPECT_EQ(corner, 20u);
  EXPECT_EQ(res.regular.rounds_used, 1);
  EXPECT_EQ(res.corner.rounds_used, 1);
  EXPECT_TRUE(log.empty());
  EXPECT_EQ(res.suite.metadata["rounds_used"]["regular"], 1);
}

TEST(Synthesize, FormatErrorThenRepair) {
  auto mock = MockLLM::from_file(fixtures::fixture_dir() / "mock/format_repair.jsonl");
  std::vector<SynthesisLogRecord> log;
  auto out = synthesize_suite(engine(), sum_problem(), *mock, small_config(), default_prompts(),
                              [&](const SynthesisLogRecord& r) { log.push_back(r); });
  auto& res = std::get<SynthesisResult>(out);
  EXPECT_EQ(res.regular.rounds_used, 2);
  EXPECT_EQ(res.corner.rounds_used, 1);
  ASSERT_EQ(log.size(), 1u);
  EXPECT_EQ(log[0].feedback.category, FeedbackCategory::FormatError);
  EXPECT_EQ(log[0].round, 1);
  ASSERT_EQ(res.regular.generators.size(), 2u);
  EXPECT_EQ(res.regular.generators[1].feedback_history.size(), 1u);
}

TEST(Synthesize, FailsAfterThreeRoundsPerKind) {
  auto mock = MockLLM::from_file(fixtures::fixture_dir() / "mock/always_crash.jsonl");
  auto out = synthesize_suite(engine(), sum_problem(), *mock, small_config());
  auto& failed = std::get<SynthesisFailed>(out);
  EXPECT_EQ(failed.regular.llm_requests, 3);
  EXPECT_EQ(failed.corner.llm_requests, 3);
  EXPECT_EQ(failed.history.size(), 6u);
  EXPECT_EQ(mock->transcript().size(), 6u);
  for (const auto& fb : failed.history) EXPECT_EQ(fb.category, FeedbackCategory::GeneratorExecutionError);
}

TEST(Synthesize, PartialSuiteFlagsFailedKind) {
  auto mock = MockLLM::from_jsonl(
      "{\"match\": \"80 unit test inputs\", \"response\": \"```python\\nprint(['1 2\\\\n', '3 4\\\\n'])\\n```\"}\n"
      "{\"match\": \"\", \"response\": \"print(1 // 0)\", \"repeat\": 0}\n");
  auto out = synthesize_suite(engine(), sum_problem(), *mock, small_config());
  auto& res = std::get<SynthesisResult>(out);
  EXPECT_EQ(res.suite.cases.size(), 2u);
  EXPECT_TRUE(res.suite.metadata["corner_failed"].get<bool>());
  EXPECT_FALSE(res.suite.metadata["regular_failed"].get<bool>());
  EXPECT_EQ(res.corner.llm_requests, 3);

  // Re-validating an emitted suite rejects nothing.
  std::vector<TestInput> again;
  for (const auto& c : res.suite.cases) again.push_back({c.input, c.kind});
  auto golds = select_gold_pair(engine(), sum_problem());
  EXPECT_TRUE(consistency_validate(engine(), again, sum_problem(), golds).rejected.empty());
}

TEST(Synthesize, DeterministicWithMock) {
  auto run = [] {
    auto mock = MockLLM::from_file(fixtures::fixture_dir() / "mock/format_repair.jsonl");
    auto out = synthesize_suite(engine(), sum_problem(), *mock, small_config());
    return nlohmann::json(std::get<SynthesisResult>(out).suite).dump();
  };
  EXPECT_EQ(run(), run());
}

TEST(ProblemIo, RoundTrip) {
  auto p = sum_problem();
  p.multi_test = true;
  auto path = std::filesystem::temp_directory_path() / "problems_io.jsonl";
  save_problems(path.string(), {p, p});
  auto back = load_problems(path.string());
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(nlohmann::json(back[1]), nlohmann::json(p));
  Problem one_gold = p;
  one_gold.gold_solutions.pop_back();
  EXPECT_THROW(one_gold.validate(), InputError);
}
