#include <gtest/gtest.h>

#include "support.hpp"
#include "testforge/errors.hpp"
#include "testforge/spjgen/spjgen.hpp"

using namespace testforge;
using namespace testforge::spjgen;

namespace {

const judge::Judge& engine() {
  static judge::Judge j(std::shared_ptr<const toolchain::ProfileRegistry>(
                            &fixtures::registry(), [](const toolchain::ProfileRegistry*) {}),
                        judge::JudgeConfig{});
  return j;
}

Problem divide_problem() {
  Problem p;
  p.id = "divide";
  p.statement = "Print a / b. Answers within 1e-6 relative error are accepted.";
  p.input_format = "Two integers a and b, b is not zero.";
  p.output_format = "One real number.";
  p.examples = {{"1 3\n", "0.333333\n"}};
  p.gold_solutions = {{"cpp", fixtures::fixture("toy/divide_a.cpp"), ""},
                      {"cpp", fixtures::fixture("toy/divide_b.cpp"), ""}};
  return p;
}

// Identity gold and one case per integer in [0, n).
judge::TestSuite counting_suite(int n) {
  judge::TestSuite s;
  s.problem_id = "count";
  for (int i = 0; i < n; ++i) {
    auto v = std::to_string(i) + "\n";
    s.cases.push_back(judge::TestCase{v, v});
  }
  return s;
}

testgen::Solution echo_gold() {
  return {"cpp", "#include <cstdio>\nint main(){int x;std::scanf(\"%d\",&x);std::printf(\"%d\\n\",x);}\n",
          ""};
}

judge::CheckerProgram accept_from(int k) {
  judge::CheckerProgram c;
  c.source = "import sys\nprint(int(sys.argv[1]) >= " + std::to_string(k) + ")\n";
  return c;
}

}  // namespace

TEST(SpjParse, NoCheckerNeeded) {
  auto g = parse_generation_response(
      "Whether custom checker is needed: No\n\nReason: the sum is unique.\n");
  EXPECT_FALSE(g.decision.needed);
  EXPECT_EQ(g.decision.reason, "the sum is unique.");
  EXPECT_FALSE(g.checker);
}

TEST(SpjParse, CheckerInsideSingleFence) {
  auto g = parse_generation_response(
      "```\nWhether custom checker is needed: **Yes**\n\nReason: many answers\n\n"
      "If needed, please output the complete Python script:\nprint(True)\n```\n");
  EXPECT_TRUE(g.decision.needed);
  ASSERT_TRUE(g.checker);
  EXPECT_EQ(g.checker->source, "print(True)\n");
  EXPECT_EQ(g.checker->stage, judge::CheckerStage::Generated);
}

TEST(SpjParse, MissingPartsKeepRawText) {
  try {
    parse_generation_response("I think it is fine.");
    FAIL();
  } catch (const PipelineError& e) {
    EXPECT_EQ(e.raw(), "I think it is fine.");
  }
  EXPECT_THROW(parse_generation_response("Whether custom checker is needed: Yes\nReason: x\n"),
               PipelineError);
  EXPECT_THROW(parse_review_response("Does the Checker have problems: Yes\n"), PipelineError);
  EXPECT_THROW(parse_review_response("looks good"), PipelineError);
  auto g = parse_generation_response("Whether custom checker is needed: no");
  EXPECT_FALSE(g.decision.reason.empty());
}

TEST(SpjPrompts, CarryProblemAndScript) {
  auto p = divide_problem();
  auto gen = generation_prompt(testgen::default_prompts(), p);
  EXPECT_NE(gen.find("Problem Description: " + p.statement), std::string::npos);
  EXPECT_NE(gen.find("Whether custom checker is needed: Yes/No"), std::string::npos);
  auto rev = review_prompt(testgen::default_prompts(), p, accept_from(0));
  EXPECT_NE(rev.find("print(int(sys.argv[1]) >= 0)"), std::string::npos);
  EXPECT_NE(rev.find("Does the Checker have problems: Yes / No"), std::string::npos);
}

TEST(SpjReview, NoProblemsKeepsSource) {
  testgen::MockLLM::Entry entry;
  entry.match = {"Does the Checker have problems"};
  entry.response = "Does the Checker have problems: No\nReason: correct.\n";
  testgen::MockLLM llm({entry});
  auto in = accept_from(3);
  auto out = review_checker(divide_problem(), in, llm);
  EXPECT_EQ(out.source, in.source);
  EXPECT_EQ(out.stage, judge::CheckerStage::Repaired);
  EXPECT_THROW(review_checker(divide_problem(), out, llm), InputError);
}

TEST(SpjValidate, StrictGateAtNinetyFive) {
  auto p = divide_problem();
  auto suite = counting_suite(100);
  auto valid = validate_checker(engine(), accept_from(4), p, suite, echo_gold(), 4);
  EXPECT_DOUBLE_EQ(*valid.validation_pass_rate, 0.96);
  EXPECT_TRUE(*valid.valid);
  auto invalid = validate_checker(engine(), accept_from(5), p, suite, echo_gold(), 4);
  EXPECT_DOUBLE_EQ(*invalid.validation_pass_rate, 0.95);
  EXPECT_FALSE(*invalid.valid);
}

TEST(SpjValidate, RejectedGoldCapsRateAndLaxCheckerPasses) {
  auto p = divide_problem();
  auto suite = counting_suite(10);
  judge::CheckerProgram lax;
  lax.source = "print('True')\n";
  EXPECT_EQ(*validate_checker(engine(), lax, p, suite, echo_gold(), 4).validation_pass_rate, 1.0);
  EXPECT_LT(*validate_checker(engine(), accept_from(1), p, suite, echo_gold(), 4).validation_pass_rate,
            1.0);
}

TEST(SpjValidate, GoldFailureIsHardError) {
  auto suite = counting_suite(3);
  testgen::Solution crash{"cpp", "int main(){return 3;}\n", ""};
  EXPECT_THROW(validate_checker(engine(), accept_from(0), divide_problem(), suite, crash), PipelineError);
  testgen::Solution broken{"cpp", "int main({", ""};
  EXPECT_THROW(validate_checker(engine(), accept_from(0), divide_problem(), suite, broken), PipelineError);
}

TEST(SpjPipeline, ReviewDoesNotLowerValidity) {
  auto p = divide_problem();
  judge::TestSuite suite;
  suite.problem_id = p.id;
  for (int i = 1; i <= 20; ++i) {
    auto in = std::to_string(i * 7) + " " + std::to_string(i + 2) + "\n";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10f\n", (i * 7.0) / (i + 2));
    suite.cases.push_back(judge::TestCase{in, buf});
  }
  auto llm = testgen::MockLLM::from_file(fixtures::fixture_dir() / "mock/spj_divide.jsonl");
  auto out = build_special_judge(engine(), p, suite, *llm);
  EXPECT_TRUE(out.decision.needed);
  ASSERT_TRUE(out.generated && out.reviewed);
  EXPECT_EQ(out.reviewed->stage, judge::CheckerStage::Repaired);
  EXPECT_FALSE(*out.generated->valid);
  EXPECT_TRUE(*out.reviewed->valid);
  EXPECT_GE(*out.reviewed->validation_pass_rate, *out.generated->validation_pass_rate);
}
