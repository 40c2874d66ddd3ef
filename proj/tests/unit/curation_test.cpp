#include <gtest/gtest.h>

#include <cstdio>
#include <fstream>
#include <map>
#include <nlohmann/json.hpp>

#include "support.hpp"
#include "testforge/curation/curation.hpp"
#include "testforge/errors.hpp"

using namespace testforge;
using namespace testforge::curation;

namespace {

const judge::Judge& engine() {
  static judge::Judge j(std::shared_ptr<const toolchain::ProfileRegistry>(
                            &fixtures::registry(), [](const toolchain::ProfileRegistry*) {}),
                        judge::JudgeConfig{});
  return j;
}

std::string corpus_path() { return (fixtures::fixture_dir() / "curation/corpus.jsonl").string(); }

RawProblem raw(std::string id, std::string statement) {
  RawProblem r;
  r.problem.id = std::move(id);
  r.problem.statement = std::move(statement);
  return r;
}

testgen::Solution py(std::string src) { return {"python3", std::move(src), ""}; }

}  // namespace

TEST(Normalize, StripsMarkupAndCase) {
  EXPECT_EQ(normalize_text("<p>Given  a <b>String</b>,\n\tprint $n$ &lt; 10</p>"),
            "given a string , print n < 10");
  EXPECT_EQ(normalize_text("  "), "");
  EXPECT_EQ(normalize_text("a &amp;lt; b"), "a &lt; b");
}

TEST(Ngrams, ShortTextIsOneGram) {
  EXPECT_EQ(word_ngrams("A b c", 8), std::vector<std::string>{"a b c"});
  EXPECT_EQ(word_ngrams("a b c a b", 2), (std::vector<std::string>{"a b", "b c", "c a"}));
  EXPECT_DOUBLE_EQ(jaccard({"x", "y"}, {"y", "z"}), 1.0 / 3.0);
}

TEST(Dedup, MatchesBruteForceOracle) {
  auto corpus = load_corpus(corpus_path());
  auto result = dedup_ngram(corpus, 8, 0.85);
  std::vector<std::string> lines;
  for (const auto& d : result.dropped) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "%s %s %.6f", corpus[d.index].problem.id.c_str(),
                  corpus[d.of].problem.id.c_str(), d.similarity);
    lines.push_back(buf);
  }
  std::ifstream expected(fixtures::fixture_dir() / "../oracles/dedup_expected.txt");
  std::vector<std::string> want;
  for (std::string l; std::getline(expected, l);) {
    if (l.rfind("p", 0) == 0) want.push_back(l);
  }
  EXPECT_EQ(lines, want);
  EXPECT_EQ(result.kept.size() + result.dropped.size(), corpus.size());
}

TEST(Dedup, FirstOccurrenceWinsAndUnrelatedKept) {
  std::vector<RawProblem> ps{raw("a", "print the sum of two numbers"),
                             raw("b", "compute the shortest path in a weighted graph"),
                             raw("c", "print the sum of two numbers")};
  auto r = dedup_ngram(ps, 3, 0.85);
  EXPECT_EQ(r.kept, (std::vector<std::size_t>{0, 1}));
  ASSERT_EQ(r.dropped.size(), 1u);
  EXPECT_EQ(r.dropped[0].of, 0u);
  EXPECT_THROW(dedup_ngram(ps, 0, 0.5), InputError);
  EXPECT_THROW(dedup_ngram(ps, 3, 0.0), InputError);
  EXPECT_THROW(dedup_ngram(ps, 3, 1.5), InputError);
}

TEST(Eligibility, Reasons) {
  auto r = raw("a", "x");
  r.problem.gold_solutions = {py("print(1)"), py("print(1)"), py("print(1)")};
  EXPECT_FALSE(filter_eligible(r));
  r.problem.gold_solutions.resize(1);
  EXPECT_EQ(filter_eligible(r), DropReason::TooFewGolds);
  r.io_kind = "function";
  EXPECT_EQ(filter_eligible(r), DropReason::NonStdin);
  auto fn = nlohmann::json::parse(R"({"id": "f", "statement": "s", "fn_name": "solve"})");
  EXPECT_EQ(fn.get<RawProblem>().io_kind, "function");
}

TEST(GoldVerification, DropsFailingGolds) {
  auto r = raw("g", "echo");
  r.problem.public_tests = {judge::TestCase{"5\n", "5\n"}};
  r.problem.gold_solutions = {py("print(input())"), py("print(4)"), py("print(int(input()))")};
  auto v = verify_gold_solutions(engine(), r);
  auto& kept = std::get<RawProblem>(v);
  ASSERT_EQ(kept.problem.gold_solutions.size(), 2u);
  EXPECT_EQ(kept.problem.gold_solutions[1].source, "print(int(input()))");

  r.problem.gold_solutions.pop_back();
  EXPECT_EQ(std::get<DropReason>(verify_gold_solutions(engine(), r)), DropReason::GoldFailed);
  r.problem.public_tests.clear();
  EXPECT_EQ(std::get<DropReason>(verify_gold_solutions(engine(), r)), DropReason::NoPublicTests);
}

TEST(AntiHack, NeedsSingleEmbeddedTest) {
  Problem p;
  p.statement = "Count larger elements. Example input: 5 3 6 4 5 9";
  p.public_tests = {judge::TestCase{"5\n3 6 4 5 9\n", "4 1 3 2 0\n"}};
  EXPECT_TRUE(is_hackable(p));
  p.public_tests.push_back(judge::TestCase{"1\n1\n", "0\n"});
  EXPECT_FALSE(is_hackable(p));
  p.public_tests = {judge::TestCase{"2\n7 8\n", "1 0\n"}};
  EXPECT_FALSE(is_hackable(p));
  // Word boundaries: "5 3" must not match inside "15 3".
  p.statement = "Example: 15 3 6 4 5 9";
  p.public_tests = {judge::TestCase{"5 3 6 4 5 9\n", ""}};
  EXPECT_FALSE(is_hackable(p));
  p.statement = "Nothing here.";
  p.examples = {{"5 3 6 4 5 9\n", "x\n"}};
  EXPECT_TRUE(is_hackable(p));
}

TEST(Curate, PlantedFatesAndIdentity) {
  auto corpus = load_corpus(corpus_path());
  auto result = curate(engine(), corpus);

  std::map<std::string, std::string> planted;
  std::ifstream in(corpus_path());
  for (std::string l; std::getline(in, l);) {
    auto j = nlohmann::json::parse(l);
    planted[j["id"]] = j["expect"];
  }
  ASSERT_EQ(result.decisions.size(), corpus.size());
  for (const auto& d : result.decisions) {
    EXPECT_EQ(d.reason ? std::string(reason_name(*d.reason)) : "kept", planted[d.id]) << d.id;
  }
  EXPECT_EQ(result.report.kept + result.report.total_dropped(), result.report.input);
  auto report = to_json(result.report);
  EXPECT_EQ(report["kept"], 8);
  EXPECT_EQ(report["dropped"]["duplicate"], 3);
  EXPECT_EQ(report["dropped"]["hackable"], 1);

  auto out = std::filesystem::temp_directory_path() / "curated.jsonl";
  save_corpus(out.string(), result.problems);
  auto again = curate(engine(), load_corpus(out.string()));
  EXPECT_EQ(again.report.kept, result.problems.size());
  EXPECT_EQ(nlohmann::json(again.problems), nlohmann::json(result.problems));
}

TEST(Corpus, RejectsRepeatedIds) {
  auto path = std::filesystem::temp_directory_path() / "dup_ids.jsonl";
  std::ofstream(path) << R"({"id": "a", "statement": "x"})" << "\n\n"
                      << R"({"id": "a", "statement": "y"})" << "\n";
  EXPECT_THROW(load_corpus(path.string()), InputError);
}
