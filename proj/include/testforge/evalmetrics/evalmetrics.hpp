#pragma once

#include <nlohmann/json.hpp>

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "testforge/judge/judge.hpp"
#include "testforge/testgen/problem.hpp"

namespace testforge::evalmetrics {

using testgen::Solution;

/// Judges a whole solution against a suite. Implementations must be safe
/// to call from several threads.
class SolutionJudge {
 public:
  virtual ~SolutionJudge() = default;
  /// nullopt when the solution does not compile.
  virtual std::optional<judge::JudgeReport> judge(const Solution& solution,
                                                  const judge::TestSuite& suite) = 0;
};

/// Judges through the sandbox. Compiled artifacts are kept per solution;
/// with `memoize_cases`, per-case results are kept too, so judging the same
/// solution on overlapping suites only runs the new cases.
class EngineSolutionJudge : public SolutionJudge {
 public:
  EngineSolutionJudge(const judge::Judge& engine, bool memoize_cases = false,
                      std::size_t parallelism = 4);

  std::optional<judge::JudgeReport> judge(const Solution& solution,
                                          const judge::TestSuite& suite) override;

  /// Sandbox executions performed so far (cached results excluded).
  std::size_t executions() const;

 private:
  using Key = std::pair<std::string, std::string>;  // language, source
  std::optional<toolchain::CompiledArtifact> artifact_for(const Solution& s);

  const judge::Judge& engine_;
  bool memoize_;
  std::size_t parallelism_;
  mutable std::mutex mutex_;
  std::map<Key, std::optional<toolchain::CompiledArtifact>> artifacts_;
  // (language, source, checker source, input, expected) -> result
  std::map<std::vector<std::string>, judge::CaseResult> cases_;
  std::size_t executions_ = 0;
};

struct LabeledSolution {
  Solution solution;
  bool correct = false;  // passed every case of the labeling set
  judge::JudgeReport evidence;
};

struct Labeling {
  std::vector<LabeledSolution> labeled;
  std::vector<std::size_t> excluded;  // candidate positions that did not compile
};

/// Judges each candidate against the full labeling set; non-compiling
/// candidates are excluded. Throws InputError on an empty candidate list.
Labeling label_solutions(const std::vector<Solution>& candidates, const judge::TestSuite& full_set,
                         SolutionJudge& judge, std::size_t parallelism = 4);

struct Rates {
  std::size_t n_correct = 0;
  std::size_t n_incorrect = 0;
  std::size_t correct_accepted = 0;
  std::size_t incorrect_rejected = 0;

  std::optional<double> tpr() const;  // absent without correct solutions
  std::optional<double> tnr() const;  // absent without incorrect solutions
};

/// Rates of one group of solutions, pooled (micro) and as the mean of the
/// per-origin rates (macro, origins with an undefined rate skipped).
struct GroupQuality {
  Rates pooled;
  std::map<std::string, Rates> per_origin;
  std::optional<double> micro_tpr() const { return pooled.tpr(); }
  std::optional<double> micro_tnr() const { return pooled.tnr(); }
  std::optional<double> macro_tpr() const;
  std::optional<double> macro_tnr() const;
};

struct QualityReport {
  GroupQuality all;
  std::map<std::string, GroupQuality> per_language;
  std::vector<bool> accepted;  // per label, pass rate 1 on the suite under test

  std::optional<double> tpr() const { return all.micro_tpr(); }
  std::optional<double> tnr() const { return all.micro_tnr(); }
};

nlohmann::json to_json(const QualityReport& r);

/// Pools `from` into `into` (counts add up; rates are recomputed from them).
/// Used to aggregate one dataset over many problems.
void merge(QualityReport& into, const QualityReport& from);

/// A solution is accepted iff it passes every case of `suite_under_test`.
/// Throws InputError without labels.
QualityReport compute_quality(const std::vector<LabeledSolution>& labels,
                              const judge::TestSuite& suite_under_test, SolutionJudge& judge,
                              std::size_t parallelism = 4);

/// Text table: Dataset | C/C++ TPR TNR | Python3 TPR TNR | Python2 TPR TNR |
/// All TPR TNR, in percent with one decimal; "-" where a rate is undefined.
/// `macro` picks which average fills the cells.
std::string render_quality_table(const std::vector<std::pair<std::string, QualityReport>>& rows,
                                 bool macro = true);

}  // namespace testforge::evalmetrics
