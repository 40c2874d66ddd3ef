#include "testforge/evalmetrics/evalmetrics.hpp"

#include <cstdio>
#include <sstream>

#include "testforge/errors.hpp"

namespace testforge::evalmetrics {

using nlohmann::json;

EngineSolutionJudge::EngineSolutionJudge(const judge::Judge& engine, bool memoize_cases,
                                         std::size_t parallelism)
    : engine_(engine), memoize_(memoize_cases), parallelism_(parallelism) {}

std::size_t EngineSolutionJudge::executions() const {
  std::lock_guard lk(mutex_);
  return executions_;
}

std::optional<toolchain::CompiledArtifact> EngineSolutionJudge::artifact_for(const Solution& s) {
  Key key{s.language, s.source};
  {
    std::lock_guard lk(mutex_);
    if (auto it = artifacts_.find(key); it != artifacts_.end()) return it->second;
  }
  // Two threads may compile the same solution once each; the results are
  // interchangeable, so the first stored wins.
  auto compiled = engine_.compile(s.source, s.language);
  std::optional<toolchain::CompiledArtifact> artifact;
  if (auto* a = std::get_if<toolchain::CompiledArtifact>(&compiled)) artifact = std::move(*a);
  std::lock_guard lk(mutex_);
  return artifacts_.emplace(std::move(key), std::move(artifact)).first->second;
}

std::optional<judge::JudgeReport> EngineSolutionJudge::judge(const Solution& solution,
                                                             const judge::TestSuite& suite) {
  if (suite.cases.empty()) throw InputError("suite " + suite.problem_id + " has no cases");
  auto artifact = artifact_for(solution);
  if (!artifact) return std::nullopt;

  std::optional<toolchain::CompiledArtifact> checker;
  if (suite.checker) checker = engine_.prepare_checker(*suite.checker);
  const std::string checker_src = suite.checker ? suite.checker->source : std::string();

  std::vector<judge::CaseResult> per_case(suite.cases.size());
  judge::parallel_for(suite.cases.size(), parallelism_, [&](std::size_t i) {
    const auto& test = suite.cases[i];
    std::vector<std::string> key;
    if (memoize_) {
      key = {solution.language, solution.source, checker_src, test.input, test.expected_output};
      std::lock_guard lk(mutex_);
      if (auto it = cases_.find(key); it != cases_.end()) {
        per_case[i] = it->second;
        per_case[i].index = i;
        return;
      }
    }
    auto r = engine_.judge_case(*artifact, test, suite, checker ? &*checker : nullptr);
    r.index = i;
    std::lock_guard lk(mutex_);
    ++executions_;
    if (memoize_) cases_.emplace(std::move(key), r);
    per_case[i] = std::move(r);
  });
  auto report = judge::assemble_report(suite.problem_id, std::move(per_case), suite.cases.size());
  report.compile_log = artifact->compile_log;
  return report;
}

Labeling label_solutions(const std::vector<Solution>& candidates, const judge::TestSuite& full_set,
                         SolutionJudge& judge, std::size_t parallelism) {
  if (candidates.empty()) throw InputError("no candidate solutions to label");
  std::vector<std::optional<judge::JudgeReport>> reports(candidates.size());
  judge::parallel_for(candidates.size(), parallelism,
                      [&](std::size_t i) { reports[i] = judge.judge(candidates[i], full_set); });
  Labeling out;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (!reports[i]) {
      out.excluded.push_back(i);
      continue;
    }
    const bool correct = reports[i]->pass_count == reports[i]->total;
    out.labeled.push_back({candidates[i], correct, std::move(*reports[i])});
  }
  return out;
}

std::optional<double> Rates::tpr() const {
  if (n_correct == 0) return std::nullopt;
  return static_cast<double>(correct_accepted) / static_cast<double>(n_correct);
}

std::optional<double> Rates::tnr() const {
  if (n_incorrect == 0) return std::nullopt;
  return static_cast<double>(incorrect_rejected) / static_cast<double>(n_incorrect);
}

namespace {

template <class F>
std::optional<double> mean_defined(const std::map<std::string, Rates>& groups, F rate) {
  double sum = 0;
  std::size_t n = 0;
  for (const auto& [_, r] : groups) {
    if (auto v = rate(r)) {
      sum += *v;
      ++n;
    }
  }
  if (n == 0) return std::nullopt;
  return sum / static_cast<double>(n);
}

void tally(Rates& r, bool correct, bool accepted) {
  if (correct) {
    ++r.n_correct;
    if (accepted) ++r.correct_accepted;
  } else {
    ++r.n_incorrect;
    if (!accepted) ++r.incorrect_rejected;
  }
}

void tally(GroupQuality& g, const LabeledSolution& l, bool accepted) {
  tally(g.pooled, l.correct, accepted);
  tally(g.per_origin[l.solution.origin], l.correct, accepted);
}

void add(Rates& into, const Rates& from) {
  into.n_correct += from.n_correct;
  into.n_incorrect += from.n_incorrect;
  into.correct_accepted += from.correct_accepted;
  into.incorrect_rejected += from.incorrect_rejected;
}

void add(GroupQuality& into, const GroupQuality& from) {
  add(into.pooled, from.pooled);
  for (const auto& [origin, r] : from.per_origin) add(into.per_origin[origin], r);
}

json opt(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json rates_json(const Rates& r) {
  return {{"n_correct", r.n_correct},
          {"n_incorrect", r.n_incorrect},
          {"correct_accepted", r.correct_accepted},
          {"incorrect_rejected", r.incorrect_rejected},
          {"tpr", opt(r.tpr())},
          {"tnr", opt(r.tnr())}};
}

json group_json(const GroupQuality& g) {
  json origins = json::object();
  for (const auto& [name, r] : g.per_origin) origins[name] = rates_json(r);
  return {{"counts", rates_json(g.pooled)},
          {"micro", {{"tpr", opt(g.micro_tpr())}, {"tnr", opt(g.micro_tnr())}}},
          {"macro", {{"tpr", opt(g.macro_tpr())}, {"tnr", opt(g.macro_tnr())}}},
          {"per_origin", std::move(origins)}};
}

}  // namespace

std::optional<double> GroupQuality::macro_tpr() const {
  return mean_defined(per_origin, [](const Rates& r) { return r.tpr(); });
}

std::optional<double> GroupQuality::macro_tnr() const {
  return mean_defined(per_origin, [](const Rates& r) { return r.tnr(); });
}

json to_json(const QualityReport& r) {
  json langs = json::object();
  for (const auto& [name, g] : r.per_language) langs[name] = group_json(g);
  return {{"tpr", opt(r.tpr())},
          {"tnr", opt(r.tnr())},
          {"all", group_json(r.all)},
          {"per_language", std::move(langs)}};
}

void merge(QualityReport& into, const QualityReport& from) {
  add(into.all, from.all);
  for (const auto& [lang, g] : from.per_language) add(into.per_language[lang], g);
  into.accepted.insert(into.accepted.end(), from.accepted.begin(), from.accepted.end());
}

QualityReport compute_quality(const std::vector<LabeledSolution>& labels,
                              const judge::TestSuite& suite_under_test, SolutionJudge& judge,
                              std::size_t parallelism) {
  if (labels.empty()) throw InputError("no labeled solutions");
  std::vector<char> accepted(labels.size(), 0);
  judge::parallel_for(labels.size(), parallelism, [&](std::size_t i) {
    auto report = judge.judge(labels[i].solution, suite_under_test);
    accepted[i] = report && report->pass_count == report->total;
  });
  QualityReport out;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    tally(out.all, labels[i], accepted[i]);
    tally(out.per_language[labels[i].solution.language], labels[i], accepted[i]);
    out.accepted.push_back(accepted[i]);
  }
  return out;
}

std::string render_quality_table(const std::vector<std::pair<std::string, QualityReport>>& rows,
                                 bool macro) {
  static const std::pair<const char*, const char*> kColumns[] = {
      {"C/C++", "cpp"}, {"Python3", "python3"}, {"Python2", "python2"}};
  auto cell = [](const std::optional<double>& v) {
    if (!v) return std::string("-");
    char buf[16];
    std::snprintf(buf, sizeof buf, "%.1f", *v * 100.0);
    return std::string(buf);
  };
  std::size_t name_width = 7;
  for (const auto& [name, _] : rows) name_width = std::max(name_width, name.size());

  std::ostringstream out;
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-*s", static_cast<int>(name_width), "Dataset");
  out << buf;
  for (const auto& [title, _] : kColumns) {
    std::snprintf(buf, sizeof buf, " | %-12s", title);
    out << buf;
  }
  out << " | All\n";
  std::snprintf(buf, sizeof buf, "%-*s", static_cast<int>(name_width), "");
  out << buf;
  for (int i = 0; i < 4; ++i) out << " |   TPR    TNR";
  out << '\n';
  for (const auto& [name, report] : rows) {
    std::snprintf(buf, sizeof buf, "%-*s", static_cast<int>(name_width), name.c_str());
    out << buf;
    auto emit = [&](const GroupQuality* g) {
      std::optional<double> tpr, tnr;
      if (g) {
        tpr = macro ? g->macro_tpr() : g->micro_tpr();
        tnr = macro ? g->macro_tnr() : g->micro_tnr();
      }
      std::snprintf(buf, sizeof buf, " | %5s  %5s", cell(tpr).c_str(), cell(tnr).c_str());
      out << buf;
    };
    for (const auto& [_, lang] : kColumns) {
      auto it = report.per_language.find(lang);
      emit(it == report.per_language.end() ? nullptr : &it->second);
    }
    emit(&report.all);
    out << '\n';
  }
  return out.str();
}

}  // namespace testforge::evalmetrics
