#pragma once

#include <fstream>
#include <nlohmann/json.hpp>

#include "support.hpp"
#include "testforge/evalmetrics/evalmetrics.hpp"

namespace testforge::fixtures {

// The six-solution metrics fixture plus its non-compiling candidate.
struct MetricsSet {
  std::vector<testgen::Solution> candidates;
  std::vector<std::string> files;
  judge::TestSuite labeling;
  judge::TestSuite under_test;
};

inline judge::TestSuite suite_from(const nlohmann::json& pairs) {
  judge::TestSuite s;
  s.problem_id = "sum";
  for (const auto& p : pairs) s.cases.push_back(judge::TestCase{p[0], p[1]});
  return s;
}

inline MetricsSet metrics_set() {
  auto doc = nlohmann::json::parse(read_text(fixture_dir() / "metrics/set.json"));
  MetricsSet m;
  for (const auto& s : doc["solutions"]) {
    m.files.push_back(s["file"]);
    m.candidates.push_back({s["language"], fixture("metrics/" + s["file"].get<std::string>()),
                            s["origin"]});
  }
  m.labeling = suite_from(doc["labeling_set"]);
  m.under_test = suite_from(doc["suite_under_test"]);
  return m;
}

inline nlohmann::json metrics_expected() {
  return nlohmann::json::parse(read_text(fixture_dir() / "../oracles/metrics_expected.json"));
}

}  // namespace testforge::fixtures
