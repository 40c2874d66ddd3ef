#include "testforge/testgen/problem.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>

#include "testforge/errors.hpp"
#include "testforge/json_util.hpp"

namespace testforge::testgen {

using nlohmann::json;

sandbox::ExecutionLimits Problem::limits() const {
  sandbox::ExecutionLimits l;
  l.cpu_time_ms = time_limit_ms;
  l.wall_time_ms = std::max(3 * time_limit_ms, time_limit_ms + 1000);
  l.memory_bytes = memory_limit_bytes;
  return l;
}

void Problem::validate() const {
  if (statement.empty()) throw InputError("problem " + id + ": empty statement");
  if (gold_solutions.size() < 2) throw InputError("problem " + id + ": fewer than two gold solutions");
  limits().validate();
}

std::string examples_text(const Problem& p) {
  std::string out;
  for (std::size_t i = 0; i < p.examples.size(); ++i) {
    out += "Example " + std::to_string(i + 1) + " input:\n" + p.examples[i].input;
    if (!out.empty() && out.back() != '\n') out += '\n';
    out += "Example " + std::to_string(i + 1) + " output:\n" + p.examples[i].output;
    if (!out.empty() && out.back() != '\n') out += '\n';
  }
  return out;
}

std::string problem_text(const Problem& p) {
  std::string out = p.statement;
  if (!p.input_format.empty()) out += "\n\nInput\n" + p.input_format;
  if (!p.output_format.empty()) out += "\n\nOutput\n" + p.output_format;
  if (!p.examples.empty()) out += "\n\n" + examples_text(p);
  return out;
}

bool first_line_is_test_count(const Problem& p) {
  if (p.multi_test) return *p.multi_test;
  std::string text = p.input_format.empty() ? p.statement : p.input_format;
  std::transform(text.begin(), text.end(), text.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  for (const char* key : {"test case", "testcase", "number of tests", "number of test"}) {
    if (text.find(key) != std::string::npos) return true;
  }
  return false;
}

void to_json(json& j, const Solution& s) {
  j = {{"language", s.language}, {"source", s.source}};
  if (!s.origin.empty()) j["origin"] = s.origin;
}

void from_json(const json& j, Solution& s) {
  s.language = j.at("language").get<std::string>();
  s.source = j.at("source").get<std::string>();
  s.origin = j.value("origin", "");
}

void to_json(json& j, const Problem& p) {
  json examples = json::array();
  for (const auto& e : p.examples) examples.push_back({{"input", e.input}, {"output", e.output}});
  j = {{"id", p.id},
       {"statement", p.statement},
       {"input_format", p.input_format},
       {"output_format", p.output_format},
       {"examples", std::move(examples)},
       {"time_limit_ms", p.time_limit_ms},
       {"memory_limit_bytes", p.memory_limit_bytes},
       {"gold_solutions", p.gold_solutions},
       {"public_tests", p.public_tests}};
  if (p.checker) j["checker"] = *p.checker;
  if (p.multi_test) j["multi_test"] = *p.multi_test;
}

void from_json(const json& j, Problem& p) {
  p.id = j.at("id").get<std::string>();
  p.statement = j.value("statement", "");
  p.input_format = j.value("input_format", "");
  p.output_format = j.value("output_format", "");
  p.examples.clear();
  for (const auto& e : j.value("examples", json::array())) {
    p.examples.push_back({e.at("input").get<std::string>(), e.at("output").get<std::string>()});
  }
  p.time_limit_ms = j.value("time_limit_ms", p.time_limit_ms);
  p.memory_limit_bytes = j.value("memory_limit_bytes", p.memory_limit_bytes);
  p.gold_solutions = j.value("gold_solutions", std::vector<Solution>{});
  p.public_tests = j.value("public_tests", std::vector<judge::TestCase>{});
  if (j.contains("checker") && !j["checker"].is_null()) p.checker = j["checker"].get<judge::CheckerProgram>();
  if (j.contains("multi_test") && !j["multi_test"].is_null()) p.multi_test = j["multi_test"].get<bool>();
}

std::vector<Problem> load_problems(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open problem file: " + path);
  std::vector<Problem> out;
  std::string line;
  for (int n = 1; std::getline(in, line); ++n) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(json::parse(line).get<Problem>());
    } catch (const json::exception& e) {
      throw InputError(path + ":" + std::to_string(n) + ": " + e.what());
    }
  }
  return out;
}

void save_problems(const std::string& path, const std::vector<Problem>& problems) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InfrastructureError("cannot write problem file: " + path);
  for (const auto& p : problems) out << dump_json(json(p)) << '\n';
}

}  // namespace testforge::testgen
