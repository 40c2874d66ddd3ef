#include "testforge/judge/types.hpp"

#include <array>
#include <fstream>
#include <sstream>

#include "testforge/errors.hpp"
#include "testforge/json_util.hpp"
#include "testforge/sandbox/json.hpp"

namespace testforge::judge {

using nlohmann::json;

namespace {

constexpr std::array<std::pair<Verdict, std::string_view>, 9> kVerdictNames{{
    {Verdict::Accepted, "Accepted"},
    {Verdict::WrongAnswer, "WrongAnswer"},
    {Verdict::TimeLimitExceeded, "TimeLimitExceeded"},
    {Verdict::MemoryLimitExceeded, "MemoryLimitExceeded"},
    {Verdict::RuntimeError, "RuntimeError"},
    {Verdict::CompileError, "CompileError"},
    {Verdict::IllegalOperation, "IllegalOperation"},
    {Verdict::CheckerError, "CheckerError"},
    {Verdict::JudgeError, "JudgeError"},
}};

std::string_view origin_name(CaseOrigin o) {
  return o == CaseOrigin::Public ? "public" : "generated";
}

CaseOrigin parse_origin(std::string_view name) {
  if (name == "public") return CaseOrigin::Public;
  if (name == "generated") return CaseOrigin::Generated;
  throw InputError("unknown case origin: " + std::string(name));
}

}  // namespace

std::string_view verdict_name(Verdict v) {
  for (const auto& [verdict, name] : kVerdictNames) {
    if (verdict == v) return name;
  }
  return "JudgeError";
}

Verdict parse_verdict(std::string_view name) {
  for (const auto& [verdict, n] : kVerdictNames) {
    if (n == name) return verdict;
  }
  throw InputError("unknown verdict: " + std::string(name));
}

int verdict_severity(Verdict v) {
  switch (v) {
    case Verdict::CompileError: return 8;
    case Verdict::JudgeError: return 7;
    case Verdict::IllegalOperation: return 6;
    case Verdict::MemoryLimitExceeded: return 5;
    case Verdict::TimeLimitExceeded: return 4;
    case Verdict::RuntimeError: return 3;
    case Verdict::CheckerError: return 2;
    case Verdict::WrongAnswer: return 1;
    case Verdict::Accepted: return 0;
  }
  return 7;
}

std::string_view case_kind_name(CaseKind k) { return k == CaseKind::Regular ? "regular" : "corner"; }

CaseKind parse_case_kind(std::string_view name) {
  if (name == "regular") return CaseKind::Regular;
  if (name == "corner") return CaseKind::Corner;
  throw InputError("unknown case kind: " + std::string(name));
}

void CheckerProgram::record_validation(double pass_rate) {
  validation_pass_rate = pass_rate;
  valid = checker_pass_rate_valid(pass_rate);
}

void to_json(json& j, const TestCase& c) {
  j = {{"input", c.input},
       {"output", c.expected_output},
       {"kind", case_kind_name(c.kind)},
       {"origin", origin_name(c.origin)}};
  if (c.round != 0) j["round"] = c.round;
}

void from_json(const json& j, TestCase& c) {
  c.input = j.at("input").get<std::string>();
  c.expected_output = j.at("output").get<std::string>();
  c.kind = parse_case_kind(j.value("kind", "regular"));
  c.origin = parse_origin(j.value("origin", "public"));
  c.round = j.value("round", 0);
}

void to_json(json& j, const CheckerProgram& c) {
  j = {{"source", c.source}, {"stage", c.stage == CheckerStage::Generated ? "generated" : "repaired"}};
  if (c.validation_pass_rate) j["validation_pass_rate"] = *c.validation_pass_rate;
  if (c.valid) j["valid"] = *c.valid;
}

void from_json(const json& j, CheckerProgram& c) {
  c.source = j.at("source").get<std::string>();
  const auto stage = j.value("stage", "generated");
  if (stage != "generated" && stage != "repaired") throw InputError("unknown checker stage: " + stage);
  c.stage = stage == "generated" ? CheckerStage::Generated : CheckerStage::Repaired;
  if (j.contains("validation_pass_rate")) c.validation_pass_rate = j["validation_pass_rate"].get<double>();
  if (j.contains("valid")) c.valid = j["valid"].get<bool>();
}

void to_json(json& j, const TestSuite& s) {
  j = {{"problem_id", s.problem_id}, {"limits", s.limits}, {"cases", s.cases}};
  if (s.checker) j["checker"] = *s.checker;
  if (!s.metadata.empty()) j["metadata"] = s.metadata;
}

void from_json(const json& j, TestSuite& s) {
  s.problem_id = j.at("problem_id").get<std::string>();
  s.limits = j.contains("limits") ? j["limits"].get<sandbox::ExecutionLimits>() : sandbox::ExecutionLimits{};
  s.cases = j.value("cases", std::vector<TestCase>{});
  if (j.contains("checker") && !j["checker"].is_null()) s.checker = j["checker"].get<CheckerProgram>();
  s.metadata = j.value("metadata", json::object());
}

json report_to_json(const JudgeReport& r, bool include_usage) {
  json cases = json::array();
  for (const auto& c : r.per_case) {
    json e = {{"index", c.index}, {"verdict", verdict_name(c.verdict)}};
    if (!c.detail.empty()) e["detail"] = c.detail;
    if (include_usage) e["usage"] = c.usage;
    cases.push_back(std::move(e));
  }
  json j = {{"problem_id", r.problem_id},
            {"pass_count", r.pass_count},
            {"total", r.total},
            {"pass_rate", r.pass_rate},
            {"aggregate", verdict_name(r.aggregate)},
            {"early_stopped", r.early_stopped},
            {"per_case", std::move(cases)}};
  j["first_failure_index"] = r.first_failure_index ? json(*r.first_failure_index) : json(nullptr);
  if (!r.compile_log.empty()) j["compile_log"] = r.compile_log;
  return j;
}

TestSuite load_suite(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open suite file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  const std::string text = ss.str();
  try {
    if (json::accept(text)) {
      auto suite = json::parse(text).get<TestSuite>();
      return suite;
    }
    TestSuite suite;
    bool header = false;
    std::istringstream lines(text);
    std::string line;
    while (std::getline(lines, line)) {
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      auto j = json::parse(line);
      if (j.contains("problem_id")) {
        if (header) throw InputError(path + ": more than one suite header");
        auto cases = std::move(suite.cases);
        suite = j.get<TestSuite>();
        suite.cases.insert(suite.cases.begin(), cases.begin(), cases.end());
        header = true;
      } else {
        suite.cases.push_back(j.get<TestCase>());
      }
    }
    if (!header) throw InputError(path + ": suite header missing");
    return suite;
  } catch (const json::exception& e) {
    throw InputError(path + ": " + e.what());
  }
}

void save_suite(const std::string& path, const TestSuite& suite) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InfrastructureError("cannot write suite file: " + path);
  out << dump_json(json(suite), 2) << '\n';
}

}  // namespace testforge::judge
