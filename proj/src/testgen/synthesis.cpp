#include "testforge/testgen/synthesis.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>

#include "testforge/errors.hpp"

namespace testforge::testgen {

using nlohmann::json;
namespace t = sandbox::termination;

namespace {

constexpr std::size_t kExcerptBytes = 600;
constexpr std::size_t kLogTailBytes = 4000;

std::string excerpt(std::string_view s, std::size_t n = kExcerptBytes) {
  if (s.size() <= n) return std::string(s);
  return std::string(s.substr(0, n)) + "... [" + std::to_string(s.size() - n) + " more bytes]";
}

std::string tail(std::string_view s, std::size_t n = kLogTailBytes) {
  if (s.size() <= n) return std::string(s);
  return "[..." + std::to_string(s.size() - n) + " bytes] " + std::string(s.substr(s.size() - n));
}

void append_utf8(std::string& out, std::uint32_t cp) {
  if (cp < 0x80) {
    out += static_cast<char>(cp);
  } else if (cp < 0x800) {
    out += static_cast<char>(0xC0 | (cp >> 6));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else if (cp < 0x10000) {
    out += static_cast<char>(0xE0 | (cp >> 12));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else {
    out += static_cast<char>(0xF0 | (cp >> 18));
    out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  }
}

// Recursive-descent reader for the repr of a Python list of str.
class PyListReader {
 public:
  explicit PyListReader(std::string_view s) : s_(s) {}

  std::optional<std::vector<std::string>> read() {
    std::vector<std::string> out;
    skip_ws();
    if (!eat('[')) return std::nullopt;
    skip_ws();
    if (eat(']')) return finish(std::move(out));
    while (true) {
      auto item = read_string();
      if (!item) return std::nullopt;
      out.push_back(std::move(*item));
      skip_ws();
      if (eat(']')) return finish(std::move(out));
      if (!eat(',')) return std::nullopt;
      skip_ws();
      if (eat(']')) return finish(std::move(out));  // trailing comma
    }
  }

 private:
  std::optional<std::vector<std::string>> finish(std::vector<std::string> v) {
    skip_ws();
    if (i_ != s_.size()) return std::nullopt;
    return v;
  }

  void skip_ws() {
    while (i_ < s_.size() && (s_[i_] == ' ' || s_[i_] == '\n' || s_[i_] == '\t' || s_[i_] == '\r')) ++i_;
  }

  bool eat(char c) {
    if (i_ < s_.size() && s_[i_] == c) {
      ++i_;
      return true;
    }
    return false;
  }

  std::optional<std::uint32_t> hex(std::size_t digits) {
    if (i_ + digits > s_.size()) return std::nullopt;
    std::uint32_t v = 0;
    for (std::size_t k = 0; k < digits; ++k) {
      char c = s_[i_++];
      v <<= 4;
      if (c >= '0' && c <= '9') v |= c - '0';
      else if (c >= 'a' && c <= 'f') v |= c - 'a' + 10;
      else if (c >= 'A' && c <= 'F') v |= c - 'A' + 10;
      else return std::nullopt;
    }
    return v;
  }

  std::optional<std::string> read_string() {
    if (i_ >= s_.size()) return std::nullopt;
    const char quote = s_[i_];
    if (quote != '\'' && quote != '"') return std::nullopt;
    ++i_;
    std::string out;
    while (i_ < s_.size()) {
      char c = s_[i_++];
      if (c == quote) return out;
      if (c == '\n') return std::nullopt;
      if (c != '\\') {
        out += c;
        continue;
      }
      if (i_ >= s_.size()) return std::nullopt;
      char e = s_[i_++];
      switch (e) {
        case 'n': out += '\n'; break;
        case 't': out += '\t'; break;
        case 'r': out += '\r'; break;
        case 'a': out += '\a'; break;
        case 'b': out += '\b'; break;
        case 'f': out += '\f'; break;
        case 'v': out += '\v'; break;
        case '\\': out += '\\'; break;
        case '\'': out += '\''; break;
        case '"': out += '"'; break;
        case '\n': break;
        case 'x': {
          auto v = hex(2);
          if (!v) return std::nullopt;
          append_utf8(out, *v);
          break;
        }
        case 'u':
        case 'U': {
          auto v = hex(e == 'u' ? 4 : 8);
          if (!v || *v > 0x10FFFF) return std::nullopt;
          append_utf8(out, *v);
          break;
        }
        default:
          if (e >= '0' && e <= '7') {
            std::uint32_t v = e - '0';
            for (int k = 0; k < 2 && i_ < s_.size() && s_[i_] >= '0' && s_[i_] <= '7'; ++k) {
              v = v * 8 + (s_[i_++] - '0');
            }
            append_utf8(out, v);
          } else {
            out += '\\';
            out += e;
          }
      }
    }
    return std::nullopt;
  }

  std::string_view s_;
  std::size_t i_ = 0;
};

std::optional<std::vector<std::string>> parse_json_list(std::string_view text) {
  auto j = json::parse(text, nullptr, false);
  if (j.is_discarded() || !j.is_array()) return std::nullopt;
  std::vector<std::string> out;
  for (const auto& item : j) {
    if (!item.is_string()) return std::nullopt;
    out.push_back(item.get<std::string>());
  }
  return out;
}

std::optional<std::vector<std::string>> parse_any_list(std::string_view text) {
  if (auto v = parse_json_list(text)) return v;
  return PyListReader(text).read();
}

std::string describe_gold_failure(std::size_t which, const sandbox::ExecutionOutcome& o) {
  std::string d = "gold solution #" + std::to_string(which + 1) + " ended with " +
                  sandbox::describe(o.termination);
  if (!o.stderr_data.empty()) d += "\nstderr:\n" + tail(o.stderr_data, 1500);
  return d;
}

std::optional<FeedbackRecord> gold_failure(std::size_t which, const sandbox::ExecutionOutcome& o) {
  const auto& term = o.termination;
  FeedbackRecord r;
  r.stage = FeedbackStage::Validation;
  if (std::holds_alternative<t::CpuTimeViolation>(term) ||
      std::holds_alternative<t::WallTimeViolation>(term)) {
    r.category = FeedbackCategory::TimeLimit;
  } else if (std::holds_alternative<t::MemoryViolation>(term)) {
    r.category = FeedbackCategory::MemoryLimit;
  } else if (auto* e = std::get_if<t::Exited>(&term); e && e->code == 0) {
    return std::nullopt;
  } else if (std::holds_alternative<t::IsolationSetupFailure>(term)) {
    throw InfrastructureError("sandbox setup failed while validating: " + sandbox::describe(term));
  } else {
    r.category = FeedbackCategory::Other;
  }
  r.detail = describe_gold_failure(which, o);
  return r;
}

FeedbackRecord summarize_rejections(const std::vector<Rejection>& rejected, std::size_t total) {
  std::map<FeedbackCategory, std::size_t> counts;
  for (const auto& r : rejected) ++counts[r.feedback.category];
  // Most frequent category; ties go to the one seen first.
  const Rejection* lead = &rejected.front();
  for (const auto& r : rejected) {
    if (counts[r.feedback.category] > counts[lead->feedback.category]) lead = &r;
  }
  FeedbackRecord out;
  out.stage = FeedbackStage::Validation;
  out.category = lead->feedback.category;
  out.detail = std::to_string(rejected.size()) + " of " + std::to_string(total) + " inputs rejected (";
  bool first = true;
  for (const auto& [cat, n] : counts) {
    out.detail += (first ? "" : ", ") + std::string(category_name(cat)) + ": " + std::to_string(n);
    first = false;
  }
  out.detail += ").\nOffending input:\n" + excerpt(lead->input.data) + "\n" + lead->feedback.detail;
  return out;
}

}  // namespace

std::string_view category_name(FeedbackCategory c) {
  switch (c) {
    case FeedbackCategory::FormatError: return "FormatError";
    case FeedbackCategory::GeneratorExecutionError: return "GeneratorExecutionError";
    case FeedbackCategory::TimeLimit: return "TimeLimit";
    case FeedbackCategory::MemoryLimit: return "MemoryLimit";
    case FeedbackCategory::InconsistentOutput: return "InconsistentOutput";
    case FeedbackCategory::Other: return "Other";
  }
  return "Other";
}

void SynthesisConfig::validate() const {
  if (regular_count == 0 || corner_count == 0) throw InputError("case quotas must be positive");
  if (max_rounds < 1) throw InputError("max_rounds must be at least 1");
  if (parallelism == 0) throw InputError("parallelism must be positive");
  generator_limits.validate();
}

std::string build_generator_prompt(const PromptLibrary& prompts, const Problem& problem,
                                   const Solution& gold, CaseKind kind,
                                   const RepairContext* repair) {
  const std::map<std::string, std::string> examples{{"example1", prompts.get("example1")},
                                                    {"example2", prompts.get("example2")}};
  if (repair) {
    auto values = examples;
    values["problem"] = problem_text(problem);
    values["generator"] = repair->generator->source;
    values["error_info"] = std::string(category_name(repair->feedback->category)) + ": " +
                           repair->feedback->detail;
    return prompts.render(repair->feedback->stage == FeedbackStage::Generation
                              ? "repair_generation"
                              : "repair_validation",
                          values);
  }
  const auto format_block =
      prompts.render(first_line_is_test_count(problem) ? "format2" : "format1", examples);
  return prompts.render(kind == CaseKind::Regular ? "regular" : "corner",
                        {{"format_block", format_block},
                         {"problem", problem_text(problem)},
                         {"solution", gold.source}});
}

GeneratorOutput parse_generator_output(std::string_view stdout_data) {
  std::string_view text = stdout_data;
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
  if (auto v = parse_any_list(text)) return *v;
  auto nl = text.rfind('\n');
  if (nl != std::string_view::npos) {
    if (auto v = parse_any_list(text.substr(nl + 1))) return *v;
  }
  FeedbackRecord r;
  r.category = FeedbackCategory::FormatError;
  r.stage = FeedbackStage::Generation;
  r.detail = "generator output is not a list of strings (expected a JSON array or a printed "
             "Python list of str). Output began with:\n" + excerpt(stdout_data);
  return r;
}

std::variant<std::vector<TestInput>, FeedbackRecord> run_generator(
    const judge::Judge& engine, const GeneratorProgram& gen, const SynthesisConfig& config) {
  FeedbackRecord fail;
  fail.stage = FeedbackStage::Generation;
  fail.category = FeedbackCategory::GeneratorExecutionError;

  auto compiled = engine.compile(gen.source, config.generator_language);
  if (auto* f = std::get_if<toolchain::CompileFailure>(&compiled)) {
    fail.detail = "generator failed to compile:\n" + tail(f->log);
    return fail;
  }
  auto outcome = engine.run(std::get<toolchain::CompiledArtifact>(compiled), "",
                            config.generator_limits);
  if (std::holds_alternative<t::IsolationSetupFailure>(outcome.termination)) {
    throw InfrastructureError("sandbox setup failed for generator: " +
                              sandbox::describe(outcome.termination));
  }
  auto* exited = std::get_if<t::Exited>(&outcome.termination);
  if (!exited || exited->code != 0) {
    fail.detail = "generator ended with " + sandbox::describe(outcome.termination);
    if (!outcome.stderr_data.empty()) fail.detail += "\n" + tail(outcome.stderr_data);
    return fail;
  }

  auto parsed = parse_generator_output(outcome.stdout_data);
  if (auto* fb = std::get_if<FeedbackRecord>(&parsed)) return *fb;

  std::vector<TestInput> inputs;
  std::set<std::string> seen;
  for (auto& s : std::get<std::vector<std::string>>(parsed)) {
    if (inputs.size() == config.quota(gen.kind)) break;
    if (s.empty() || !seen.insert(s).second) continue;
    inputs.push_back({std::move(s), gen.kind});
  }
  if (inputs.empty()) {
    FeedbackRecord r;
    r.category = FeedbackCategory::Other;
    r.stage = FeedbackStage::Generation;
    r.detail = "generator printed an empty list";
    return r;
  }
  return inputs;
}

GoldPair select_gold_pair(const judge::Judge& engine, const Problem& problem) {
  if (problem.gold_solutions.size() < 2) throw InputError("problem " + problem.id + " needs two gold solutions");
  auto compile_gold = [&](std::size_t i) {
    const auto& g = problem.gold_solutions[i];
    auto r = engine.compile(g.source, g.language);
    if (auto* f = std::get_if<toolchain::CompileFailure>(&r)) {
      throw PipelineError("gold solution #" + std::to_string(i + 1) + " of " + problem.id +
                              " does not compile",
                          f->log);
    }
    return std::get<toolchain::CompiledArtifact>(std::move(r));
  };

  GoldPair pair;
  if (problem.gold_solutions.size() == 2 || problem.public_tests.empty()) {
    pair.artifact = {compile_gold(0), compile_gold(1)};
    return pair;
  }

  judge::TestSuite pub;
  pub.problem_id = problem.id;
  pub.cases = problem.public_tests;
  pub.limits = problem.limits();
  pub.checker = problem.checker;
  struct Candidate {
    std::size_t index;
    bool passed;
    double cpu_ms;
    toolchain::CompiledArtifact artifact;
  };
  std::vector<Candidate> cands;
  for (std::size_t i = 0; i < problem.gold_solutions.size(); ++i) {
    auto art = compile_gold(i);
    auto report = engine.judge_artifact(art, pub);
    double cpu = 0;
    for (const auto& c : report.per_case) cpu += c.usage.cpu_time_ms;
    cands.push_back({i, report.pass_rate == 1.0, cpu, std::move(art)});
  }
  std::stable_sort(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) {
    if (a.passed != b.passed) return a.passed;
    return a.cpu_ms < b.cpu_ms;
  });
  // Keep position order between the chosen two so gold #1 stays stable.
  if (cands[1].index < cands[0].index) std::swap(cands[0], cands[1]);
  pair.index = {cands[0].index, cands[1].index};
  pair.artifact = {std::move(cands[0].artifact), std::move(cands[1].artifact)};
  return pair;
}

ValidationResult consistency_validate(const judge::Judge& engine,
                                      const std::vector<TestInput>& inputs,
                                      const Problem& problem, const GoldPair& golds,
                                      std::size_t parallelism, int round) {
  const auto limits = problem.limits();
  std::optional<toolchain::CompiledArtifact> checker;
  if (problem.checker) checker = engine.prepare_checker(*problem.checker);

  std::vector<std::variant<judge::TestCase, FeedbackRecord>> verdicts(inputs.size());
  judge::parallel_for(inputs.size(), parallelism, [&](std::size_t i) {
    const auto& in = inputs[i];
    std::array<sandbox::ExecutionOutcome, 2> out;
    for (std::size_t g = 0; g < 2; ++g) {
      out[g] = engine.run(golds.artifact[g], in.data, limits);
      if (auto fb = gold_failure(g, out[g])) {
        verdicts[i] = *fb;
        return;
      }
    }
    FeedbackRecord fb;
    fb.stage = FeedbackStage::Validation;
    if (checker) {
      auto c = engine.run_checker(*checker, in.data, out[1].stdout_data, out[0].stdout_data);
      if (c.verdict == judge::CheckerVerdict::Error) {
        fb.category = FeedbackCategory::Other;
        fb.detail = "checker failed while comparing gold outputs: " + c.detail;
        verdicts[i] = fb;
        return;
      }
      if (c.verdict == judge::CheckerVerdict::Reject) fb.category = FeedbackCategory::InconsistentOutput;
    } else if (judge::compare_outputs(out[1].stdout_data, out[0].stdout_data) !=
               judge::Comparison::Equal) {
      fb.category = FeedbackCategory::InconsistentOutput;
    }
    if (fb.category == FeedbackCategory::InconsistentOutput) {
      fb.detail = "gold solutions disagree.\ngold #1 output:\n" + excerpt(out[0].stdout_data) +
                  "\ngold #2 output:\n" + excerpt(out[1].stdout_data);
      verdicts[i] = fb;
      return;
    }
    judge::TestCase tc;
    tc.input = in.data;
    tc.expected_output = std::move(out[0].stdout_data);
    tc.kind = in.kind;
    tc.origin = judge::CaseOrigin::Generated;
    tc.round = round;
    verdicts[i] = std::move(tc);
  });

  ValidationResult result;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    if (auto* tc = std::get_if<judge::TestCase>(&verdicts[i])) {
      result.valid.push_back(std::move(*tc));
    } else {
      result.rejected.push_back({inputs[i], std::get<FeedbackRecord>(std::move(verdicts[i]))});
    }
  }
  return result;
}

json to_json(const SynthesisLogRecord& r) {
  return {{"problem_id", r.problem_id},
          {"kind", judge::case_kind_name(r.kind)},
          {"round", r.round},
          {"category", category_name(r.feedback.category)},
          {"detail", r.feedback.detail}};
}

SynthesisOutcome synthesize_suite(const judge::Judge& engine, const Problem& problem,
                                  LLMClient& llm, const SynthesisConfig& config,
                                  const PromptLibrary& prompts, const SynthesisLogger& log) {
  config.validate();
  problem.validate();
  const GoldPair golds = select_gold_pair(engine, problem);
  const Solution& prompt_gold = problem.gold_solutions[golds.index[0]];

  std::set<std::string> seen;  // inputs already tried anywhere in this suite
  std::vector<FeedbackRecord> history_all;

  auto run_kind = [&](CaseKind kind, KindSummary& summary) {
    std::vector<judge::TestCase> cases;
    std::vector<FeedbackRecord> history;
    std::optional<GeneratorProgram> previous;
    const std::size_t quota = config.quota(kind);

    auto record = [&](int round, FeedbackRecord fb) {
      if (log) log({problem.id, kind, round, fb});
      history.push_back(std::move(fb));
    };

    for (int round = 1; round <= config.max_rounds; ++round) {
      std::string prompt;
      if (previous && !history.empty()) {
        RepairContext ctx{&*previous, &history.back()};
        prompt = build_generator_prompt(prompts, problem, prompt_gold, kind, &ctx);
      } else {
        prompt = build_generator_prompt(prompts, problem, prompt_gold, kind);
      }
      const std::string response = llm.complete(prompt);
      ++summary.llm_requests;
      summary.rounds_used = round;

      GeneratorProgram gen;
      gen.kind = kind;
      gen.source = extract_code_block(response).value_or(response);
      gen.round = round;
      gen.feedback_history = history;

      auto produced = run_generator(engine, gen, config);
      if (auto* fb = std::get_if<FeedbackRecord>(&produced)) {
        record(round, *fb);
        summary.generators.push_back(gen);
        previous = std::move(gen);
        continue;
      }

      std::vector<TestInput> fresh;
      for (auto& in : std::get<std::vector<TestInput>>(produced)) {
        if (fresh.size() + cases.size() == quota) break;
        if (seen.insert(in.data).second) fresh.push_back(std::move(in));
      }
      if (fresh.empty()) {
        record(round, {FeedbackCategory::Other, "generator produced no new inputs",
                       FeedbackStage::Generation});
        summary.generators.push_back(gen);
        previous = std::move(gen);
        continue;
      }

      auto validated = consistency_validate(engine, fresh, problem, golds, config.parallelism, round);
      for (auto& tc : validated.valid) cases.push_back(std::move(tc));
      const bool clean = validated.rejected.empty();
      if (!clean) record(round, summarize_rejections(validated.rejected, fresh.size()));
      summary.generators.push_back(gen);
      if (clean || cases.size() >= quota) break;
      previous = std::move(gen);
    }
    summary.failed = cases.empty();
    history_all.insert(history_all.end(), history.begin(), history.end());
    return cases;
  };

  KindSummary regular, corner;
  auto regular_cases = run_kind(CaseKind::Regular, regular);
  auto corner_cases = run_kind(CaseKind::Corner, corner);

  if (regular_cases.empty() && corner_cases.empty()) {
    return SynthesisFailed{problem.id, std::move(regular), std::move(corner), std::move(history_all)};
  }

  SynthesisResult result;
  auto& suite = result.suite;
  suite.problem_id = problem.id;
  suite.limits = problem.limits();
  suite.checker = problem.checker;
  suite.cases = std::move(regular_cases);
  suite.cases.insert(suite.cases.end(), std::make_move_iterator(corner_cases.begin()),
                     std::make_move_iterator(corner_cases.end()));
  suite.metadata = {{"rounds_used", {{"regular", regular.rounds_used}, {"corner", corner.rounds_used}}},
                    {"regular_failed", regular.failed},
                    {"corner_failed", corner.failed},
                    {"gold_pair", {golds.index[0], golds.index[1]}}};
  result.regular = std::move(regular);
  result.corner = std::move(corner);
  return result;
}

}  // namespace testforge::testgen
