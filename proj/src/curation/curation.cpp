#include "testforge/curation/curation.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "testforge/errors.hpp"
#include "testforge/json_util.hpp"

namespace testforge::curation {

using nlohmann::json;

std::string_view reason_name(DropReason r) {
  switch (r) {
    case DropReason::Duplicate: return "duplicate";
    case DropReason::NonStdin: return "non_stdin";
    case DropReason::TooFewGolds: return "too_few_golds";
    case DropReason::NoPublicTests: return "no_public_tests";
    case DropReason::GoldFailed: return "gold_failed";
    case DropReason::Hackable: return "hackable";
  }
  return "unknown";
}

void to_json(json& j, const RawProblem& r) {
  j = r.problem;
  if (!r.source_tag.empty()) j["source_tag"] = r.source_tag;
  if (r.io_kind != "stdin") j["io"] = r.io_kind;
}

void from_json(const json& j, RawProblem& r) {
  if (!j.is_object()) throw InputError("corpus record is not an object");
  r.problem = j.get<Problem>();
  r.source_tag = j.value("source_tag", "");
  if (j.contains("io")) {
    r.io_kind = j["io"].get<std::string>();
  } else if (j.contains("fn_name") && !j["fn_name"].is_null()) {
    r.io_kind = "function";
  }
}

std::vector<RawProblem> load_corpus(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open corpus " + path);
  std::vector<RawProblem> out;
  std::set<std::string> ids;
  std::string line;
  for (std::size_t n = 1; std::getline(in, line); ++n) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(json::parse(line).get<RawProblem>());
    } catch (const json::exception& e) {
      throw InputError(path + ":" + std::to_string(n) + ": " + e.what());
    }
    if (!ids.insert(out.back().problem.id).second) {
      throw InputError(path + ":" + std::to_string(n) + ": repeated id " + out.back().problem.id);
    }
  }
  return out;
}

void save_corpus(const std::string& path, const std::vector<RawProblem>& problems) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path);
  for (const auto& p : problems) out << dump_json(json(p)) << '\n';
}

std::string normalize_text(std::string_view text) {
  std::string stripped;
  stripped.reserve(text.size());
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] == '<') {
      auto close = text.find('>', i);
      if (close != std::string_view::npos) {
        stripped += ' ';
        i = close;
        continue;
      }
    }
    stripped += text[i];
  }
  // &amp; last so "&amp;lt;" stays literal text.
  for (auto [entity, ch] : {std::pair{"&lt;", "<"}, {"&gt;", ">"}, {"&quot;", "\""},
                            {"&nbsp;", " "}, {"&amp;", "&"}}) {
    const std::string_view e = entity;
    for (auto pos = stripped.find(e); pos != std::string::npos; pos = stripped.find(e, pos + 1)) {
      stripped.replace(pos, e.size(), ch);
    }
  }
  std::string out;
  bool pending_space = false;
  for (unsigned char c : stripped) {
    if (std::string_view("$*_`#~\\{}").find(static_cast<char>(c)) != std::string_view::npos ||
        std::isspace(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out += ' ';
    pending_space = false;
    out += static_cast<char>(std::tolower(c));
  }
  return out;
}

std::vector<std::string> word_ngrams(std::string_view text, std::size_t n) {
  const std::string norm = normalize_text(text);
  std::vector<std::string_view> words;
  std::string_view rest = norm;
  while (!rest.empty()) {
    auto sp = rest.find(' ');
    words.push_back(rest.substr(0, sp));
    if (sp == std::string_view::npos) break;
    rest.remove_prefix(sp + 1);
  }
  auto join = [&](std::size_t from, std::size_t count) {
    std::string g;
    for (std::size_t k = 0; k < count; ++k) {
      if (k) g += ' ';
      g += words[from + k];
    }
    return g;
  };
  if (words.size() < n) return {join(0, words.size())};
  std::unordered_set<std::string> seen;
  std::vector<std::string> out;
  for (std::size_t i = 0; i + n <= words.size(); ++i) {
    auto g = join(i, n);
    if (seen.insert(g).second) out.push_back(std::move(g));
  }
  return out;
}

double jaccard(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  std::unordered_set<std::string_view> sa(a.begin(), a.end());
  std::size_t shared = 0;
  std::unordered_set<std::string_view> sb;
  for (const auto& g : b) {
    if (sb.insert(g).second && sa.count(g)) ++shared;
  }
  const std::size_t uni = sa.size() + sb.size() - shared;
  return uni == 0 ? 1.0 : static_cast<double>(shared) / static_cast<double>(uni);
}

DedupResult dedup_ngram(const std::vector<RawProblem>& problems, std::size_t n, double threshold) {
  if (n == 0) throw InputError("n-gram size must be at least 1");
  if (!(threshold > 0.0 && threshold <= 1.0)) throw InputError("threshold must be in (0, 1]");

  DedupResult result;
  // gram -> positions in result.kept whose statement contains it
  std::unordered_map<std::string, std::vector<std::size_t>> index;
  std::vector<std::size_t> kept_sizes;
  for (std::size_t i = 0; i < problems.size(); ++i) {
    const auto grams = word_ngrams(problems[i].problem.statement, n);
    std::unordered_map<std::size_t, std::size_t> shared;
    for (const auto& g : grams) {
      if (auto it = index.find(g); it != index.end()) {
        for (auto k : it->second) ++shared[k];
      }
    }
    std::optional<Duplicate> best;
    for (const auto& [k, common] : shared) {
      const double sim = static_cast<double>(common) /
                         static_cast<double>(grams.size() + kept_sizes[k] - common);
      if (sim < threshold) continue;
      const auto of = result.kept[k];
      if (!best || sim > best->similarity || (sim == best->similarity && of < best->of)) {
        best = Duplicate{i, of, sim};
      }
    }
    if (best) {
      result.dropped.push_back(*best);
      continue;
    }
    const auto slot = result.kept.size();
    result.kept.push_back(i);
    kept_sizes.push_back(grams.size());
    for (const auto& g : grams) index[g].push_back(slot);
  }
  return result;
}

std::optional<DropReason> filter_eligible(const RawProblem& problem) {
  if (problem.io_kind != "stdin") return DropReason::NonStdin;
  if (problem.problem.gold_solutions.size() < 2) return DropReason::TooFewGolds;
  return std::nullopt;
}

std::variant<RawProblem, DropReason> verify_gold_solutions(const judge::Judge& engine,
                                                           const RawProblem& problem) {
  const auto& p = problem.problem;
  if (p.public_tests.empty()) return DropReason::NoPublicTests;
  judge::TestSuite suite;
  suite.problem_id = p.id;
  suite.cases = p.public_tests;
  suite.checker = p.checker;
  suite.limits = p.limits();

  RawProblem out = problem;
  out.problem.gold_solutions.clear();
  for (const auto& gold : p.gold_solutions) {
    auto report = engine.judge_suite(gold.source, gold.language, suite, {});
    if (report.pass_count == report.total) out.problem.gold_solutions.push_back(gold);
  }
  if (out.problem.gold_solutions.size() < 2) return DropReason::GoldFailed;
  return out;
}

bool is_hackable(const Problem& problem) {
  if (problem.public_tests.size() != 1) return false;
  const auto input = normalize_text(problem.public_tests.front().input);
  if (input.empty()) return false;
  const auto text = " " + normalize_text(testgen::problem_text(problem)) + " ";
  return text.find(" " + input + " ") != std::string::npos;
}

std::size_t CurationReport::total_dropped() const {
  std::size_t n = 0;
  for (const auto& [_, c] : dropped) n += c;
  return n;
}

json to_json(const CurationReport& r) {
  json dropped = json::object();
  for (auto reason : kDropReasons) {
    auto it = r.dropped.find(reason);
    dropped[std::string(reason_name(reason))] = it == r.dropped.end() ? 0 : it->second;
  }
  return {{"input", r.input}, {"kept", r.kept}, {"dropped", std::move(dropped)}};
}

CurationResult curate(const judge::Judge& engine, const std::vector<RawProblem>& corpus,
                      const CurationOptions& options) {
  std::vector<std::optional<DropReason>> fate(corpus.size());
  auto dedup = dedup_ngram(corpus, options.ngram, options.threshold);
  for (const auto& d : dedup.dropped) fate[d.index] = DropReason::Duplicate;

  std::vector<std::size_t> eligible;
  for (auto i : dedup.kept) {
    fate[i] = filter_eligible(corpus[i]);
    if (!fate[i]) eligible.push_back(i);
  }

  std::vector<std::optional<RawProblem>> verified(corpus.size());
  judge::parallel_for(eligible.size(), options.parallelism, [&](std::size_t k) {
    const auto i = eligible[k];
    auto r = verify_gold_solutions(engine, corpus[i]);
    if (auto* reason = std::get_if<DropReason>(&r)) {
      fate[i] = *reason;
    } else {
      verified[i] = std::get<RawProblem>(std::move(r));
    }
  });

  CurationResult result;
  result.report.input = corpus.size();
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    if (verified[i] && is_hackable(verified[i]->problem)) fate[i] = DropReason::Hackable;
    result.decisions.push_back({corpus[i].problem.id, fate[i]});
    if (fate[i]) {
      ++result.report.dropped[*fate[i]];
    } else {
      result.problems.push_back(std::move(*verified[i]));
    }
  }
  result.report.kept = result.problems.size();
  return result;
}

}  // namespace testforge::curation
