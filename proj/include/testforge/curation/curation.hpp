#pragma once

#include <nlohmann/json.hpp>

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "testforge/judge/judge.hpp"
#include "testforge/testgen/problem.hpp"

namespace testforge::curation {

using testgen::Problem;

/// A problem as ingested from a corpus. Every Problem field may be missing
/// in the source record; `io_kind` is "stdin" unless the record says
/// otherwise (an "io" field, or an "fn_name" naming a function to call).
struct RawProblem {
  Problem problem;
  std::string source_tag;
  std::string io_kind = "stdin";
};

void to_json(nlohmann::json& j, const RawProblem& r);
void from_json(const nlohmann::json& j, RawProblem& r);

/// One record per non-blank line. Throws InputError on malformed lines or a
/// repeated id.
std::vector<RawProblem> load_corpus(const std::string& path);
void save_corpus(const std::string& path, const std::vector<RawProblem>& problems);

enum class DropReason {
  Duplicate,
  NonStdin,
  TooFewGolds,
  NoPublicTests,
  GoldFailed,
  Hackable,
};

inline constexpr std::array kDropReasons{DropReason::Duplicate,     DropReason::NonStdin,
                                         DropReason::TooFewGolds,   DropReason::NoPublicTests,
                                         DropReason::GoldFailed,    DropReason::Hackable};

std::string_view reason_name(DropReason r);

// Text ----------------------------------------------------------------------

/// Drops HTML tags, decodes the common entities, lowercases, blanks out
/// markup characters ($ * _ ` # ~ \ { }) and collapses whitespace.
std::string normalize_text(std::string_view text);

/// Word n-grams of the normalized text, each joined by single spaces. Text
/// shorter than `n` words yields one gram holding all of it.
std::vector<std::string> word_ngrams(std::string_view text, std::size_t n);

double jaccard(const std::vector<std::string>& a, const std::vector<std::string>& b);

// Filters ------------------------------------------------------------------

struct Duplicate {
  std::size_t index;  // the dropped problem
  std::size_t of;     // the earlier kept problem it is most similar to
  double similarity;
};

struct DedupResult {
  std::vector<std::size_t> kept;  // indices into the input, in order
  std::vector<Duplicate> dropped;
};

/// Greedy scan over statements: a problem whose n-gram Jaccard similarity
/// with any kept problem reaches `threshold` is dropped; the first
/// occurrence wins. Throws InputError unless n >= 1 and threshold is in
/// (0, 1].
DedupResult dedup_ngram(const std::vector<RawProblem>& problems, std::size_t n = 8,
                        double threshold = 0.85);

/// NonStdin or TooFewGolds, or nullopt to keep.
std::optional<DropReason> filter_eligible(const RawProblem& problem);

/// Judges every gold against the public tests and keeps those passing all
/// of them. NoPublicTests when there is nothing to verify with, GoldFailed
/// when fewer than two golds survive.
std::variant<RawProblem, DropReason> verify_gold_solutions(const judge::Judge& engine,
                                                           const RawProblem& problem);

/// True when the problem has exactly one public test and that test's input
/// appears, after normalization and on word boundaries, in the statement,
/// formats and examples.
bool is_hackable(const Problem& problem);

// Pipeline -----------------------------------------------------------------

struct CurationReport {
  std::size_t input = 0;
  std::size_t kept = 0;
  std::map<DropReason, std::size_t> dropped;

  std::size_t total_dropped() const;
};

nlohmann::json to_json(const CurationReport& r);

struct Decision {
  std::string id;
  std::optional<DropReason> reason;  // nullopt: kept
};

struct CurationOptions {
  std::size_t ngram = 8;
  double threshold = 0.85;
  std::size_t parallelism = 4;  // problems verified concurrently
};

struct CurationResult {
  std::vector<RawProblem> problems;
  CurationReport report;
  std::vector<Decision> decisions;  // one per input problem, input order
};

/// Dedup, eligibility, gold verification, anti-hack, in that order.
CurationResult curate(const judge::Judge& engine, const std::vector<RawProblem>& corpus,
                      const CurationOptions& options = {});

}  // namespace testforge::curation
