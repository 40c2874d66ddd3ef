#include "testforge/interface/cli.hpp"

#include <CLI11.hpp>
#include <pthread.h>
#include <signal.h>

#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>

#include "testforge/curation/curation.hpp"
#include "testforge/errors.hpp"
#include "testforge/evalmetrics/evalmetrics.hpp"
#include "testforge/interface/service.hpp"
#include "testforge/json_util.hpp"
#include "testforge/sandbox/json.hpp"
#include "testforge/spjgen/spjgen.hpp"
#include "testforge/testgen/synthesis.hpp"

namespace testforge::interface {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kOk = 0;
constexpr int kFailed = 1;
constexpr int kUsage = 2;

struct Common {
  std::string profiles = toolchain::default_profile_dir().string();
  std::string sandbox_root;
  std::size_t workers = 0;

  std::shared_ptr<toolchain::ProfileRegistry> registry;
  std::shared_ptr<judge::Judge> engine;

  void open() {
    registry = std::make_shared<toolchain::ProfileRegistry>(profiles);
    judge::JudgeConfig cfg;
    cfg.sandbox_root = sandbox_root.empty() ? sandbox::default_sandbox_root() : fs::path(sandbox_root);
    cfg.max_concurrent_executions = workers;
    engine = std::make_shared<judge::Judge>(registry, cfg);
  }
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path.string());
  out << text;
}

void print(const json& doc) { std::cout << dump_json(doc, 2) << '\n'; }

// run -------------------------------------------------------------------------

struct RunArgs {
  std::string language, source, stdin_path;
  std::int64_t cpu_ms = 2000, wall_ms = 10000, mem_mb = 512;
  bool audit = false;
};

int cmd_run(Common& c, const RunArgs& a) {
  auto compiled = c.engine->compile(read_file(a.source), a.language);
  if (auto* f = std::get_if<toolchain::CompileFailure>(&compiled)) {
    print({{"compile_error", f->log}});
    return kFailed;
  }
  const auto& artifact = std::get<toolchain::CompiledArtifact>(compiled);
  sandbox::ExecutionLimits limits;
  limits.cpu_time_ms = a.cpu_ms;
  limits.wall_time_ms = a.wall_ms;
  limits.memory_bytes = a.mem_mb * sandbox::kMiB;
  limits.validate();
  const std::string input = a.stdin_path.empty() ? std::string() : read_file(a.stdin_path);

  if (a.audit) {
    auto wd = sandbox::Workdir::create(c.engine->config().sandbox_root);
    auto policy = artifact.policy;
    policy.writable_workdir = wd.path();
    sandbox::SyscallAudit audit;
    sandbox::ExecuteOptions options;
    options.env = artifact.env;
    options.audit = &audit;
    auto outcome = sandbox::execute(artifact.run_argv, input, limits, policy, wd.path(), options);
    json termination;
    sandbox::to_json(termination, outcome.termination);
    print({{"termination", termination}, {"syscalls", audit.observed}});
    return kOk;
  }
  auto outcome = c.engine->run(artifact, input, limits);
  print(json(outcome));
  auto* exited = std::get_if<sandbox::termination::Exited>(&outcome.termination);
  return exited && exited->code == 0 ? kOk : kFailed;
}

// judge -----------------------------------------------------------------------

struct JudgeArgs {
  std::string problem, suite, solution, language;
  bool early_stop = false, usage = false, no_per_case = false;
  std::size_t parallelism = 1;
};

int cmd_judge(Common& c, const JudgeArgs& a) {
  auto suite = judge::load_suite(a.suite);
  if (!a.problem.empty()) {
    auto problem = json::parse(read_file(a.problem)).get<testgen::Problem>();
    if (!suite.checker && problem.checker) suite.checker = problem.checker;
  }
  RewardRequest request;
  request.problem_id = suite.problem_id;
  request.source = read_file(a.solution);
  request.language = a.language;
  request.early_stop = a.early_stop;
  request.include_usage = a.usage;
  request.per_case = !a.no_per_case;
  auto doc = judge_to_json(*c.engine, suite, request, a.parallelism);
  print(doc);
  return doc["aggregate"] == "Accepted" ? kOk : kFailed;
}

// synthesize ------------------------------------------------------------------

struct SynthArgs {
  std::string problems, llm, out, log;
  testgen::SynthesisConfig config;
};

int cmd_synthesize(Common& c, const SynthArgs& a) {
  a.config.validate();
  auto problems = testgen::load_problems(a.problems);
  auto llm = testgen::make_llm_client(a.llm);
  fs::create_directories(a.out);
  const fs::path log_path = a.log.empty() ? fs::path(a.out) / "synthesis_log.jsonl" : fs::path(a.log);
  std::ofstream log(log_path);
  std::mutex log_mutex;
  auto logger = [&](const testgen::SynthesisLogRecord& r) {
    std::lock_guard lk(log_mutex);
    log << dump_json(testgen::to_json(r)) << '\n';
    log.flush();
  };

  json summary = json::array();
  bool all_ok = true;
  for (const auto& problem : problems) {
    json row = {{"problem_id", problem.id}};
    try {
      problem.validate();
      auto outcome = testgen::synthesize_suite(*c.engine, problem, *llm, a.config,
                                               testgen::default_prompts(), logger);
      if (auto* ok = std::get_if<testgen::SynthesisResult>(&outcome)) {
        const auto path = fs::path(a.out) / (problem.id + ".json");
        judge::save_suite(path.string(), ok->suite);
        row["status"] = "ok";
        row["cases"] = ok->suite.cases.size();
        row["suite"] = path.string();
        row["metadata"] = ok->suite.metadata;
      } else {
        const auto& failed = std::get<testgen::SynthesisFailed>(outcome);
        row["status"] = "failed";
        row["llm_requests"] = failed.regular.llm_requests + failed.corner.llm_requests;
        all_ok = false;
      }
    } catch (const PipelineError& e) {
      row["status"] = "error";
      row["error"] = e.what();
      all_ok = false;
    } catch (const InputError& e) {
      row["status"] = "error";
      row["error"] = e.what();
      all_ok = false;
    }
    summary.push_back(std::move(row));
  }
  print({{"problems", summary}, {"log", log_path.string()}});
  return all_ok ? kOk : kFailed;
}

// spj -------------------------------------------------------------------------

struct SpjArgs {
  std::string problems, suites, llm, out;
  std::size_t parallelism = 4;
};

json checker_summary(const std::optional<judge::CheckerProgram>& c) {
  if (!c) return nullptr;
  json j = *c;
  j.erase("source");
  return j;
}

int cmd_spj(Common& c, const SpjArgs& a) {
  auto problems = testgen::load_problems(a.problems);
  auto llm = testgen::make_llm_client(a.llm);
  if (!a.out.empty()) fs::create_directories(a.out);
  json summary = json::array();
  bool all_ok = true;
  for (const auto& problem : problems) {
    json row = {{"problem_id", problem.id}};
    try {
      judge::TestSuite suite;
      suite.problem_id = problem.id;
      suite.limits = problem.limits();
      const fs::path suite_path = fs::path(a.suites) / (problem.id + ".json");
      if (!a.suites.empty() && fs::exists(suite_path)) suite = judge::load_suite(suite_path.string());
      auto outcome =
          spjgen::build_special_judge(*c.engine, problem, suite, *llm, testgen::default_prompts(),
                                      a.parallelism);
      row["needed"] = outcome.decision.needed;
      row["reason"] = outcome.decision.reason;
      row["generated"] = checker_summary(outcome.generated);
      row["reviewed"] = checker_summary(outcome.reviewed);
      if (outcome.reviewed && !a.out.empty()) {
        suite.checker = outcome.reviewed;
        suite.metadata["checker_stage"] = "repaired";
        if (outcome.reviewed->validation_pass_rate) {
          suite.metadata["checker_pass_rate"] = *outcome.reviewed->validation_pass_rate;
        }
        const auto path = fs::path(a.out) / (problem.id + ".json");
        judge::save_suite(path.string(), suite);
        row["suite"] = path.string();
      }
    } catch (const PipelineError& e) {
      row["error"] = e.what();
      row["raw"] = e.raw();
      all_ok = false;
    }
    summary.push_back(std::move(row));
  }
  print(summary);
  return all_ok ? kOk : kFailed;
}

// curate ----------------------------------------------------------------------

struct CurateArgs {
  std::vector<std::string> inputs;
  std::string out, report;
  curation::CurationOptions options;
};

int cmd_curate(Common& c, const CurateArgs& a) {
  std::vector<curation::RawProblem> corpus;
  for (const auto& path : a.inputs) {
    auto part = curation::load_corpus(path);
    corpus.insert(corpus.end(), std::make_move_iterator(part.begin()),
                  std::make_move_iterator(part.end()));
  }
  auto result = curation::curate(*c.engine, corpus, a.options);
  curation::save_corpus(a.out, result.problems);
  json decisions = json::array();
  for (const auto& d : result.decisions) {
    decisions.push_back({{"id", d.id},
                         {"decision", d.reason ? std::string(curation::reason_name(*d.reason))
                                               : std::string("kept")}});
  }
  json doc = curation::to_json(result.report);
  doc["decisions"] = std::move(decisions);
  if (a.report.empty()) {
    print(doc);
  } else {
    write_file(a.report, dump_json(doc, 2) + "\n");
    print(curation::to_json(result.report));
  }
  return kOk;
}

// eval ------------------------------------------------------------------------

struct EvalArgs {
  std::string manifest;
  bool table = false, micro = false;
  std::size_t parallelism = 4;
};

// Manifest lines: {"candidates": "solutions.jsonl", "labeling": "suite.json",
// "suites": {"<dataset>": "suite.json", ...}}; relative paths resolve
// against the manifest's directory.
int cmd_eval(Common& c, const EvalArgs& a) {
  const fs::path base = fs::path(a.manifest).parent_path();
  auto resolve = [&](const std::string& p) { return (base / p).string(); };
  evalmetrics::EngineSolutionJudge sj(*c.engine, false, a.parallelism);
  std::map<std::string, evalmetrics::QualityReport> datasets;
  std::size_t excluded = 0, n_correct = 0, n_incorrect = 0;

  std::istringstream lines(read_file(a.manifest));
  for (std::string line; std::getline(lines, line);) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    auto entry = json::parse(line);
    std::vector<testgen::Solution> candidates;
    std::istringstream sols(read_file(resolve(entry.at("candidates"))));
    for (std::string s; std::getline(sols, s);) {
      if (s.find_first_not_of(" \t\r") != std::string::npos) {
        candidates.push_back(json::parse(s).get<testgen::Solution>());
      }
    }
    auto labeling = evalmetrics::label_solutions(
        candidates, judge::load_suite(resolve(entry.at("labeling"))), sj, a.parallelism);
    excluded += labeling.excluded.size();
    for (const auto& l : labeling.labeled) (l.correct ? n_correct : n_incorrect)++;
    if (labeling.labeled.empty()) continue;
    for (const auto& [name, path] : entry.at("suites").items()) {
      auto q = evalmetrics::compute_quality(labeling.labeled,
                                            judge::load_suite(resolve(path.get<std::string>())),
                                            sj, a.parallelism);
      evalmetrics::merge(datasets[name], q);
    }
  }

  if (a.table) {
    std::vector<std::pair<std::string, evalmetrics::QualityReport>> rows(datasets.begin(),
                                                                         datasets.end());
    std::cout << evalmetrics::render_quality_table(rows, !a.micro);
    return kOk;
  }
  json doc = {{"excluded", excluded}, {"n_correct", n_correct}, {"n_incorrect", n_incorrect}};
  for (const auto& [name, q] : datasets) doc["datasets"][name] = evalmetrics::to_json(q);
  print(doc);
  return kOk;
}

// serve -----------------------------------------------------------------------

struct ServeArgs {
  std::string suites;
  ServiceConfig config;
};

int cmd_serve(Common& c, const ServeArgs& a) {
  // Signals are taken synchronously by one thread; every other thread,
  // including the server's, starts with them blocked.
  sigset_t set;
  sigemptyset(&set);
  sigaddset(&set, SIGHUP);
  sigaddset(&set, SIGINT);
  sigaddset(&set, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &set, nullptr);

  auto store = std::make_shared<SuiteStore>(a.suites);
  RewardService service(a.config, c.engine, store);
  const int port = service.start();
  std::cerr << "serving " << store->size() << " problems on " << a.config.host << ":" << port
            << " with " << a.config.workers << " workers\n";

  for (;;) {
    int sig = 0;
    if (sigwait(&set, &sig) != 0) continue;
    if (sig != SIGHUP) break;
    try {
      c.registry->reload();
      store->reload();
      std::cerr << "reloaded " << store->size() << " problems\n";
    } catch (const std::exception& e) {
      std::cerr << "reload failed, keeping the previous state: " << e.what() << '\n';
    }
  }
  service.stop();
  service.wait();
  return kOk;
}

}  // namespace

int cli_main(int argc, char** argv) {
  CLI::App app{"Sandboxed judging, test synthesis and test-suite evaluation"};
  app.require_subcommand(1);
  Common common;
  app.add_option("--profiles", common.profiles, "Guest language profile directory")
      ->capture_default_str();
  app.add_option("--sandbox-root", common.sandbox_root,
                 "Directory for per-run workdirs (default $TESTFORGE_SANDBOX_ROOT or a temp dir)");
  common.workers = workers_from_env(64);
  auto* workers_opt = app.add_option("--workers", common.workers,
                 "Concurrent sandbox executions (default $TESTFORGE_WORKERS or 64)")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);

  RunArgs run;
  auto* run_cmd = app.add_subcommand("run", "Compile and run one program in the sandbox");
  run_cmd->add_option("--lang", run.language, "Guest language profile")->required();
  run_cmd->add_option("--source", run.source, "Program source file")->required()->check(CLI::ExistingFile);
  run_cmd->add_option("--stdin", run.stdin_path, "File fed to standard input")->check(CLI::ExistingFile);
  run_cmd->add_option("--cpu-ms", run.cpu_ms, "CPU time limit")->capture_default_str();
  run_cmd->add_option("--wall-ms", run.wall_ms, "Wall time limit")->capture_default_str();
  run_cmd->add_option("--mem-mb", run.mem_mb, "Memory limit in MiB")->capture_default_str();
  run_cmd->add_flag("--audit", run.audit, "Record syscalls instead of enforcing the whitelist");

  JudgeArgs jud;
  auto* judge_cmd = app.add_subcommand("judge", "Judge a solution against a test suite");
  judge_cmd->add_option("--problem", jud.problem, "Problem JSON (supplies a checker the suite lacks)")
      ->check(CLI::ExistingFile);
  judge_cmd->add_option("--suite", jud.suite, "Suite file")->required()->check(CLI::ExistingFile);
  judge_cmd->add_option("--solution", jud.solution, "Solution source")->required()->check(CLI::ExistingFile);
  judge_cmd->add_option("--lang", jud.language, "Solution language")->required();
  judge_cmd->add_flag("--early-stop", jud.early_stop, "Stop at the first failing case");
  judge_cmd->add_flag("--usage", jud.usage, "Include per-case resource usage");
  judge_cmd->add_flag("--no-per-case", jud.no_per_case, "Omit per-case verdicts");
  judge_cmd->add_option("--parallelism", jud.parallelism, "Cases judged concurrently")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);

  SynthArgs syn;
  auto* syn_cmd = app.add_subcommand("synthesize", "Generate and validate test suites");
  syn_cmd->add_option("--problems", syn.problems, "Problem JSONL")->required()->check(CLI::ExistingFile);
  syn_cmd->add_option("--llm", syn.llm, "LLM client: mock:<script.jsonl> or http://host:port/path")
      ->required();
  syn_cmd->add_option("--out", syn.out, "Output directory for suites")->required();
  syn_cmd->add_option("--log", syn.log, "Synthesis log (default <out>/synthesis_log.jsonl)");
  syn_cmd->add_option("--regular", syn.config.regular_count, "Regular input quota")->capture_default_str();
  syn_cmd->add_option("--corner", syn.config.corner_count, "Corner input quota")->capture_default_str();
  syn_cmd->add_option("--rounds", syn.config.max_rounds, "LLM requests per case kind")->capture_default_str();
  syn_cmd->add_option("--parallelism", syn.config.parallelism, "Concurrent gold runs")->capture_default_str();

  SpjArgs spj;
  auto* spj_cmd = app.add_subcommand("spj", "Generate, review and validate special judges");
  spj_cmd->add_option("--problems", spj.problems, "Problem JSONL")->required()->check(CLI::ExistingFile);
  spj_cmd->add_option("--suites", spj.suites, "Directory of <problem_id>.json validation suites");
  spj_cmd->add_option("--llm", spj.llm, "LLM client URI")->required();
  spj_cmd->add_option("--out", spj.out, "Directory for suites with the reviewed checker attached");
  spj_cmd->add_option("--parallelism", spj.parallelism, "Concurrent validation runs")->capture_default_str();

  CurateArgs cur;
  auto* cur_cmd = app.add_subcommand("curate", "Deduplicate and filter raw problem corpora");
  cur_cmd->add_option("--in", cur.inputs, "Corpus JSONL (repeatable)")->required()->check(CLI::ExistingFile);
  cur_cmd->add_option("--out", cur.out, "Curated problem JSONL")->required();
  cur_cmd->add_option("--report", cur.report, "Report JSON file (default: stdout)");
  cur_cmd->add_option("--ngram", cur.options.ngram, "Word n-gram size for dedup")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  cur_cmd->add_option("--threshold", cur.options.threshold, "Jaccard similarity marking a duplicate")
      ->capture_default_str()
      ->check(CLI::Range(0.0, 1.0));
  cur_cmd->add_option("--parallelism", cur.options.parallelism, "Problems verified concurrently")
      ->capture_default_str();

  EvalArgs ev;
  auto* eval_cmd = app.add_subcommand("eval", "TPR/TNR of test suites against labeled solutions");
  eval_cmd->add_option("--manifest", ev.manifest, "Evaluation manifest JSONL")->required()->check(CLI::ExistingFile);
  eval_cmd->add_flag("--table", ev.table, "Print a text table instead of JSON");
  eval_cmd->add_flag("--micro", ev.micro, "Table cells pool all solutions (default: origin mean)");
  eval_cmd->add_option("--parallelism", ev.parallelism, "Concurrent judgings")->capture_default_str();

  ServeArgs srv;
  srv.config.workers = workers_from_env(srv.config.workers);
  auto* serve_cmd = app.add_subcommand("serve", "Run the reward service");
  serve_cmd->add_option("--suites", srv.suites, "Suite directory")->required()->check(CLI::ExistingDirectory);
  serve_cmd->add_option("--host", srv.config.host, "Listen address")->capture_default_str();
  serve_cmd->add_option("--port", srv.config.port, "Listen port (0 picks one)")->capture_default_str();
  serve_cmd->add_option("--case-parallelism", srv.config.case_parallelism,
                        "Cases judged concurrently per request")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kUsage;
  }

  try {
    if (workers_opt->count() > 0) srv.config.workers = common.workers;
    common.open();
    if (*run_cmd) return cmd_run(common, run);
    if (*judge_cmd) return cmd_judge(common, jud);
    if (*syn_cmd) return cmd_synthesize(common, syn);
    if (*spj_cmd) return cmd_spj(common, spj);
    if (*cur_cmd) return cmd_curate(common, cur);
    if (*eval_cmd) return cmd_eval(common, ev);
    if (*serve_cmd) return cmd_serve(common, srv);
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const json::exception& e) {
    std::cerr << "error: malformed input: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFailed;
  }
  return kUsage;
}

}  // namespace testforge::interface
