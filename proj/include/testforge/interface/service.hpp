#pragma once

#include <nlohmann/json.hpp>

#include <filesystem>
#include <map>
#include <memory>
#include <shared_mutex>
#include <string>
#include <thread>
#include <utility>

#include "testforge/judge/judge.hpp"

namespace httplib {
class Server;
}

namespace testforge::interface {

/// Suites loaded from a directory (`*.json`, `*.jsonl`), keyed by problem id.
/// Lookups are safe from any thread; reload() swaps the whole set.
class SuiteStore {
 public:
  explicit SuiteStore(std::filesystem::path directory);

  /// Throws InputError on unreadable files or a repeated problem id; the
  /// previous set stays in place.
  void reload();

  /// nullptr for an unknown id.
  std::shared_ptr<const judge::TestSuite> find(const std::string& problem_id) const;
  std::size_t size() const;
  const std::filesystem::path& directory() const { return directory_; }

 private:
  std::filesystem::path directory_;
  mutable std::shared_mutex mutex_;
  std::map<std::string, std::shared_ptr<const judge::TestSuite>> suites_;
};

struct RewardRequest {
  std::string problem_id;
  std::string source;
  std::string language;
  bool early_stop = false;
  bool per_case = true;        // include per-case verdicts
  bool include_usage = false;  // include per-case resource usage
};

/// Throws InputError on a malformed body (not an object, missing or
/// mistyped fields).
RewardRequest parse_reward_request(const nlohmann::json& body);

/// The single judging path behind both the CLI `judge` command and the
/// service: compile once, judge the suite, render the report.
nlohmann::json judge_to_json(const judge::Judge& engine, const judge::TestSuite& suite,
                             const RewardRequest& request, std::size_t case_parallelism = 1);

struct ServiceConfig {
  std::string host = "127.0.0.1";
  int port = 8700;  // 0 picks a free port
  std::size_t workers = 16;
  std::size_t case_parallelism = 1;
};

/// Worker count from $TESTFORGE_WORKERS, else `fallback`.
std::size_t workers_from_env(std::size_t fallback);

/// HTTP reward endpoint: POST /v1/judge, GET /v1/health.
class RewardService {
 public:
  RewardService(ServiceConfig config, std::shared_ptr<const judge::Judge> engine,
                std::shared_ptr<SuiteStore> store);
  ~RewardService();
  RewardService(const RewardService&) = delete;
  RewardService& operator=(const RewardService&) = delete;

  /// Binds and serves on a background thread; returns the bound port.
  /// Throws InfrastructureError when the address cannot be bound.
  int start();
  /// Blocks until stop() is called from elsewhere.
  void wait();
  void stop();

  /// Handles one /v1/judge body; returns (HTTP status, response document).
  std::pair<int, nlohmann::json> handle_judge(const std::string& body) const;
  nlohmann::json health() const;

 private:
  ServiceConfig config_;
  std::shared_ptr<const judge::Judge> engine_;
  std::shared_ptr<SuiteStore> store_;
  std::unique_ptr<httplib::Server> server_;
  std::thread thread_;
};

}  // namespace testforge::interface
