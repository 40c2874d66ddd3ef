#include "testforge/interface/service.hpp"

#include <httplib.h>

#include <chrono>
#include <cstdlib>
#include <mutex>

#include "testforge/errors.hpp"
#include "testforge/json_util.hpp"

namespace testforge::interface {

namespace fs = std::filesystem;
using nlohmann::json;

SuiteStore::SuiteStore(fs::path directory) : directory_(std::move(directory)) { reload(); }

void SuiteStore::reload() {
  if (!fs::is_directory(directory_)) {
    throw InputError("suite directory not found: " + directory_.string());
  }
  decltype(suites_) fresh;
  for (const auto& entry : fs::directory_iterator(directory_)) {
    const auto ext = entry.path().extension();
    if (!entry.is_regular_file() || (ext != ".json" && ext != ".jsonl")) continue;
    auto suite = std::make_shared<const judge::TestSuite>(judge::load_suite(entry.path().string()));
    const auto id = suite->problem_id;
    if (!fresh.emplace(id, std::move(suite)).second) {
      throw InputError("problem " + id + " appears in more than one suite file");
    }
  }
  std::unique_lock lk(mutex_);
  suites_ = std::move(fresh);
}

std::shared_ptr<const judge::TestSuite> SuiteStore::find(const std::string& problem_id) const {
  std::shared_lock lk(mutex_);
  auto it = suites_.find(problem_id);
  return it == suites_.end() ? nullptr : it->second;
}

std::size_t SuiteStore::size() const {
  std::shared_lock lk(mutex_);
  return suites_.size();
}

RewardRequest parse_reward_request(const json& body) {
  if (!body.is_object()) throw InputError("request body must be a JSON object");
  auto text = [&](const char* key) {
    auto it = body.find(key);
    if (it == body.end() || !it->is_string()) {
      throw InputError(std::string("field '") + key + "' must be a string");
    }
    return it->get<std::string>();
  };
  auto flag = [&](const char* key, bool fallback) {
    auto it = body.find(key);
    if (it == body.end()) return fallback;
    if (!it->is_boolean()) throw InputError(std::string("field '") + key + "' must be a boolean");
    return it->get<bool>();
  };
  RewardRequest r;
  r.problem_id = text("problem_id");
  r.source = text("source");
  r.language = text("language");
  r.early_stop = flag("early_stop", false);
  r.per_case = flag("per_case", true);
  r.include_usage = flag("include_usage", false);
  return r;
}

json judge_to_json(const judge::Judge& engine, const judge::TestSuite& suite,
                   const RewardRequest& request, std::size_t case_parallelism) {
  judge::SuiteOptions options;
  options.parallelism = case_parallelism;
  options.early_stop = request.early_stop;
  auto report = engine.judge_suite(request.source, request.language, suite, options);
  auto doc = judge::report_to_json(report, request.include_usage);
  if (!request.per_case) doc.erase("per_case");
  return doc;
}

std::size_t workers_from_env(std::size_t fallback) {
  const char* env = std::getenv("TESTFORGE_WORKERS");
  if (!env || !*env) return fallback;
  char* end = nullptr;
  const long n = std::strtol(env, &end, 10);
  if (*end != '\0' || n <= 0) throw InputError("TESTFORGE_WORKERS must be a positive integer");
  return static_cast<std::size_t>(n);
}

RewardService::RewardService(ServiceConfig config, std::shared_ptr<const judge::Judge> engine,
                             std::shared_ptr<SuiteStore> store)
    : config_(std::move(config)), engine_(std::move(engine)), store_(std::move(store)) {
  if (config_.workers == 0) throw InputError("service needs at least one worker");
  if (!engine_ || !store_) throw InputError("service needs a judge and a suite store");
}

RewardService::~RewardService() {
  stop();
  if (thread_.joinable()) thread_.join();
}

std::pair<int, json> RewardService::handle_judge(const std::string& body) const {
  const auto started = std::chrono::steady_clock::now();
  RewardRequest request;
  try {
    request = parse_reward_request(json::parse(body));
  } catch (const json::exception& e) {
    return {400, {{"error", std::string("malformed JSON: ") + e.what()}}};
  } catch (const InputError& e) {
    return {400, {{"error", e.what()}}};
  }
  auto suite = store_->find(request.problem_id);
  if (!suite) return {404, {{"error", "unknown problem: " + request.problem_id}}};
  json doc;
  try {
    doc = judge_to_json(*engine_, *suite, request, config_.case_parallelism);
  } catch (const InputError& e) {
    return {400, {{"error", e.what()}}};
  } catch (const std::exception& e) {
    return {500, {{"error", e.what()}}};
  }
  doc["latency_ms"] = std::chrono::duration<double, std::milli>(
                          std::chrono::steady_clock::now() - started)
                          .count();
  return {200, std::move(doc)};
}

json RewardService::health() const {
  return {{"status", "ok"},
          {"problems", store_->size()},
          {"languages", engine_->registry().names()},
          {"workers", config_.workers}};
}

int RewardService::start() {
  if (server_) throw InputError("service already started");
  server_ = std::make_unique<httplib::Server>();
  const auto workers = config_.workers;
  server_->new_task_queue = [workers] { return new httplib::ThreadPool(workers); };
  server_->Post("/v1/judge", [this](const httplib::Request& req, httplib::Response& res) {
    auto [status, doc] = handle_judge(req.body);
    res.status = status;
    res.set_content(dump_json(doc), "application/json");
  });
  server_->Get("/v1/health", [this](const httplib::Request&, httplib::Response& res) {
    res.set_content(dump_json(health()), "application/json");
  });

  int port = config_.port;
  if (port == 0) {
    port = server_->bind_to_any_port(config_.host);
  } else if (!server_->bind_to_port(config_.host, port)) {
    port = -1;
  }
  if (port < 0) {
    server_.reset();
    throw InfrastructureError("cannot bind " + config_.host + ":" + std::to_string(config_.port));
  }
  thread_ = std::thread([this] { server_->listen_after_bind(); });
  server_->wait_until_ready();
  return port;
}

void RewardService::wait() {
  if (thread_.joinable()) thread_.join();
}

void RewardService::stop() {
  if (server_) server_->stop();
}

}  // namespace testforge::interface
