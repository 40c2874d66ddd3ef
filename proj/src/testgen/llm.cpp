#include "testforge/testgen/llm.hpp"

#include <httplib.h>

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <thread>

#include "testforge/errors.hpp"
#include "testforge/json_util.hpp"

namespace testforge::testgen {

using nlohmann::json;

MockLLM::MockLLM(std::vector<Entry> entries) : entries_(std::move(entries)) {}

std::unique_ptr<MockLLM> MockLLM::from_jsonl(std::string_view text) {
  std::vector<Entry> entries;
  std::istringstream lines{std::string(text)};
  std::string line;
  for (int n = 1; std::getline(lines, line); ++n) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      auto j = json::parse(line);
      Entry e;
      const auto& m = j.at("match");
      if (m.is_string()) {
        e.match.push_back(m.get<std::string>());
      } else {
        e.match = m.get<std::vector<std::string>>();
      }
      e.response = j.at("response").get<std::string>();
      const auto repeat = j.value("repeat", 1);
      if (repeat < 0) throw InputError("negative repeat");
      e.unlimited = repeat == 0;
      e.remaining = static_cast<std::size_t>(repeat);
      entries.push_back(std::move(e));
    } catch (const std::exception& e) {
      throw InputError("mock script line " + std::to_string(n) + ": " + e.what());
    }
  }
  return std::make_unique<MockLLM>(std::move(entries));
}

std::unique_ptr<MockLLM> MockLLM::from_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open mock script: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return from_jsonl(ss.str());
}

std::string MockLLM::complete(const std::string& prompt) {
  std::lock_guard lk(mutex_);
  transcript_.push_back(prompt);
  for (auto& e : entries_) {
    if (!e.unlimited && e.remaining == 0) continue;
    bool all = true;
    for (const auto& m : e.match) all = all && prompt.find(m) != std::string::npos;
    if (!all) continue;
    if (!e.unlimited) --e.remaining;
    return e.response;
  }
  throw LLMError("mock script has no entry for prompt: " + prompt.substr(0, 200));
}

std::vector<std::string> MockLLM::transcript() const {
  std::lock_guard lk(mutex_);
  return transcript_;
}

HttpLLM::HttpLLM(HttpLLMConfig config) : config_(std::move(config)) {
  if (config_.host.empty()) throw InputError("LLM endpoint host is empty");
}

std::string HttpLLM::complete(const std::string& prompt) {
  json body = {{"messages", json::array({{{"role", "user"}, {"content", prompt}}})},
               {"temperature", config_.temperature}};
  if (!config_.model.empty()) body["model"] = config_.model;
  const std::string payload = dump_json(body);

  std::string last_error;
  for (int attempt = 0; attempt <= config_.retries; ++attempt) {
    if (attempt) std::this_thread::sleep_for(std::chrono::seconds(1 << (attempt - 1)));
    httplib::Client client(config_.host, config_.port);
    client.set_read_timeout(config_.timeout_s, 0);
    client.set_write_timeout(config_.timeout_s, 0);
    httplib::Headers headers;
    if (!config_.api_key.empty()) headers.emplace("Authorization", "Bearer " + config_.api_key);
    auto res = client.Post(config_.path, headers, payload, "application/json");
    if (!res) {
      last_error = "transport error: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status != 200) {
      last_error = "HTTP " + std::to_string(res->status) + ": " + res->body.substr(0, 500);
      if (res->status < 500 && res->status != 429) break;
      continue;
    }
    try {
      return json::parse(res->body).at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const json::exception& e) {
      last_error = std::string("malformed completion: ") + e.what();
    }
  }
  throw LLMError(last_error);
}

namespace {

std::string env_or(const char* name, std::string fallback) {
  const char* v = std::getenv(name);
  return v && *v ? std::string(v) : fallback;
}

}  // namespace

std::unique_ptr<LLMClient> make_llm_client(std::string_view uri) {
  if (uri.rfind("mock:", 0) == 0) return MockLLM::from_file(std::string(uri.substr(5)));
  if (uri.rfind("http://", 0) != 0) {
    throw InputError("unsupported LLM URI (expected mock:<file> or http://...): " + std::string(uri));
  }
  HttpLLMConfig cfg;
  std::string_view rest = uri.substr(7);
  std::string_view query;
  if (auto q = rest.find('?'); q != std::string_view::npos) {
    query = rest.substr(q + 1);
    rest = rest.substr(0, q);
  }
  if (auto slash = rest.find('/'); slash != std::string_view::npos) {
    cfg.path = std::string(rest.substr(slash));
    rest = rest.substr(0, slash);
  }
  if (auto colon = rest.find(':'); colon != std::string_view::npos) {
    auto port = rest.substr(colon + 1);
    auto [_, ec] = std::from_chars(port.data(), port.data() + port.size(), cfg.port);
    if (ec != std::errc()) throw InputError("bad port in LLM URI: " + std::string(uri));
    rest = rest.substr(0, colon);
  }
  cfg.host = std::string(rest);
  cfg.model = env_or("TESTFORGE_LLM_MODEL", "");
  cfg.api_key = env_or("TESTFORGE_LLM_API_KEY", "");
  std::istringstream params{std::string(query)};
  for (std::string kv; std::getline(params, kv, '&');) {
    auto eq = kv.find('=');
    if (eq == std::string::npos) continue;
    const auto key = kv.substr(0, eq);
    const auto value = kv.substr(eq + 1);
    if (key == "model") cfg.model = value;
    else if (key == "temperature") cfg.temperature = std::stod(value);
    else if (key == "timeout") cfg.timeout_s = std::stoi(value);
    else if (key == "retries") cfg.retries = std::stoi(value);
  }
  return std::make_unique<HttpLLM>(std::move(cfg));
}

std::optional<std::string> extract_code_block(std::string_view response) {
  std::optional<std::string> last_any;
  std::optional<std::string> last_python;
  std::size_t pos = 0;
  while (true) {
    auto open = response.find("```", pos);
    if (open == std::string_view::npos) break;
    auto eol = response.find('\n', open);
    if (eol == std::string_view::npos) break;
    auto tag = response.substr(open + 3, eol - open - 3);
    while (!tag.empty() && (tag.back() == ' ' || tag.back() == '\r')) tag.remove_suffix(1);
    auto close = response.find("```", eol + 1);
    if (close == std::string_view::npos) break;
    std::string body(response.substr(eol + 1, close - eol - 1));
    if (tag == "python" || tag == "python3" || tag == "py") last_python = body;
    last_any = std::move(body);
    pos = close + 3;
  }
  return last_python ? last_python : last_any;
}

}  // namespace testforge::testgen
