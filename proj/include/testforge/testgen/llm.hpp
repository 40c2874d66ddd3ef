#pragma once

#include <nlohmann/json.hpp>

#include <cstddef>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace testforge::testgen {

/// Text-in, text-out completion service. Implementations must tolerate
/// concurrent calls.
class LLMClient {
 public:
  virtual ~LLMClient() = default;
  /// Throws LLMError.
  virtual std::string complete(const std::string& prompt) = 0;
};

/// Replays a JSONL script. Each line is
///   {"match": "substr" | ["substr", ...], "response": "...", "repeat": n}
/// A prompt is answered by the first entry, in file order, whose every
/// match string occurs in the prompt and which has uses left. `repeat`
/// defaults to 1; 0 means unlimited. An unmatched prompt throws LLMError.
class MockLLM : public LLMClient {
 public:
  struct Entry {
    std::vector<std::string> match;
    std::string response;
    std::size_t remaining = 1;
    bool unlimited = false;
  };

  explicit MockLLM(std::vector<Entry> entries);
  static std::unique_ptr<MockLLM> from_file(const std::string& path);
  static std::unique_ptr<MockLLM> from_jsonl(std::string_view text);

  std::string complete(const std::string& prompt) override;

  /// Prompts received so far, in order.
  std::vector<std::string> transcript() const;

 private:
  mutable std::mutex mutex_;
  std::vector<Entry> entries_;
  std::vector<std::string> transcript_;
};

struct HttpLLMConfig {
  std::string host;
  int port = 80;
  std::string path = "/v1/chat/completions";
  std::string model;
  std::string api_key;
  double temperature = 0.7;
  int timeout_s = 600;
  int retries = 2;
};

/// OpenAI-style chat-completions endpoint over plain HTTP.
class HttpLLM : public LLMClient {
 public:
  explicit HttpLLM(HttpLLMConfig config);
  std::string complete(const std::string& prompt) override;
  const HttpLLMConfig& config() const { return config_; }

 private:
  HttpLLMConfig config_;
};

/// "mock:<path>" or "http://host[:port][/path][?model=<m>&temperature=<t>]".
/// The API key comes from $TESTFORGE_LLM_API_KEY and the model falls back to
/// $TESTFORGE_LLM_MODEL. Throws InputError on other schemes.
std::unique_ptr<LLMClient> make_llm_client(std::string_view uri);

/// Code inside the last fenced block of an LLM response (a block tagged
/// python wins over untagged ones), or nullopt when there is none.
std::optional<std::string> extract_code_block(std::string_view response);

}  // namespace testforge::testgen
