#include "testforge/testgen/prompts.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "testforge/errors.hpp"

namespace testforge::testgen {

namespace fs = std::filesystem;

PromptLibrary::PromptLibrary(const fs::path& directory) {
  if (!fs::is_directory(directory)) throw InputError("prompt directory not found: " + directory.string());
  for (const auto& entry : fs::directory_iterator(directory)) {
    const auto ext = entry.path().extension();
    if (ext != ".txt" && ext != ".py") continue;
    std::ifstream in(entry.path(), std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    texts_[entry.path().stem().string()] = ss.str();
  }
}

const std::string& PromptLibrary::get(std::string_view name) const {
  auto it = texts_.find(name);
  if (it == texts_.end()) throw InputError("prompt template missing: " + std::string(name));
  return it->second;
}

std::string PromptLibrary::render(std::string_view name,
                                  const std::map<std::string, std::string>& values) const {
  return render_template(get(name), values);
}

std::string render_template(std::string_view text, const std::map<std::string, std::string>& values) {
  std::string out;
  out.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) {
    if (text[i] == '{') {
      auto close = text.find('}', i + 1);
      if (close != std::string_view::npos) {
        auto it = values.find(std::string(text.substr(i + 1, close - i - 1)));
        if (it != values.end()) {
          out += it->second;
          i = close + 1;
          continue;
        }
      }
    }
    out += text[i++];
  }
  return out;
}

fs::path default_prompt_dir() {
  if (const char* env = std::getenv("TESTFORGE_PROMPT_DIR"); env && *env) return env;
  return TESTFORGE_DEFAULT_PROMPT_DIR;
}

const PromptLibrary& default_prompts() {
  static const PromptLibrary lib(default_prompt_dir());
  return lib;
}

}  // namespace testforge::testgen
