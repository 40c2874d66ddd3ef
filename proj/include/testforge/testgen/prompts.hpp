#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>

namespace testforge::testgen {

/// Prompt templates loaded from a directory of `.txt`/`.py` files.
/// Placeholders are `{name}`; values are substituted in a single pass, so
/// braces inside substituted text are left alone.
class PromptLibrary {
 public:
  explicit PromptLibrary(const std::filesystem::path& directory);

  /// The template or asset named `name` (file name without extension).
  /// Throws InputError when absent.
  const std::string& get(std::string_view name) const;

  std::string render(std::string_view name,
                     const std::map<std::string, std::string>& values) const;

 private:
  std::map<std::string, std::string, std::less<>> texts_;
};

/// Substitutes `{key}` occurrences whose key is in `values`; other braces
/// are copied through.
std::string render_template(std::string_view text,
                            const std::map<std::string, std::string>& values);

/// $TESTFORGE_PROMPT_DIR, or the prompt directory shipped with the build.
std::filesystem::path default_prompt_dir();

/// Library from default_prompt_dir(), loaded once.
const PromptLibrary& default_prompts();

}  // namespace testforge::testgen
