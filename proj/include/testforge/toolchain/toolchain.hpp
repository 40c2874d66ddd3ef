#pragma once

#include <nlohmann/json.hpp>

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "testforge/errors.hpp"
#include "testforge/sandbox/sandbox.hpp"

namespace testforge::toolchain {

/// Compile/run templates and isolation settings for one guest language.
/// Templates use the placeholders `{src}` and `{bin}`.
struct GuestLanguageProfile {
  std::string name;
  std::string source_file = "main";
  std::string binary_file = "main";
  std::optional<std::vector<std::string>> compile_template;  // none: interpreted
  std::vector<std::string> run_template;
  sandbox::IsolationPolicy policy;
  sandbox::IsolationPolicy compile_policy;
  sandbox::ExecutionLimits compile_limits = default_compile_limits();
  std::map<std::string, std::string> env;

  bool interpreted() const { return !compile_template.has_value(); }

  /// True when the program the templates start exists on this host.
  bool available() const;

  /// 30 s cpu, 60 s wall, 2 GiB memory.
  static sandbox::ExecutionLimits default_compile_limits();

  /// Parses a profile document. Whitelist paths resolve against `base_dir`.
  static GuestLanguageProfile from_json(const nlohmann::json& doc,
                                        const std::filesystem::path& base_dir);
};

class UnknownLanguage : public InputError {
 public:
  explicit UnknownLanguage(const std::string& name)
      : InputError("unknown language: " + name) {}
};

/// Profiles loaded from a directory of `*.json` documents. Lookups are safe
/// from any thread; reload() swaps in a freshly parsed set atomically.
class ProfileRegistry {
 public:
  explicit ProfileRegistry(std::filesystem::path directory);

  void reload();

  /// Throws UnknownLanguage.
  std::shared_ptr<const GuestLanguageProfile> resolve(std::string_view name) const;
  std::vector<std::string> names() const;
  const std::filesystem::path& directory() const { return directory_; }

 private:
  std::filesystem::path directory_;
  mutable std::shared_mutex mutex_;
  std::map<std::string, std::shared_ptr<const GuestLanguageProfile>, std::less<>> profiles_;
};

/// $TESTFORGE_PROFILE_DIR, or the profile directory shipped with the build.
std::filesystem::path default_profile_dir();

/// Runnable output of compile(). Owns the directory holding `entry`, so it
/// stays valid for as many judge runs as hold a copy.
struct CompiledArtifact {
  std::string profile_name;
  std::filesystem::path entry;
  std::vector<std::string> run_argv;
  std::string compile_log;
  sandbox::IsolationPolicy policy;  // run policy, copied from the profile
  std::map<std::string, std::string> env;
  std::shared_ptr<const sandbox::Workdir> storage;
};

struct CompileFailure {
  std::string log;
};

using CompileResult = std::variant<CompiledArtifact, CompileFailure>;

/// Writes `source` into `workdir` and, for compiled profiles, runs the
/// compiler inside the sandbox under the profile's compile limits.
/// Interpreted profiles return a pass-through artifact. Throws
/// InfrastructureError when the sandbox cannot be set up.
CompileResult compile(std::string_view source, const GuestLanguageProfile& profile,
                      sandbox::Workdir workdir);

/// Convenience overload allocating a fresh workdir under `sandbox_root`.
CompileResult compile(std::string_view source, const GuestLanguageProfile& profile,
                      const std::filesystem::path& sandbox_root);

/// Executes an artifact in a fresh workdir under `sandbox_root`. The
/// artifact's own directory is only readable to the guest, so one artifact
/// can serve any number of concurrent runs. `extra_args` are appended to the
/// run argv.
sandbox::ExecutionOutcome run_artifact(const CompiledArtifact& artifact,
                                       std::string_view stdin_data,
                                       const sandbox::ExecutionLimits& limits,
                                       const std::filesystem::path& sandbox_root,
                                       const std::vector<std::string>& extra_args = {});

}  // namespace testforge::toolchain
