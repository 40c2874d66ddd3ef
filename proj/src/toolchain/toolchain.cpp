#include "testforge/toolchain/toolchain.hpp"

#include <unistd.h>

#include <cstdlib>
#include <fstream>
#include <mutex>

#include "testforge/sandbox/json.hpp"

namespace testforge::toolchain {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string substitute(std::string arg, const std::string& src, const std::string& bin) {
  auto replace = [&arg](std::string_view key, const std::string& value) {
    for (auto pos = arg.find(key); pos != std::string::npos;
         pos = arg.find(key, pos + value.size())) {
      arg.replace(pos, key.size(), value);
    }
  };
  replace("{src}", src);
  replace("{bin}", bin);
  return arg;
}

std::vector<std::string> instantiate(const std::vector<std::string>& tmpl,
                                     const fs::path& src, const fs::path& bin) {
  std::vector<std::string> argv;
  argv.reserve(tmpl.size());
  for (const auto& arg : tmpl) argv.push_back(substitute(arg, src.string(), bin.string()));
  return argv;
}

std::vector<std::string> string_list(const json& doc, const char* key) {
  const auto& v = doc.at(key);
  if (!v.is_array()) throw InputError(std::string("profile field '") + key + "' must be an array");
  std::vector<std::string> out;
  for (const auto& item : v) out.push_back(item.get<std::string>());
  return out;
}

sandbox::IsolationPolicy make_policy(const std::string& name, const fs::path& whitelist) {
  sandbox::IsolationPolicy policy;
  policy.profile = name;
  policy.syscall_whitelist = sandbox::SyscallSet::load(whitelist);
  return policy;
}

}  // namespace

sandbox::ExecutionLimits GuestLanguageProfile::default_compile_limits() {
  sandbox::ExecutionLimits l;
  l.cpu_time_ms = 30000;
  l.wall_time_ms = 60000;
  l.memory_bytes = 2 * sandbox::kGiB;
  return l;
}

bool GuestLanguageProfile::available() const {
  const auto& first = compile_template ? compile_template->front() : run_template.front();
  if (first.find('{') != std::string::npos) return true;  // runs its own artifact
  return ::access(sandbox::resolve_command(first, "/").c_str(), X_OK) == 0;
}

GuestLanguageProfile GuestLanguageProfile::from_json(const json& doc, const fs::path& base_dir) {
  try {
    GuestLanguageProfile p;
    p.name = doc.at("name").get<std::string>();
    if (p.name.empty()) throw InputError("profile name is empty");
    p.source_file = doc.value("source_file", p.source_file);
    p.binary_file = doc.value("binary_file", p.binary_file);
    if (doc.contains("compile") && !doc["compile"].is_null()) {
      p.compile_template = string_list(doc, "compile");
      if (p.compile_template->empty()) throw InputError("compile template is empty");
    }
    p.run_template = string_list(doc, "run");
    if (p.run_template.empty()) throw InputError("run template is empty");

    p.policy = make_policy(p.name, base_dir / doc.at("whitelist").get<std::string>());
    if (p.compile_template) {
      p.compile_policy = make_policy(
          p.name + ":compile", base_dir / doc.at("compile_whitelist").get<std::string>());
    }
    if (doc.contains("compile_limits")) {
      p.compile_limits = doc["compile_limits"].get<sandbox::ExecutionLimits>();
      p.compile_limits.validate();
    }
    if (doc.contains("env")) p.env = doc["env"].get<std::map<std::string, std::string>>();
    return p;
  } catch (const json::exception& e) {
    throw InputError(std::string("malformed profile: ") + e.what());
  }
}

ProfileRegistry::ProfileRegistry(fs::path directory) : directory_(std::move(directory)) {
  reload();
}

void ProfileRegistry::reload() {
  if (!fs::is_directory(directory_)) {
    throw InputError("profile directory not found: " + directory_.string());
  }
  decltype(profiles_) fresh;
  for (const auto& entry : fs::directory_iterator(directory_)) {
    if (entry.path().extension() != ".json") continue;
    std::ifstream in(entry.path());
    json doc;
    try {
      doc = json::parse(in);
    } catch (const json::exception& e) {
      throw InputError(entry.path().string() + ": " + e.what());
    }
    auto profile = std::make_shared<GuestLanguageProfile>(
        GuestLanguageProfile::from_json(doc, entry.path().parent_path()));
    auto name = profile->name;
    if (!fresh.emplace(name, std::move(profile)).second) {
      throw InputError("duplicate profile: " + name);
    }
  }
  std::unique_lock lk(mutex_);
  profiles_ = std::move(fresh);
}

std::shared_ptr<const GuestLanguageProfile> ProfileRegistry::resolve(std::string_view name) const {
  std::shared_lock lk(mutex_);
  auto it = profiles_.find(name);
  if (it == profiles_.end()) throw UnknownLanguage(std::string(name));
  return it->second;
}

std::vector<std::string> ProfileRegistry::names() const {
  std::shared_lock lk(mutex_);
  std::vector<std::string> out;
  for (const auto& [name, _] : profiles_) out.push_back(name);
  return out;
}

fs::path default_profile_dir() {
  if (const char* env = std::getenv("TESTFORGE_PROFILE_DIR"); env && *env) return env;
  return TESTFORGE_DEFAULT_PROFILE_DIR;
}

CompileResult compile(std::string_view source, const GuestLanguageProfile& profile,
                      sandbox::Workdir workdir) {
  auto storage = std::make_shared<const sandbox::Workdir>(std::move(workdir));
  const fs::path src = storage->write_file(profile.source_file, source);
  const fs::path bin = storage->path() / profile.binary_file;

  CompiledArtifact artifact;
  artifact.profile_name = profile.name;
  artifact.run_argv = instantiate(profile.run_template, src, bin);
  artifact.policy = profile.policy;
  artifact.env = profile.env;
  artifact.storage = storage;

  if (profile.interpreted()) {
    artifact.entry = src;
    return artifact;
  }

  auto argv = instantiate(*profile.compile_template, profile.source_file, profile.binary_file);
  auto policy = profile.compile_policy;
  policy.writable_workdir = storage->path();
  sandbox::ExecuteOptions options;
  options.env = profile.env;
  auto outcome = sandbox::execute(argv, "", profile.compile_limits, policy, storage->path(), options);

  if (auto* f = std::get_if<sandbox::termination::IsolationSetupFailure>(&outcome.termination)) {
    throw InfrastructureError("compile sandbox setup failed: " + f->reason);
  }
  std::string log = outcome.stderr_data;
  if (!outcome.stdout_data.empty()) log = outcome.stdout_data + log;

  auto* exited = std::get_if<sandbox::termination::Exited>(&outcome.termination);
  if (!exited || exited->code != 0 || !fs::exists(bin)) {
    if (!exited) log += "\n[compiler terminated: " + sandbox::describe(outcome.termination) + "]";
    return CompileFailure{std::move(log)};
  }
  artifact.entry = bin;
  artifact.compile_log = std::move(log);
  return artifact;
}

CompileResult compile(std::string_view source, const GuestLanguageProfile& profile,
                      const fs::path& sandbox_root) {
  return compile(source, profile, sandbox::Workdir::create(sandbox_root));
}

sandbox::ExecutionOutcome run_artifact(const CompiledArtifact& artifact,
                                       std::string_view stdin_data,
                                       const sandbox::ExecutionLimits& limits,
                                       const fs::path& sandbox_root,
                                       const std::vector<std::string>& extra_args) {
  auto wd = sandbox::Workdir::create(sandbox_root);
  auto argv = artifact.run_argv;
  argv.insert(argv.end(), extra_args.begin(), extra_args.end());
  auto policy = artifact.policy;
  policy.writable_workdir = wd.path();
  sandbox::ExecuteOptions options;
  options.env = artifact.env;
  return sandbox::execute(argv, stdin_data, limits, policy, wd.path(), options);
}

}  // namespace testforge::toolchain
