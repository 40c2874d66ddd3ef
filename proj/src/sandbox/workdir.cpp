#include <sys/stat.h>
#include <unistd.h>

#include <cerrno>
#include <cstdlib>
#include <cstring>
#include <fstream>

#include "testforge/errors.hpp"
#include "testforge/sandbox/sandbox.hpp"

namespace testforge::sandbox {

namespace fs = std::filesystem;

fs::path default_sandbox_root() {
  fs::path root;
  if (const char* env = std::getenv("TESTFORGE_SANDBOX_ROOT"); env && *env) {
    root = env;
  } else {
    root = fs::temp_directory_path() / "testforge-sandbox";
  }
  std::error_code ec;
  fs::create_directories(root, ec);
  if (ec) throw InfrastructureError("cannot create sandbox root " + root.string());
  // Guests need to traverse the root to reach their own workdir.
  ::chmod(root.c_str(), 0711);
  return root;
}

Workdir Workdir::create(const fs::path& root, unsigned uid, unsigned gid) {
  std::string tmpl = (root / "run-XXXXXX").string();
  if (::mkdtemp(tmpl.data()) == nullptr) {
    throw InfrastructureError("mkdtemp under " + root.string() + ": " + std::strerror(errno));
  }
  Workdir dir{fs::path(tmpl)};
  if (::chown(tmpl.c_str(), uid, gid) != 0 || ::chmod(tmpl.c_str(), 0755) != 0) {
    throw InfrastructureError("cannot hand workdir to sandbox identity: " +
                              std::string(std::strerror(errno)));
  }
  return dir;
}

Workdir::Workdir(Workdir&& other) noexcept : path_(std::move(other.path_)) {
  other.path_.clear();
}

Workdir& Workdir::operator=(Workdir&& other) noexcept {
  if (this != &other) {
    if (!path_.empty()) {
      std::error_code ec;
      fs::remove_all(path_, ec);
    }
    path_ = std::move(other.path_);
    other.path_.clear();
  }
  return *this;
}

Workdir::~Workdir() {
  if (!path_.empty()) {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
}

fs::path Workdir::write_file(const std::string& name, std::string_view content) const {
  const fs::path file = path_ / name;
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) throw InfrastructureError("cannot write " + file.string());
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  out.close();
  ::chmod(file.c_str(), 0644);
  return file;
}

}  // namespace testforge::sandbox
