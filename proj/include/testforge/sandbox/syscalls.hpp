#pragma once

#include <bitset>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace testforge::sandbox {

inline constexpr std::size_t kMaxSyscallNumber = 1024;

/// Native syscall name for `number`, or "syscall_<n>" when unknown.
std::string syscall_name(long number);

/// Native syscall number for `name`, if the host architecture defines it.
std::optional<long> syscall_number(std::string_view name);

/// A set of native syscall numbers, addressable by name.
class SyscallSet {
 public:
  SyscallSet() = default;

  /// Throws InputError on names the host architecture does not define.
  static SyscallSet from_names(const std::vector<std::string>& names);

  /// Parses a whitelist file: one syscall name per line, `#` comments.
  static SyscallSet load(const std::filesystem::path& file);

  void insert(long number);
  bool contains(long number) const;
  bool empty() const { return bits_.none(); }
  std::size_t size() const { return bits_.count(); }
  std::vector<std::string> names() const;

 private:
  std::bitset<kMaxSyscallNumber> bits_;
};

}  // namespace testforge::sandbox
