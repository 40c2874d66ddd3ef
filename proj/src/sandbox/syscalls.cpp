#include "testforge/sandbox/syscalls.hpp"

#include <asm/unistd.h>

#include <algorithm>
#include <array>
#include <fstream>
#include <unordered_map>

#include "testforge/errors.hpp"

namespace testforge::sandbox {
namespace {

struct Entry {
  const char* name;
  long number;
};

#define SYSCALL_ENTRY(n) Entry{#n, __NR_##n},
constexpr Entry kTable[] = {
#include "syscall_names.inc"
};
#undef SYSCALL_ENTRY

const std::array<const char*, kMaxSyscallNumber>& by_number() {
  static const auto table = [] {
    std::array<const char*, kMaxSyscallNumber> t{};
    for (const auto& e : kTable) {
      if (e.number >= 0 && e.number < static_cast<long>(kMaxSyscallNumber)) {
        t[static_cast<std::size_t>(e.number)] = e.name;
      }
    }
    return t;
  }();
  return table;
}

const std::unordered_map<std::string_view, long>& by_name() {
  static const auto table = [] {
    std::unordered_map<std::string_view, long> t;
    for (const auto& e : kTable) t.emplace(e.name, e.number);
    return t;
  }();
  return table;
}

std::string trim(std::string s) {
  const auto ws = " \t\r\n";
  s.erase(0, s.find_first_not_of(ws));
  const auto last = s.find_last_not_of(ws);
  s.erase(last == std::string::npos ? 0 : last + 1);
  return s;
}

}  // namespace

std::string syscall_name(long number) {
  if (number >= 0 && number < static_cast<long>(kMaxSyscallNumber)) {
    if (const char* n = by_number()[static_cast<std::size_t>(number)]) return n;
  }
  return "syscall_" + std::to_string(number);
}

std::optional<long> syscall_number(std::string_view name) {
  const auto& t = by_name();
  if (auto it = t.find(name); it != t.end()) return it->second;
  return std::nullopt;
}

SyscallSet SyscallSet::from_names(const std::vector<std::string>& names) {
  SyscallSet set;
  for (const auto& name : names) {
    auto nr = syscall_number(name);
    if (!nr) throw InputError("unknown syscall in whitelist: " + name);
    set.insert(*nr);
  }
  return set;
}

SyscallSet SyscallSet::load(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw InputError("cannot read whitelist file " + file.string());
  std::vector<std::string> names;
  std::string line;
  while (std::getline(in, line)) {
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (!line.empty()) names.push_back(line);
  }
  return from_names(names);
}

void SyscallSet::insert(long number) {
  if (number < 0 || number >= static_cast<long>(kMaxSyscallNumber)) {
    throw InputError("syscall number out of range: " + std::to_string(number));
  }
  bits_.set(static_cast<std::size_t>(number));
}

bool SyscallSet::contains(long number) const {
  return number >= 0 && number < static_cast<long>(kMaxSyscallNumber) &&
         bits_.test(static_cast<std::size_t>(number));
}

std::vector<std::string> SyscallSet::names() const {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < kMaxSyscallNumber; ++i) {
    if (bits_.test(i)) out.push_back(syscall_name(static_cast<long>(i)));
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace testforge::sandbox
