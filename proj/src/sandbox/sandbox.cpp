#include "testforge/sandbox/sandbox.hpp"

#include <fcntl.h>
#include <linux/audit.h>
#include <sched.h>
#include <signal.h>
#include <sys/mount.h>
#include <sys/prctl.h>
#include <sys/ptrace.h>
#include <sys/resource.h>
#include <sys/stat.h>
#include <sys/syscall.h>
#include <sys/user.h>
#include <sys/wait.h>
#include <time.h>
#include <unistd.h>

#include <atomic>
#include <cerrno>
#include <chrono>
#include <condition_variable>
#include <cstring>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>
#include <unordered_map>

#include "testforge/errors.hpp"

namespace testforge::sandbox {
namespace {

namespace fs = std::filesystem;
namespace t = termination;
using Clock = std::chrono::steady_clock;

#if defined(__x86_64__)
constexpr std::uint32_t kNativeAuditArch = AUDIT_ARCH_X86_64;
#elif defined(__aarch64__)
constexpr std::uint32_t kNativeAuditArch = AUDIT_ARCH_AARCH64;
#else
#error "unsupported architecture for syscall tracing"
#endif

constexpr const char* kGuestPath = "/usr/local/bin:/usr/bin:/bin";
constexpr auto kWatchdogInterval = std::chrono::milliseconds(5);

std::mutex g_observer_mutex;
ExecutionObserver g_observer;

// RAII file descriptor.
class Fd {
 public:
  Fd() = default;
  explicit Fd(int fd) : fd_(fd) {}
  Fd(Fd&& o) noexcept : fd_(std::exchange(o.fd_, -1)) {}
  Fd& operator=(Fd&& o) noexcept {
    if (this != &o) {
      reset();
      fd_ = std::exchange(o.fd_, -1);
    }
    return *this;
  }
  ~Fd() { reset(); }
  int get() const { return fd_; }
  void reset() {
    if (fd_ >= 0) ::close(fd_);
    fd_ = -1;
  }

 private:
  int fd_ = -1;
};

[[noreturn]] void throw_errno(const std::string& what) {
  throw InfrastructureError(what + ": " + std::strerror(errno));
}

struct MountPoint {
  std::string path;
  unsigned long flags = 0;
};

std::string unescape_mount_path(const std::string& raw) {
  std::string out;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    if (raw[i] == '\\' && i + 3 < raw.size()) {
      const std::string oct = raw.substr(i + 1, 3);
      if (oct.size() == 3 && oct.find_first_not_of("01234567") == std::string::npos) {
        out.push_back(static_cast<char>(std::stoi(oct, nullptr, 8)));
        i += 3;
        continue;
      }
    }
    out.push_back(raw[i]);
  }
  return out;
}

// Mount points of the caller's namespace with the per-mount flags that must
// be preserved when remounting them read-only.
std::vector<MountPoint> read_mounts() {
  std::ifstream in("/proc/self/mountinfo");
  if (!in) throw InfrastructureError("cannot read /proc/self/mountinfo");
  std::vector<MountPoint> out;
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream fields(line);
    std::string id, parent, devno, root, mount_point, options;
    fields >> id >> parent >> devno >> root >> mount_point >> options;
    MountPoint mp{unescape_mount_path(mount_point), 0};
    std::istringstream opts(options);
    std::string opt;
    while (std::getline(opts, opt, ',')) {
      if (opt == "nosuid") mp.flags |= MS_NOSUID;
      else if (opt == "nodev") mp.flags |= MS_NODEV;
      else if (opt == "noexec") mp.flags |= MS_NOEXEC;
      else if (opt == "noatime") mp.flags |= MS_NOATIME;
      else if (opt == "nodiratime") mp.flags |= MS_NODIRATIME;
      else if (opt == "relatime") mp.flags |= MS_RELATIME;
    }
    out.push_back(std::move(mp));
  }
  return out;
}

// Reads "<key>: <n> kB" from /proc/<pid>/status, in bytes.
std::int64_t read_status_kb(pid_t pid, std::string_view key) {
  std::ifstream in("/proc/" + std::to_string(pid) + "/status");
  std::string line;
  while (std::getline(in, line)) {
    if (line.size() > key.size() && line.compare(0, key.size(), key) == 0 &&
        line[key.size()] == ':') {
      return std::stoll(line.substr(key.size() + 1)) * 1024;
    }
  }
  return 0;
}

pid_t read_tgid(pid_t pid) {
  std::ifstream in("/proc/" + std::to_string(pid) + "/status");
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind("Tgid:", 0) == 0) return static_cast<pid_t>(std::stol(line.substr(5)));
  }
  return pid;
}

double cpu_clock_ms(clockid_t clock) {
  timespec ts{};
  if (clock_gettime(clock, &ts) != 0) return 0;
  return static_cast<double>(ts.tv_sec) * 1e3 + static_cast<double>(ts.tv_nsec) / 1e6;
}

double timeval_ms(const timeval& tv) {
  return static_cast<double>(tv.tv_sec) * 1e3 + static_cast<double>(tv.tv_usec) / 1e3;
}

std::int64_t fd_size(int fd) {
  struct stat st {};
  if (fstat(fd, &st) != 0) return 0;
  return static_cast<std::int64_t>(st.st_size);
}

std::string read_capped(int fd, std::int64_t size, std::int64_t cap) {
  const auto want = static_cast<std::size_t>(std::min(size, cap));
  std::string out(want, '\0');
  std::size_t got = 0;
  while (got < want) {
    const ssize_t n = pread(fd, out.data() + got, want - got, static_cast<off_t>(got));
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) break;
    got += static_cast<std::size_t>(n);
  }
  out.resize(got);
  return out;
}

// Everything the child needs, prepared before fork so the child only makes
// raw syscalls.
struct ChildPlan {
  std::string exec_path;
  std::vector<std::string> argv_storage;
  std::vector<char*> argv;
  std::vector<std::string> env_storage;
  std::vector<char*> envp;
  std::string workdir;
  std::vector<MountPoint> mounts;
  int stdin_fd = -1;
  int stdout_fd = -1;
  int stderr_fd = -1;
  int error_fd = -1;
  pid_t parent = 0;
  ExecutionLimits limits;
  unsigned uid = 0;
  unsigned gid = 0;
  bool network_isolated = true;
  bool readonly_root = true;
};

struct SetupError {
  char stage[96];
  int err;
};

[[noreturn]] void child_fail(const ChildPlan& plan, const char* stage) {
  SetupError e{};
  const int saved = errno;
  std::size_t i = 0;
  for (; stage[i] != '\0' && i + 1 < sizeof(e.stage); ++i) e.stage[i] = stage[i];
  e.stage[i] = '\0';
  e.err = saved;
  [[maybe_unused]] auto n = ::write(plan.error_fd, &e, sizeof(e));
  _exit(126);
}

void set_limit(const ChildPlan& plan, int resource, rlim_t soft, rlim_t hard) {
  rlimit rl{soft, hard};
  if (setrlimit(resource, &rl) != 0) child_fail(plan, "setrlimit");
}

[[noreturn]] void run_child(const ChildPlan& plan) {
  setpgid(0, 0);
  // The host may block or ignore signals (a service waiting on SIGHUP);
  // the guest starts from the defaults.
  sigset_t none;
  sigemptyset(&none);
  sigprocmask(SIG_SETMASK, &none, nullptr);
  signal(SIGPIPE, SIG_DFL);
  if (prctl(PR_SET_PDEATHSIG, SIGKILL) != 0) child_fail(plan, "pdeathsig");
  if (getppid() != plan.parent) _exit(126);

  int ns_flags = 0;
  if (plan.network_isolated) ns_flags |= CLONE_NEWNET;
  if (plan.readonly_root) ns_flags |= CLONE_NEWNS;
  if (ns_flags != 0 && unshare(ns_flags) != 0) child_fail(plan, "unshare");

  if (plan.readonly_root) {
    if (mount(nullptr, "/", nullptr, MS_REC | MS_PRIVATE, nullptr) != 0) {
      child_fail(plan, "mount private /");
    }
    for (const auto& mp : plan.mounts) {
      if (mount(nullptr, mp.path.c_str(), nullptr,
                MS_REMOUNT | MS_BIND | MS_RDONLY | mp.flags, nullptr) != 0) {
        // Mounts shadowed by a later mount on the same path are no longer
        // reachable and report EINVAL; anything else is fatal.
        if (errno != EINVAL && errno != ENOENT) child_fail(plan, "remount read-only");
      }
    }
    const char* wd = plan.workdir.c_str();
    if (mount(wd, wd, nullptr, MS_BIND, nullptr) != 0) child_fail(plan, "bind workdir");
    if (mount(nullptr, wd, nullptr, MS_REMOUNT | MS_BIND | MS_NOSUID | MS_NODEV,
              nullptr) != 0) {
      child_fail(plan, "remount workdir writable");
    }
  }

  if (chdir(plan.workdir.c_str()) != 0) child_fail(plan, "chdir workdir");
  if (dup2(plan.stdin_fd, 0) < 0 || dup2(plan.stdout_fd, 1) < 0 ||
      dup2(plan.stderr_fd, 2) < 0) {
    child_fail(plan, "redirect streams");
  }
  if (plan.error_fd > 3) syscall(SYS_close_range, 3u, static_cast<unsigned>(plan.error_fd - 1), 0u);
  syscall(SYS_close_range, static_cast<unsigned>(plan.error_fd + 1), ~0u, 0u);

  const auto& l = plan.limits;
  set_limit(plan, RLIMIT_CORE, 0, 0);
  if (!l.unlimited) {
    const auto cpu_s = static_cast<rlim_t>((l.cpu_time_ms + 999) / 1000 + 1);
    set_limit(plan, RLIMIT_CPU, cpu_s, cpu_s + 1);
    set_limit(plan, RLIMIT_AS, static_cast<rlim_t>(l.memory_bytes),
              static_cast<rlim_t>(l.memory_bytes));
    set_limit(plan, RLIMIT_DATA, static_cast<rlim_t>(l.memory_bytes),
              static_cast<rlim_t>(l.memory_bytes));
  }
  set_limit(plan, RLIMIT_FSIZE, static_cast<rlim_t>(l.file_size_bytes),
            static_cast<rlim_t>(l.file_size_bytes));
  set_limit(plan, RLIMIT_STACK, static_cast<rlim_t>(l.stack_bytes),
            static_cast<rlim_t>(l.stack_bytes));

  if (syscall(SYS_setgroups, 0, nullptr) != 0) child_fail(plan, "setgroups");
  if (syscall(SYS_setresgid, plan.gid, plan.gid, plan.gid) != 0) child_fail(plan, "setgid");
  if (syscall(SYS_setresuid, plan.uid, plan.uid, plan.uid) != 0) child_fail(plan, "setuid");
  if (getuid() != plan.uid || geteuid() != plan.uid || getgid() != plan.gid ||
      getegid() != plan.gid) {
    errno = EPERM;
    child_fail(plan, "verify dropped identity");
  }
  if (prctl(PR_SET_NO_NEW_PRIVS, 1, 0, 0, 0) != 0) child_fail(plan, "no_new_privs");

  if (ptrace(PTRACE_TRACEME, 0, nullptr, nullptr) != 0) child_fail(plan, "ptrace traceme");
  kill(getpid(), SIGSTOP);

  execve(plan.exec_path.c_str(), plan.argv.data(), plan.envp.data());
  const char msg[] = "sandbox: exec failed\n";
  [[maybe_unused]] auto n = ::write(2, msg, sizeof(msg) - 1);
  _exit(127);
}

struct TraceeState {
  long last_nr = -1;
  std::uint64_t args[6] = {};
  bool exec_done = false;
};

bool is_signal_syscall(long nr) {
  return nr == __NR_kill || nr == __NR_tgkill || nr == __NR_tkill;
}

// Signal syscalls may only target the guest itself (or its own group).
bool signal_target_allowed(pid_t tracee, long nr, const std::uint64_t* args) {
  const auto target = static_cast<pid_t>(static_cast<std::int64_t>(args[0]));
  if (nr == __NR_tkill) return target == tracee;
  if (nr == __NR_kill && target == 0) return true;
  return target == tracee || target == read_tgid(tracee);
}

void cancel_syscall(pid_t pid) {
#if defined(__x86_64__)
  user_regs_struct regs{};
  if (ptrace(PTRACE_GETREGS, pid, nullptr, &regs) == 0) {
    regs.orig_rax = static_cast<unsigned long long>(-1);
    ptrace(PTRACE_SETREGS, pid, nullptr, &regs);
  }
#else
  (void)pid;
#endif
}

class Watchdog {
 public:
  Watchdog(pid_t pid, int stdout_fd, int stderr_fd, const ExecutionLimits& limits,
           Clock::time_point start, double cpu_baseline_ms)
      : pid_(pid),
        stdout_fd_(stdout_fd),
        stderr_fd_(stderr_fd),
        limits_(limits),
        start_(start),
        cpu_baseline_ms_(cpu_baseline_ms) {
    if (clock_getcpuclockid(pid, &cpu_clock_) != 0) has_cpu_clock_ = false;
    thread_ = std::thread([this] { loop(); });
  }
  ~Watchdog() { stop(); }

  // Stops polling. Must be called before the guest's pid can be recycled.
  void stop() {
    {
      std::lock_guard lk(m_);
      done_ = true;
    }
    cv_.notify_all();
    if (thread_.joinable()) thread_.join();
  }

 private:
  void loop() {
    std::unique_lock lk(m_);
    while (!cv_.wait_for(lk, kWatchdogInterval, [this] { return done_; })) {
      bool over = false;
      const auto elapsed = std::chrono::duration<double, std::milli>(Clock::now() - start_).count();
      if (elapsed >= static_cast<double>(limits_.wall_time_ms)) over = true;
      if (!limits_.unlimited && has_cpu_clock_ &&
          cpu_clock_ms(cpu_clock_) - cpu_baseline_ms_ >= static_cast<double>(limits_.cpu_time_ms)) {
        over = true;
      }
      if (fd_size(stdout_fd_) > limits_.output_cap_bytes ||
          fd_size(stderr_fd_) > limits_.output_cap_bytes) {
        over = true;
      }
      if (over) kill(-pid_, SIGKILL);
    }
  }

  pid_t pid_;
  int stdout_fd_;
  int stderr_fd_;
  ExecutionLimits limits_;
  Clock::time_point start_;
  double cpu_baseline_ms_;
  clockid_t cpu_clock_{};
  bool has_cpu_clock_ = true;
  std::mutex m_;
  std::condition_variable cv_;
  bool done_ = false;
  std::thread thread_;
};

Fd open_stream_file(const fs::path& path, int flags) {
  Fd fd(::open(path.c_str(), flags | O_CLOEXEC, 0644));
  if (fd.get() < 0) throw_errno("open " + path.string());
  return fd;
}

void write_all(int fd, std::string_view data) {
  while (!data.empty()) {
    const ssize_t n = ::write(fd, data.data(), data.size());
    if (n < 0 && errno == EINTR) continue;
    if (n < 0) throw_errno("write stdin.txt");
    data.remove_prefix(static_cast<std::size_t>(n));
  }
}

std::vector<std::string> build_env(const fs::path& workdir, const ExecuteOptions& options) {
  std::map<std::string, std::string> env{
      {"PATH", kGuestPath},
      {"HOME", workdir.string()},
      {"TMPDIR", workdir.string()},
      {"LANG", "C.UTF-8"},
  };
  for (const auto& [k, v] : options.env) env[k] = v;
  std::vector<std::string> out;
  for (const auto& [k, v] : env) out.push_back(k + "=" + v);
  return out;
}

}  // namespace

void set_execution_observer(ExecutionObserver observer) {
  std::lock_guard lk(g_observer_mutex);
  g_observer = std::move(observer);
}

fs::path resolve_command(const std::string& program, const fs::path& workdir) {
  if (program.empty()) throw InputError("empty command");
  if (program.find('/') != std::string::npos) {
    fs::path p(program);
    return p.is_absolute() ? p : workdir / p;
  }
  std::istringstream dirs(kGuestPath);
  std::string dir;
  while (std::getline(dirs, dir, ':')) {
    fs::path candidate = fs::path(dir) / program;
    if (access(candidate.c_str(), X_OK) == 0) return candidate;
  }
  return fs::path(program);
}

ExecutionOutcome execute(std::span<const std::string> command, std::string_view stdin_data,
                         const ExecutionLimits& limits, const IsolationPolicy& policy,
                         const fs::path& workdir, const ExecuteOptions& options) {
  if (command.empty()) throw InputError("execute: empty command");
  limits.validate();
  if (options.audit == nullptr) policy.validate();
  if (policy.drop_to_uid == 0 || policy.drop_to_gid == 0) {
    throw InputError("isolation policy must not run guests as root");
  }
  std::error_code ec;
  if (workdir.empty() || !workdir.is_absolute() || !fs::is_directory(workdir, ec)) {
    throw InputError("execute: workdir must be an existing absolute directory: " +
                     workdir.string());
  }
  if (!policy.writable_workdir.empty() &&
      fs::weakly_canonical(policy.writable_workdir) != fs::weakly_canonical(workdir)) {
    throw InputError("execute: policy writable_workdir differs from workdir");
  }

  ChildPlan plan;
  plan.workdir = fs::canonical(workdir).string();
  plan.exec_path = resolve_command(command.front(), plan.workdir).string();
  plan.argv_storage.assign(command.begin(), command.end());
  for (auto& a : plan.argv_storage) plan.argv.push_back(a.data());
  plan.argv.push_back(nullptr);
  plan.env_storage = build_env(plan.workdir, options);
  for (auto& e : plan.env_storage) plan.envp.push_back(e.data());
  plan.envp.push_back(nullptr);
  if (policy.readonly_root) plan.mounts = read_mounts();
  plan.limits = limits;
  plan.uid = policy.drop_to_uid;
  plan.gid = policy.drop_to_gid;
  plan.network_isolated = policy.network_isolated;
  plan.readonly_root = policy.readonly_root;
  plan.parent = getpid();

  const fs::path wd(plan.workdir);
  {
    Fd in = open_stream_file(wd / "stdin.txt", O_WRONLY | O_CREAT | O_TRUNC);
    write_all(in.get(), stdin_data);
  }
  Fd stdin_fd = open_stream_file(wd / "stdin.txt", O_RDONLY);
  Fd stdout_fd = open_stream_file(wd / "stdout.txt", O_RDWR | O_CREAT | O_TRUNC);
  Fd stderr_fd = open_stream_file(wd / "stderr.txt", O_RDWR | O_CREAT | O_TRUNC);
  int pipe_fds[2];
  if (pipe2(pipe_fds, O_CLOEXEC) != 0) throw_errno("pipe2");
  Fd error_read(pipe_fds[0]);
  Fd error_write(pipe_fds[1]);
  plan.stdin_fd = stdin_fd.get();
  plan.stdout_fd = stdout_fd.get();
  plan.stderr_fd = stderr_fd.get();
  plan.error_fd = error_write.get();

  {
    std::lock_guard lk(g_observer_mutex);
    if (g_observer) g_observer(wd);
  }

  const pid_t pid = fork();
  if (pid < 0) throw_errno("fork");
  if (pid == 0) run_child(plan);

  error_write.reset();
  setpgid(pid, pid);

  ExecutionOutcome outcome;
  int status = 0;
  while (wait4(pid, &status, __WALL, nullptr) < 0) {
    if (errno != EINTR) throw_errno("wait4");
  }
  if (!WIFSTOPPED(status) || WSTOPSIG(status) != SIGSTOP) {
    if (WIFSTOPPED(status)) {
      kill(pid, SIGKILL);
      waitpid(pid, &status, __WALL);
    }
    SetupError e{};
    fcntl(error_read.get(), F_SETFL, O_NONBLOCK);
    std::string reason = "child exited during isolation setup";
    if (::read(error_read.get(), &e, sizeof(e)) == static_cast<ssize_t>(sizeof(e))) {
      reason = std::string(e.stage) + ": " + std::strerror(e.err);
    }
    outcome.termination = t::IsolationSetupFailure{reason};
    return outcome;
  }
  error_read.reset();

  const long trace_options = PTRACE_O_TRACESYSGOOD | PTRACE_O_EXITKILL | PTRACE_O_TRACEEXEC |
                             PTRACE_O_TRACEEXIT | PTRACE_O_TRACEFORK | PTRACE_O_TRACEVFORK |
                             PTRACE_O_TRACECLONE;
  if (ptrace(PTRACE_SETOPTIONS, pid, nullptr, trace_options) != 0) {
    kill(pid, SIGKILL);
    waitpid(pid, &status, __WALL);
    outcome.termination = t::IsolationSetupFailure{std::string("ptrace setoptions: ") +
                                                   std::strerror(errno)};
    return outcome;
  }

  double cpu_baseline_ms = 0;
  clockid_t cpu_clock{};
  if (clock_getcpuclockid(pid, &cpu_clock) == 0) cpu_baseline_ms = cpu_clock_ms(cpu_clock);
  const auto start = Clock::now();
  Watchdog watchdog(pid, stdout_fd.get(), stderr_fd.get(), limits, start, cpu_baseline_ms);

  std::unordered_map<pid_t, TraceeState> tracees;
  tracees[pid] = {};
  std::optional<std::string> illegal;
  std::int64_t attempted_peak = 0;
  std::int64_t resident_peak = 0;
  int main_status = 0;
  rusage main_usage{};
  Clock::time_point main_end = start;
  bool main_reaped = false;

  auto kill_group = [&] { kill(-pid, SIGKILL); };

  ptrace(PTRACE_SYSCALL, pid, nullptr, nullptr);
  while (true) {
    rusage ru{};
    const pid_t p = wait4(-pid, &status, __WALL, &ru);
    if (p < 0) {
      if (errno == EINTR) continue;
      if (errno == ECHILD) break;
      throw_errno("wait4");
    }
    if (WIFEXITED(status) || WIFSIGNALED(status)) {
      tracees.erase(p);
      if (p == pid) {
        main_end = Clock::now();
        main_status = status;
        main_usage = ru;
        main_reaped = true;
        watchdog.stop();
        // Descendants do not outlive the direct child.
        kill_group();
      }
      continue;
    }
    if (!WIFSTOPPED(status)) continue;

    auto& ts = tracees[p];
    const int sig = WSTOPSIG(status);
    const unsigned event = static_cast<unsigned>(status) >> 16;
    int inject = 0;

    if (sig == (SIGTRAP | 0x80)) {
      __ptrace_syscall_info info{};
      if (ptrace(PTRACE_GET_SYSCALL_INFO, p, sizeof(info), &info) <= 0) {
        ptrace(PTRACE_SYSCALL, p, nullptr, nullptr);
        continue;
      }
      if (info.op == PTRACE_SYSCALL_INFO_ENTRY) {
        const auto nr = static_cast<long>(info.entry.nr);
        ts.last_nr = nr;
        std::copy(std::begin(info.entry.args), std::end(info.entry.args), ts.args);
        std::optional<std::string> violation;
        if (info.arch != kNativeAuditArch) {
          violation = "foreign_abi_" + std::to_string(nr);
        } else if (p == pid && !ts.exec_done && nr == __NR_execve) {
          // The initial exec of the guest image is always permitted.
        } else if (options.audit != nullptr) {
          options.audit->observed.insert(syscall_name(nr));
        } else if (!policy.syscall_whitelist.contains(nr)) {
          violation = syscall_name(nr);
        } else if (is_signal_syscall(nr) && !signal_target_allowed(p, nr, ts.args)) {
          violation = syscall_name(nr);
        }
        if (violation) {
          if (!illegal) illegal = std::move(violation);
          cancel_syscall(p);
          kill_group();
          continue;
        }
      } else if (info.op == PTRACE_SYSCALL_INFO_EXIT && !limits.unlimited) {
        std::int64_t growth = 0;
        const long nr = ts.last_nr;
        if ((nr == __NR_mmap || nr == __NR_mremap) && info.exit.is_error &&
            info.exit.rval == -ENOMEM) {
          growth = static_cast<std::int64_t>(nr == __NR_mmap ? ts.args[1]
                                                             : ts.args[2] - ts.args[1]);
        } else if (nr == __NR_brk && ts.args[0] != 0 &&
                   static_cast<std::uint64_t>(info.exit.rval) < ts.args[0]) {
          growth = static_cast<std::int64_t>(ts.args[0] - static_cast<std::uint64_t>(info.exit.rval));
        }
        if (growth > 0) {
          const std::int64_t attempted = read_status_kb(p, "VmSize") + growth;
          if (attempted > limits.memory_bytes) {
            attempted_peak = std::max(attempted_peak, attempted);
            kill_group();
            continue;
          }
        }
      }
    } else if (event != 0) {
      if (event == PTRACE_EVENT_EXEC) ts.exec_done = true;
      if (event == PTRACE_EVENT_EXIT && p == pid) {
        resident_peak = std::max(resident_peak, read_status_kb(p, "VmHWM"));
      }
    } else if (sig == SIGSTOP || sig == SIGTSTP || sig == SIGTTIN || sig == SIGTTOU) {
      // Job-control stops (and the initial stop of auto-attached children)
      // are suppressed so a guest cannot park itself.
    } else {
      inject = sig;
    }
    ptrace(PTRACE_SYSCALL, p, nullptr, inject);
  }
  watchdog.stop();
  if (!main_reaped) {
    throw InfrastructureError("tracer lost the guest process");
  }

  ResourceUsage& usage = outcome.usage;
  usage.wall_time_ms = std::chrono::duration<double, std::milli>(main_end - start).count();
  usage.cpu_time_ms = std::max(
      0.0, timeval_ms(main_usage.ru_utime) + timeval_ms(main_usage.ru_stime) - cpu_baseline_ms);
  usage.peak_memory_bytes = std::max(resident_peak, attempted_peak);
  usage.bytes_written_stdout = fd_size(stdout_fd.get());
  usage.bytes_written_stderr = fd_size(stderr_fd.get());
  usage.stdout_truncated = usage.bytes_written_stdout > limits.output_cap_bytes;
  usage.stderr_truncated = usage.bytes_written_stderr > limits.output_cap_bytes;
  outcome.stdout_data = read_capped(stdout_fd.get(), usage.bytes_written_stdout,
                                    limits.output_cap_bytes);
  outcome.stderr_data = read_capped(stderr_fd.get(), usage.bytes_written_stderr,
                                    limits.output_cap_bytes);
  outcome.termination = classify_termination(main_status, usage, limits, illegal);
  return outcome;
}

}  // namespace testforge::sandbox
