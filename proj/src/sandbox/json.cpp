#include "testforge/sandbox/json.hpp"

namespace testforge::sandbox {

void to_json(nlohmann::json& j, const ExecutionLimits& l) {
  j = {{"cpu_time_ms", l.cpu_time_ms},         {"wall_time_ms", l.wall_time_ms},
       {"memory_bytes", l.memory_bytes},       {"file_size_bytes", l.file_size_bytes},
       {"stack_bytes", l.stack_bytes},         {"output_cap_bytes", l.output_cap_bytes},
       {"unlimited", l.unlimited}};
}

void from_json(const nlohmann::json& j, ExecutionLimits& l) {
  l.cpu_time_ms = j.value("cpu_time_ms", l.cpu_time_ms);
  l.wall_time_ms = j.value("wall_time_ms", l.wall_time_ms);
  l.memory_bytes = j.value("memory_bytes", l.memory_bytes);
  l.file_size_bytes = j.value("file_size_bytes", l.file_size_bytes);
  l.stack_bytes = j.value("stack_bytes", l.stack_bytes);
  l.output_cap_bytes = j.value("output_cap_bytes", l.output_cap_bytes);
  l.unlimited = j.value("unlimited", l.unlimited);
}

void to_json(nlohmann::json& j, const ResourceUsage& u) {
  j = {{"cpu_time_ms", u.cpu_time_ms},
       {"wall_time_ms", u.wall_time_ms},
       {"peak_memory_bytes", u.peak_memory_bytes},
       {"bytes_written_stdout", u.bytes_written_stdout},
       {"bytes_written_stderr", u.bytes_written_stderr},
       {"stdout_truncated", u.stdout_truncated},
       {"stderr_truncated", u.stderr_truncated}};
}

void to_json(nlohmann::json& j, const TerminationKind& kind) {
  j = {{"kind", kind_tag(kind)}, {"description", describe(kind)}};
  if (auto* e = std::get_if<termination::Exited>(&kind)) j["code"] = e->code;
  if (auto* s = std::get_if<termination::Signaled>(&kind)) j["signal"] = s->signal;
  if (auto* i = std::get_if<termination::IllegalSyscall>(&kind)) j["syscall"] = i->identifier;
  if (auto* f = std::get_if<termination::IsolationSetupFailure>(&kind)) j["reason"] = f->reason;
}

void to_json(nlohmann::json& j, const ExecutionOutcome& o) {
  nlohmann::json kind;
  to_json(kind, o.termination);  // variant of foreign types: no ADL lookup
  j = {{"termination", kind},
       {"stdout", o.stdout_data},
       {"stderr", o.stderr_data},
       {"usage", o.usage}};
}

}  // namespace testforge::sandbox
