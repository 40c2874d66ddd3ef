#pragma once

#include <nlohmann/json.hpp>

#include "testforge/sandbox/sandbox.hpp"

namespace testforge::sandbox {

// Missing keys keep their defaults, so partial limit objects are valid.
void to_json(nlohmann::json& j, const ExecutionLimits& limits);
void from_json(const nlohmann::json& j, ExecutionLimits& limits);

void to_json(nlohmann::json& j, const ResourceUsage& usage);

// {"kind": "<tag>", ...payload}
void to_json(nlohmann::json& j, const TerminationKind& kind);

void to_json(nlohmann::json& j, const ExecutionOutcome& outcome);

}  // namespace testforge::sandbox
