#pragma once

#include <stdexcept>
#include <string>

namespace testforge {

/// Raised when a caller violates an operation's precondition (bad limits,
/// missing workdir, empty suite, ...). Never used for guest misbehavior.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Infrastructure failure that is not attributable to the guest program.
class InfrastructureError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A pipeline stage could not interpret what it was given (an unparseable
/// LLM response, a gold solution failing on a validated case). The raw
/// text that caused it is kept for the log.
class PipelineError : public std::runtime_error {
 public:
  PipelineError(const std::string& what, std::string raw = {})
      : std::runtime_error(what), raw_(std::move(raw)) {}
  const std::string& raw() const { return raw_; }

 private:
  std::string raw_;
};

/// The LLM client failed to produce a completion (transport error, exhausted
/// mock script).
class LLMError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace testforge
