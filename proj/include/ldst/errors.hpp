#pragma once

#include <stdexcept>
#include <string>

namespace ldst {

/// Error categories; the CLI maps these onto exit codes.
enum class Errc {
    invalid_instance,  // model invariant violated
    invalid_policy,    // policy references missing state / foreign action
    wrong_kind,        // evaluator called on the wrong uncertainty kind
    cap_exceeded,      // enumeration or size-explosion guard tripped
    unsupported_shape, // operation requires a shape the instance lacks
    bad_input,         // malformed file or argument
    numerical          // solver failed to make progress
};

class Error : public std::runtime_error {
  public:
    Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
    Errc code() const { return code_; }

  private:
    Errc code_;
};

} // namespace ldst
