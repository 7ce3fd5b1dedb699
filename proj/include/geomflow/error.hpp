#pragma once

#include <stdexcept>
#include <string>

namespace gf {

enum class ErrorCode {
    invalid_argument,
    invalid_mesh,
    invalid_shape,
    parse,
    non_manifold,
    degenerate_normal,
    singular_kernel,
    assembly,
    solver_failure,
    non_convergence,
    degeneration,
    io,
    spec,
};

// Exception used for precondition violations, parse failures and I/O problems.
// Expected numerical outcomes (solver failure inside a stepper, BGN
// non-convergence, mesh degeneration) are reported through StepStatus instead.
class Error : public std::runtime_error {
  public:
    Error(ErrorCode code, const std::string& msg) : std::runtime_error(msg), code_(code) {}
    ErrorCode code() const noexcept { return code_; }

  private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& msg) { throw Error(code, msg); }

}  // namespace gf
