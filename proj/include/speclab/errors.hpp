#pragma once

#include <stdexcept>
#include <string>

namespace speclab {

// Every failure the library reports deliberately carries one of these codes.
// The CLI maps config errors to exit code 2 and everything else to 3.
enum class ErrorCode {
    invalid_parameter,      // bad argument to a library call
    config,                 // malformed config file / CLI input
    mesh_resolution,        // mesher could not honor the requested h / geometry
    mesh_invalid,           // mesh failed a structural invariant
    deformation_invalid,    // deformed mesh degenerate (inverted cells, ...)
    incompatible_mesh,      // meshes lack the common connectivity an op needs
    solver_no_convergence,  // iterative eigensolver exceeded its budget
    degenerate_cluster,     // operation requires simple eigenvalue, found cluster
    pairing_failure,        // eigenvalue tracking lost mode identity
    work_budget,            // combinatorial search exceeded its work budget
    lp_infeasible,          // damping LP has no feasible point
    lp_unbounded,           // damping LP unbounded (should not happen)
    io                      // filesystem / serialization failure
};

const char* error_code_name(ErrorCode c);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
          code_(code) {}

    ErrorCode code() const { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
    throw Error(code, message);
}

inline void require(bool ok, ErrorCode code, const std::string& message) {
    if (!ok) fail(code, message);
}

} // namespace speclab
