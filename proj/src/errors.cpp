#include "speclab/errors.hpp"

namespace speclab {

const char* error_code_name(ErrorCode c) {
    switch (c) {
        case ErrorCode::invalid_parameter: return "invalid-parameter";
        case ErrorCode::config: return "config-error";
        case ErrorCode::mesh_resolution: return "mesh-resolution-error";
        case ErrorCode::mesh_invalid: return "mesh-invalid";
        case ErrorCode::deformation_invalid: return "deformation-invalid";
        case ErrorCode::incompatible_mesh: return "incompatible-mesh";
        case ErrorCode::solver_no_convergence: return "no-convergence";
        case ErrorCode::degenerate_cluster: return "simplicity-violation";
        case ErrorCode::pairing_failure: return "pairing-failure";
        case ErrorCode::work_budget: return "work-budget-exceeded";
        case ErrorCode::lp_infeasible: return "lp-infeasible";
        case ErrorCode::lp_unbounded: return "lp-unbounded";
        case ErrorCode::io: return "io-error";
    }
    return "unknown-error";
}

} // namespace speclab
