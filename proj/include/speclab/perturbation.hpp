#pragma once

#include <functional>
#include <string>
#include <vector>

#include "speclab/eigensolver.hpp"
#include "speclab/fields.hpp"
#include "speclab/geometry.hpp"

namespace speclab::spectral {

// One detected eigenvalue crossing: curves a and b (1-based identities fixed
// by the ordering at the start of the path) exchange order, or their gap dips
// below crossing_tol, somewhere in (t_lo, t_hi). min_gap is the smallest gap
// the linear interpolants of the two curves attain on that interval, so it
// sits below the crossing threshold by construction.
struct CrossingEvent {
    double t_lo = 0.0;
    double t_hi = 0.0;
    int mode_a = 0;
    int mode_b = 0;
    double min_gap = 0.0;
};

// Eigenvalue branches followed along a deformation. curves[k][s] is the value
// of identity k at t_grid[s]; pairing[s][k] is the sorted position identity k
// occupies at step s. At every step the multiset of curve values equals the
// n lowest eigenvalues there (identities leaving the window swap labels with
// the entering branch, which is itself recorded as a crossing).
struct EigenPath {
    std::vector<double> t_grid;
    std::vector<std::vector<double>> curves;
    std::vector<std::vector<int>> pairing;
    std::vector<CrossingEvent> crossings;

    int n() const { return static_cast<int>(curves.size()); }
    int steps() const { return static_cast<int>(t_grid.size()); }
};

struct TrackOptions {
    FemOptions fem;
    double crossing_tol = 1e-4;  // relative: gap below crossing_tol*(1+lambda)
    double overlap_tol = 0.9;    // assigned mass-overlap below this fails pairing
    int pad = 3;                 // buffer modes computed beyond the tracked window
};

// Follows the n lowest branches across path.meshes, pairing consecutive steps
// by eigenfunction mass overlap |u_prev^T M u|; an assigned overlap at or
// below overlap_tol outside a near-degenerate cluster raises pairing_failure
// (the fix is a finer t grid).
EigenPath track_path(const geom::DeformationPath& path, int n, const TrackOptions& opts = {});

// Boundary piece with a normal speed on it. Exactly one backend is set:
// an orthotope face (x_d = 0 or x_d = mu_d*pi) or a list of indices into a
// mesh's boundary_edges. Weights are the quadrature measures of the pieces
// (edge lengths on a mesh); they are positive and sum to |Gamma|.
struct BoundaryPerturbation {
    int face_dim = -1;  // orthotope backend when >= 0
    int face_side = 1;  // 0: x_d = 0, 1: x_d = mu_d*pi
    std::vector<int> edges;
    std::vector<double> weights;
    double speed = 1.0;                              // constant normal speed v.nu
    std::vector<double> edge_speeds;                 // per-edge v.nu at midpoints
    std::function<double(const PointXd&)> speed_fn;  // overrides speed when set
    std::string descriptor;
};

BoundaryPerturbation orthotope_face(int dim, int side, double speed = 1.0);
BoundaryPerturbation mesh_boundary(const geom::MeshedDomain& dom, std::vector<int> edges,
                                   double speed = 1.0);
BoundaryPerturbation mesh_boundary_field(const geom::MeshedDomain& dom,
                                         const geom::VectorField2D& field);

// First-order change of lambda_l under the boundary velocity:
//   -integral_Gamma (d phi_l / d nu)^2 (v.nu) dsigma.
// Closed-form systems differentiate the branch the multi-index labels, which
// stays well defined through degeneracies; mesh systems require lambda_l
// isolated (degenerate_cluster otherwise) and recover d phi/d nu from the P1
// gradient in the triangle adjacent to each edge.
double hadamard_derivative(const EigenSystem& sys, const BoundaryPerturbation& pert, int l);

struct DerivativeCheck {
    double formula = 0.0;   // boundary-integral (or volume-integral) value
    double fd_slope = 0.0;  // central difference (lambda(+dt)-lambda(-dt))/(2 dt)
    double rel_error = 0.0;
};

// Central-difference check of hadamard_derivative for the family that pushes
// one orthotope face outward at the given speed (side lengths mu_d*pi + t*v).
// Branches are followed by multi-index, so order exchanges inside the window
// are harmless.
DerivativeCheck fd_shape_check(const geom::Orthotope& ortho, int face_dim, int face_side,
                               double speed, int l, double dt);

// Same check on a mesh moved by the flow of the field; lambda_l must stay
// simple across [-dt, dt] (degenerate_cluster otherwise).
DerivativeCheck fd_shape_check(const geom::MeshedDomain& dom, const geom::VectorField2D& field,
                               int l, double dt, const FemOptions& opts = {});

// First-order change of lambda_k under the potential -Delta + eps*V:
// integral_Omega V phi_k^2. Exact separable quadrature on orthotopes with
// polynomial V, midpoint cell quadrature on meshes. lambda_k must be simple.
double potential_derivative(const EigenSystem& sys, const ScalarField& V, int k);

// Central-difference check of potential_derivative on a 1D interval
// (0, len): P1 tridiagonal pencil, potential assembled as the consistent
// element mass scaled by V at the cell midpoint, eigenvalues by Sturm
// bisection. The formula side uses the closed-form modes, so the two columns
// are independent.
DerivativeCheck fd_potential_check(double len, const ScalarField& V, int k, double d_eps,
                                   int cells = 2000);

// Mesh variant: K + eps*P with P the centroid-sampled consistent element
// mass, solved by the same block iteration as the unperturbed problem.
DerivativeCheck fd_potential_check(const geom::MeshedDomain& dom, const ScalarField& V, int k,
                                   double d_eps, const FemOptions& opts = {});

namespace detail {
// k-th smallest (1-based) eigenvalue of the symmetric tridiagonal pencil
// (A, B): A = diag(ad) + off-diagonal ao, B likewise SPD; Sturm counts via
// the LDL^T inertia of A - lambda*B, bisection to relative width 1e-13
double tridiag_pencil_eigenvalue(const std::vector<double>& ad, const std::vector<double>& ao,
                                 const std::vector<double>& bd, const std::vector<double>& bo,
                                 int k);
} // namespace detail

} // namespace speclab::spectral
