#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "speclab/geometry.hpp"
#include "speclab/surd.hpp"

namespace speclab::spectral {

// points are d-dimensional to match the domain (2 entries for meshes)
using PointXd = std::vector<double>;

// separated mode on prod (0, mu_i*pi): norm_constant * prod_i sin(k_i x_i / mu_i)
struct OrthotopeMode {
    std::vector<int> K;
    double lambda = 0.0;         // sum (k_i / mu_i)^2
    double norm_constant = 0.0;  // prod sqrt(2 / (mu_i pi))
};

struct OrthotopeBasis {
    geom::Orthotope domain;
    std::vector<OrthotopeMode> modes;
};

struct MeshBasis {
    geom::MeshedDomain mesh;
    std::vector<int> dof_of_vertex;   // -1 on Dirichlet (boundary) vertices
    Eigen::MatrixXd nodal;            // num_vertices x n, zero rows on the boundary
    Eigen::SparseMatrix<double> mass; // consistent mass over all vertices
    std::vector<double> residuals;    // ||K u - lambda M u||_2 / ||u||_2 per mode
};

struct EigenSystem {
    std::vector<double> lambdas;  // nondecreasing, all positive
    std::variant<OrthotopeBasis, MeshBasis> basis;
    // near_degenerate[k]: gap to the next eigenvalue below gap_tol*(1+lambda_k);
    // eigenvectors inside such a cluster are orthonormal but individually arbitrary
    std::vector<char> near_degenerate;
    double gap_tol = 1e-6;
    bool normalized = true;
    std::string sign_convention = "largest-|value| sample positive, lowest index on ties";

    int n() const { return static_cast<int>(lambdas.size()); }
    bool closed_form() const { return std::holds_alternative<OrthotopeBasis>(basis); }
    const OrthotopeBasis* orthotope() const { return std::get_if<OrthotopeBasis>(&basis); }
    const MeshBasis* mesh() const { return std::get_if<MeshBasis>(&basis); }
};

// sum k_i^2 / mu_i^2 in the ring Z + Z*sqrt(D); empty without exact metadata
std::optional<surd::Surd> exact_lambda(const geom::Orthotope& ortho, const std::vector<int>& K);

// n smallest values of sum (k_i/mu_i)^2 over positive multi-indices, min-heap
// frontier enumeration, ties broken lexicographically in K (exact surd
// comparisons when the orthotope carries exact metadata)
EigenSystem orthotope_spectrum(const geom::Orthotope& ortho, int n);

struct FemOptions {
    int max_iters = 200;
    double residual_tol = 1e-9;
    double gap_tol = 1e-6;
    unsigned seed = 12345;
};

// P1 generalized eigenproblem K u = lambda M u, Dirichlet rows eliminated,
// shift-invert block subspace iteration at shift 0
EigenSystem fem_spectrum(const geom::MeshedDomain& dom, int n, const FemOptions& opts = {});

// P1 matrices on a meshed domain; interior = non-boundary vertices
struct FemMatrices {
    Eigen::SparseMatrix<double> stiffness;  // interior x interior
    Eigen::SparseMatrix<double> mass;       // interior x interior
    Eigen::SparseMatrix<double> mass_full;  // all vertices x all vertices
    std::vector<int> dof_of_vertex;         // -1 on the boundary
    std::vector<int> vertex_of_dof;
};
FemMatrices assemble_p1(const geom::MeshedDomain& dom);

namespace detail {
// block shift-invert subspace iteration on the SPD pencil (A, M): the n
// smallest eigenvalues with M-orthonormal columns (signs unnormalized)
std::pair<Eigen::VectorXd, Eigen::MatrixXd> smallest_eigenpairs(
    const Eigen::SparseMatrix<double>& A, const Eigen::SparseMatrix<double>& M, int n,
    const FemOptions& opts);
} // namespace detail

// values of phi_index at the points; zero outside the domain (extension by
// zero); nodal systems interpolate barycentrically with a 1e-9 snap
std::vector<double> evaluate_eigenfunction(const EigenSystem& sys, int index,
                                           const std::vector<PointXd>& points);

struct ConvergenceRow {
    double h = 0.0;
    std::vector<double> lambda_err;  // relative eigenvalue error per mode
    std::vector<double> sup_err;     // vertex sup-norm eigenfunction error per mode
};

struct ConvergenceTable {
    std::vector<ConvergenceRow> rows;
    std::vector<double> lambda_order;  // least-squares slope of log(err) vs log(h)
};

// FEM errors against the closed form (orthotope modes or the disk's Bessel
// fundamental); the target must have simple first n eigenvalues, so the disk
// only admits n = 1
ConvergenceTable convergence_study(const geom::DomainSpec& target,
                                   const std::vector<double>& h_list, int n);

} // namespace speclab::spectral
