#pragma once

#include <Eigen/Dense>

#include <functional>
#include <string>
#include <vector>

#include "speclab/eigensolver.hpp"

namespace speclab::spectral {

// Design cells the damping density lives on: the triangles of a meshed
// system, or a uniform grid over an orthotope. Grid cells keep their per-axis
// edges so mode integrals stay closed-form; mesh cells are quadrature cells.
struct DampingCells {
    std::vector<double> area;
    std::vector<PointXd> center;             // cell centers / triangle centroids
    std::vector<int> shape;                  // grid: cells per axis; empty on meshes
    std::vector<std::vector<double>> edges;  // grid: per-axis breakpoints, size shape[i]+1

    int count() const { return static_cast<int>(area.size()); }
    bool is_grid() const { return !shape.empty(); }
    double total_area() const;
};

DampingCells grid_cells(const geom::Orthotope& box, const std::vector<int>& shape);
DampingCells mesh_cells(const geom::MeshedDomain& dom);
// the system's own discretization: mesh triangles, or a uniform grid of
// roughly 4096 cells split evenly across the orthotope's axes
DampingCells default_cells(const EigenSystem& sys);

// Relaxed damping density a in [0,1] per cell; budget is the damped area
// sum_c a_c area_c. validate() enforces the bounds and the budget match to
// 1e-9 * |Omega|.
struct DampingDensity {
    DampingCells cells;
    std::vector<double> a;
    double budget = 0.0;

    void validate() const;
};

DampingDensity uniform_density(DampingCells cells, double ell);
DampingDensity indicator_density(DampingCells cells,
                                 const std::function<bool(const PointXd&)>& inside);
DampingDensity density_from_values(DampingCells cells, std::vector<double> a);

// column n-1 holds the per-cell masses of mode n: integral over the cell of
// phi_n^2, closed-form on grid cells, centroid value times area on triangles
Eigen::MatrixXd mode_weights(const EigenSystem& sys, const DampingCells& cells, int N);

// J_N = min over the first N modes of sum_c a_c (phi_n^2 mass of cell c)
double evaluate_JN(const EigenSystem& sys, const DampingDensity& density, int N);

struct DampingSolution {
    DampingDensity density;
    double j_value = 0.0;             // LP optimum t* = min_n int_omega phi_n^2
    std::vector<int> active;          // 1-based modes attaining the min
    std::vector<double> alpha;        // duals on the mode rows: probability vector
    double level = 0.0;               // budget dual: a=1 where sum_k alpha_k phi_k^2 > level
    Eigen::MatrixXd weights;          // the mode masses the LP ran on
    double intermediate_measure = 0;  // area of {eps <= a <= 1-eps}, eps = 1e-3
    double duality_gap = 0.0;
    int lp_iterations = 0;
};

// max t over densities subject to the mode rows sum_c a_c w_{n,c} >= t, the
// exact budget, and the box bounds. Dense revised simplex on the (N+1)-row
// pencil of constraints; optimality certified by duality_gap <= 1e-8 * t*.
DampingSolution optimize_relaxed(const EigenSystem& sys, double ell, int N,
                                 const DampingCells& cells);
DampingSolution optimize_relaxed(const EigenSystem& sys, double ell, int N);

struct BangBangReport {
    double intermediate_area = 0.0;  // measure of A_eps = {eps <= a <= 1-eps}
    double residual = 0.0;           // stddev of sum_k alpha_k phi_k^2 over A_eps
};

// A vertex optimum is 0/1 up to one cell per active mode, and the dual
// combination sum_k alpha_k phi_k^2 is flat on the fractional cells; reports
// both measures, (0, 0) when A_eps is empty.
BangBangReport bang_bang_report(const DampingSolution& sol, double eps = 1e-3);

// Decay-rate estimate for the membrane damped by 2*k_damp*a, truncated to the
// first M modes: the quadratic pencil s^2 I + 2 k s B + Lambda with
// B_ij = int a phi_i phi_j, solved by companion linearization. This is the
// truncated-modal value, not the PDE decay rate; convergence is reported by
// rerunning at larger M.
double modal_decay_rate(const EigenSystem& sys, const DampingDensity& density, double k_damp,
                        int M);

namespace detail {
// B_ij = integral of a phi_i phi_j over the first M modes, same quadrature
// family as mode_weights (exact on grids, exact P1 products on triangles)
Eigen::MatrixXd damped_gram(const EigenSystem& sys, const DampingDensity& density, int M);

// bounded-variable revised simplex for: max t subject to w^T a >= t per mode
// column, area . a = ell, 0 <= a <= 1. w is cells x modes. Dantzig pricing,
// Bland's rule through degenerate stretches.
struct MaximinLp {
    std::vector<double> a;
    double t = 0.0;
    std::vector<double> alpha;  // mode duals
    double level = 0.0;         // budget dual
    double gap = 0.0;           // dual value minus t
    int iterations = 0;
};
MaximinLp maximin_lp(const Eigen::MatrixXd& w, const std::vector<double>& area, double ell);
} // namespace detail

} // namespace speclab::spectral
