#include <cmath>
#include <random>

#include <Eigen/SparseCholesky>

#include "speclab/eigensolver.hpp"
#include "speclab/errors.hpp"

namespace speclab::spectral {

FemMatrices assemble_p1(const geom::MeshedDomain& dom) {
    dom.validate(false);
    const int nv = dom.num_vertices();

    FemMatrices fm;
    fm.dof_of_vertex.assign(nv, -1);
    for (int v = 0; v < nv; ++v)
        if (!dom.on_boundary[v]) {
            fm.dof_of_vertex[v] = static_cast<int>(fm.vertex_of_dof.size());
            fm.vertex_of_dof.push_back(v);
        }
    const int nd = static_cast<int>(fm.vertex_of_dof.size());
    require(nd > 0, ErrorCode::mesh_resolution, "mesh has no interior vertices; refine h");

    std::vector<Eigen::Triplet<double>> tk, tm, tmf;
    tk.reserve(static_cast<std::size_t>(dom.num_cells()) * 9);
    tm.reserve(tk.capacity());
    tmf.reserve(tk.capacity());
    for (int t = 0; t < dom.num_cells(); ++t) {
        const auto& tri = dom.triangles[t];
        const geom::Point2 p0 = dom.vertices[tri[0]];
        const geom::Point2 p1 = dom.vertices[tri[1]];
        const geom::Point2 p2 = dom.vertices[tri[2]];
        const double area = dom.cell_area[t];
        // grad of the i-th barycentric coordinate is (bx[i], by[i]) / (2*area)
        const double bx[3] = {p1.y - p2.y, p2.y - p0.y, p0.y - p1.y};
        const double by[3] = {p2.x - p1.x, p0.x - p2.x, p1.x - p0.x};
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                const double kij = (bx[i] * bx[j] + by[i] * by[j]) / (4.0 * area);
                const double mij = area / 12.0 * (i == j ? 2.0 : 1.0);
                tmf.emplace_back(tri[i], tri[j], mij);
                const int di = fm.dof_of_vertex[tri[i]];
                const int dj = fm.dof_of_vertex[tri[j]];
                if (di >= 0 && dj >= 0) {
                    tk.emplace_back(di, dj, kij);
                    tm.emplace_back(di, dj, mij);
                }
            }
    }
    fm.stiffness.resize(nd, nd);
    fm.stiffness.setFromTriplets(tk.begin(), tk.end());
    fm.mass.resize(nd, nd);
    fm.mass.setFromTriplets(tm.begin(), tm.end());
    fm.mass_full.resize(nv, nv);
    fm.mass_full.setFromTriplets(tmf.begin(), tmf.end());
    return fm;
}

namespace detail {

std::pair<Eigen::VectorXd, Eigen::MatrixXd> smallest_eigenpairs(
    const Eigen::SparseMatrix<double>& A, const Eigen::SparseMatrix<double>& M, int n,
    const FemOptions& opts) {
    const int nd = static_cast<int>(A.rows());
    require(n >= 1, ErrorCode::invalid_parameter, "need n >= 1 modes");
    require(n < nd, ErrorCode::invalid_parameter,
            "requested mode count must stay below the pencil size");

    const int m = std::min(std::max(n + 5, 2 * n), nd);

    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> inv(A);
    require(inv.info() == Eigen::Success, ErrorCode::solver_no_convergence,
            "pencil factorization failed");

    std::mt19937_64 rng(opts.seed);
    std::normal_distribution<double> gauss;
    Eigen::MatrixXd X(nd, m);
    for (int j = 0; j < m; ++j)
        for (int i = 0; i < nd; ++i) X(i, j) = gauss(rng);

    Eigen::VectorXd ritz = Eigen::VectorXd::Zero(m);
    Eigen::VectorXd residual = Eigen::VectorXd::Constant(n, 1e300);
    double best = 1e300;
    int since_best = 0;
    bool converged = false;

    for (int iter = 0; iter < opts.max_iters && !converged; ++iter) {
        Eigen::MatrixXd Y = inv.solve(M * X);
        Eigen::MatrixXd Ar = Y.transpose() * (A * Y);
        Eigen::MatrixXd Br = Y.transpose() * (M * Y);
        Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> rr(Ar, Br);
        if (rr.info() != Eigen::Success) {
            // block went rank-deficient; reseed and restart
            for (int j = 0; j < m; ++j)
                for (int i = 0; i < nd; ++i) X(i, j) = gauss(rng);
            continue;
        }
        ritz = rr.eigenvalues();
        X = Y * rr.eigenvectors();  // X^T M X = I, X^T A X = diag(ritz)

        converged = true;
        for (int k = 0; k < n; ++k) {
            const Eigen::VectorXd u = X.col(k);
            residual[k] = (A * u - ritz[k] * (M * u)).norm() / u.norm();
            if (residual[k] > opts.residual_tol) converged = false;
        }
        const double worst = residual.maxCoeff();
        if (worst < 0.5 * best) {
            best = worst;
            since_best = 0;
        } else if (++since_best >= 20 && !converged) {
            // stagnation: refresh the guard columns beyond the wanted modes
            for (int j = n; j < m; ++j)
                for (int i = 0; i < nd; ++i) X(i, j) = gauss(rng);
            since_best = 0;
        }
    }
    require(converged, ErrorCode::solver_no_convergence,
            "eigensolver stalled at residual " + std::to_string(residual.maxCoeff()) +
                " after " + std::to_string(opts.max_iters) + " iterations");

    // one extra ritz value so callers can measure the gap above mode n
    const int keep = std::min(n + 1, m);
    return {ritz.head(keep), X.leftCols(n)};
}

} // namespace detail

EigenSystem fem_spectrum(const geom::MeshedDomain& dom, int n, const FemOptions& opts) {
    require(n >= 1, ErrorCode::invalid_parameter, "need n >= 1 modes");
    FemMatrices fm = assemble_p1(dom);
    const int nd = static_cast<int>(fm.stiffness.rows());
    require(n < nd, ErrorCode::invalid_parameter,
            "requested mode count must stay below the interior vertex count");

    auto [ritz, X] = detail::smallest_eigenpairs(fm.stiffness, fm.mass, n, opts);

    MeshBasis basis;
    basis.mesh = dom;
    basis.dof_of_vertex = fm.dof_of_vertex;
    basis.mass = fm.mass_full;
    basis.nodal = Eigen::MatrixXd::Zero(dom.num_vertices(), n);
    basis.residuals.assign(n, 0.0);

    EigenSystem sys;
    sys.gap_tol = opts.gap_tol;
    sys.near_degenerate.resize(n);
    for (int k = 0; k < n; ++k) {
        Eigen::VectorXd u = X.col(k);
        u /= std::sqrt(u.dot(fm.mass * u));
        // sign convention: largest-|value| dof positive, lowest index on ties
        int arg = 0;
        for (int i = 1; i < nd; ++i)
            if (std::abs(u[i]) > std::abs(u[arg])) arg = i;
        if (u[arg] < 0) u = -u;
        for (int i = 0; i < nd; ++i) basis.nodal(fm.vertex_of_dof[i], k) = u[i];
        basis.residuals[k] =
            (fm.stiffness * u - ritz[k] * (fm.mass * u)).norm() / u.norm();
        sys.lambdas.push_back(ritz[k]);
        sys.near_degenerate[k] = ritz[k + 1] - ritz[k] < opts.gap_tol * (1.0 + ritz[k]);
    }
    sys.basis = std::move(basis);
    return sys;
}

} // namespace speclab::spectral
