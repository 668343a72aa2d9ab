#include <cmath>

#include "speclab/errors.hpp"
#include "speclab/perturbation.hpp"
#include "speclab/quadrature.hpp"

namespace speclab::spectral {

namespace {

constexpr double kPi = 3.14159265358979323846;

bool in_cluster(const EigenSystem& sys, int l) {
    if (sys.near_degenerate[static_cast<std::size_t>(l - 1)]) return true;
    if (l >= 2 && sys.near_degenerate[static_cast<std::size_t>(l - 2)]) return true;
    return false;
}

// integral of x^p sin^2(k x / mu) over (0, mu pi)
double xp_sin2(int p, int k, double mu) {
    const double b = mu * kPi;
    return 0.5 * (quad::integral_xp_cos(p, 0.0, 0.0, b) -
                  quad::integral_xp_cos(p, 2.0 * k / mu, 0.0, b));
}

} // namespace

double potential_derivative(const EigenSystem& sys, const ScalarField& V, int k) {
    require(k >= 1 && k <= sys.n(), ErrorCode::invalid_parameter, "mode index out of range");

    if (const OrthotopeBasis* ob = sys.orthotope()) {
        require(V.is_poly(), ErrorCode::invalid_parameter,
                "cell-sampled potentials need a mesh system");
        const geom::Orthotope& dom = ob->domain;
        const OrthotopeMode& mode = ob->modes[static_cast<std::size_t>(k - 1)];
        double sum = 0.0;
        for (const auto& term : V.terms) {
            require(static_cast<int>(term.powers.size()) <= dom.dim(),
                    ErrorCode::invalid_parameter,
                    "potential term has more variables than the domain");
            double prod = term.c;
            for (int i = 0; i < dom.dim(); ++i) {
                const int p = i < static_cast<int>(term.powers.size())
                                  ? term.powers[static_cast<std::size_t>(i)]
                                  : 0;
                prod *= xp_sin2(p, mode.K[static_cast<std::size_t>(i)],
                                dom.mu[static_cast<std::size_t>(i)]);
            }
            sum += prod;
        }
        return mode.norm_constant * mode.norm_constant * sum;
    }

    const MeshBasis& mb = *sys.mesh();
    require(!in_cluster(sys, k), ErrorCode::degenerate_cluster,
            "potential derivative needs an isolated eigenvalue; mode " + std::to_string(k) +
                " sits in a near-degenerate cluster");
    const geom::MeshedDomain& dom = mb.mesh;
    if (!V.is_poly())
        require(V.cell_values.size() == dom.triangles.size(), ErrorCode::invalid_parameter,
                "cell value count does not match the mesh");

    // V at the cell centroid times the exact integral of phi^2 over the cell
    // (the same quadrature the perturbed stiffness assembly uses, so V == c
    // integrates to exactly c on a normalized mode)
    double sum = 0.0;
    for (int t = 0; t < dom.num_cells(); ++t) {
        const auto& tri = dom.triangles[static_cast<std::size_t>(t)];
        const double u0 = mb.nodal(tri[0], k - 1);
        const double u1 = mb.nodal(tri[1], k - 1);
        const double u2 = mb.nodal(tri[2], k - 1);
        const double s = u0 + u1 + u2;
        const geom::Point2 c = dom.centroid(t);
        const double v = V.is_poly() ? V({c.x, c.y})
                                     : V.cell_values[static_cast<std::size_t>(t)];
        sum += v * dom.cell_area[static_cast<std::size_t>(t)] / 12.0 *
               (u0 * u0 + u1 * u1 + u2 * u2 + s * s);
    }
    return sum;
}

namespace detail {

// negative pivots of the LDL^T factorization of A - lambda*B = number of
// pencil eigenvalues below lambda
int sturm_count(const std::vector<double>& ad, const std::vector<double>& ao,
                const std::vector<double>& bd, const std::vector<double>& bo, double lambda) {
    const std::size_t n = ad.size();
    int count = 0;
    double prev = 1.0;
    for (std::size_t i = 0; i < n; ++i) {
        double d = ad[i] - lambda * bd[i];
        if (i > 0) {
            const double off = ao[i - 1] - lambda * bo[i - 1];
            d -= off * off / prev;
        }
        if (d == 0.0) d = -1e-300;  // on an eigenvalue: count it below
        if (d < 0.0) ++count;
        prev = d;
    }
    return count;
}

double tridiag_pencil_eigenvalue(const std::vector<double>& ad, const std::vector<double>& ao,
                                 const std::vector<double>& bd, const std::vector<double>& bo,
                                 int k) {
    const int n = static_cast<int>(ad.size());
    require(k >= 1 && k <= n, ErrorCode::invalid_parameter, "eigenvalue index out of range");
    require(ao.size() + 1 == ad.size() && bd.size() == ad.size() &&
                bo.size() + 1 == bd.size(),
            ErrorCode::invalid_parameter, "tridiagonal bands have inconsistent lengths");

    double lo = -1.0, hi = 1.0;
    while (sturm_count(ad, ao, bd, bo, hi) < k) hi *= 2.0;
    while (sturm_count(ad, ao, bd, bo, lo) >= k) lo *= 2.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (hi - lo <= 1e-13 * std::max(1.0, std::abs(mid))) break;
        if (sturm_count(ad, ao, bd, bo, mid) >= k)
            hi = mid;
        else
            lo = mid;
    }
    return 0.5 * (lo + hi);
}

} // namespace detail

DerivativeCheck fd_potential_check(double len, const ScalarField& V, int k, double d_eps,
                                   int cells) {
    require(len > 0.0, ErrorCode::invalid_parameter, "need a positive interval length");
    require(d_eps > 0.0, ErrorCode::invalid_parameter, "need d_eps > 0");
    require(cells > k + 1, ErrorCode::invalid_parameter, "too few cells for this mode");
    require(V.is_poly(), ErrorCode::invalid_parameter,
            "the 1D check needs a polynomial potential");

    const geom::Orthotope line = geom::make_orthotope({len / kPi});
    const EigenSystem sys = orthotope_spectrum(line, k);

    const double h = len / cells;
    const int nd = cells - 1;
    std::vector<double> vm(static_cast<std::size_t>(cells));
    for (int e = 0; e < cells; ++e) vm[static_cast<std::size_t>(e)] = V({(e + 0.5) * h});

    const auto lambda_at = [&](double eps) {
        std::vector<double> ad(static_cast<std::size_t>(nd)), ao(static_cast<std::size_t>(nd - 1));
        std::vector<double> bd(static_cast<std::size_t>(nd)), bo(static_cast<std::size_t>(nd - 1));
        for (int i = 1; i <= nd; ++i) {
            // elements i-1 and i meet at node i; the potential term is the
            // element mass scaled by V at the element midpoint
            ad[static_cast<std::size_t>(i - 1)] =
                2.0 / h + eps * (vm[static_cast<std::size_t>(i - 1)] +
                                 vm[static_cast<std::size_t>(i)]) *
                              h / 3.0;
            bd[static_cast<std::size_t>(i - 1)] = 2.0 * h / 3.0;
            if (i < nd) {
                ao[static_cast<std::size_t>(i - 1)] =
                    -1.0 / h + eps * vm[static_cast<std::size_t>(i)] * h / 6.0;
                bo[static_cast<std::size_t>(i - 1)] = h / 6.0;
            }
        }
        return detail::tridiag_pencil_eigenvalue(ad, ao, bd, bo, k);
    };

    DerivativeCheck chk;
    chk.formula = potential_derivative(sys, V, k);
    chk.fd_slope = (lambda_at(d_eps) - lambda_at(-d_eps)) / (2.0 * d_eps);
    chk.rel_error = std::abs(chk.fd_slope - chk.formula) /
                    std::max(std::abs(chk.formula), 1e-300);
    return chk;
}

DerivativeCheck fd_potential_check(const geom::MeshedDomain& dom, const ScalarField& V, int k,
                                   double d_eps, const FemOptions& opts) {
    require(d_eps > 0.0, ErrorCode::invalid_parameter, "need d_eps > 0");
    if (!V.is_poly())
        require(V.cell_values.size() == dom.triangles.size(), ErrorCode::invalid_parameter,
                "cell value count does not match the mesh");

    const FemMatrices fm = assemble_p1(dom);
    const int nd = static_cast<int>(fm.stiffness.rows());

    std::vector<Eigen::Triplet<double>> tp;
    tp.reserve(static_cast<std::size_t>(dom.num_cells()) * 9);
    for (int t = 0; t < dom.num_cells(); ++t) {
        const auto& tri = dom.triangles[static_cast<std::size_t>(t)];
        const geom::Point2 c = dom.centroid(t);
        const double v = V.is_poly() ? V({c.x, c.y})
                                     : V.cell_values[static_cast<std::size_t>(t)];
        const double area = dom.cell_area[static_cast<std::size_t>(t)];
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                const int di = fm.dof_of_vertex[static_cast<std::size_t>(tri[i])];
                const int dj = fm.dof_of_vertex[static_cast<std::size_t>(tri[j])];
                if (di >= 0 && dj >= 0)
                    tp.emplace_back(di, dj, v * area / 12.0 * (i == j ? 2.0 : 1.0));
            }
    }
    Eigen::SparseMatrix<double> P(nd, nd);
    P.setFromTriplets(tp.begin(), tp.end());

    const auto lambda_at = [&](double eps) {
        const Eigen::SparseMatrix<double> A = fm.stiffness + eps * P;
        return detail::smallest_eigenpairs(A, fm.mass, k, opts)
            .first[static_cast<Eigen::Index>(k - 1)];
    };

    DerivativeCheck chk;
    chk.formula = potential_derivative(fem_spectrum(dom, k, opts), V, k);
    chk.fd_slope = (lambda_at(d_eps) - lambda_at(-d_eps)) / (2.0 * d_eps);
    chk.rel_error = std::abs(chk.fd_slope - chk.formula) /
                    std::max(std::abs(chk.formula), 1e-300);
    return chk;
}

} // namespace speclab::spectral
