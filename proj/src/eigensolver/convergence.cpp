#include <cmath>
#include <functional>
#include <limits>

#include "speclab/eigensolver.hpp"
#include "speclab/errors.hpp"

namespace speclab::spectral {

namespace {

constexpr double kBesselZero1 = 2.404825557695773;   // first zero of J0
constexpr double kBesselJ1AtZero1 = 0.5191474972894669;  // J1 at that zero

} // namespace

ConvergenceTable convergence_study(const geom::DomainSpec& target,
                                   const std::vector<double>& h_list, int n) {
    require(!h_list.empty(), ErrorCode::invalid_parameter, "empty h list");
    require(n >= 1, ErrorCode::invalid_parameter, "need n >= 1 modes");

    // closed-form oracle: eigenvalues plus pointwise eigenfunctions
    std::vector<double> lam;
    std::vector<std::function<double(geom::Point2)>> phi;
    if (target.kind == geom::DomainSpec::Kind::orthotope) {
        require(target.ortho.dim() == 2, ErrorCode::invalid_parameter,
                "convergence target orthotope must be two-dimensional");
        EigenSystem exact = orthotope_spectrum(target.ortho, n);
        for (int k = 0; k < n; ++k) {
            if (k + 1 < n)
                require(!exact.near_degenerate[k], ErrorCode::degenerate_cluster,
                        "target spectrum is degenerate within the first n modes");
            lam.push_back(exact.lambdas[k]);
            const auto mode = exact.orthotope()->modes[k];
            const auto dom = target.ortho;
            phi.push_back([mode, dom](geom::Point2 p) {
                return mode.norm_constant * std::sin(mode.K[0] * p.x / dom.mu[0]) *
                       std::sin(mode.K[1] * p.y / dom.mu[1]);
            });
        }
    } else if (target.kind == geom::DomainSpec::Kind::disk) {
        require(n == 1, ErrorCode::degenerate_cluster,
                "disk eigenvalues beyond the first are degenerate");
        lam.push_back(kBesselZero1 * kBesselZero1);
        phi.push_back([](geom::Point2 p) {
            const double r = std::hypot(p.x, p.y);
            return std::cyl_bessel_j(0, kBesselZero1 * r) /
                   (std::sqrt(M_PI) * kBesselJ1AtZero1);
        });
    } else {
        fail(ErrorCode::invalid_parameter,
             "convergence target must be an orthotope or the disk");
    }

    ConvergenceTable table;
    for (double h : h_list) {
        geom::MeshedDomain mesh = geom::mesh_domain(target, h);
        EigenSystem sys = fem_spectrum(mesh, n);
        const auto& nodal = sys.mesh()->nodal;

        ConvergenceRow row;
        row.h = h;
        for (int k = 0; k < n; ++k) {
            row.lambda_err.push_back(std::abs(sys.lambdas[k] - lam[k]) / lam[k]);
            // align the discrete sign with the oracle before taking the sup
            double dot = 0.0;
            for (int v = 0; v < mesh.num_vertices(); ++v)
                dot += nodal(v, k) * phi[k](mesh.vertices[v]);
            const double s = dot >= 0 ? 1.0 : -1.0;
            double sup = 0.0;
            for (int v = 0; v < mesh.num_vertices(); ++v)
                sup = std::max(sup, std::abs(s * nodal(v, k) - phi[k](mesh.vertices[v])));
            row.sup_err.push_back(sup);
        }
        table.rows.push_back(std::move(row));
    }

    // least-squares slope of log(err) against log(h), one order per mode
    const int rows = static_cast<int>(table.rows.size());
    for (int k = 0; k < n; ++k) {
        double mx = 0.0, my = 0.0;
        for (const auto& r : table.rows) {
            mx += std::log(r.h);
            my += std::log(std::max(r.lambda_err[k], 1e-300));
        }
        mx /= rows;
        my /= rows;
        double sxx = 0.0, sxy = 0.0;
        for (const auto& r : table.rows) {
            const double dx = std::log(r.h) - mx;
            sxx += dx * dx;
            sxy += dx * (std::log(std::max(r.lambda_err[k], 1e-300)) - my);
        }
        table.lambda_order.push_back(sxx > 0 ? sxy / sxx
                                             : std::numeric_limits<double>::quiet_NaN());
    }
    return table;
}

} // namespace speclab::spectral
