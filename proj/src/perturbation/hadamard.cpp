#include <cmath>
#include <map>
#include <utility>

#include "speclab/errors.hpp"
#include "speclab/perturbation.hpp"
#include "speclab/quadrature.hpp"

namespace speclab::spectral {

namespace {

constexpr double kPi = 3.14159265358979323846;

bool in_cluster(const EigenSystem& sys, int l) {
    // l is 1-based; near_degenerate[k] ties mode k+1 to mode k+2
    if (sys.near_degenerate[static_cast<std::size_t>(l - 1)]) return true;
    if (l >= 2 && sys.near_degenerate[static_cast<std::size_t>(l - 2)]) return true;
    return false;
}

// triangle adjacent to each boundary edge, keyed by the sorted vertex pair
std::map<std::pair<int, int>, int> boundary_triangles(const geom::MeshedDomain& dom) {
    std::map<std::pair<int, int>, int> adj;
    for (int t = 0; t < dom.num_cells(); ++t) {
        const auto& tri = dom.triangles[t];
        for (int e = 0; e < 3; ++e) {
            const int a = tri[e];
            const int b = tri[(e + 1) % 3];
            if (dom.on_boundary[a] && dom.on_boundary[b])
                adj[{std::min(a, b), std::max(a, b)}] = t;
        }
    }
    return adj;
}

} // namespace

BoundaryPerturbation orthotope_face(int dim, int side, double speed) {
    require(dim >= 0, ErrorCode::invalid_parameter, "face dimension must be nonnegative");
    require(side == 0 || side == 1, ErrorCode::invalid_parameter, "face side is 0 or 1");
    BoundaryPerturbation p;
    p.face_dim = dim;
    p.face_side = side;
    p.speed = speed;
    p.descriptor = "face x" + std::to_string(dim + 1) + (side ? " = top" : " = 0") +
                   ", speed " + std::to_string(speed);
    return p;
}

BoundaryPerturbation mesh_boundary(const geom::MeshedDomain& dom, std::vector<int> edges,
                                   double speed) {
    BoundaryPerturbation p;
    const int ne = static_cast<int>(dom.boundary_edges.size());
    for (int e : edges) {
        require(e >= 0 && e < ne, ErrorCode::invalid_parameter,
                "boundary edge index out of range");
        p.weights.push_back(dom.boundary_edges[static_cast<std::size_t>(e)].length);
    }
    p.edges = std::move(edges);
    p.speed = speed;
    p.descriptor = "mesh boundary, " + std::to_string(p.edges.size()) + " edges, speed " +
                   std::to_string(speed);
    return p;
}

BoundaryPerturbation mesh_boundary_field(const geom::MeshedDomain& dom,
                                         const geom::VectorField2D& field) {
    BoundaryPerturbation p;
    for (std::size_t e = 0; e < dom.boundary_edges.size(); ++e) {
        const auto& be = dom.boundary_edges[e];
        p.edges.push_back(static_cast<int>(e));
        p.weights.push_back(be.length);
        const geom::Point2 mid = 0.5 * (dom.vertices[be.a] + dom.vertices[be.b]);
        const auto v = field.eval(mid.x, mid.y);
        p.edge_speeds.push_back(v[0] * be.nx + v[1] * be.ny);
    }
    p.descriptor = "mesh boundary under " + field.descriptor;
    return p;
}

double hadamard_derivative(const EigenSystem& sys, const BoundaryPerturbation& pert, int l) {
    require(l >= 1 && l <= sys.n(), ErrorCode::invalid_parameter, "mode index out of range");

    if (const OrthotopeBasis* ob = sys.orthotope()) {
        const geom::Orthotope& dom = ob->domain;
        const int d = pert.face_dim;
        require(d >= 0 && d < dom.dim(), ErrorCode::invalid_parameter,
                "perturbation does not name a face of this orthotope");
        const OrthotopeMode& mode = ob->modes[static_cast<std::size_t>(l - 1)];

        // (d phi / d nu)^2 on the face x_d in {0, mu_d pi} is
        // norm^2 (k_d/mu_d)^2 prod_{i != d} sin^2(k_i x_i / mu_i): the cos^2
        // factor in the normal slope is 1 at both walls
        const double mu_d = dom.mu[static_cast<std::size_t>(d)];
        const double k_d = mode.K[static_cast<std::size_t>(d)];
        const double slope2 = mode.norm_constant * mode.norm_constant * (k_d / mu_d) *
                              (k_d / mu_d);

        if (!pert.speed_fn) {
            double face = 1.0;  // integral of prod sin^2 over the face
            for (int i = 0; i < dom.dim(); ++i)
                if (i != d) face *= dom.side(i) / 2.0;
            return -pert.speed * slope2 * face;
        }
        require(dom.dim() == 2, ErrorCode::invalid_parameter,
                "sampled face speeds are supported on plane orthotopes");
        const int o = 1 - d;
        const double mu_o = dom.mu[static_cast<std::size_t>(o)];
        const double k_o = mode.K[static_cast<std::size_t>(o)];
        const double xd = pert.face_side ? dom.side(d) : 0.0;
        const auto integrand = [&](double x) {
            PointXd p(2);
            p[static_cast<std::size_t>(d)] = xd;
            p[static_cast<std::size_t>(o)] = x;
            const double s = std::sin(k_o * x / mu_o);
            return pert.speed_fn(p) * slope2 * s * s;
        };
        return -quad::integrate(integrand, 0.0, dom.side(o));
    }

    const MeshBasis& mb = *sys.mesh();
    require(!in_cluster(sys, l), ErrorCode::degenerate_cluster,
            "boundary derivative needs an isolated eigenvalue; mode " + std::to_string(l) +
                " sits in a near-degenerate cluster");

    const geom::MeshedDomain& dom = mb.mesh;
    const auto adj = boundary_triangles(dom);
    require(pert.edge_speeds.empty() ||
                pert.edge_speeds.size() == pert.edges.size(),
            ErrorCode::invalid_parameter, "edge speed count does not match the edge list");

    double sum = 0.0;
    for (std::size_t idx = 0; idx < pert.edges.size(); ++idx) {
        const int e = pert.edges[idx];
        require(e >= 0 && e < static_cast<int>(dom.boundary_edges.size()),
                ErrorCode::invalid_parameter, "boundary edge index out of range");
        const auto& be = dom.boundary_edges[static_cast<std::size_t>(e)];
        const auto it = adj.find({std::min(be.a, be.b), std::max(be.a, be.b)});
        require(it != adj.end(), ErrorCode::mesh_invalid,
                "boundary edge has no adjacent triangle");

        const auto& tri = dom.triangles[static_cast<std::size_t>(it->second)];
        const geom::Point2 p0 = dom.vertices[tri[0]];
        const geom::Point2 p1 = dom.vertices[tri[1]];
        const geom::Point2 p2 = dom.vertices[tri[2]];
        const double area = dom.cell_area[static_cast<std::size_t>(it->second)];
        const double bx[3] = {p1.y - p2.y, p2.y - p0.y, p0.y - p1.y};
        const double by[3] = {p2.x - p1.x, p0.x - p2.x, p1.x - p0.x};
        double gx = 0.0, gy = 0.0;
        for (int i = 0; i < 3; ++i) {
            const double u = mb.nodal(tri[i], l - 1);
            gx += u * bx[i] / (2.0 * area);
            gy += u * by[i] / (2.0 * area);
        }
        const double gn = gx * be.nx + gy * be.ny;

        double vn = pert.speed;
        if (!pert.edge_speeds.empty()) {
            vn = pert.edge_speeds[idx];
        } else if (pert.speed_fn) {
            const geom::Point2 mid = 0.5 * (dom.vertices[be.a] + dom.vertices[be.b]);
            vn = pert.speed_fn({mid.x, mid.y});
        }
        sum += gn * gn * vn * be.length;
    }
    return -sum;
}

DerivativeCheck fd_shape_check(const geom::Orthotope& ortho, int face_dim, int face_side,
                               double speed, int l, double dt) {
    require(dt > 0.0, ErrorCode::invalid_parameter, "need dt > 0");
    require(face_dim >= 0 && face_dim < ortho.dim(), ErrorCode::invalid_parameter,
            "face dimension out of range");
    const double mu_d = ortho.mu[static_cast<std::size_t>(face_dim)];
    require(mu_d * kPi > dt * std::abs(speed), ErrorCode::invalid_parameter,
            "dt collapses the domain");

    const EigenSystem sys = orthotope_spectrum(ortho, l);
    const std::vector<int>& K = sys.orthotope()->modes[static_cast<std::size_t>(l - 1)].K;

    // branch lambda_K(t) after moving the face outward for time t
    const auto branch = [&](double t) {
        double lam = 0.0;
        for (int i = 0; i < ortho.dim(); ++i) {
            double mu = ortho.mu[static_cast<std::size_t>(i)];
            if (i == face_dim) mu += t * speed / kPi;
            const double r = K[static_cast<std::size_t>(i)] / mu;
            lam += r * r;
        }
        return lam;
    };

    DerivativeCheck chk;
    chk.formula = hadamard_derivative(sys, orthotope_face(face_dim, face_side, speed), l);
    chk.fd_slope = (branch(dt) - branch(-dt)) / (2.0 * dt);
    chk.rel_error = std::abs(chk.fd_slope - chk.formula) /
                    std::max(std::abs(chk.formula), 1e-300);
    return chk;
}

DerivativeCheck fd_shape_check(const geom::MeshedDomain& dom, const geom::VectorField2D& field,
                               int l, double dt, const FemOptions& opts) {
    require(dt > 0.0, ErrorCode::invalid_parameter, "need dt > 0");

    const EigenSystem sys0 = fem_spectrum(dom, l, opts);
    const EigenSystem sysm = fem_spectrum(geom::flow_deform(dom, field, -dt), l, opts);
    const EigenSystem sysp = fem_spectrum(geom::flow_deform(dom, field, dt), l, opts);
    require(!in_cluster(sys0, l) && !in_cluster(sysm, l) && !in_cluster(sysp, l),
            ErrorCode::degenerate_cluster,
            "mode " + std::to_string(l) +
                " is not isolated across [-dt, dt]; a crossing would corrupt the slope");

    DerivativeCheck chk;
    chk.formula = hadamard_derivative(sys0, mesh_boundary_field(dom, field), l);
    chk.fd_slope = (sysp.lambdas[static_cast<std::size_t>(l - 1)] -
                    sysm.lambdas[static_cast<std::size_t>(l - 1)]) /
                   (2.0 * dt);
    chk.rel_error = std::abs(chk.fd_slope - chk.formula) /
                    std::max(std::abs(chk.formula), 1e-300);
    return chk;
}

} // namespace speclab::spectral
