#include <cmath>

#include "speclab/eigensolver.hpp"
#include "speclab/errors.hpp"

namespace speclab::spectral {

namespace {

double eval_orthotope(const OrthotopeBasis& basis, const OrthotopeMode& mode,
                      const PointXd& p) {
    const auto& mu = basis.domain.mu;
    require(p.size() == mu.size(), ErrorCode::invalid_parameter,
            "point dimension does not match the domain");
    double v = mode.norm_constant;
    for (std::size_t i = 0; i < mu.size(); ++i) {
        if (p[i] < 0.0 || p[i] > mu[i] * M_PI) return 0.0;  // extension by zero
        v *= std::sin(mode.K[i] * p[i] / mu[i]);
    }
    return v;
}

double eval_mesh(const MeshBasis& basis, int col, const PointXd& p) {
    require(p.size() == 2, ErrorCode::invalid_parameter, "mesh points are two-dimensional");
    const auto& m = basis.mesh;
    const geom::Point2 q{p[0], p[1]};
    for (int t = 0; t < m.num_cells(); ++t) {
        const auto& tri = m.triangles[t];
        const geom::Point2 a = m.vertices[tri[0]];
        const geom::Point2 b = m.vertices[tri[1]];
        const geom::Point2 c = m.vertices[tri[2]];
        const double twice = 2.0 * m.cell_area[t];
        const double wa = ((b.x - q.x) * (c.y - q.y) - (c.x - q.x) * (b.y - q.y)) / twice;
        const double wb = ((c.x - q.x) * (a.y - q.y) - (a.x - q.x) * (c.y - q.y)) / twice;
        const double wc = 1.0 - wa - wb;
        if (wa >= -1e-9 && wb >= -1e-9 && wc >= -1e-9)
            return wa * basis.nodal(tri[0], col) + wb * basis.nodal(tri[1], col) +
                   wc * basis.nodal(tri[2], col);
    }
    return 0.0;  // outside the mesh: extension by zero
}

} // namespace

std::vector<double> evaluate_eigenfunction(const EigenSystem& sys, int index,
                                           const std::vector<PointXd>& points) {
    require(index >= 1 && index <= sys.n(), ErrorCode::invalid_parameter,
            "eigenfunction index out of range (1-based)");
    std::vector<double> out;
    out.reserve(points.size());
    if (const auto* ob = sys.orthotope()) {
        const auto& mode = ob->modes[index - 1];
        for (const auto& p : points) out.push_back(eval_orthotope(*ob, mode, p));
    } else {
        const auto* mb = sys.mesh();
        for (const auto& p : points) out.push_back(eval_mesh(*mb, index - 1, p));
    }
    return out;
}

} // namespace speclab::spectral
