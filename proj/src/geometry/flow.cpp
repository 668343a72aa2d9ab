#include <array>
#include <cmath>
#include <sstream>

#include <boost/numeric/odeint.hpp>

#include "speclab/errors.hpp"
#include "speclab/geometry.hpp"

namespace speclab::geom {

namespace {
using State = std::array<double, 2>;

void check_positive_areas(const MeshedDomain& m, const std::string& what) {
    for (std::size_t t = 0; t < m.cell_area.size(); ++t)
        require(m.cell_area[t] > 0.0, ErrorCode::deformation_invalid,
                what + " inverted triangle " + std::to_string(t) +
                    "; remesh the domain at this parameter");
}

} // namespace

Point2 flow_point(const VectorField2D& field, Point2 start, double t) {
    require(std::isfinite(t), ErrorCode::invalid_parameter, "flow time must be finite");
    if (t == 0.0) return start;
    namespace ode = boost::numeric::odeint;
    State x{start.x, start.y};
    auto rhs = [&field](const State& s, State& dxdt, double) {
        const auto v = field.eval(s[0], s[1]);
        dxdt[0] = v[0];
        dxdt[1] = v[1];
    };
    auto stepper = ode::make_controlled(1e-10, 1e-10, ode::runge_kutta_dopri5<State>());
    const double dt0 = t / 128.0;
    ode::integrate_adaptive(stepper, rhs, x, 0.0, t, dt0);
    return {x[0], x[1]};
}

MeshedDomain flow_deform(const MeshedDomain& dom, const VectorField2D& field, double t) {
    dom.validate(false);
    MeshedDomain out = dom;
    if (t == 0.0) return out;
    for (auto& v : out.vertices) v = flow_point(field, v, t);
    out.rebuild_metrics();
    check_positive_areas(out, "flow_deform:");
    out.validate(false);
    return out;
}

void DeformationPath::validate() const {
    require(!t_grid.empty() && t_grid.size() == meshes.size(), ErrorCode::invalid_parameter,
            "deformation path arrays out of sync");
    require(t_grid.front() == 0.0, ErrorCode::invalid_parameter,
            "deformation path must start at t=0");
    for (std::size_t i = 1; i < t_grid.size(); ++i)
        require(t_grid[i] > t_grid[i - 1], ErrorCode::invalid_parameter,
                "deformation path t_grid must be strictly increasing");
    for (std::size_t i = 1; i < meshes.size(); ++i)
        require(meshes[i].triangles == meshes[0].triangles &&
                    meshes[i].num_vertices() == meshes[0].num_vertices(),
                ErrorCode::incompatible_mesh, "deformation path connectivity changed mid-path");
}

DeformationPath interpolation_path(const MeshedDomain& dom0, const MeshedDomain& dom1,
                                   int steps) {
    require(steps >= 1, ErrorCode::invalid_parameter, "interpolation needs steps >= 1");
    dom0.validate(false);
    require(dom0.num_vertices() == dom1.num_vertices() && dom0.triangles == dom1.triangles,
            ErrorCode::incompatible_mesh,
            "interpolation endpoints must share vertex count and connectivity");
    DeformationPath path;
    path.generator = "interpolation";
    for (int s = 0; s <= steps; ++s) {
        const double t = static_cast<double>(s) / steps;
        MeshedDomain m = dom0;
        m.h_target = 0.0;
        for (int v = 0; v < m.num_vertices(); ++v)
            m.vertices[v] = (1.0 - t) * dom0.vertices[v] + t * dom1.vertices[v];
        m.rebuild_metrics();
        for (double a : m.cell_area)
            require(a > 0.0, ErrorCode::deformation_invalid,
                    "interpolation path inverts cells at t = " + std::to_string(t));
        m.validate(false);
        path.t_grid.push_back(t);
        path.meshes.push_back(std::move(m));
    }
    path.validate();
    return path;
}

DeformationPath flow_path(const MeshedDomain& dom, const VectorField2D& field,
                          double t_final, int steps) {
    require(steps >= 1, ErrorCode::invalid_parameter, "flow path needs steps >= 1");
    require(t_final != 0.0 && std::isfinite(t_final), ErrorCode::invalid_parameter,
            "flow path needs a nonzero finite final time");
    dom.validate(false);
    DeformationPath path;
    std::ostringstream os;
    os << "flow(" << field.descriptor << ", t_final=" << t_final << ")";
    path.generator = os.str();
    path.t_grid.push_back(0.0);
    path.meshes.push_back(dom);
    const double dt = t_final / steps;
    for (int s = 1; s <= steps; ++s) {
        path.meshes.push_back(flow_deform(path.meshes.back(), field, dt));
        path.t_grid.push_back(static_cast<double>(s) / steps);
    }
    path.validate();
    return path;
}

} // namespace speclab::geom
