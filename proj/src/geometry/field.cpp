#include <cmath>
#include <sstream>

#include "speclab/errors.hpp"
#include "speclab/geometry.hpp"

namespace speclab::geom {

namespace {
// falling C^2 cutoff: 1 at u<=0, 0 at u>=1, quintic smoothstep between
double cutoff(double u) {
    if (u <= 0.0) return 1.0;
    if (u >= 1.0) return 0.0;
    return 1.0 - u * u * u * (10.0 + u * (-15.0 + 6.0 * u));
}
} // namespace

VectorField2D squashing_field(double rho) {
    require(rho > 1.0 && std::isfinite(rho), ErrorCode::invalid_parameter,
            "squashing field requires rho > 1");
    VectorField2D field;
    field.support_radius = std::sqrt(rho + 1.0);
    std::ostringstream os;
    os << "squashing(rho=" << rho << ")";
    field.descriptor = os.str();
    field.eval = [rho](double x1, double x2) -> std::array<double, 2> {
        const double r2 = x1 * x1 + x2 * x2;
        if (r2 >= rho + 1.0) return {0.0, 0.0};
        const double g = cutoff(r2 - rho);  // 1 inside r^2<=rho
        return {g * x1 * x2, g * (x2 * x2 - 0.5 * (r2 + 1.0))};
    };
    return field;
}

} // namespace speclab::geom
