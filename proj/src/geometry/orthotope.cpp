#include <cmath>
#include <numbers>

#include "speclab/errors.hpp"
#include "speclab/geometry.hpp"
#include "speclab/surd.hpp"

namespace speclab::geom {

double Orthotope::side(int i) const { return mu.at(i) * std::numbers::pi; }

double Orthotope::volume() const {
    double v = 1.0;
    for (double m : mu) v *= m * std::numbers::pi;
    return v;
}

Orthotope make_orthotope(std::vector<double> mu) {
    require(!mu.empty(), ErrorCode::invalid_parameter, "orthotope needs at least one side");
    for (double m : mu)
        require(m > 0.0 && std::isfinite(m), ErrorCode::invalid_parameter,
                "orthotope side lengths must be positive finite");
    Orthotope o;
    o.mu = std::move(mu);
    return o;
}

Orthotope make_orthotope_exact(std::vector<double> mu, std::int64_t D,
                               std::vector<ExactInvMuSq> inv) {
    Orthotope o = make_orthotope(std::move(mu));
    require(inv.size() == o.mu.size(), ErrorCode::invalid_parameter,
            "exact metadata must cover every dimension");
    require(D == 0 || (D > 1 && !surd::is_perfect_square(D)), ErrorCode::invalid_parameter,
            "exact radicand must be 0 or a non-square integer > 1");
    const double rad = D > 0 ? std::sqrt(static_cast<double>(D)) : 0.0;
    for (std::size_t i = 0; i < inv.size(); ++i) {
        if (D == 0)
            require(inv[i].v == 0, ErrorCode::invalid_parameter,
                    "radicand coefficient given without a radicand");
        const double claimed = static_cast<double>(inv[i].u) + static_cast<double>(inv[i].v) * rad;
        const double actual = 1.0 / (o.mu[i] * o.mu[i]);
        require(claimed > 0 && std::abs(claimed - actual) <= 1e-9 * actual,
                ErrorCode::invalid_parameter,
                "exact 1/mu^2 metadata disagrees with floating mu");
    }
    o.exact_D = D;
    o.exact_inv = std::move(inv);
    return o;
}

} // namespace speclab::geom
