#include "speclab/fields.hpp"

#include <cmath>
#include <utility>

#include "speclab/errors.hpp"

namespace speclab::spectral {

double ScalarField::operator()(const PointXd& p) const {
    require(is_poly(), ErrorCode::invalid_parameter,
            "cell-sampled field has no pointwise evaluation");
    double sum = 0.0;
    for (const auto& t : terms) {
        require(t.powers.size() <= p.size(), ErrorCode::invalid_parameter,
                "field term has more variables than the evaluation point");
        double mono = t.c;
        for (std::size_t i = 0; i < t.powers.size(); ++i) {
            for (int e = 0; e < t.powers[i]; ++e) mono *= p[i];
        }
        sum += mono;
    }
    return sum;
}

ScalarField constant_field(double c) {
    ScalarField f;
    f.terms.push_back({c, {}});
    f.descriptor = "const " + std::to_string(c);
    return f;
}

ScalarField coordinate_field(int axis, int dim) {
    require(axis >= 0 && axis < dim, ErrorCode::invalid_parameter, "coordinate axis out of range");
    ScalarField f;
    std::vector<int> pw(static_cast<std::size_t>(dim), 0);
    pw[static_cast<std::size_t>(axis)] = 1;
    f.terms.push_back({1.0, pw});
    f.descriptor = "x" + std::to_string(axis + 1);
    return f;
}

ScalarField poly_field(std::vector<ScalarField::Term> terms, std::string descriptor) {
    ScalarField f;
    f.terms = std::move(terms);
    f.descriptor = std::move(descriptor);
    return f;
}

ScalarField cellwise_field(std::vector<double> values, std::string descriptor) {
    ScalarField f;
    f.cell_values = std::move(values);
    f.descriptor = std::move(descriptor);
    return f;
}

double sup_norm(const ScalarField& f, const geom::Orthotope& dom) {
    require(f.is_poly(), ErrorCode::invalid_parameter,
            "cell-sampled field needs a mesh, not an orthotope");
    const int d = dom.dim();
    const int per_axis = 33;
    std::vector<int> idx(static_cast<std::size_t>(d), 0);
    PointXd p(static_cast<std::size_t>(d));
    double best = 0.0;
    while (true) {
        for (int i = 0; i < d; ++i)
            p[static_cast<std::size_t>(i)] = dom.side(i) * idx[static_cast<std::size_t>(i)] / (per_axis - 1);
        best = std::max(best, std::abs(f(p)));
        int carry = 0;
        while (carry < d && ++idx[static_cast<std::size_t>(carry)] == per_axis) {
            idx[static_cast<std::size_t>(carry)] = 0;
            ++carry;
        }
        if (carry == d) break;
    }
    return best;
}

double sup_norm(const ScalarField& f, const geom::MeshedDomain& dom) {
    double best = 0.0;
    if (!f.is_poly()) {
        require(f.cell_values.size() == dom.triangles.size(), ErrorCode::invalid_parameter,
                "cell value count does not match the mesh");
        for (double v : f.cell_values) best = std::max(best, std::abs(v));
        return best;
    }
    for (const auto& v : dom.vertices) best = std::max(best, std::abs(f({v.x, v.y})));
    for (std::size_t t = 0; t < dom.triangles.size(); ++t) {
        const auto c = dom.centroid(static_cast<int>(t));
        best = std::max(best, std::abs(f({c.x, c.y})));
    }
    return best;
}

} // namespace speclab::spectral
