#pragma once

#include <string>
#include <vector>

#include "speclab/eigensolver.hpp"

namespace speclab::spectral {

// scalar potential / weight on a domain: either a polynomial (sum of
// monomials c * prod x_i^{p_i}) or per-cell samples on a mesh
struct ScalarField {
    struct Term {
        double c = 0.0;
        std::vector<int> powers;
    };
    std::vector<Term> terms;
    std::vector<double> cell_values;  // when set, the field lives on mesh cells
    std::string descriptor;

    bool is_poly() const { return cell_values.empty(); }
    double operator()(const PointXd& p) const;  // polynomial evaluation
};

ScalarField constant_field(double c);
ScalarField coordinate_field(int axis, int dim);  // W(x) = x_axis
ScalarField poly_field(std::vector<ScalarField::Term> terms, std::string descriptor);
ScalarField cellwise_field(std::vector<double> values, std::string descriptor);

// largest |W| over the domain: exact-ish sampling for polynomials (dense grid
// over the box hull / mesh vertices and centroids), max |value| for cell data
double sup_norm(const ScalarField& f, const geom::Orthotope& dom);
double sup_norm(const ScalarField& f, const geom::MeshedDomain& dom);

} // namespace speclab::spectral
