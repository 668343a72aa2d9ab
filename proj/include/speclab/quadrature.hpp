#pragma once

#include <functional>
#include <vector>

namespace speclab::quad {

// Closed-form building blocks for the separable integrals that dominate the
// closed-form code paths (mode normalization, Gram entries, coupling and
// derivative integrals against polynomial fields). All are exact up to
// rounding; no sampling error.

// integral over [a,b] of cos(m x); m == 0 allowed
double integral_cos(double m, double a, double b);

// integral over [a,b] of x^p cos(m x) resp. x^p sin(m x), integer p >= 0
double integral_xp_cos(int p, double m, double a, double b);
double integral_xp_sin(int p, double m, double a, double b);

// integral over [a,b] of x^p sin(k1 x) sin(k2 x)
double integral_xp_sin_sin(int p, double k1, double k2, double a, double b);
inline double integral_sin_sin(double k1, double k2, double a, double b) {
    return integral_xp_sin_sin(0, k1, k2, a, b);
}

// integral over [a,b] of sin^2(k1 x) sin^2(k2 x)
double integral_sin2_sin2(double k1, double k2, double a, double b);

// Gauss-Legendre nodes/weights on [-1,1]; cached per order
struct GaussRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};
const GaussRule& gauss_legendre(int order);

// composite Gauss-Legendre(16) over [a,b] split into panels
double integrate(const std::function<double(double)>& f, double a, double b,
                 int panels = 32);

} // namespace speclab::quad
