#include "speclab/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>

#include "speclab/errors.hpp"

namespace speclab::quad {

double integral_cos(double m, double a, double b) {
    if (m == 0.0) return b - a;
    return (std::sin(m * b) - std::sin(m * a)) / m;
}

namespace {
double integral_sin0(double m, double a, double b) {
    if (m == 0.0) return 0.0;
    return (std::cos(m * a) - std::cos(m * b)) / m;
}

double xp_integral(int p, double a, double b) {
    return (std::pow(b, p + 1) - std::pow(a, p + 1)) / (p + 1);
}

// The by-parts recursion multiplies roundoff by ~p!/m^p, so for small
// |m|*max|x| both routines switch to the alternating power series in m.
bool series_regime(double m, double a, double b) {
    return std::abs(m) * std::max(std::abs(a), std::abs(b)) < 0.5;
}

double xp_cos_series(int p, double m, double a, double b) {
    double acc = 0.0, mpow = 1.0, fact = 1.0;
    for (int j = 0; j < 40; ++j) {
        if (j > 0) {
            mpow *= m * m;
            fact *= (2.0 * j - 1.0) * (2.0 * j);
        }
        const double term = (j % 2 ? -1.0 : 1.0) * mpow / fact *
                            xp_integral(p + 2 * j, a, b);
        acc += term;
        if (std::abs(term) < 1e-17 * (1.0 + std::abs(acc))) break;
    }
    return acc;
}

double xp_sin_series(int p, double m, double a, double b) {
    double acc = 0.0, mpow = m, fact = 1.0;
    for (int j = 0; j < 40; ++j) {
        if (j > 0) {
            mpow *= m * m;
            fact *= (2.0 * j) * (2.0 * j + 1.0);
        }
        const double term = (j % 2 ? -1.0 : 1.0) * mpow / fact *
                            xp_integral(p + 2 * j + 1, a, b);
        acc += term;
        if (std::abs(term) < 1e-17 * (1.0 + std::abs(acc))) break;
    }
    return acc;
}
} // namespace

// integration by parts, descending in p; exact for exact-zero m
double integral_xp_cos(int p, double m, double a, double b) {
    require(p >= 0, ErrorCode::invalid_parameter, "integral_xp_cos: p must be >= 0");
    if (m == 0.0) return xp_integral(p, a, b);
    if (p > 0 && series_regime(m, a, b)) return xp_cos_series(p, m, a, b);
    if (p == 0) return integral_cos(m, a, b);
    const double boundary =
        (std::pow(b, p) * std::sin(m * b) - std::pow(a, p) * std::sin(m * a)) / m;
    return boundary - (p / m) * integral_xp_sin(p - 1, m, a, b);
}

double integral_xp_sin(int p, double m, double a, double b) {
    require(p >= 0, ErrorCode::invalid_parameter, "integral_xp_sin: p must be >= 0");
    if (m == 0.0) return 0.0;
    if (p > 0 && series_regime(m, a, b)) return xp_sin_series(p, m, a, b);
    if (p == 0) return integral_sin0(m, a, b);
    const double boundary =
        (std::pow(a, p) * std::cos(m * a) - std::pow(b, p) * std::cos(m * b)) / m;
    return boundary + (p / m) * integral_xp_cos(p - 1, m, a, b);
}

double integral_xp_sin_sin(int p, double k1, double k2, double a, double b) {
    // sin(k1 x) sin(k2 x) = (cos((k1-k2)x) - cos((k1+k2)x)) / 2
    return 0.5 * (integral_xp_cos(p, k1 - k2, a, b) - integral_xp_cos(p, k1 + k2, a, b));
}

double integral_sin2_sin2(double k1, double k2, double a, double b) {
    // (1-cos 2k1 x)(1-cos 2k2 x)/4 with cos*cos expanded by product-to-sum
    return 0.25 * ((b - a) - integral_cos(2 * k1, a, b) - integral_cos(2 * k2, a, b) +
                   0.5 * integral_cos(2 * (k1 - k2), a, b) +
                   0.5 * integral_cos(2 * (k1 + k2), a, b));
}

const GaussRule& gauss_legendre(int order) {
    require(order >= 1 && order <= 64, ErrorCode::invalid_parameter,
            "gauss_legendre: order out of range");
    static std::map<int, GaussRule> cache;
    static std::mutex mtx;
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(order);
    if (it != cache.end()) return it->second;

    GaussRule rule;
    rule.nodes.resize(order);
    rule.weights.resize(order);
    const int n = order;
    for (int i = 0; i < (n + 1) / 2; ++i) {
        // Newton on P_n with the Chebyshev-like initial guess
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = x;
            if (n == 1) p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            const double pn = (n == 1) ? x : p1;
            pp = n * (x * pn - p0) / (x * x - 1.0);
            const double dx = pn / pp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        rule.nodes[i] = -x;
        rule.nodes[n - 1 - i] = x;
        const double w = 2.0 / ((1.0 - x * x) * pp * pp);
        rule.weights[i] = w;
        rule.weights[n - 1 - i] = w;
    }
    return cache.emplace(order, std::move(rule)).first->second;
}

double integrate(const std::function<double(double)>& f, double a, double b,
                 int panels) {
    require(panels >= 1, ErrorCode::invalid_parameter, "integrate: panels must be >= 1");
    const GaussRule& rule = gauss_legendre(16);
    const double hp = (b - a) / panels;
    double total = 0.0;
    for (int p = 0; p < panels; ++p) {
        const double lo = a + p * hp;
        const double mid = lo + 0.5 * hp;
        double acc = 0.0;
        for (std::size_t i = 0; i < rule.nodes.size(); ++i)
            acc += rule.weights[i] * f(mid + 0.5 * hp * rule.nodes[i]);
        total += 0.5 * hp * acc;
    }
    return total;
}

} // namespace speclab::quad
