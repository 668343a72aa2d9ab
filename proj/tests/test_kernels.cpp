#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "speclab/errors.hpp"
#include "speclab/kernels.hpp"

using namespace speclab;

namespace {

std::vector<double> random_vec(std::size_t n, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<double> v(n);
    for (auto& x : v) x = u(rng);
    return v;
}

// reassociation-aware tolerance: scale by the sum of term magnitudes
double red_tol(const std::vector<double>& mags) {
    double m = 0.0;
    for (double v : mags) m += std::abs(v);
    return 1e-13 * m + 1e-300;
}

} // namespace

TEST_CASE("scalar and avx2 reductions agree on random data") {
    if (!kernels::supported(kernels::Backend::avx2)) {
        MESSAGE("avx2 unavailable; scalar-only build");
        return;
    }
    std::mt19937_64 rng(20240817);
    for (std::size_t n : {0u, 1u, 3u, 4u, 7u, 8u, 9u, 31u, 100u, 1000u, 1023u}) {
        auto w = random_vec(n, rng);
        auto x = random_vec(n, rng);
        auto y = random_vec(n, rng);

        std::vector<double> terms(n);
        for (std::size_t i = 0; i < n; ++i) terms[i] = x[i];
        CHECK(std::abs(kernels::scalar::sum(x.data(), n) -
                       kernels::avx2::sum(x.data(), n)) <= red_tol(terms));

        for (std::size_t i = 0; i < n; ++i) terms[i] = x[i] * y[i];
        CHECK(std::abs(kernels::scalar::dot(x.data(), y.data(), n) -
                       kernels::avx2::dot(x.data(), y.data(), n)) <= red_tol(terms));

        for (std::size_t i = 0; i < n; ++i) terms[i] = w[i] * x[i] * y[i];
        CHECK(std::abs(kernels::scalar::dot3(w.data(), x.data(), y.data(), n) -
                       kernels::avx2::dot3(w.data(), x.data(), y.data(), n)) <=
              red_tol(terms));

        for (std::size_t i = 0; i < n; ++i) {
            const double xy = x[i] * y[i];
            terms[i] = w[i] * xy * xy;
        }
        CHECK(std::abs(kernels::scalar::dot3_sq(w.data(), x.data(), y.data(), n) -
                       kernels::avx2::dot3_sq(w.data(), x.data(), y.data(), n)) <=
              red_tol(terms));

        auto y1 = y, y2 = y;
        kernels::scalar::axpy(0.37, x.data(), y1.data(), n);
        kernels::avx2::axpy(0.37, x.data(), y2.data(), n);
        for (std::size_t i = 0; i < n; ++i)
            CHECK(y1[i] == doctest::Approx(y2[i]).epsilon(1e-15));

        auto x1 = x, x2 = x;
        kernels::scalar::scale(-2.5, x1.data(), n);
        kernels::avx2::scale(-2.5, x2.data(), n);
        for (std::size_t i = 0; i < n; ++i) CHECK(x1[i] == x2[i]);
    }
}

TEST_CASE("scalar reference values") {
    const double x[] = {1.0, 2.0, 3.0, 4.0, 5.0};
    const double y[] = {2.0, 2.0, 2.0, 2.0, 2.0};
    const double w[] = {1.0, 0.5, 1.0, 0.5, 1.0};
    CHECK(kernels::scalar::sum(x, 5) == 15.0);
    CHECK(kernels::scalar::dot(x, y, 5) == 30.0);
    CHECK(kernels::scalar::dot3(w, x, y, 5) == doctest::Approx(2 + 2 + 6 + 4 + 10));
    // sum w*(x*y)^2 = 1*4 + .5*16 + 1*36 + .5*64 + 1*100
    CHECK(kernels::scalar::dot3_sq(w, x, y, 5) == doctest::Approx(4 + 8 + 36 + 32 + 100));
    double acc[] = {1.0, 1.0, 1.0, 1.0, 1.0};
    kernels::scalar::axpy(2.0, x, acc, 5);
    CHECK(acc[0] == 3.0);
    CHECK(acc[4] == 11.0);
    kernels::scalar::scale(0.5, acc, 5);
    CHECK(acc[0] == 1.5);
    CHECK(acc[4] == 5.5);
}

TEST_CASE("backend forcing and dispatch") {
    kernels::force(kernels::Backend::scalar);
    CHECK(kernels::active() == kernels::Backend::scalar);
    const double x[] = {1.0, 2.0, 3.0};
    CHECK(kernels::sum(x, 3) == 6.0);

    if (kernels::supported(kernels::Backend::avx2)) {
        kernels::force(kernels::Backend::avx2);
        CHECK(kernels::active() == kernels::Backend::avx2);
        CHECK(kernels::sum(x, 3) == 6.0);
    } else {
        CHECK_THROWS_AS(kernels::force(kernels::Backend::avx2), Error);
    }
    kernels::reset();
}

TEST_CASE("span overloads") {
    std::vector<double> x{1.0, 2.0, 3.0};
    std::vector<double> y{1.0, 1.0, 1.0};
    CHECK(kernels::dot(std::span<const double>(x), std::span<const double>(y)) == 6.0);
    CHECK(kernels::sum(std::span<const double>(x)) == 6.0);
}
