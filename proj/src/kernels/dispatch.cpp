#include "speclab/kernels.hpp"

#include <cstdlib>
#include <cstring>
#include <string>

#include "speclab/errors.hpp"

namespace speclab::kernels {

namespace {

struct Table {
    double (*sum)(const double*, std::size_t);
    double (*dot)(const double*, const double*, std::size_t);
    double (*dot3)(const double*, const double*, const double*, std::size_t);
    double (*dot3_sq)(const double*, const double*, const double*, std::size_t);
    void (*axpy)(double, const double*, double*, std::size_t);
    void (*scale)(double, double*, std::size_t);
};

constexpr Table kScalar{scalar::sum, scalar::dot, scalar::dot3,
                        scalar::dot3_sq, scalar::axpy, scalar::scale};
constexpr Table kAvx2{avx2::sum, avx2::dot, avx2::dot3,
                      avx2::dot3_sq, avx2::axpy, avx2::scale};

bool cpu_has_avx2() {
#if (defined(__x86_64__) || defined(__i386__)) && defined(__GNUC__)
    return avx2::compiled() && __builtin_cpu_supports("avx2") &&
           __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

Backend detect() {
    if (const char* env = std::getenv("SPECLAB_SIMD")) {
        if (std::strcmp(env, "scalar") == 0) return Backend::scalar;
        if (std::strcmp(env, "avx2") == 0) {
            require(cpu_has_avx2(), ErrorCode::invalid_parameter,
                    "SPECLAB_SIMD=avx2 but this CPU/build lacks AVX2+FMA");
            return Backend::avx2;
        }
        if (std::strcmp(env, "auto") != 0)
            fail(ErrorCode::config,
                 "SPECLAB_SIMD must be scalar, avx2 or auto (got '" + std::string(env) + "')");
    }
    return cpu_has_avx2() ? Backend::avx2 : Backend::scalar;
}

Backend g_active = detect();

const Table& table() { return g_active == Backend::avx2 ? kAvx2 : kScalar; }

} // namespace

Backend active() { return g_active; }

bool supported(Backend b) { return b == Backend::scalar || cpu_has_avx2(); }

void force(Backend b) {
    require(supported(b), ErrorCode::invalid_parameter,
            std::string("kernel backend ") + name(b) + " not supported on this CPU/build");
    g_active = b;
}

void reset() { g_active = detect(); }

const char* name(Backend b) { return b == Backend::avx2 ? "avx2" : "scalar"; }

double sum(const double* x, std::size_t n) { return table().sum(x, n); }
double dot(const double* x, const double* y, std::size_t n) { return table().dot(x, y, n); }
double dot3(const double* w, const double* x, const double* y, std::size_t n) {
    return table().dot3(w, x, y, n);
}
double dot3_sq(const double* w, const double* x, const double* y, std::size_t n) {
    return table().dot3_sq(w, x, y, n);
}
void axpy(double a, const double* x, double* y, std::size_t n) { table().axpy(a, x, y, n); }
void scale(double a, double* x, std::size_t n) { table().scale(a, x, n); }

} // namespace speclab::kernels
