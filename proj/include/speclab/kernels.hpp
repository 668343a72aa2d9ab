#pragma once

#include <cstddef>
#include <span>

namespace speclab::kernels {

// Data-parallel reductions used by the quadrature-heavy paths (Gram matrices,
// modal weights, coupling integrals, damping functionals). Scalar reference
// implementations and AVX2 variants share these signatures; the active
// backend is resolved once (CPU probe, overridable via SPECLAB_SIMD=scalar|avx2
// or force()) and every call goes through the dispatch table.

enum class Backend { scalar, avx2 };

Backend active();
bool supported(Backend b);
void force(Backend b);  // throws invalid_parameter when unsupported on this CPU
void reset();           // return to automatic detection
const char* name(Backend b);

double sum(const double* x, std::size_t n);
double dot(const double* x, const double* y, std::size_t n);
// sum_i w[i] * x[i] * y[i]
double dot3(const double* w, const double* x, const double* y, std::size_t n);
// sum_i w[i] * x[i]^2 * y[i]^2
double dot3_sq(const double* w, const double* x, const double* y, std::size_t n);
// y += a*x
void axpy(double a, const double* x, double* y, std::size_t n);
void scale(double a, double* x, std::size_t n);

inline double sum(std::span<const double> x) { return sum(x.data(), x.size()); }
inline double dot(std::span<const double> x, std::span<const double> y) {
    return dot(x.data(), y.data(), x.size());
}
inline double dot3(std::span<const double> w, std::span<const double> x,
                   std::span<const double> y) {
    return dot3(w.data(), x.data(), y.data(), w.size());
}
inline double dot3_sq(std::span<const double> w, std::span<const double> x,
                      std::span<const double> y) {
    return dot3_sq(w.data(), x.data(), y.data(), w.size());
}

namespace scalar {
double sum(const double* x, std::size_t n);
double dot(const double* x, const double* y, std::size_t n);
double dot3(const double* w, const double* x, const double* y, std::size_t n);
double dot3_sq(const double* w, const double* x, const double* y, std::size_t n);
void axpy(double a, const double* x, double* y, std::size_t n);
void scale(double a, double* x, std::size_t n);
} // namespace scalar

namespace avx2 {
// Compiled with AVX2+FMA when the toolchain targets x86-64; otherwise these
// forward to the scalar versions and supported(Backend::avx2) reports false.
bool compiled();  // true when this translation unit really carries AVX2 code
double sum(const double* x, std::size_t n);
double dot(const double* x, const double* y, std::size_t n);
double dot3(const double* w, const double* x, const double* y, std::size_t n);
double dot3_sq(const double* w, const double* x, const double* y, std::size_t n);
void axpy(double a, const double* x, double* y, std::size_t n);
void scale(double a, double* x, std::size_t n);
} // namespace avx2

} // namespace speclab::kernels
