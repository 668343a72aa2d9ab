#pragma once

#include <cmath>
#include <cstdint>

#include "speclab/errors.hpp"

namespace speclab::surd {

// Exact arithmetic on numbers a + b*sqrt(D) with integer a, b and a shared
// non-square radicand D > 1 (b must be 0 when no radicand is in play).
// Closed-form orthotope spectra of the canonical domains live in this ring,
// which turns simplicity and rational-relation verdicts into exact
// integer comparisons.

inline bool is_perfect_square(std::int64_t d) {
    if (d < 0) return false;
    const auto r = static_cast<std::int64_t>(std::llround(std::sqrt(static_cast<double>(d))));
    for (std::int64_t s = r - 1; s <= r + 1; ++s)
        if (s >= 0 && s * s == d) return true;
    return false;
}

// sign of a + b*sqrt(D); exact when D is not a perfect square
inline int sign(std::int64_t a, std::int64_t b, std::int64_t d) {
    if (b == 0) return a > 0 ? 1 : (a < 0 ? -1 : 0);
    require(d > 1 && !is_perfect_square(d), ErrorCode::invalid_parameter,
            "surd sign: radicand must be a non-square integer > 1");
    if (a == 0) return b > 0 ? 1 : -1;
    if (a > 0 && b > 0) return 1;
    if (a < 0 && b < 0) return -1;
    const __int128 a2 = static_cast<__int128>(a) * a;
    const __int128 b2d = static_cast<__int128>(b) * b * d;
    if (a > 0) return a2 > b2d ? 1 : -1;  // b < 0
    return b2d > a2 ? 1 : -1;             // a < 0, b > 0
}

struct Surd {
    std::int64_t a = 0;
    std::int64_t b = 0;
    std::int64_t D = 0;  // 0 when the value is a plain integer

    double value() const {
        return static_cast<double>(a) +
               (b == 0 ? 0.0 : static_cast<double>(b) * std::sqrt(static_cast<double>(D)));
    }
    bool is_zero() const { return a == 0 && b == 0; }

    friend Surd operator+(const Surd& u, const Surd& v) {
        require(u.b == 0 || v.b == 0 || u.D == v.D, ErrorCode::invalid_parameter,
                "surd add: mismatched radicands");
        return Surd{u.a + v.a, u.b + v.b, u.b != 0 ? u.D : v.D};
    }
    friend Surd operator-(const Surd& u, const Surd& v) {
        require(u.b == 0 || v.b == 0 || u.D == v.D, ErrorCode::invalid_parameter,
                "surd sub: mismatched radicands");
        return Surd{u.a - v.a, u.b - v.b, u.b != 0 ? u.D : v.D};
    }
    friend Surd operator*(std::int64_t c, const Surd& u) { return Surd{c * u.a, c * u.b, u.D}; }

    // exact ordering (ties are true equalities)
    friend bool operator<(const Surd& u, const Surd& v) {
        const Surd d = u - v;
        if (d.b == 0) return d.a < 0;
        return sign(d.a, d.b, d.D) < 0;
    }
    friend bool operator==(const Surd& u, const Surd& v) {
        const Surd d = u - v;
        return d.a == 0 && d.b == 0;
    }
};

} // namespace speclab::surd
