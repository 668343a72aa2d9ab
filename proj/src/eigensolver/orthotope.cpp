#include <algorithm>
#include <cmath>
#include <queue>
#include <set>

#include "speclab/eigensolver.hpp"
#include "speclab/errors.hpp"

namespace speclab::spectral {

namespace {

double mode_lambda(const geom::Orthotope& o, const std::vector<int>& K) {
    double s = 0.0;
    for (int i = 0; i < o.dim(); ++i) {
        const double r = K[i] / o.mu[i];
        s += r * r;
    }
    return s;
}

} // namespace

std::optional<surd::Surd> exact_lambda(const geom::Orthotope& ortho, const std::vector<int>& K) {
    if (!ortho.has_exact()) return std::nullopt;
    require(static_cast<int>(K.size()) == ortho.dim(), ErrorCode::invalid_parameter,
            "multi-index dimension mismatch");
    std::int64_t a = 0, b = 0;
    for (int i = 0; i < ortho.dim(); ++i) {
        require(K[i] >= 1, ErrorCode::invalid_parameter, "multi-index entries must be positive");
        const std::int64_t k2 = static_cast<std::int64_t>(K[i]) * K[i];
        a += k2 * ortho.exact_inv[i].u;
        b += k2 * ortho.exact_inv[i].v;
    }
    return surd::Surd{a, b, b != 0 ? ortho.exact_D : 0};
}

EigenSystem orthotope_spectrum(const geom::Orthotope& ortho, int n) {
    require(n >= 1, ErrorCode::invalid_parameter, "need n >= 1 modes");
    require(ortho.dim() >= 1, ErrorCode::invalid_parameter, "orthotope has no sides");
    const int d = ortho.dim();
    const bool exact = ortho.has_exact();

    struct Entry {
        double lam;
        std::vector<int> K;
    };
    // priority_queue keeps the *last* element under the comparator on top,
    // so "after" ordering: larger lambda first, then lexicographically larger K
    auto after = [&](const Entry& x, const Entry& y) {
        if (exact) {
            const auto lx = *exact_lambda(ortho, x.K);
            const auto ly = *exact_lambda(ortho, y.K);
            if (!(lx == ly)) return ly < lx;
        } else if (x.lam != y.lam) {
            return x.lam > y.lam;
        }
        return x.K > y.K;
    };
    std::priority_queue<Entry, std::vector<Entry>, decltype(after)> frontier(after);
    std::set<std::vector<int>> seen;

    std::vector<int> ground(d, 1);
    frontier.push({mode_lambda(ortho, ground), ground});
    seen.insert(ground);

    double norm = 1.0;
    for (int i = 0; i < d; ++i) norm *= std::sqrt(2.0 / (ortho.mu[i] * M_PI));

    OrthotopeBasis basis;
    basis.domain = ortho;
    // one extra mode so the gap flag of mode n is well defined
    while (static_cast<int>(basis.modes.size()) < n + 1) {
        Entry e = frontier.top();
        frontier.pop();
        basis.modes.push_back({e.K, e.lam, norm});
        for (int i = 0; i < d; ++i) {
            std::vector<int> next = e.K;
            ++next[i];
            if (seen.insert(next).second) frontier.push({mode_lambda(ortho, next), next});
        }
    }

    EigenSystem sys;
    sys.near_degenerate.resize(n);
    for (int k = 0; k < n; ++k) {
        sys.lambdas.push_back(basis.modes[k].lambda);
        sys.near_degenerate[k] =
            basis.modes[k + 1].lambda - basis.modes[k].lambda <
            sys.gap_tol * (1.0 + basis.modes[k].lambda);
    }
    basis.modes.pop_back();
    sys.basis = std::move(basis);
    return sys;
}

} // namespace speclab::spectral
