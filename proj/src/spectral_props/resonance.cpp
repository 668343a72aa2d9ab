#include <algorithm>
#include <cmath>

#include "speclab/errors.hpp"
#include "speclab/spectral_props.hpp"

namespace speclab::spectral {

namespace {

bool relation_before(const RationalRelation& x, const RationalRelation& y) {
    if (x.residual != y.residual) return x.residual < y.residual;
    if (x.height != y.height) return x.height < y.height;
    return x.q < y.q;
}

// floating LLL (delta = 0.99) on the rows (e_i, N*lambda_i); short reduced
// rows propose integer relations beyond the exhaustive height
std::vector<std::vector<double>> lll_reduce(std::vector<std::vector<double>> b) {
    const int k = static_cast<int>(b.size());
    const int m = static_cast<int>(b[0].size());
    auto dot = [m](const std::vector<double>& x, const std::vector<double>& y) {
        double s = 0;
        for (int i = 0; i < m; ++i) s += x[i] * y[i];
        return s;
    };
    std::vector<std::vector<double>> gso;
    std::vector<std::vector<double>> mu(k, std::vector<double>(k, 0.0));
    std::vector<double> norm2(k);
    auto recompute = [&]() {
        gso = b;
        for (int i = 0; i < k; ++i) {
            for (int j = 0; j < i; ++j) {
                mu[i][j] = dot(b[i], gso[j]) / norm2[j];
                for (int c = 0; c < m; ++c) gso[i][c] -= mu[i][j] * gso[j][c];
            }
            norm2[i] = dot(gso[i], gso[i]);
        }
    };
    recompute();
    int i = 1;
    int guard = 10000;
    while (i < k && guard-- > 0) {
        for (int j = i - 1; j >= 0; --j) {
            const double r = std::round(mu[i][j]);
            if (r != 0.0)
                for (int c = 0; c < m; ++c) b[i][c] -= r * b[j][c];
        }
        recompute();
        if (norm2[i] >= (0.99 - mu[i][i - 1] * mu[i][i - 1]) * norm2[i - 1]) {
            ++i;
        } else {
            std::swap(b[i], b[i - 1]);
            recompute();
            i = std::max(i - 1, 1);
        }
    }
    return b;
}

} // namespace

PropertyReport nonresonance_search(const std::vector<double>& lambdas, int height,
                                   const ResonanceOptions& opts) {
    const int k = static_cast<int>(lambdas.size());
    require(k >= 1, ErrorCode::invalid_parameter, "need at least one eigenvalue");
    require(height >= 1, ErrorCode::invalid_parameter, "height must be positive");
    require(opts.residual_tol > 0, ErrorCode::invalid_parameter,
            "residual tolerance must be positive");
    require(static_cast<double>(k) * std::pow(2.0 * height + 1.0, k) <= 4e9,
            ErrorCode::work_budget, "relation search budget k*(2H+1)^k exceeded; lower H or k");

    PropertyReport r;
    r.property = "nonresonance";
    r.n = k;
    r.height = height;
    r.tolerance = opts.residual_tol;

    double lam_norm = 0.0;
    for (double l : lambdas) lam_norm += l * l;
    lam_norm = std::sqrt(lam_norm);

    // odometer over [-H, H]^k, one representative per sign pair
    std::vector<std::int64_t> q(k, -height);
    for (;;) {
        int first = 0;
        while (first < k && q[first] == 0) ++first;
        if (first < k && q[first] > 0) {
            double s = 0.0;
            std::int64_t h = 0, l1 = 0;
            for (int i = 0; i < k; ++i) {
                s += static_cast<double>(q[i]) * lambdas[i];
                h = std::max(h, std::abs(q[i]));
                l1 += std::abs(q[i]);
            }
            if (std::abs(s) <= opts.residual_tol * lam_norm * static_cast<double>(l1))
                r.relations.push_back(
                    {q, std::abs(s), static_cast<int>(h), false, true});
        }
        int d = k - 1;
        while (d >= 0 && q[d] == height) q[d--] = -height;
        if (d < 0) break;
        ++q[d];
    }

    std::sort(r.relations.begin(), r.relations.end(), relation_before);
    if (static_cast<int>(r.relations.size()) > opts.max_relations)
        r.relations.resize(opts.max_relations);

    if (opts.lll_pass && k >= 2) {
        const double scale = 1e10 / (opts.residual_tol * lam_norm);
        std::vector<std::vector<double>> basis(k, std::vector<double>(k + 1, 0.0));
        for (int i = 0; i < k; ++i) {
            basis[i][i] = 1.0;
            basis[i][k] = scale * lambdas[i];
        }
        for (const auto& row : lll_reduce(std::move(basis))) {
            std::vector<std::int64_t> c(k);
            std::int64_t h = 0, l1 = 0;
            for (int i = 0; i < k; ++i) {
                c[i] = static_cast<std::int64_t>(std::llround(row[i]));
                h = std::max(h, std::abs(c[i]));
                l1 += std::abs(c[i]);
            }
            if (l1 == 0 || h <= height) continue;  // trivial or already decided
            int first = 0;
            while (c[first] == 0) ++first;
            if (c[first] < 0)
                for (auto& v : c) v = -v;
            double s = 0.0;
            for (int i = 0; i < k; ++i) s += static_cast<double>(c[i]) * lambdas[i];
            if (std::abs(s) <= opts.residual_tol * lam_norm * static_cast<double>(l1)) {
                bool dup = false;
                for (const auto& rel : r.relations) dup = dup || rel.q == c;
                if (!dup)
                    r.relations.push_back({c, std::abs(s), static_cast<int>(h), false, false});
            }
        }
    }

    // verdict counts verified relations only; lattice proposals are advisory
    bool any_verified = false;
    for (const auto& rel : r.relations) any_verified = any_verified || rel.verified;
    if (any_verified) {
        r.verdict = Verdict::fails;
        const auto& w = r.relations.front();
        r.witness = "relation of height " + std::to_string(w.height) + " with residual " +
                    std::to_string(w.residual);
    } else {
        r.verdict = Verdict::holds;
        r.witness = "no rational relation up to height " + std::to_string(height);
    }
    return r;
}

PropertyReport nonresonance_search(const EigenSystem& sys, int k, int height,
                                   const ResonanceOptions& opts) {
    require(k >= 1 && k <= sys.n(), ErrorCode::invalid_parameter,
            "mode count out of range");
    std::vector<double> lam(sys.lambdas.begin(), sys.lambdas.begin() + k);

    const auto* ob = sys.orthotope();
    if (ob == nullptr || !ob->domain.has_exact()) return nonresonance_search(lam, height, opts);

    // exact path: sum q_l lambda_l = (sum q_l a_l) + (sum q_l b_l) sqrt(D)
    // vanishes iff both integer sums do
    require(static_cast<double>(k) * std::pow(2.0 * height + 1.0, k) <= 4e9,
            ErrorCode::work_budget, "relation search budget k*(2H+1)^k exceeded; lower H or k");
    std::vector<std::int64_t> ea(k), eb(k);
    for (int i = 0; i < k; ++i) {
        const auto s = *exact_lambda(ob->domain, ob->modes[i].K);
        ea[i] = s.a;
        eb[i] = s.b;
    }

    PropertyReport r;
    r.property = "nonresonance";
    r.n = k;
    r.height = height;
    r.tolerance = 0.0;
    r.exact = true;

    std::vector<std::int64_t> q(k, -height);
    for (;;) {
        int first = 0;
        while (first < k && q[first] == 0) ++first;
        if (first < k && q[first] > 0) {
            std::int64_t sa = 0, sb = 0, h = 0;
            for (int i = 0; i < k; ++i) {
                sa += q[i] * ea[i];
                sb += q[i] * eb[i];
                h = std::max(h, std::abs(q[i]));
            }
            if (sa == 0 && sb == 0) {
                double s = 0.0;
                for (int i = 0; i < k; ++i) s += static_cast<double>(q[i]) * lam[i];
                r.relations.push_back({q, std::abs(s), static_cast<int>(h), true, true});
            }
        }
        int d = k - 1;
        while (d >= 0 && q[d] == height) q[d--] = -height;
        if (d < 0) break;
        ++q[d];
    }

    std::sort(r.relations.begin(), r.relations.end(), relation_before);
    if (static_cast<int>(r.relations.size()) > opts.max_relations)
        r.relations.resize(opts.max_relations);
    if (!r.relations.empty()) {
        r.verdict = Verdict::fails;
        r.witness = "exact relation of height " + std::to_string(r.relations.front().height);
    } else {
        r.verdict = Verdict::holds;
        r.witness = "no rational relation up to height " + std::to_string(height) +
                    " (exact arithmetic)";
    }
    return r;
}

} // namespace speclab::spectral
