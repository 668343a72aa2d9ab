#include "speclab/damping.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include "speclab/errors.hpp"
#include "speclab/kernels.hpp"

namespace speclab::spectral {

namespace detail {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Bounded-variable revised simplex specialized to the damping LP. Variable
// layout: [0, C) the cell densities (bounds [0,1]), C the objective level t
// (bounds [0, inf)), (C, C+N] the mode-row slacks (bounds [0, inf)). Rows
// 0..N-1 are w_n . a - t - s_n = 0, row N is area . a = ell. The basis stays
// (N+1) x (N+1), so every factorization is tiny regardless of cell count.
struct Simplex {
    const Eigen::MatrixXd& w;  // C x N
    Eigen::Map<const Eigen::VectorXd> area;
    double ell;
    int C, N, m, nv;

    std::vector<int> basis;
    std::vector<char> in_basis;
    std::vector<char> at_up;  // nonbasic-at-upper flags (only cells have finite uppers)
    Eigen::MatrixXd B;
    Eigen::PartialPivLU<Eigen::MatrixXd> lu, luT;
    Eigen::VectorXd xB;

    Simplex(const Eigen::MatrixXd& w_, const std::vector<double>& area_, double ell_)
        : w(w_), area(area_.data(), static_cast<int>(area_.size())), ell(ell_),
          C(static_cast<int>(w_.rows())), N(static_cast<int>(w_.cols())), m(N + 1),
          nv(C + 1 + N), basis(m), in_basis(nv, 0), at_up(nv, 0), B(m, m), xB(m) {}

    double upper(int j) const { return j < C ? 1.0 : kInf; }
    double cost(int j) const { return j == C ? 1.0 : 0.0; }

    void column(int j, Eigen::VectorXd& col) const {
        col.setZero();
        if (j < C) {
            col.head(N) = w.row(j).transpose();
            col(N) = area(j);
        } else if (j == C) {
            col.head(N).setConstant(-1.0);
        } else {
            col(j - C - 1) = -1.0;
        }
    }

    void refactor() {
        Eigen::VectorXd col(m);
        for (int i = 0; i < m; ++i) {
            column(basis[i], col);
            B.col(i) = col;
        }
        lu.compute(B);
        luT.compute(B.transpose());
    }

    // right-hand side with the at-upper nonbasic cells folded in
    void refresh_values() {
        Eigen::VectorXd beff = Eigen::VectorXd::Zero(m);
        beff(N) = ell;
        for (int c = 0; c < C; ++c) {
            if (at_up[c] && !in_basis[c]) {
                beff.head(N) -= w.row(c).transpose();
                beff(N) -= area(c);
            }
        }
        xB = lu.solve(beff);
    }

    // greedy budget fill: whole cells in index order plus one fractional cell,
    // slacks basic on the mode rows; feasible by construction
    void initial_basis() {
        double acc = 0.0;
        int frac = -1;
        for (int c = 0; c < C; ++c) {
            if (acc + area(c) <= ell) {
                at_up[c] = 1;
                acc += area(c);
            } else {
                frac = c;
                break;
            }
        }
        require(frac >= 0, ErrorCode::lp_infeasible, "maximin_lp: budget exceeds the area");
        for (int n = 0; n < N; ++n) basis[n] = C + 1 + n;
        basis[N] = frac;
        for (int i = 0; i < m; ++i) in_basis[basis[i]] = 1;
        refactor();
        refresh_values();
    }

    Eigen::VectorXd dual() const {
        Eigen::VectorXd cB(m);
        for (int i = 0; i < m; ++i) cB(i) = cost(basis[i]);
        return luT.solve(cB);
    }
};

} // namespace

MaximinLp maximin_lp(const Eigen::MatrixXd& w, const std::vector<double>& area, double ell) {
    const int C = static_cast<int>(w.rows());
    const int N = static_cast<int>(w.cols());
    require(C >= 1 && N >= 1, ErrorCode::invalid_parameter, "maximin_lp: empty program");
    require(static_cast<int>(area.size()) == C, ErrorCode::invalid_parameter,
            "maximin_lp: one area per cell required");
    require(w.minCoeff() >= 0.0, ErrorCode::invalid_parameter, "maximin_lp: negative mode mass");
    double total = 0.0;
    for (double ac : area) {
        require(ac > 0.0, ErrorCode::invalid_parameter, "maximin_lp: nonpositive cell area");
        total += ac;
    }
    require(ell > 0.0 && ell < total, ErrorCode::invalid_parameter,
            "maximin_lp: budget must lie strictly inside (0, |Omega|)");

    Simplex sx(w, area, ell);
    sx.initial_basis();

    const double scale = std::max({1.0, w.maxCoeff(), sx.area.maxCoeff()});
    const double tol_d = 1e-10 * scale;
    const long max_iters = 2000 + 60L * (C + N);
    long iter = 0;
    int degen_run = 0;
    Eigen::VectorXd col(sx.m), dir(sx.m);

    for (;; ++iter) {
        require(iter < max_iters, ErrorCode::solver_no_convergence,
                "maximin_lp: simplex iteration budget exhausted");
        const bool bland = degen_run >= 30;
        const Eigen::VectorXd y = sx.dual();

        // reduced costs: cells as one dense product, then t, then slacks
        const Eigen::VectorXd d_cells = -(w * y.head(N) + y(N) * sx.area);
        int enter = -1;
        double best_gain = tol_d;
        auto consider = [&](int j, double dj) {
            if (sx.in_basis[j]) return false;
            const double gain = sx.at_up[j] ? -dj : dj;
            if (gain <= tol_d) return false;
            if (bland) {
                enter = j;
                return true;  // first eligible index wins
            }
            if (gain > best_gain) {
                best_gain = gain;
                enter = j;
            }
            return false;
        };
        for (int c = 0; c < C; ++c)
            if (consider(c, d_cells(c))) break;
        if (enter == -1 || !bland) consider(C, 1.0 + y.head(N).sum());
        for (int n = 0; n < N && (enter == -1 || !bland); ++n) consider(C + 1 + n, y(n));
        if (enter == -1) break;  // price-optimal

        const double sigma = sx.at_up[enter] ? -1.0 : 1.0;
        sx.column(enter, col);
        dir = sx.lu.solve(col);
        const double tol_piv = 1e-10 * (1.0 + dir.cwiseAbs().maxCoeff());

        // ratio test: nearest bound hit by a basic variable, or the entering
        // variable's own span
        double theta = sx.upper(enter) < kInf ? sx.upper(enter) : kInf;
        for (int i = 0; i < sx.m; ++i) {
            const double delta = sigma * dir(i);
            double cand = kInf;
            if (delta > tol_piv)
                cand = std::max(sx.xB(i), 0.0) / delta;
            else if (delta < -tol_piv && sx.upper(sx.basis[i]) < kInf)
                cand = (sx.upper(sx.basis[i]) - sx.xB(i)) / (-delta);
            if (cand < theta) theta = cand;
        }
        require(theta < kInf, ErrorCode::lp_unbounded, "maximin_lp: unbounded ray");
        const double tie = 1e-12 * (1.0 + theta);

        // leaving candidate among the ties: Bland wants the smallest variable
        // index, otherwise take the largest pivot for stability
        int leave = -1;
        bool leave_to_upper = false;
        double best_piv = 0.0;
        for (int i = 0; i < sx.m; ++i) {
            const double delta = sigma * dir(i);
            double cand = kInf;
            bool to_upper = false;
            if (delta > tol_piv) {
                cand = std::max(sx.xB(i), 0.0) / delta;
            } else if (delta < -tol_piv && sx.upper(sx.basis[i]) < kInf) {
                cand = (sx.upper(sx.basis[i]) - sx.xB(i)) / (-delta);
                to_upper = true;
            } else {
                continue;
            }
            if (cand > theta + tie) continue;
            const bool better = leave == -1 ||
                                (bland ? sx.basis[i] < sx.basis[leave]
                                       : std::abs(delta) > best_piv);
            if (better) {
                leave = i;
                leave_to_upper = to_upper;
                best_piv = std::abs(delta);
            }
        }

        degen_run = theta <= 1e-13 ? degen_run + 1 : 0;
        sx.xB -= sigma * theta * dir;
        if (leave == -1) {
            // bound-to-bound flip of the entering variable
            sx.at_up[enter] = static_cast<char>(!sx.at_up[enter]);
        } else {
            const int gone = sx.basis[leave];
            sx.in_basis[gone] = 0;
            sx.at_up[gone] = static_cast<char>(leave_to_upper);
            sx.basis[leave] = enter;
            sx.in_basis[enter] = 1;
            const double start = sx.at_up[enter] ? sx.upper(enter) : 0.0;
            sx.at_up[enter] = 0;
            sx.xB(leave) = start + sigma * theta;
            sx.refactor();
        }
        if ((iter & 127) == 127) sx.refresh_values();
    }

    sx.refresh_values();  // sharpen the primal solution against drift

    MaximinLp out;
    out.iterations = static_cast<int>(iter);
    out.a.assign(C, 0.0);
    for (int c = 0; c < C; ++c)
        if (!sx.in_basis[c] && sx.at_up[c]) out.a[c] = 1.0;
    out.t = 0.0;
    for (int i = 0; i < sx.m; ++i) {
        if (sx.basis[i] < C)
            out.a[sx.basis[i]] = sx.xB(i);
        else if (sx.basis[i] == C)
            out.t = sx.xB(i);
    }

    // dual certificate: clamp/normalize the multipliers into the simplex, then
    // evaluate the dual objective; any feasible dual bounds t* from above
    const Eigen::VectorXd y = sx.dual();
    Eigen::VectorXd alpha = (-y.head(N)).cwiseMax(0.0);
    const double asum = alpha.sum();
    if (asum > 0.0)
        alpha /= asum;
    else
        alpha.setConstant(1.0 / N);
    out.level = y(N);
    const Eigen::VectorXd surplus = w * alpha - out.level * sx.area;
    out.gap = out.level * ell + surplus.cwiseMax(0.0).sum() - out.t;
    out.alpha.assign(alpha.data(), alpha.data() + N);
    return out;
}

} // namespace detail

DampingSolution optimize_relaxed(const EigenSystem& sys, double ell, int N,
                                 const DampingCells& cells) {
    Eigen::MatrixXd w = mode_weights(sys, cells, N);
    const double total = cells.total_area();
    require(ell > 0.0 && ell < total, ErrorCode::invalid_parameter,
            "optimize_relaxed: budget must lie strictly inside (0, |Omega|)");
    auto lp = detail::maximin_lp(w, cells.area, ell);
    require(lp.gap <= 1e-8 * lp.t + 1e-14, ErrorCode::solver_no_convergence,
            "optimize_relaxed: duality-gap certificate failed");

    DampingSolution sol;
    for (double& v : lp.a) v = std::clamp(v, 0.0, 1.0);
    sol.density = DampingDensity{cells, std::move(lp.a), ell};
    sol.density.validate();
    sol.j_value = lp.t;
    sol.alpha = std::move(lp.alpha);
    sol.level = lp.level;
    sol.duality_gap = lp.gap;
    sol.lp_iterations = lp.iterations;
    for (int p = 0; p < N; ++p) {
        const double mass =
            kernels::dot(sol.density.a.data(), w.col(p).data(), sol.density.a.size());
        if (mass <= lp.t + 1e-9 * (1.0 + std::abs(lp.t))) sol.active.push_back(p + 1);
    }
    sol.weights = std::move(w);
    sol.intermediate_measure = bang_bang_report(sol).intermediate_area;
    return sol;
}

DampingSolution optimize_relaxed(const EigenSystem& sys, double ell, int N) {
    return optimize_relaxed(sys, ell, N, default_cells(sys));
}

BangBangReport bang_bang_report(const DampingSolution& sol, double eps) {
    require(eps > 0.0 && eps < 0.5, ErrorCode::invalid_parameter,
            "bang_bang_report: eps must lie in (0, 1/2)");
    const auto& density = sol.density;
    const int C = density.cells.count();
    require(sol.weights.rows() == C &&
                sol.weights.cols() == static_cast<long>(sol.alpha.size()),
            ErrorCode::invalid_parameter, "bang_bang_report: solution lacks its mode masses");

    // area-weighted moments of rho = sum_k alpha_k phi_k^2 over A_eps
    double area = 0.0, mean = 0.0;
    std::vector<std::pair<double, double>> frac;  // (cell area, rho)
    for (int c = 0; c < C; ++c) {
        if (density.a[c] < eps || density.a[c] > 1.0 - eps) continue;
        double rho = 0.0;
        for (int k = 0; k < static_cast<int>(sol.alpha.size()); ++k)
            rho += sol.alpha[k] * sol.weights(c, k);
        rho /= density.cells.area[c];
        frac.emplace_back(density.cells.area[c], rho);
        area += density.cells.area[c];
        mean += density.cells.area[c] * rho;
    }
    if (frac.empty()) return {0.0, 0.0};
    mean /= area;
    double var = 0.0;
    for (const auto& [ac, rho] : frac) var += ac * (rho - mean) * (rho - mean);
    return {area, std::sqrt(var / area)};
}

} // namespace speclab::spectral
