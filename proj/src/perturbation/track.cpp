#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "speclab/errors.hpp"
#include "speclab/perturbation.hpp"

namespace speclab::spectral {

namespace {

struct Assignment {
    std::vector<int> match;  // previous sorted position -> current sorted position
    std::vector<double> overlap;
};

// greedy maximum matching on the overlap matrix, largest entries first; rows
// with a finite eigenvalue prediction get a second pass that untangles mixed
// pairs by value continuity (near a crossing the eigenvectors rotate into
// each other and overlaps alone cannot tell the branches apart, but their
// slopes can)
Assignment match_modes(const Eigen::MatrixXd& O, const std::vector<double>& pred,
                       const Eigen::VectorXd& cur) {
    const int m = static_cast<int>(O.rows());
    std::vector<std::pair<int, int>> order;
    order.reserve(static_cast<std::size_t>(m) * m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) order.emplace_back(i, j);
    std::sort(order.begin(), order.end(), [&](auto a, auto b) {
        const double va = O(a.first, a.second);
        const double vb = O(b.first, b.second);
        if (va != vb) return va > vb;
        return a < b;  // deterministic ties
    });

    Assignment as;
    as.match.assign(m, -1);
    as.overlap.assign(m, 0.0);
    std::vector<char> used(m, 0);
    int assigned = 0;
    for (const auto& [i, j] : order) {
        if (as.match[i] >= 0 || used[j]) continue;
        as.match[i] = j;
        as.overlap[i] = O(i, j);
        used[j] = 1;
        if (++assigned == m) break;
    }

    bool changed = true;
    for (int pass = 0; pass < m && changed; ++pass) {
        changed = false;
        for (int i1 = 0; i1 < m; ++i1)
            for (int i2 = i1 + 1; i2 < m; ++i2) {
                if (std::isnan(pred[static_cast<std::size_t>(i1)]) ||
                    std::isnan(pred[static_cast<std::size_t>(i2)]))
                    continue;
                const int j1 = as.match[i1];
                const int j2 = as.match[i2];
                // only genuinely mixed pairs are up for grabs
                if (O(i1, j2) < 0.25 || O(i2, j1) < 0.25) continue;
                if (std::min(O(i1, j1), O(i2, j2)) > 0.95) continue;
                const double keep = std::abs(cur[j1] - pred[static_cast<std::size_t>(i1)]) +
                                    std::abs(cur[j2] - pred[static_cast<std::size_t>(i2)]);
                const double swap = std::abs(cur[j2] - pred[static_cast<std::size_t>(i1)]) +
                                    std::abs(cur[j1] - pred[static_cast<std::size_t>(i2)]);
                if (swap < keep) {
                    as.match[i1] = j2;
                    as.match[i2] = j1;
                    as.overlap[i1] = O(i1, j2);
                    as.overlap[i2] = O(i2, j1);
                    changed = true;
                }
            }
    }
    return as;
}

} // namespace

EigenPath track_path(const geom::DeformationPath& path, int n, const TrackOptions& opts) {
    path.validate();
    require(n >= 1, ErrorCode::invalid_parameter, "need n >= 1 tracked curves");
    const int steps = path.steps();

    int interior = 0;
    for (char b : path.meshes.front().on_boundary)
        if (!b) ++interior;
    require(n < interior, ErrorCode::invalid_parameter,
            "tracked mode count must stay below the interior vertex count");
    const int m = std::min(n + std::max(opts.pad, 0), interior - 1);

    EigenPath out;
    out.t_grid = path.t_grid;
    out.curves.assign(n, std::vector<double>(static_cast<std::size_t>(steps), 0.0));
    out.pairing.assign(static_cast<std::size_t>(steps), std::vector<int>());

    // follow m branches: pos_of_label[q] is the sorted position branch q holds
    std::vector<int> pos_of_label(m);
    std::iota(pos_of_label.begin(), pos_of_label.end(), 0);

    Eigen::MatrixXd prev_nodal;
    std::vector<int> prev_pos;
    Eigen::VectorXd lam_prev, lam_prev2;  // all m values at s-1 and s-2
    std::vector<int> src_of_pos;          // position at s-1 -> position at s-2

    for (int s = 0; s < steps; ++s) {
        const EigenSystem sys = fem_spectrum(path.meshes[s], m, opts.fem);
        const MeshBasis& mb = *sys.mesh();
        const Eigen::VectorXd cur =
            Eigen::Map<const Eigen::VectorXd>(sys.lambdas.data(), m);

        if (s > 0) {
            // overlap of every previous mode with every current one, in the
            // current mass inner product (both renormalized there)
            const Eigen::MatrixXd MV = mb.mass * mb.nodal;
            const Eigen::MatrixXd MU = mb.mass * prev_nodal;
            Eigen::MatrixXd O = (prev_nodal.transpose() * MV).cwiseAbs();
            for (int i = 0; i < m; ++i) {
                const double ni = std::sqrt(prev_nodal.col(i).dot(MU.col(i)));
                for (int j = 0; j < m; ++j) {
                    const double nj = std::sqrt(mb.nodal.col(j).dot(MV.col(j)));
                    O(i, j) /= ni * nj;
                }
            }
            // branch-true linear extrapolation of each previous mode's value
            std::vector<double> pred(static_cast<std::size_t>(m),
                                     std::numeric_limits<double>::quiet_NaN());
            if (s >= 2) {
                const double ratio = (path.t_grid[s] - path.t_grid[s - 1]) /
                                     (path.t_grid[s - 1] - path.t_grid[s - 2]);
                for (int i = 0; i < m; ++i)
                    pred[static_cast<std::size_t>(i)] =
                        lam_prev[i] + (lam_prev[i] - lam_prev2[src_of_pos[i]]) * ratio;
            }
            const Assignment as = match_modes(O, pred, cur);

            // only tracked branches owe a clean continuation; buffer branches
            // at the edge of the computed block may hand off to modes outside
            // it, and that churn is exactly what the buffer absorbs
            std::vector<char> tracked_row(static_cast<std::size_t>(m), 0);
            for (int k = 0; k < n; ++k)
                tracked_row[static_cast<std::size_t>(pos_of_label[k])] = 1;
            for (int i = 0; i < m; ++i) {
                if (!tracked_row[static_cast<std::size_t>(i)]) continue;
                if (as.overlap[i] > opts.overlap_tol) continue;
                // weak single-mode overlap is fine when the branch rotated
                // inside a crossing pair: its two best targets must still
                // carry essentially all of its mass
                double top1 = 0.0, top2 = 0.0;
                for (int j = 0; j < m; ++j) {
                    const double v = O(i, j);
                    if (v > top1) {
                        top2 = top1;
                        top1 = v;
                    } else if (v > top2) {
                        top2 = v;
                    }
                }
                require(top1 * top1 + top2 * top2 > opts.overlap_tol * opts.overlap_tol,
                        ErrorCode::pairing_failure,
                        "mode identity lost between t = " + std::to_string(path.t_grid[s - 1]) +
                            " and t = " + std::to_string(path.t_grid[s]) +
                            " (best overlap " + std::to_string(top1) +
                            "); refine the time grid");
            }

            for (int q = 0; q < m; ++q) pos_of_label[q] = as.match[pos_of_label[q]];
            src_of_pos.assign(static_cast<std::size_t>(m), 0);
            for (int i = 0; i < m; ++i) src_of_pos[static_cast<std::size_t>(as.match[i])] = i;

            // keep the tracked window = labels 0..n-1: a tracked branch that
            // left the lowest-n positions trades labels with the branch that
            // entered, and the exchange is recorded as a crossing
            for (int k = 0; k < n; ++k) {
                if (pos_of_label[k] < n) continue;
                for (int b = n; b < m; ++b) {
                    if (pos_of_label[b] >= n) continue;
                    std::swap(pos_of_label[k], pos_of_label[b]);
                    out.crossings.push_back(
                        {path.t_grid[s - 1], path.t_grid[s], k + 1, n + 1, 0.0});
                    break;
                }
                require(pos_of_label[k] < n, ErrorCode::pairing_failure,
                        "tracked branch left the computed window; increase pad");
            }
        }

        out.pairing[s].assign(pos_of_label.begin(), pos_of_label.begin() + n);
        for (int k = 0; k < n; ++k) out.curves[k][s] = sys.lambdas[pos_of_label[k]];

        if (s > 0) {
            // order exchanges between consecutive steps: the linear
            // interpolants of the two curves meet, so the attained gap is 0
            for (int k = 0; k < n; ++k)
                for (int l = k + 1; l < n; ++l) {
                    const int dk = prev_pos[k] - prev_pos[l];
                    const int dc = pos_of_label[k] - pos_of_label[l];
                    if (dk * dc < 0)
                        out.crossings.push_back(
                            {path.t_grid[s - 1], path.t_grid[s], k + 1, l + 1, 0.0});
                }
        }

        // gap dips below the crossing threshold at this grid point
        for (int k = 0; k < n; ++k)
            for (int l = k + 1; l < n; ++l) {
                const double a = out.curves[k][s];
                const double b = out.curves[l][s];
                const double gap = std::abs(a - b);
                if (gap < opts.crossing_tol * (1.0 + std::min(a, b)))
                    out.crossings.push_back({path.t_grid[std::max(0, s - 1)],
                                             path.t_grid[std::min(steps - 1, s + 1)], k + 1,
                                             l + 1, gap});
            }

        prev_nodal = mb.nodal;
        prev_pos.assign(pos_of_label.begin(), pos_of_label.begin() + n);
        lam_prev2 = lam_prev;
        lam_prev = cur;
    }

    // merge events for the same pair with touching intervals
    std::sort(out.crossings.begin(), out.crossings.end(), [](const auto& a, const auto& b) {
        if (a.mode_a != b.mode_a) return a.mode_a < b.mode_a;
        if (a.mode_b != b.mode_b) return a.mode_b < b.mode_b;
        return a.t_lo < b.t_lo;
    });
    std::vector<CrossingEvent> merged;
    for (const auto& ev : out.crossings) {
        if (!merged.empty()) {
            auto& last = merged.back();
            if (last.mode_a == ev.mode_a && last.mode_b == ev.mode_b &&
                ev.t_lo <= last.t_hi + 1e-12) {
                last.t_hi = std::max(last.t_hi, ev.t_hi);
                last.min_gap = std::min(last.min_gap, ev.min_gap);
                continue;
            }
        }
        merged.push_back(ev);
    }
    out.crossings = std::move(merged);
    return out;
}

} // namespace speclab::spectral
