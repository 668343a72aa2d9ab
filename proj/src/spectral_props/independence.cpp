#include <algorithm>
#include <cmath>
#include <numeric>

#include "speclab/errors.hpp"
#include "speclab/quadrature.hpp"
#include "speclab/spectral_props.hpp"

namespace speclab::spectral {

namespace detail {

double row_sorted_det(Eigen::MatrixXd M) {
    const int n = static_cast<int>(M.rows());
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    auto row_less = [&](int a, int b) {
        for (int j = 0; j < n; ++j) {
            if (M(a, j) < M(b, j)) return true;
            if (M(a, j) > M(b, j)) return false;
        }
        return false;
    };
    std::sort(order.begin(), order.end(), row_less);
    for (int r = 0; r + 1 < n; ++r)
        if (!row_less(order[r], order[r + 1]) && !row_less(order[r + 1], order[r]))
            return 0.0;  // duplicate rows

    // permutation parity by cycle decomposition
    std::vector<char> seen(n, 0);
    int transpositions = 0;
    for (int s = 0; s < n; ++s) {
        if (seen[s]) continue;
        int len = 0;
        for (int c = s; !seen[c]; c = order[c]) {
            seen[c] = 1;
            ++len;
        }
        transpositions += len - 1;
    }

    Eigen::MatrixXd S(n, n);
    for (int r = 0; r < n; ++r) S.row(r) = M.row(order[r]);
    const double det = S.partialPivLu().determinant();
    return (transpositions % 2) ? -det : det;
}

} // namespace detail

namespace {

// values matrix V(i, j) = phi_{j+1}(x_i)
Eigen::MatrixXd value_matrix(const EigenSystem& sys, const std::vector<PointXd>& points) {
    const int n = sys.n();
    Eigen::MatrixXd V(static_cast<int>(points.size()), n);
    for (int j = 0; j < n; ++j) {
        const auto vals = evaluate_eigenfunction(sys, j + 1, points);
        for (int i = 0; i < static_cast<int>(points.size()); ++i) V(i, j) = vals[i];
    }
    return V;
}

bool point_in_mesh(const geom::MeshedDomain& m, double x, double y) {
    for (int t = 0; t < m.num_cells(); ++t) {
        const auto& tri = m.triangles[t];
        const geom::Point2 a = m.vertices[tri[0]];
        const geom::Point2 b = m.vertices[tri[1]];
        const geom::Point2 c = m.vertices[tri[2]];
        const double twice = 2.0 * m.cell_area[t];
        const double wa = ((b.x - x) * (c.y - y) - (c.x - x) * (b.y - y)) / twice;
        const double wb = ((c.x - x) * (a.y - y) - (a.x - x) * (c.y - y)) / twice;
        if (wa >= -1e-9 && wb >= -1e-9 && 1.0 - wa - wb >= -1e-9) return true;
    }
    return false;
}

double halton(std::uint64_t index, int base) {
    double f = 1.0, r = 0.0;
    while (index > 0) {
        f /= base;
        r += f * static_cast<double>(index % base);
        index /= base;
    }
    return r;
}

constexpr int kPrimes[] = {2, 3, 5, 7, 11, 13, 17, 19};

} // namespace

double squared_independence_det(const EigenSystem& sys, const std::vector<PointXd>& points) {
    const int n = sys.n();
    require(static_cast<int>(points.size()) == n, ErrorCode::invalid_parameter,
            "need exactly one point per mode");
    Eigen::MatrixXd M = value_matrix(sys, points).cwiseAbs2();
    return detail::row_sorted_det(std::move(M));
}

PropertyReport squared_independence_search(const EigenSystem& sys, int trials,
                                           std::uint64_t seed) {
    require(trials >= 0, ErrorCode::invalid_parameter, "trial count must be nonnegative");
    const int n = sys.n();

    PropertyReport r;
    r.property = "squared_independence";
    r.n = n;
    r.seed = seed;
    r.verdict = Verdict::inconclusive;
    r.witness = "no determinant witness found";

    // domain sampler: direct scaling on orthotopes, bounding-box rejection on meshes
    int dim = 2;
    std::function<PointXd(std::uint64_t)> sample;
    if (const auto* ob = sys.orthotope()) {
        dim = ob->domain.dim();
        require(dim <= 8, ErrorCode::invalid_parameter, "search supports up to 8 dimensions");
        const auto dom = ob->domain;
        sample = [dom, dim](std::uint64_t idx) {
            PointXd p(dim);
            for (int i = 0; i < dim; ++i) p[i] = dom.side(i) * halton(idx, kPrimes[i]);
            return p;
        };
    } else {
        const auto& mesh = sys.mesh()->mesh;
        double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
        for (const auto& v : mesh.vertices) {
            xmin = std::min(xmin, v.x);
            xmax = std::max(xmax, v.x);
            ymin = std::min(ymin, v.y);
            ymax = std::max(ymax, v.y);
        }
        sample = [&mesh, xmin, xmax, ymin, ymax](std::uint64_t idx) {
            for (std::uint64_t i = idx;; i += 1000003) {  // deterministic reseek
                const double x = xmin + (xmax - xmin) * halton(i, 2);
                const double y = ymin + (ymax - ymin) * halton(i, 3);
                if (point_in_mesh(mesh, x, y)) return PointXd{x, y};
            }
        };
    }

    std::uint64_t idx = 1 + seed;
    for (int t = 0; t < trials; ++t) {
        std::vector<PointXd> pts;
        pts.reserve(n);
        for (int i = 0; i < n; ++i) pts.push_back(sample(idx++));

        Eigen::MatrixXd M = value_matrix(sys, pts).cwiseAbs2();
        double row_prod = 1.0;
        for (int i = 0; i < n; ++i) row_prod *= M.row(i).norm();
        const double tol = 1e-8 * row_prod;
        const double det = detail::row_sorted_det(M);

        r.trials = t + 1;
        if (std::abs(det) > std::abs(r.best_det)) {
            r.best_det = det;
            r.det_tol = tol;
            r.points = pts;
        }
        if (std::abs(det) > tol) {
            r.verdict = Verdict::holds;
            r.best_det = det;
            r.det_tol = tol;
            r.points = pts;
            r.witness = "determinant " + std::to_string(det) + " above tolerance " +
                        std::to_string(tol) + " after " + std::to_string(t + 1) + " trials";
            break;
        }
    }
    return r;
}

GramCertificate squared_gram(const EigenSystem& sys, const std::vector<char>* cell_mask) {
    const int n = sys.n();
    GramCertificate cert;
    cert.G.resize(n, n);

    if (const auto* ob = sys.orthotope()) {
        require(cell_mask == nullptr, ErrorCode::invalid_parameter,
                "cell masks apply to meshed systems only");
        const auto& dom = ob->domain;
        for (int i = 0; i < n; ++i)
            for (int j = i; j < n; ++j) {
                double g = 1.0;
                for (int d = 0; d < dom.dim(); ++d) {
                    const double mu = dom.mu[d];
                    const double c2 = 2.0 / (mu * M_PI);  // squared 1D norm constant
                    g *= c2 * c2 *
                         quad::integral_sin2_sin2(ob->modes[i].K[d] / mu,
                                                  ob->modes[j].K[d] / mu, 0.0, mu * M_PI);
                }
                cert.G(i, j) = cert.G(j, i) = g;
            }
        cert.tolerance = 1e-12;
    } else {
        const auto* mb = sys.mesh();
        const auto& mesh = mb->mesh;
        if (cell_mask != nullptr)
            require(static_cast<int>(cell_mask->size()) == mesh.num_cells(),
                    ErrorCode::invalid_parameter, "cell mask length mismatch");
        double area = 0.0;
        cert.G.setZero();
        for (int t = 0; t < mesh.num_cells(); ++t) {
            if (cell_mask && !(*cell_mask)[t]) continue;
            area += mesh.cell_area[t];
            const auto& tri = mesh.triangles[t];
            for (int i = 0; i < n; ++i) {
                const double vi = (mb->nodal(tri[0], i) + mb->nodal(tri[1], i) +
                                   mb->nodal(tri[2], i)) / 3.0;
                for (int j = i; j < n; ++j) {
                    const double vj = (mb->nodal(tri[0], j) + mb->nodal(tri[1], j) +
                                       mb->nodal(tri[2], j)) / 3.0;
                    cert.G(i, j) += mesh.cell_area[t] * vi * vi * vj * vj;
                }
            }
        }
        require(area > 0, ErrorCode::invalid_parameter, "subset has zero measure");
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < i; ++j) cert.G(i, j) = cert.G(j, i);
        // midpoint rule on P1 squares: O(h^2) heuristic accuracy estimate
        cert.tolerance = mesh.h_target * mesh.h_target * cert.G.diagonal().maxCoeff();
    }

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cert.G);
    cert.min_eigenvalue = es.eigenvalues().minCoeff();
    return cert;
}

Functional projection_functional(int n, int arg_index) {
    const int arity = n * (n + 1);
    require(arg_index >= 1 && arg_index <= arity, ErrorCode::invalid_parameter,
            "projection index out of range");
    return {arity,
            [arg_index](const std::vector<double>& a) { return a[arg_index - 1]; },
            "argument #" + std::to_string(arg_index)};
}

Functional det_squares_functional(int n) {
    return {n * (n + 1),
            [n](const std::vector<double>& a) {
                Eigen::MatrixXd M(n, n);
                for (int i = 0; i < n; ++i)
                    for (int j = 0; j < n; ++j) M(i, j) = a[i * n + j] * a[i * n + j];
                return detail::row_sorted_det(std::move(M));
            },
            "determinant of squared values"};
}

Functional lambda_combination_functional(int n, std::vector<double> q) {
    require(static_cast<int>(q.size()) == n, ErrorCode::invalid_parameter,
            "coefficient count must match the mode count");
    return {n * (n + 1),
            [n, q](const std::vector<double>& a) {
                double s = 0.0;
                for (int l = 0; l < n; ++l) s += q[l] * a[n * n + l];
                return s;
            },
            "rational combination of the eigenvalues"};
}

double generic_Fn(const EigenSystem& sys, const std::vector<PointXd>& points,
                  const Functional& fn) {
    const int n = sys.n();
    require(static_cast<int>(points.size()) == n, ErrorCode::invalid_parameter,
            "need exactly one point per mode");
    require(fn.arity == n * (n + 1), ErrorCode::invalid_parameter,
            "functional arity must be n(n+1)");
    Eigen::MatrixXd V = value_matrix(sys, points);
    std::vector<double> args;
    args.reserve(fn.arity);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) args.push_back(V(i, j));
    for (int l = 0; l < n; ++l) args.push_back(sys.lambdas[l]);
    return fn.f(args);
}

} // namespace speclab::spectral
