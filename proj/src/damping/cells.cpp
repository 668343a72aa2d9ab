#include "speclab/damping.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "speclab/errors.hpp"
#include "speclab/kernels.hpp"
#include "speclab/quadrature.hpp"

namespace speclab::spectral {

double DampingCells::total_area() const { return kernels::sum(area.data(), area.size()); }

DampingCells grid_cells(const geom::Orthotope& box, const std::vector<int>& shape) {
    const int dim = box.dim();
    require(dim >= 1, ErrorCode::invalid_parameter, "grid_cells: empty orthotope");
    require(static_cast<int>(shape.size()) == dim, ErrorCode::invalid_parameter,
            "grid_cells: shape rank does not match the orthotope dimension");
    long count = 1;
    for (int s : shape) {
        require(s >= 1, ErrorCode::invalid_parameter, "grid_cells: nonpositive cell count");
        count *= s;
        require(count <= 200000, ErrorCode::work_budget,
                "grid_cells: cell count exceeds the supported budget");
    }

    DampingCells cells;
    cells.shape = shape;
    cells.edges.resize(dim);
    for (int d = 0; d < dim; ++d) {
        cells.edges[d].resize(shape[d] + 1);
        for (int j = 0; j <= shape[d]; ++j)
            cells.edges[d][j] = box.side(d) * static_cast<double>(j) / shape[d];
    }
    cells.area.resize(count);
    cells.center.resize(count);
    std::vector<int> idx(dim, 0);
    for (long c = 0; c < count; ++c) {
        double a = 1.0;
        PointXd mid(dim);
        for (int d = 0; d < dim; ++d) {
            const double e0 = cells.edges[d][idx[d]], e1 = cells.edges[d][idx[d] + 1];
            a *= e1 - e0;
            mid[d] = 0.5 * (e0 + e1);
        }
        cells.area[c] = a;
        cells.center[c] = std::move(mid);
        for (int d = dim - 1; d >= 0; --d) {  // last axis fastest
            if (++idx[d] < shape[d]) break;
            idx[d] = 0;
        }
    }
    return cells;
}

DampingCells mesh_cells(const geom::MeshedDomain& dom) {
    require(dom.num_cells() >= 1, ErrorCode::mesh_invalid, "mesh_cells: empty mesh");
    DampingCells cells;
    cells.area = dom.cell_area;
    cells.center.resize(dom.num_cells());
    for (int t = 0; t < dom.num_cells(); ++t) {
        const auto p = dom.centroid(t);
        cells.center[t] = {p.x, p.y};
    }
    return cells;
}

DampingCells default_cells(const EigenSystem& sys) {
    if (const auto* mb = sys.mesh()) return mesh_cells(mb->mesh);
    const auto& box = sys.orthotope()->domain;
    const int per_axis = static_cast<int>(std::lround(std::pow(4096.0, 1.0 / box.dim())));
    return grid_cells(box, std::vector<int>(box.dim(), per_axis));
}

void DampingDensity::validate() const {
    require(static_cast<int>(a.size()) == cells.count(), ErrorCode::invalid_parameter,
            "damping density: one value per cell required");
    require(budget > 0.0, ErrorCode::invalid_parameter, "damping density: positive budget required");
    for (double v : a)
        require(v >= -1e-12 && v <= 1.0 + 1e-12, ErrorCode::invalid_parameter,
                "damping density: values must lie in [0,1]");
    const double total = cells.total_area();
    const double mass = kernels::dot(a.data(), cells.area.data(), a.size());
    require(std::abs(mass - budget) <= 1e-9 * total, ErrorCode::invalid_parameter,
            "damping density: cell masses do not meet the budget");
}

DampingDensity uniform_density(DampingCells cells, double ell) {
    const double total = cells.total_area();
    require(ell > 0.0 && ell <= total * (1.0 + 1e-12), ErrorCode::invalid_parameter,
            "uniform_density: budget must lie in (0, |Omega|]");
    DampingDensity density{std::move(cells), {}, ell};
    density.a.assign(density.cells.count(), std::min(1.0, ell / total));
    return density;
}

DampingDensity indicator_density(DampingCells cells,
                                 const std::function<bool(const PointXd&)>& inside) {
    DampingDensity density{std::move(cells), {}, 0.0};
    density.a.resize(density.cells.count());
    for (int c = 0; c < density.cells.count(); ++c) {
        density.a[c] = inside(density.cells.center[c]) ? 1.0 : 0.0;
        density.budget += density.a[c] * density.cells.area[c];
    }
    require(density.budget > 0.0, ErrorCode::invalid_parameter,
            "indicator_density: the region misses every cell");
    return density;
}

DampingDensity density_from_values(DampingCells cells, std::vector<double> a) {
    DampingDensity density{std::move(cells), std::move(a), 0.0};
    for (double& v : density.a) v = std::clamp(v, 0.0, 1.0);
    density.budget =
        kernels::dot(density.a.data(), density.cells.area.data(), density.a.size());
    density.validate();
    return density;
}

namespace {

// cells and system must discretize the same domain: grids over the system's
// orthotope, the mesh's own triangles otherwise
void require_matching(const EigenSystem& sys, const DampingCells& cells) {
    if (const auto* ob = sys.orthotope()) {
        require(cells.is_grid(), ErrorCode::incompatible_mesh,
                "damping cells: closed-form systems need grid cells");
        require(static_cast<int>(cells.shape.size()) == ob->domain.dim(),
                ErrorCode::incompatible_mesh, "damping cells: grid rank mismatch");
        for (int d = 0; d < ob->domain.dim(); ++d) {
            const double side = ob->domain.side(d);
            require(std::abs(cells.edges[d].back() - side) <= 1e-9 * side,
                    ErrorCode::incompatible_mesh, "damping cells: grid does not span the domain");
        }
        return;
    }
    const auto* mb = sys.mesh();
    require(!cells.is_grid() && cells.count() == mb->mesh.num_cells(),
            ErrorCode::incompatible_mesh, "damping cells: not this system's triangles");
}

// per-axis tables T[d](j, p) = integral over grid segment j of
// f(k_p x / mu_d) with f = sin^2 (squares) or sin*sin against mode q
std::vector<Eigen::MatrixXd> axis_sin2_tables(const OrthotopeBasis& ob, const DampingCells& cells,
                                              int N) {
    const int dim = ob.domain.dim();
    std::vector<Eigen::MatrixXd> tables(dim);
    for (int d = 0; d < dim; ++d) {
        const auto& e = cells.edges[d];
        const int segs = cells.shape[d];
        tables[d].resize(segs, N);
        for (int p = 0; p < N; ++p) {
            const double m2 = 2.0 * ob.modes[p].K[d] / ob.domain.mu[d];
            for (int j = 0; j < segs; ++j)
                tables[d](j, p) =
                    0.5 * (e[j + 1] - e[j]) - 0.5 * quad::integral_cos(m2, e[j], e[j + 1]);
        }
    }
    return tables;
}

} // namespace

Eigen::MatrixXd mode_weights(const EigenSystem& sys, const DampingCells& cells, int N) {
    require(N >= 1 && N <= sys.n(), ErrorCode::invalid_parameter,
            "mode_weights: mode count out of range");
    require_matching(sys, cells);
    const int C = cells.count();
    Eigen::MatrixXd w(C, N);

    if (const auto* ob = sys.orthotope()) {
        const int dim = ob->domain.dim();
        const auto tables = axis_sin2_tables(*ob, cells, N);
        std::vector<int> idx(dim, 0);
        for (int c = 0; c < C; ++c) {
            for (int p = 0; p < N; ++p) {
                double v = ob->modes[p].norm_constant * ob->modes[p].norm_constant;
                for (int d = 0; d < dim; ++d) v *= tables[d](idx[d], p);
                w(c, p) = v;
            }
            for (int d = dim - 1; d >= 0; --d) {
                if (++idx[d] < cells.shape[d]) break;
                idx[d] = 0;
            }
        }
        return w;
    }

    const auto* mb = sys.mesh();
    for (int c = 0; c < C; ++c) {
        const auto& tri = mb->mesh.triangles[c];
        for (int p = 0; p < N; ++p) {
            const double mid = (mb->nodal(tri[0], p) + mb->nodal(tri[1], p) +
                                mb->nodal(tri[2], p)) / 3.0;
            w(c, p) = mid * mid * cells.area[c];
        }
    }
    return w;
}

double evaluate_JN(const EigenSystem& sys, const DampingDensity& density, int N) {
    density.validate();
    const Eigen::MatrixXd w = mode_weights(sys, density.cells, N);
    double value = 0.0;
    for (int p = 0; p < N; ++p) {
        const double mass = kernels::dot(density.a.data(), w.col(p).data(), density.a.size());
        if (p == 0 || mass < value) value = mass;
    }
    return value;
}

namespace detail {

Eigen::MatrixXd damped_gram(const EigenSystem& sys, const DampingDensity& density, int M) {
    require(M >= 1 && M <= sys.n(), ErrorCode::invalid_parameter,
            "damped_gram: mode count out of range");
    density.validate();
    require_matching(sys, density.cells);
    const auto& cells = density.cells;
    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(M, M);

    if (const auto* ob = sys.orthotope()) {
        const int dim = ob->domain.dim();
        // per-axis pair tables: integral over segment j of the product of the
        // axis-d factors of modes p and q
        std::vector<Eigen::MatrixXd> tables(dim);
        for (int d = 0; d < dim; ++d) {
            const auto& e = cells.edges[d];
            tables[d].resize(cells.shape[d], M * M);
            for (int p = 0; p < M; ++p)
                for (int q = p; q < M; ++q) {
                    const double k1 = ob->modes[p].K[d] / ob->domain.mu[d];
                    const double k2 = ob->modes[q].K[d] / ob->domain.mu[d];
                    for (int j = 0; j < cells.shape[d]; ++j)
                        tables[d](j, p * M + q) =
                            quad::integral_sin_sin(k1, k2, e[j], e[j + 1]);
                }
        }
        std::vector<int> idx(dim, 0);
        for (int c = 0; c < cells.count(); ++c) {
            if (density.a[c] != 0.0) {
                for (int p = 0; p < M; ++p)
                    for (int q = p; q < M; ++q) {
                        double v = density.a[c];
                        for (int d = 0; d < dim; ++d) v *= tables[d](idx[d], p * M + q);
                        B(p, q) += v * ob->modes[p].norm_constant * ob->modes[q].norm_constant;
                    }
            }
            for (int d = dim - 1; d >= 0; --d) {
                if (++idx[d] < cells.shape[d]) break;
                idx[d] = 0;
            }
        }
    } else {
        const auto* mb = sys.mesh();
        // exact P1 products per triangle: area/12 * (u.v + sum(u) sum(v))
        for (int c = 0; c < cells.count(); ++c) {
            if (density.a[c] == 0.0) continue;
            const auto& tri = mb->mesh.triangles[c];
            const double scale = density.a[c] * cells.area[c] / 12.0;
            for (int p = 0; p < M; ++p) {
                const double u0 = mb->nodal(tri[0], p), u1 = mb->nodal(tri[1], p),
                             u2 = mb->nodal(tri[2], p);
                for (int q = p; q < M; ++q) {
                    const double v0 = mb->nodal(tri[0], q), v1 = mb->nodal(tri[1], q),
                                 v2 = mb->nodal(tri[2], q);
                    B(p, q) += scale * (u0 * v0 + u1 * v1 + u2 * v2 +
                                        (u0 + u1 + u2) * (v0 + v1 + v2));
                }
            }
        }
    }
    B = B.selfadjointView<Eigen::Upper>();
    return B;
}

} // namespace detail

} // namespace speclab::spectral
