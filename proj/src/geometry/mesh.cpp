#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <sstream>

#include "speclab/errors.hpp"
#include "speclab/geometry.hpp"

namespace speclab::geom {

namespace {
double tri_signed_area(const Point2& a, const Point2& b, const Point2& c) {
    return 0.5 * ((b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x));
}
} // namespace

int MeshedDomain::num_interior() const {
    int k = 0;
    for (char f : on_boundary)
        if (!f) ++k;
    return k;
}

double MeshedDomain::total_area() const {
    double s = 0.0;
    for (double a : cell_area) s += a;
    return s;
}

Point2 MeshedDomain::centroid(int t) const {
    const auto& tri = triangles[t];
    const Point2 &a = vertices[tri[0]], &b = vertices[tri[1]], &c = vertices[tri[2]];
    return {(a.x + b.x + c.x) / 3.0, (a.y + b.y + c.y) / 3.0};
}

void MeshedDomain::rebuild_metrics() {
    cell_area.resize(triangles.size());
    for (std::size_t t = 0; t < triangles.size(); ++t) {
        const auto& tri = triangles[t];
        cell_area[t] = tri_signed_area(vertices[tri[0]], vertices[tri[1]], vertices[tri[2]]);
    }

    // directed edges that appear without a reverse partner form the boundary
    std::map<std::pair<int, int>, int> undirected_count;
    std::map<std::pair<int, int>, bool> directed_seen;
    for (const auto& tri : triangles) {
        for (int e = 0; e < 3; ++e) {
            const int a = tri[e], b = tri[(e + 1) % 3];
            ++undirected_count[{std::min(a, b), std::max(a, b)}];
            directed_seen[{a, b}] = true;
        }
    }
    boundary_edges.clear();
    for (const auto& [edge, seen] : directed_seen) {
        (void)seen;
        const auto [a, b] = edge;
        if (undirected_count[{std::min(a, b), std::max(a, b)}] == 1) {
            BoundaryEdge be;
            be.a = a;
            be.b = b;
            const double dx = vertices[b].x - vertices[a].x;
            const double dy = vertices[b].y - vertices[a].y;
            be.length = std::hypot(dx, dy);
            // interior lies left of a->b in a CCW mesh, so outward is (dy,-dx)
            be.nx = dy / be.length;
            be.ny = -dx / be.length;
            boundary_edges.push_back(be);
        }
    }
    on_boundary.assign(vertices.size(), 0);
    for (const auto& be : boundary_edges) {
        on_boundary[be.a] = 1;
        on_boundary[be.b] = 1;
    }
}

void MeshedDomain::validate(bool enforce_h) const {
    require(vertices.size() >= 3, ErrorCode::mesh_invalid, "mesh has fewer than 3 vertices");
    require(!triangles.empty(), ErrorCode::mesh_invalid, "mesh has no triangles");
    require(cell_area.size() == triangles.size(), ErrorCode::mesh_invalid,
            "cell areas out of sync with triangles");
    const int nv = num_vertices();
    std::map<std::pair<int, int>, int> undirected_count;
    std::map<std::pair<int, int>, int> directed_count;
    for (std::size_t t = 0; t < triangles.size(); ++t) {
        const auto& tri = triangles[t];
        for (int v : tri)
            require(v >= 0 && v < nv, ErrorCode::mesh_invalid, "triangle index out of range");
        require(tri[0] != tri[1] && tri[1] != tri[2] && tri[0] != tri[2],
                ErrorCode::mesh_invalid, "degenerate triangle with repeated vertex");
        require(cell_area[t] > 0.0, ErrorCode::mesh_invalid,
                "triangle " + std::to_string(t) + " has non-positive area");
        for (int e = 0; e < 3; ++e) {
            const int a = tri[e], b = tri[(e + 1) % 3];
            ++undirected_count[{std::min(a, b), std::max(a, b)}];
            ++directed_count[{a, b}];
        }
    }
    for (const auto& [edge, cnt] : undirected_count) {
        (void)edge;
        require(cnt <= 2, ErrorCode::mesh_invalid, "edge shared by more than two triangles");
    }
    for (const auto& [edge, cnt] : directed_count) {
        (void)edge;
        require(cnt == 1, ErrorCode::mesh_invalid, "inconsistent triangle orientation");
    }

    // boundary edges must chain into closed loops: in-degree = out-degree = 1
    std::map<int, int> outdeg, indeg;
    double loop_area = 0.0;
    for (const auto& be : boundary_edges) {
        require(std::abs(std::hypot(be.nx, be.ny) - 1.0) <= 1e-12, ErrorCode::mesh_invalid,
                "boundary normal not unit length");
        ++outdeg[be.a];
        ++indeg[be.b];
        loop_area += 0.5 * (vertices[be.a].x * vertices[be.b].y -
                            vertices[be.b].x * vertices[be.a].y);
    }
    for (const auto& [v, d] : outdeg)
        require(d == 1 && indeg[v] == 1, ErrorCode::mesh_invalid,
                "boundary edges do not form closed loops at vertex " + std::to_string(v));
    const double area = total_area();
    require(std::abs(loop_area - area) <= 1e-9 * std::max(1.0, area), ErrorCode::mesh_invalid,
            "boundary loop area disagrees with summed cell areas");

    if (enforce_h && h_target > 0.0) {
        for (const auto& [edge, cnt] : undirected_count) {
            (void)cnt;
            const double len = std::hypot(vertices[edge.first].x - vertices[edge.second].x,
                                          vertices[edge.first].y - vertices[edge.second].y);
            require(len <= 1.5 * h_target, ErrorCode::mesh_invalid,
                    "edge longer than 1.5*h_target");
        }
    }
}

MeshedDomain mesh_rectangle(double lx, double ly, double h) {
    require(lx > 0 && ly > 0, ErrorCode::invalid_parameter, "rectangle sides must be positive");
    require(h > 0, ErrorCode::invalid_parameter, "mesh size h must be positive");
    const int nx = std::max(1, static_cast<int>(std::ceil(lx / h)));
    const int ny = std::max(1, static_cast<int>(std::ceil(ly / h)));
    require(static_cast<long long>(nx + 1) * (ny + 1) <= 4'000'000, ErrorCode::mesh_resolution,
            "rectangle mesh would exceed the vertex budget; increase h");
    MeshedDomain m;
    m.h_target = h;
    const double hx = lx / nx, hy = ly / ny;
    m.vertices.reserve(static_cast<std::size_t>(nx + 1) * (ny + 1));
    for (int j = 0; j <= ny; ++j)
        for (int i = 0; i <= nx; ++i) m.vertices.push_back({i * hx, j * hy});
    auto vid = [nx](int i, int j) { return j * (nx + 1) + i; };
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            const int v00 = vid(i, j), v10 = vid(i + 1, j);
            const int v01 = vid(i, j + 1), v11 = vid(i + 1, j + 1);
            m.triangles.push_back({v00, v10, v11});
            m.triangles.push_back({v00, v11, v01});
        }
    m.rebuild_metrics();
    m.validate();
    return m;
}

MeshedDomain mesh_unit_disk(double h) {
    require(h > 0, ErrorCode::invalid_parameter, "mesh size h must be positive");
    // worst annulus-weave diagonal is ~1.54/nr, so 1.25 oversampling keeps
    // every edge within the 1.5*h contract
    const int nr = std::max(1, static_cast<int>(std::ceil(1.25 / h)));
    require(nr <= 2000, ErrorCode::mesh_resolution,
            "disk mesh would exceed the vertex budget; increase h");
    MeshedDomain m;
    m.h_target = h;
    m.vertices.push_back({0.0, 0.0});
    std::vector<int> ring_start(nr + 1, 0);
    for (int j = 1; j <= nr; ++j) {
        ring_start[j] = static_cast<int>(m.vertices.size());
        const double r = static_cast<double>(j) / nr;
        const int cnt = 6 * j;
        for (int k = 0; k < cnt; ++k) {
            const double th = 2.0 * std::numbers::pi * k / cnt;
            m.vertices.push_back({r * std::cos(th), r * std::sin(th)});
        }
    }
    auto push_ccw = [&m](int a, int b, int c) {
        if (tri_signed_area(m.vertices[a], m.vertices[b], m.vertices[c]) < 0) std::swap(b, c);
        m.triangles.push_back({a, b, c});
    };
    for (int k = 0; k < 6; ++k)
        push_ccw(0, ring_start[1] + k, ring_start[1] + (k + 1) % 6);
    for (int j = 1; j < nr; ++j) {
        const int ni = 6 * j, no = 6 * (j + 1);
        const int si = ring_start[j], so = ring_start[j + 1];
        int i = 0, o = 0;
        // weave the annulus by advancing whichever ring's next angle is smaller
        while (i < ni || o < no) {
            const double next_in = i < ni ? 2.0 * std::numbers::pi * (i + 1) / ni : 1e30;
            const double next_out = o < no ? 2.0 * std::numbers::pi * (o + 1) / no : 1e30;
            if (next_in <= next_out) {
                push_ccw(si + i % ni, si + (i + 1) % ni, so + o % no);
                ++i;
            } else {
                push_ccw(si + i % ni, so + (o + 1) % no, so + o % no);
                ++o;
            }
        }
    }
    m.rebuild_metrics();
    m.validate();
    return m;
}

Point2 DiskMap::apply(Point2 p) const {
    switch (kind) {
        case Kind::identity:
            return p;
        case Kind::affine:
            return {A[0] * p.x + A[1] * p.y + shift[0], A[2] * p.x + A[3] * p.y + shift[1]};
        case Kind::radial_fourier: {
            const double r = std::hypot(p.x, p.y);
            if (r == 0.0) return p;
            const double th = std::atan2(p.y, p.x);
            double rho = 1.0;
            for (std::size_t j = 0; j < fourier_cos.size(); ++j)
                rho += fourier_cos[j] * std::cos((j + 1) * th);
            for (std::size_t j = 0; j < fourier_sin.size(); ++j)
                rho += fourier_sin[j] * std::sin((j + 1) * th);
            return {p.x * rho, p.y * rho};
        }
    }
    return p;
}

std::string DiskMap::describe() const {
    std::ostringstream os;
    switch (kind) {
        case Kind::identity:
            os << "identity";
            break;
        case Kind::affine:
            os << "affine([[" << A[0] << "," << A[1] << "],[" << A[2] << "," << A[3]
               << "]]+[" << shift[0] << "," << shift[1] << "])";
            break;
        case Kind::radial_fourier:
            os << "radial_fourier(" << fourier_cos.size() << " cos, " << fourier_sin.size()
               << " sin terms)";
            break;
    }
    return os.str();
}

MeshedDomain mesh_mapped_disk(const DiskMap& map, double h) {
    MeshedDomain m = mesh_unit_disk(h);
    if (map.kind == DiskMap::Kind::identity) return m;
    for (auto& v : m.vertices) v = map.apply(v);
    m.rebuild_metrics();
    for (double a : m.cell_area)
        require(a > 0.0, ErrorCode::mesh_invalid,
                "mapped ball has inverted cells; map is not orientation-preserving on the mesh");
    m.validate(false);  // edge bound no longer meaningful after mapping
    return m;
}

std::vector<Point2> regular_polygon(int sides) {
    require(sides >= 3, ErrorCode::invalid_parameter, "polygon needs at least 3 sides");
    std::vector<Point2> poly(sides);
    for (int k = 0; k < sides; ++k) {
        const double th = 2.0 * std::numbers::pi * k / sides;
        poly[k] = {std::cos(th), std::sin(th)};
    }
    return poly;
}

std::string DomainSpec::describe() const {
    std::ostringstream os;
    switch (kind) {
        case Kind::orthotope: {
            os << "orthotope(mu=";
            for (std::size_t i = 0; i < ortho.mu.size(); ++i)
                os << (i ? "," : "") << ortho.mu[i];
            os << ")";
            break;
        }
        case Kind::polygon:
            os << "polygon(" << polygon.size() << " vertices)";
            break;
        case Kind::disk:
            os << "disk";
            break;
        case Kind::mapped_ball:
            os << "mapped_ball(" << map.describe() << ")";
            break;
    }
    return os.str();
}

MeshedDomain mesh_domain(const DomainSpec& spec, double h) {
    switch (spec.kind) {
        case DomainSpec::Kind::orthotope:
            require(spec.ortho.dim() == 2, ErrorCode::invalid_parameter,
                    "meshing is implemented for 2D orthotopes only");
            return mesh_rectangle(spec.ortho.side(0), spec.ortho.side(1), h);
        case DomainSpec::Kind::polygon:
            return mesh_polygon(spec.polygon, h);
        case DomainSpec::Kind::disk:
            return mesh_unit_disk(h);
        case DomainSpec::Kind::mapped_ball:
            return mesh_mapped_disk(spec.map, h);
    }
    fail(ErrorCode::invalid_parameter, "unknown domain kind");
}

} // namespace speclab::geom
