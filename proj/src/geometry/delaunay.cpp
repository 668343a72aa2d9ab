// Polygon meshing: jittered hex lattice interior points + boundary samples,
// triangulated by Bowyer-Watson, then filtered to the polygon.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <vector>

#include "speclab/errors.hpp"
#include "speclab/geometry.hpp"

namespace speclab::geom {

namespace {

double cross(const Point2& o, const Point2& a, const Point2& b) {
    return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

bool segments_properly_intersect(const Point2& a, const Point2& b, const Point2& c,
                                 const Point2& d) {
    const double d1 = cross(c, d, a), d2 = cross(c, d, b);
    const double d3 = cross(a, b, c), d4 = cross(a, b, d);
    return ((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) &&
           ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0));
}

bool point_in_polygon(const std::vector<Point2>& poly, Point2 p) {
    bool inside = false;
    const std::size_t n = poly.size();
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        const Point2 &pi = poly[i], &pj = poly[j];
        if ((pi.y > p.y) != (pj.y > p.y)) {
            const double xint = pj.x + (p.y - pj.y) / (pi.y - pj.y) * (pi.x - pj.x);
            if (p.x < xint) inside = !inside;
        }
    }
    return inside;
}

double dist_to_segment(Point2 p, Point2 a, Point2 b) {
    const double vx = b.x - a.x, vy = b.y - a.y;
    const double len2 = vx * vx + vy * vy;
    double t = len2 > 0 ? ((p.x - a.x) * vx + (p.y - a.y) * vy) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    return std::hypot(p.x - (a.x + t * vx), p.y - (a.y + t * vy));
}

double dist_to_polyline(const std::vector<Point2>& poly, Point2 p) {
    double d = 1e300;
    for (std::size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++)
        d = std::min(d, dist_to_segment(p, poly[j], poly[i]));
    return d;
}

// splitmix64 for deterministic jitter
std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}
double jitter01(std::uint64_t key) {
    return static_cast<double>(mix64(key) >> 11) * 0x1.0p-53;
}

struct BWTriangle {
    int a, b, c;
    double ccx, ccy, rr;  // circumcenter and squared radius
    bool alive = true;
};

BWTriangle make_bw_triangle(const std::vector<Point2>& pts, int a, int b, int c) {
    // orient CCW
    if (cross(pts[a], pts[b], pts[c]) < 0) std::swap(b, c);
    const Point2 &A = pts[a], &B = pts[b], &C = pts[c];
    const double d = 2.0 * (A.x * (B.y - C.y) + B.x * (C.y - A.y) + C.x * (A.y - B.y));
    BWTriangle t{a, b, c, 0, 0, 1e300, true};
    if (std::abs(d) > 1e-300) {
        const double a2 = A.x * A.x + A.y * A.y;
        const double b2 = B.x * B.x + B.y * B.y;
        const double c2 = C.x * C.x + C.y * C.y;
        t.ccx = (a2 * (B.y - C.y) + b2 * (C.y - A.y) + c2 * (A.y - B.y)) / d;
        t.ccy = (a2 * (C.x - B.x) + b2 * (A.x - C.x) + c2 * (B.x - A.x)) / d;
        const double dx = A.x - t.ccx, dy = A.y - t.ccy;
        t.rr = dx * dx + dy * dy;
    }
    return t;
}

std::vector<std::array<int, 3>> bowyer_watson(std::vector<Point2> pts) {
    const int n = static_cast<int>(pts.size());
    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    for (const auto& p : pts) {
        xmin = std::min(xmin, p.x);
        xmax = std::max(xmax, p.x);
        ymin = std::min(ymin, p.y);
        ymax = std::max(ymax, p.y);
    }
    const double cx = 0.5 * (xmin + xmax), cy = 0.5 * (ymin + ymax);
    const double R = 10.0 * (std::hypot(xmax - xmin, ymax - ymin) + 1.0);
    pts.push_back({cx, cy + 2.0 * R});
    pts.push_back({cx - 1.8 * R, cy - R});
    pts.push_back({cx + 1.8 * R, cy - R});

    std::vector<BWTriangle> tris;
    tris.push_back(make_bw_triangle(pts, n, n + 1, n + 2));

    std::vector<int> bad;
    std::map<std::pair<int, int>, int> edge_count;
    for (int p = 0; p < n; ++p) {
        bad.clear();
        edge_count.clear();
        const Point2& q = pts[p];
        for (std::size_t t = 0; t < tris.size(); ++t) {
            if (!tris[t].alive) continue;
            const double dx = q.x - tris[t].ccx, dy = q.y - tris[t].ccy;
            if (dx * dx + dy * dy <= tris[t].rr * (1.0 + 1e-10)) bad.push_back(static_cast<int>(t));
        }
        for (int t : bad) {
            const int vv[3] = {tris[t].a, tris[t].b, tris[t].c};
            for (int e = 0; e < 3; ++e) {
                const int u = vv[e], v = vv[(e + 1) % 3];
                ++edge_count[{std::min(u, v), std::max(u, v)}];
            }
            tris[t].alive = false;
        }
        for (int t : bad) {
            const int vv[3] = {tris[t].a, tris[t].b, tris[t].c};
            for (int e = 0; e < 3; ++e) {
                const int u = vv[e], v = vv[(e + 1) % 3];
                if (edge_count[{std::min(u, v), std::max(u, v)}] == 1)
                    tris.push_back(make_bw_triangle(pts, u, v, p));
            }
        }
        // compact occasionally to keep the scan linear in live triangles
        if (tris.size() > 4096 && tris.size() > 3 * static_cast<std::size_t>(n)) {
            std::vector<BWTriangle> live;
            live.reserve(tris.size() / 2);
            for (auto& t : tris)
                if (t.alive) live.push_back(t);
            tris.swap(live);
        }
    }
    std::vector<std::array<int, 3>> out;
    for (const auto& t : tris)
        if (t.alive && t.a < n && t.b < n && t.c < n) out.push_back({t.a, t.b, t.c});
    return out;
}

} // namespace

MeshedDomain mesh_polygon(const std::vector<Point2>& polygon_in, double h) {
    require(h > 0, ErrorCode::invalid_parameter, "mesh size h must be positive");
    require(polygon_in.size() >= 3, ErrorCode::invalid_parameter,
            "polygon needs at least 3 vertices");
    std::vector<Point2> poly = polygon_in;
    for (std::size_t i = 0; i < poly.size(); ++i) {
        const Point2& a = poly[i];
        const Point2& b = poly[(i + 1) % poly.size()];
        require(std::hypot(a.x - b.x, a.y - b.y) >= 1e-9, ErrorCode::invalid_parameter,
                "polygon has vertices closer than 1e-9; rejected, not merged");
    }
    double signed_area = 0.0;
    for (std::size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++)
        signed_area += 0.5 * (poly[j].x * poly[i].y - poly[i].x * poly[j].y);
    require(std::abs(signed_area) > 1e-15, ErrorCode::invalid_parameter,
            "polygon has zero area");
    if (signed_area < 0) std::reverse(poly.begin(), poly.end());
    const std::size_t np = poly.size();
    for (std::size_t i = 0; i < np; ++i)
        for (std::size_t j = i + 1; j < np; ++j) {
            if (j == i + 1 || (i == 0 && j == np - 1)) continue;  // adjacent edges share a vertex
            require(!segments_properly_intersect(poly[i], poly[(i + 1) % np], poly[j],
                                                 poly[(j + 1) % np]),
                    ErrorCode::mesh_invalid, "self-intersecting polygon");
        }

    // boundary samples, each polygon edge split into <= h pieces
    std::vector<Point2> points;
    for (std::size_t i = 0; i < np; ++i) {
        const Point2 &a = poly[i], &b = poly[(i + 1) % np];
        const double len = std::hypot(b.x - a.x, b.y - a.y);
        const int nseg = std::max(1, static_cast<int>(std::ceil(len / h)));
        for (int s = 0; s < nseg; ++s) {
            const double t = static_cast<double>(s) / nseg;
            points.push_back({a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)});
        }
    }
    const int n_boundary = static_cast<int>(points.size());

    // jittered hex lattice interior, cleared away from the boundary
    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    for (const auto& p : poly) {
        xmin = std::min(xmin, p.x);
        xmax = std::max(xmax, p.x);
        ymin = std::min(ymin, p.y);
        ymax = std::max(ymax, p.y);
    }
    // pitch/clearance sized so the strip between the last surviving hex row
    // and the boundary stays well under the 1.5*h edge contract
    const double pitch = 0.78 * h;
    const double row_h = pitch * std::sqrt(3.0) / 2.0;
    const double clearance = 0.45 * h;
    const int nrows = static_cast<int>(std::floor((ymax - ymin) / row_h));
    require(static_cast<long long>(std::max(0, nrows) + 1) *
                    (static_cast<long long>((xmax - xmin) / pitch) + 2) <=
                8'000'000,
            ErrorCode::mesh_resolution, "polygon mesh would exceed the point budget; increase h");
    for (int r = 0; r <= nrows; ++r) {
        const double y0 = ymin + (r + 0.5) * row_h;
        const double xoff = (r % 2) ? 0.5 * pitch : 0.0;
        const int ncols = static_cast<int>(std::floor((xmax - xmin) / pitch));
        for (int c = 0; c <= ncols; ++c) {
            const std::uint64_t key = (static_cast<std::uint64_t>(r) << 32) | static_cast<std::uint32_t>(c);
            Point2 p{xmin + xoff + (c + 0.5) * pitch + (jitter01(key * 2 + 1) - 0.5) * 0.02 * h,
                     y0 + (jitter01(key * 2 + 2) - 0.5) * 0.02 * h};
            if (!point_in_polygon(poly, p)) continue;
            if (dist_to_polyline(poly, p) < clearance) continue;
            points.push_back(p);
        }
    }

    auto tris = bowyer_watson(points);

    // keep triangles whose centroid is inside, then drop orphaned points
    std::vector<std::array<int, 3>> kept;
    for (const auto& t : tris) {
        const Point2 c{(points[t[0]].x + points[t[1]].x + points[t[2]].x) / 3.0,
                       (points[t[0]].y + points[t[1]].y + points[t[2]].y) / 3.0};
        if (point_in_polygon(poly, c)) kept.push_back(t);
    }
    require(!kept.empty(), ErrorCode::mesh_resolution,
            "no triangles inside polygon; h too large to resolve the boundary");

    std::vector<int> remap(points.size(), -1);
    MeshedDomain m;
    m.h_target = h;
    for (const auto& t : kept)
        for (int v : t)
            if (remap[v] < 0) {
                remap[v] = static_cast<int>(m.vertices.size());
                m.vertices.push_back(points[v]);
            }
    for (int v = 0; v < n_boundary; ++v)
        require(remap[v] >= 0, ErrorCode::mesh_resolution,
                "boundary sample lost in triangulation; refine h");
    for (const auto& t : kept) m.triangles.push_back({remap[t[0]], remap[t[1]], remap[t[2]]});
    m.rebuild_metrics();

    // every consecutive boundary-sample pair must survive as a mesh edge
    std::map<std::pair<int, int>, bool> edges;
    for (const auto& t : m.triangles)
        for (int e = 0; e < 3; ++e) {
            const int u = t[e], v = t[(e + 1) % 3];
            edges[{std::min(u, v), std::max(u, v)}] = true;
        }
    for (int v = 0; v < n_boundary; ++v) {
        const int a = remap[v], b = remap[(v + 1) % n_boundary];
        require(edges.count({std::min(a, b), std::max(a, b)}) > 0, ErrorCode::mesh_resolution,
                "polygon boundary edge not recovered by triangulation; refine h");
    }
    m.validate();
    return m;
}

} // namespace speclab::geom
