#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace speclab::geom {

struct Point2 {
    double x = 0.0;
    double y = 0.0;
};

inline Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
inline Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
inline Point2 operator*(double s, Point2 a) { return {s * a.x, s * a.y}; }

// Exact description of 1/mu_i^2 in the basis (1, sqrt(D)): 1/mu_i^2 = u + v*sqrt(D).
// Radicand D is shared across dimensions; D == 0 means all entries are integers.
struct ExactInvMuSq {
    std::int64_t u = 0;
    std::int64_t v = 0;
};

// box domain prod_i (0, mu_i * pi)
struct Orthotope {
    std::vector<double> mu;
    std::int64_t exact_D = -1;              // -1: no exact metadata
    std::vector<ExactInvMuSq> exact_inv;    // per-dimension, when exact_D >= 0

    int dim() const { return static_cast<int>(mu.size()); }
    double side(int i) const;
    double volume() const;
    bool has_exact() const { return exact_D >= 0; }
};

Orthotope make_orthotope(std::vector<double> mu);
// attach exact 1/mu^2 metadata (validated against the floating mu values)
Orthotope make_orthotope_exact(std::vector<double> mu, std::int64_t D,
                               std::vector<ExactInvMuSq> inv);

struct BoundaryEdge {
    int a = -1, b = -1;       // vertex indices, traversed with interior on the left
    double nx = 0, ny = 0;    // outward unit normal
    double length = 0;
};

struct MeshedDomain {
    std::vector<Point2> vertices;
    std::vector<std::array<int, 3>> triangles;  // CCW
    std::vector<BoundaryEdge> boundary_edges;
    std::vector<char> on_boundary;  // per-vertex
    std::vector<double> cell_area;
    double h_target = 0.0;

    int num_vertices() const { return static_cast<int>(vertices.size()); }
    int num_cells() const { return static_cast<int>(triangles.size()); }
    int num_interior() const;
    double total_area() const;
    Point2 centroid(int t) const;

    // recompute areas, boundary edges, normals and flags from vertices+triangles
    void rebuild_metrics();
    // throws mesh-invalid on structural violations; the h_target edge bound is
    // a mesher contract, so deformed meshes validate with enforce_h = false
    void validate(bool enforce_h = true) const;
};

struct VectorField2D {
    std::function<std::array<double, 2>(double, double)> eval;
    double support_radius = 0.0;  // field vanishes at |x| > support_radius
    std::string descriptor;
};

// The squashing field: (x1*x2, x2^2 - (x1^2+x2^2+1)/2) inside radius sqrt(rho),
// zero outside sqrt(rho+1), C^2 quintic-smoothstep blend in r^2 between.
VectorField2D squashing_field(double rho = 4.0);

// meshers
MeshedDomain mesh_rectangle(double lx, double ly, double h);
MeshedDomain mesh_unit_disk(double h);
MeshedDomain mesh_polygon(const std::vector<Point2>& polygon, double h);

// maps of the unit disk for "mapped ball" domains
struct DiskMap {
    enum class Kind { identity, affine, radial_fourier };
    Kind kind = Kind::identity;
    std::array<double, 4> A{1, 0, 0, 1};  // row-major 2x2, affine
    std::array<double, 2> shift{0, 0};
    std::vector<double> fourier_cos;  // radial r(theta) = 1 + sum c_j cos(j theta) + s_j sin(j theta)
    std::vector<double> fourier_sin;

    Point2 apply(Point2 p) const;
    std::string describe() const;
};
MeshedDomain mesh_mapped_disk(const DiskMap& map, double h);

// parsed form of the JSON domain document
struct DomainSpec {
    enum class Kind { orthotope, polygon, disk, mapped_ball };
    Kind kind = Kind::orthotope;
    Orthotope ortho;                 // orthotope
    std::vector<Point2> polygon;     // polygon
    DiskMap map;                     // mapped_ball
    std::string describe() const;
};

// meshes 2D specs; orthotopes must be 2D here
MeshedDomain mesh_domain(const DomainSpec& spec, double h);

// regular n-gon inscribed in the unit circle, first vertex at angle 0
std::vector<Point2> regular_polygon(int sides);

// vertex transport along the field's flow, adaptive Dormand-Prince, local error <= 1e-10
Point2 flow_point(const VectorField2D& field, Point2 start, double t);
MeshedDomain flow_deform(const MeshedDomain& dom, const VectorField2D& field, double t);

struct DeformationPath {
    std::vector<double> t_grid;        // strictly increasing, starts at 0
    std::vector<MeshedDomain> meshes;  // shared connectivity
    std::string generator;

    int steps() const { return static_cast<int>(t_grid.size()); }
    void validate() const;
};

DeformationPath interpolation_path(const MeshedDomain& dom0, const MeshedDomain& dom1,
                                   int steps);
DeformationPath flow_path(const MeshedDomain& dom, const VectorField2D& field,
                          double t_final, int steps);

} // namespace speclab::geom
