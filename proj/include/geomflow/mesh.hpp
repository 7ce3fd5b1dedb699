#pragma once

// Mesh data structures, geometry kernels and initial-shape generators for
// closed polygonal curves in R^2 and closed triangulated surfaces in R^3.

#include <array>
#include <string>
#include <vector>

#include "geomflow/error.hpp"
#include "geomflow/vec.hpp"

namespace gf {

// Closed polygon, vertex j joined to vertex (j+1) mod N. The curve is the
// image of a piecewise linear map over the parameter grid theta[0..N-1] in
// [0,2*pi); segment j lives on [theta_j, theta_{j+1}].
struct PolygonalCurve {
    std::vector<Vec2> vertices;
    std::vector<double> theta;  // node parameters, uniform 2*pi*j/N by default

    int size() const { return static_cast<int>(vertices.size()); }

    double dtheta(int j) const {
        const int n = size();
        return (j + 1 < n) ? theta[j + 1] - theta[j] : 2.0 * pi - theta[n - 1] + theta[0];
    }
    Vec2 edge(int j) const {
        const int n = size();
        return vertices[(j + 1) % n] - vertices[j];
    }
    double segment_length(int j) const { return norm(edge(j)); }

    // Throws Error(invalid_mesh) when any type invariant is violated.
    void validate() const;

    static constexpr double pi = 3.14159265358979323846;
};

PolygonalCurve make_curve(std::vector<Vec2> vertices);  // uniform theta

// Closed, consistently oriented triangulated 2-surface. reference_positions
// carries the nodal values Y of the inverse map y_h; they form a second valid
// mesh under the same connectivity and never change while vertices move.
struct TriSurface {
    std::vector<Vec3> vertices;
    std::vector<std::array<int, 3>> triangles;
    std::vector<Vec3> reference_positions;

    int vertex_count() const { return static_cast<int>(vertices.size()); }
    int triangle_count() const { return static_cast<int>(triangles.size()); }

    void validate() const;
};

// Per-segment geometry. tangent_theta is the parametric derivative of the
// piecewise linear map on the segment; rho is that vector rotated by +90
// degrees, so |rho| = segment length / dtheta and rho is orthogonal to the
// edge. normal = rho normalized.
struct SegmentGeometry {
    Vec2 a, b;
    double dtheta = 0.0;
    double length = 0.0;
    Vec2 tangent_theta;
    Vec2 rho;
    Vec2 normal;
};

SegmentGeometry segment_geometry(const PolygonalCurve& c, int j);

// Per-triangle geometry: area, unit normal and the (constant) tangential
// gradients of the three nodal basis functions.
struct TriangleGeometry {
    Vec3 q[3];
    double area = 0.0;
    Vec3 normal;
    Vec3 grad[3];
    double diameter = 0.0;  // longest edge
    double inradius = 0.0;  // 2*area/perimeter
};

TriangleGeometry triangle_geometry(const Vec3& q0, const Vec3& q1, const Vec3& q2);
TriangleGeometry triangle_geometry(const TriSurface& s, int t);

// ---- curve generators ----

PolygonalCurve generate_circle(int n, double radius);

enum class CurveShape {
    example1_flattened_circle,  // (cos t, (0.9 cos^2 t + 0.1) sin t)
    example2_fourpetal,         // (cos 2t cos t, cos 2t sin t)
    example3_graded_circle,     // unit circle, geometric segment grading
};

CurveShape curve_shape_from_string(const std::string& name);

// grading_ratio is only used by example3 (max/min segment length).
PolygonalCurve generate_parametrized_curve(CurveShape shape, int n, double grading_ratio = 1.35);

// ---- surface generators ----

TriSurface generate_icosphere(int subdivisions, double radius);

enum class SurfaceShape {
    dumbbell_07,       // (x, (0.7 x^2 + 0.3) y, (0.7 x^2 + 0.3) z) over the unit sphere
    dumbbell_06,       // coefficient pair (0.6, 0.4)
    undulating_torus,  // torus with z += sin(6*theta)/5, reference = plain torus
};

SurfaceShape surface_shape_from_string(const std::string& name);

struct TorusGrid {
    double r1 = 1.0;
    double r2 = 0.6;
    int n_theta = 128;
    int n_phi = 64;
};

TriSurface generate_dumbbell(double bulge, int subdivisions);  // bulge = 0.7 or 0.6
TriSurface generate_undulating_torus(const TorusGrid& grid);

// ---- measures and normals ----

double curve_length(const PolygonalCurve& c);
double surface_area(const TriSurface& s);
double max_triangle_diameter(const TriSurface& s);

// Normalized area-weighted average of incident triangle normals.
// Throws Error(degenerate_normal) when the weighted sum vanishes at a vertex.
std::vector<Vec3> vertex_normals_area_weighted(const TriSurface& s);

}  // namespace gf
