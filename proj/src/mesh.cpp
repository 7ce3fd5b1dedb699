#include "geomflow/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <utility>

namespace gf {

namespace {
constexpr double kPi = PolygonalCurve::pi;
}

void PolygonalCurve::validate() const {
    const int n = size();
    if (n < 3) fail(ErrorCode::invalid_mesh, "curve needs at least 3 vertices, got " + std::to_string(n));
    if (theta.size() != vertices.size())
        fail(ErrorCode::invalid_mesh, "theta size does not match vertex count");
    for (int j = 0; j < n; ++j) {
        if (!(dtheta(j) > 0.0))
            fail(ErrorCode::invalid_mesh, "parameter grid not strictly increasing at node " + std::to_string(j));
        if (!(segment_length(j) > 0.0))
            fail(ErrorCode::invalid_mesh, "degenerate segment " + std::to_string(j));
    }
    if (theta.front() < 0.0 || theta.back() >= 2.0 * kPi)
        fail(ErrorCode::invalid_mesh, "theta values must lie in [0, 2*pi)");
}

PolygonalCurve make_curve(std::vector<Vec2> vertices) {
    PolygonalCurve c;
    c.vertices = std::move(vertices);
    const int n = c.size();
    c.theta.resize(n);
    for (int j = 0; j < n; ++j) c.theta[j] = 2.0 * kPi * j / n;
    return c;
}

SegmentGeometry segment_geometry(const PolygonalCurve& c, int j) {
    SegmentGeometry g;
    const int n = c.size();
    g.a = c.vertices[j];
    g.b = c.vertices[(j + 1) % n];
    g.dtheta = c.dtheta(j);
    const Vec2 e = g.b - g.a;
    g.length = norm(e);
    g.tangent_theta = e / g.dtheta;
    g.rho = rot90(g.tangent_theta);
    g.normal = g.rho / norm(g.rho);
    return g;
}

TriangleGeometry triangle_geometry(const Vec3& q0, const Vec3& q1, const Vec3& q2) {
    TriangleGeometry g;
    g.q[0] = q0;
    g.q[1] = q1;
    g.q[2] = q2;
    const Vec3 c = cross(q1 - q0, q2 - q0);
    const double cn = norm(c);
    g.area = 0.5 * cn;
    g.normal = (cn > 0.0) ? c / cn : Vec3{0, 0, 0};
    const double e0 = norm(q2 - q1), e1 = norm(q0 - q2), e2 = norm(q1 - q0);
    g.diameter = std::max({e0, e1, e2});
    const double perim = e0 + e1 + e2;
    g.inradius = (perim > 0.0) ? 2.0 * g.area / perim : 0.0;
    if (g.area > 0.0) {
        // grad phi_a = n x (q_{a+2} - q_{a+1}) / (2 area)
        for (int a = 0; a < 3; ++a)
            g.grad[a] = cross(g.normal, g.q[(a + 2) % 3] - g.q[(a + 1) % 3]) / (2.0 * g.area);
    }
    return g;
}

TriangleGeometry triangle_geometry(const TriSurface& s, int t) {
    const auto& tri = s.triangles[t];
    return triangle_geometry(s.vertices[tri[0]], s.vertices[tri[1]], s.vertices[tri[2]]);
}

void TriSurface::validate() const {
    const int nv = vertex_count();
    const int nt = triangle_count();
    if (nv < 4 || nt < 4) fail(ErrorCode::invalid_mesh, "surface too small to be closed");
    if (reference_positions.size() != vertices.size())
        fail(ErrorCode::invalid_mesh, "reference_positions size does not match vertex count");

    for (int t = 0; t < nt; ++t) {
        const auto& tri = triangles[t];
        for (int k = 0; k < 3; ++k)
            if (tri[k] < 0 || tri[k] >= nv)
                fail(ErrorCode::invalid_mesh, "triangle " + std::to_string(t) + " has out-of-range vertex index");
        if (tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2])
            fail(ErrorCode::invalid_mesh, "triangle " + std::to_string(t) + " repeats a vertex");
        if (!(triangle_geometry(*this, t).area > 0.0))
            fail(ErrorCode::invalid_mesh, "triangle " + std::to_string(t) + " is degenerate");
        const auto ga = triangle_geometry(reference_positions[tri[0]], reference_positions[tri[1]],
                                          reference_positions[tri[2]]);
        if (!(ga.area > 0.0))
            fail(ErrorCode::invalid_mesh,
                 "reference triangle " + std::to_string(t) + " is degenerate");
    }

    // Closed orientable manifold: each directed edge appears exactly once and
    // its reverse appears exactly once.
    std::map<std::pair<int, int>, int> directed;
    for (int t = 0; t < nt; ++t) {
        const auto& tri = triangles[t];
        for (int k = 0; k < 3; ++k) {
            const int a = tri[k], b = tri[(k + 1) % 3];
            if (++directed[{a, b}] > 1)
                fail(ErrorCode::non_manifold, "directed edge (" + std::to_string(a) + "," +
                                                  std::to_string(b) + ") used twice");
        }
    }
    for (const auto& [e, cnt] : directed) {
        (void)cnt;
        if (directed.find({e.second, e.first}) == directed.end())
            fail(ErrorCode::non_manifold, "edge (" + std::to_string(e.first) + "," +
                                              std::to_string(e.second) +
                                              ") has no oppositely oriented partner");
    }
}

// ---- curve generators ----

PolygonalCurve generate_circle(int n, double radius) {
    if (n < 3) fail(ErrorCode::invalid_mesh, "circle needs n >= 3");
    if (!(radius > 0.0)) fail(ErrorCode::invalid_argument, "circle needs radius > 0");
    std::vector<Vec2> v(n);
    for (int j = 0; j < n; ++j) {
        const double t = 2.0 * kPi * j / n;
        v[j] = {radius * std::cos(t), radius * std::sin(t)};
    }
    return make_curve(std::move(v));
}

CurveShape curve_shape_from_string(const std::string& name) {
    if (name == "example1" || name == "example1_flattened_circle") return CurveShape::example1_flattened_circle;
    if (name == "example2" || name == "example2_fourpetal") return CurveShape::example2_fourpetal;
    if (name == "example3" || name == "example3_graded_circle") return CurveShape::example3_graded_circle;
    fail(ErrorCode::invalid_shape, "unknown curve shape '" + name + "'");
}

namespace {

// Graded circle: vertices on the unit circle with position angles whose
// increments (and with them the chord lengths) decrease geometrically
// anti-clockwise, giving a single segment-length jump back at (1,0). The
// parameter grid stays uniform. The decay q < 1 is chosen such that the
// max/min chord ratio equals the prescribed value after normalizing the
// angle increments to 2*pi.
PolygonalCurve graded_circle(int n, double ratio) {
    if (!(ratio >= 1.0)) fail(ErrorCode::invalid_argument, "grading ratio must be >= 1");
    if (ratio == 1.0) return generate_circle(n, 1.0);

    const auto chord_ratio = [&](double q) {
        // increments c*q^j, c fixed by sum = 2*pi; chord_j = 2 sin(inc_j/2)
        double s = 0.0, qj = 1.0;
        for (int j = 0; j < n; ++j) {
            s += qj;
            qj *= q;
        }
        const double c = 2.0 * kPi / s;
        return std::sin(0.5 * c) / std::sin(0.5 * c * std::pow(q, n - 1));
    };

    double lo = std::pow(ratio, -1.0 / (n - 1));  // arc-length guess, slightly off for chords
    double hi = 1.0 - 1e-15;
    while (chord_ratio(lo) < ratio) lo *= 0.99;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        (chord_ratio(mid) >= ratio ? lo : hi) = mid;
    }
    const double q = lo;

    double s = 0.0, qj = 1.0;
    for (int j = 0; j < n; ++j) {
        s += qj;
        qj *= q;
    }
    const double c = 2.0 * kPi / s;

    std::vector<Vec2> v(n);
    double angle = 0.0;
    qj = 1.0;
    for (int j = 0; j < n; ++j) {
        v[j] = {std::cos(angle), std::sin(angle)};
        angle += c * qj;
        qj *= q;
    }
    return make_curve(std::move(v));
}

}  // namespace

PolygonalCurve generate_parametrized_curve(CurveShape shape, int n, double grading_ratio) {
    if (n < 3) fail(ErrorCode::invalid_mesh, "curve needs n >= 3");
    std::vector<Vec2> v(n);
    switch (shape) {
        case CurveShape::example1_flattened_circle:
            for (int j = 0; j < n; ++j) {
                const double t = 2.0 * kPi * j / n;
                const double ct = std::cos(t);
                v[j] = {ct, (0.9 * ct * ct + 0.1) * std::sin(t)};
            }
            return make_curve(std::move(v));
        case CurveShape::example2_fourpetal:
            for (int j = 0; j < n; ++j) {
                const double t = 2.0 * kPi * j / n;
                const double c2 = std::cos(2.0 * t);
                v[j] = {c2 * std::cos(t), c2 * std::sin(t)};
            }
            return make_curve(std::move(v));
        case CurveShape::example3_graded_circle:
            return graded_circle(n, grading_ratio);
    }
    fail(ErrorCode::invalid_shape, "unhandled curve shape");
}

// ---- surface generators ----

namespace {

TriSurface icosahedron(double radius) {
    const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
    std::vector<Vec3> v = {
        {-1, phi, 0}, {1, phi, 0}, {-1, -phi, 0}, {1, -phi, 0},
        {0, -1, phi}, {0, 1, phi}, {0, -1, -phi}, {0, 1, -phi},
        {phi, 0, -1}, {phi, 0, 1}, {-phi, 0, -1}, {-phi, 0, 1},
    };
    for (auto& p : v) p = normalized(p) * radius;
    TriSurface s;
    s.vertices = std::move(v);
    s.triangles = {
        {0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
        {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
        {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
        {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1},
    };
    s.reference_positions = s.vertices;
    return s;
}

}  // namespace

TriSurface generate_icosphere(int subdivisions, double radius) {
    if (subdivisions < 0) fail(ErrorCode::invalid_argument, "subdivisions must be >= 0");
    if (!(radius > 0.0)) fail(ErrorCode::invalid_argument, "radius must be > 0");
    TriSurface s = icosahedron(radius);
    for (int round = 0; round < subdivisions; ++round) {
        std::map<std::pair<int, int>, int> midpoint;
        const auto mid = [&](int a, int b) {
            const auto key = std::minmax(a, b);
            auto it = midpoint.find(key);
            if (it != midpoint.end()) return it->second;
            const int idx = static_cast<int>(s.vertices.size());
            s.vertices.push_back(normalized(s.vertices[a] + s.vertices[b]) * radius);
            midpoint.emplace(key, idx);
            return idx;
        };
        std::vector<std::array<int, 3>> next;
        next.reserve(4 * s.triangles.size());
        for (const auto& t : s.triangles) {
            const int ab = mid(t[0], t[1]), bc = mid(t[1], t[2]), ca = mid(t[2], t[0]);
            next.push_back({t[0], ab, ca});
            next.push_back({t[1], bc, ab});
            next.push_back({t[2], ca, bc});
            next.push_back({ab, bc, ca});
        }
        s.triangles = std::move(next);
    }
    s.reference_positions = s.vertices;
    return s;
}

SurfaceShape surface_shape_from_string(const std::string& name) {
    if (name == "dumbbell_07") return SurfaceShape::dumbbell_07;
    if (name == "dumbbell_06") return SurfaceShape::dumbbell_06;
    if (name == "torus" || name == "undulating_torus") return SurfaceShape::undulating_torus;
    fail(ErrorCode::invalid_shape, "unknown surface shape '" + name + "'");
}

TriSurface generate_dumbbell(double bulge, int subdivisions) {
    TriSurface s = generate_icosphere(subdivisions, 1.0);
    // (x,y,z) on the unit sphere -> (x, f(x) y, f(x) z), f(x) = bulge*x^2 + (1-bulge)
    const double base = 1.0 - bulge;
    for (std::size_t i = 0; i < s.vertices.size(); ++i) {
        const Vec3 p = s.reference_positions[i];
        const double f = bulge * p.x * p.x + base;
        s.vertices[i] = {p.x, f * p.y, f * p.z};
    }
    return s;
}

TriSurface generate_undulating_torus(const TorusGrid& grid) {
    if (!(grid.r1 > 0.0) || !(grid.r2 > 0.0))
        fail(ErrorCode::invalid_argument, "torus radii must be positive");
    if (grid.r2 >= grid.r1)
        fail(ErrorCode::invalid_shape, "torus requires r2 < r1, got r1=" + std::to_string(grid.r1) +
                                           " r2=" + std::to_string(grid.r2));
    if (grid.n_theta < 3 || grid.n_phi < 3)
        fail(ErrorCode::invalid_argument, "torus grid needs at least 3x3 cells");

    const int m = grid.n_theta, k = grid.n_phi;
    TriSurface s;
    s.vertices.resize(static_cast<std::size_t>(m) * k);
    s.reference_positions.resize(s.vertices.size());
    for (int i = 0; i < m; ++i) {
        const double th = 2.0 * kPi * i / m;
        for (int j = 0; j < k; ++j) {
            const double ph = 2.0 * kPi * j / k;
            const double ring = grid.r1 + grid.r2 * std::cos(ph);
            const Vec3 ref{ring * std::cos(th), ring * std::sin(th), grid.r2 * std::sin(ph)};
            s.reference_positions[static_cast<std::size_t>(i) * k + j] = ref;
            s.vertices[static_cast<std::size_t>(i) * k + j] = {
                ref.x, ref.y, ref.z + std::sin(6.0 * th) / 5.0};
        }
    }
    s.triangles.reserve(2 * static_cast<std::size_t>(m) * k);
    const auto at = [&](int i, int j) { return (i % m) * k + (j % k); };
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < k; ++j) {
            // quad (i,j)-(i+1,j)-(i+1,j+1)-(i,j+1), split along one diagonal
            s.triangles.push_back({at(i, j), at(i + 1, j), at(i + 1, j + 1)});
            s.triangles.push_back({at(i, j), at(i + 1, j + 1), at(i, j + 1)});
        }
    return s;
}

// ---- measures and normals ----

double curve_length(const PolygonalCurve& c) {
    double len = 0.0;
    for (int j = 0; j < c.size(); ++j) len += c.segment_length(j);
    return len;
}

double surface_area(const TriSurface& s) {
    double area = 0.0;
    for (int t = 0; t < s.triangle_count(); ++t) area += triangle_geometry(s, t).area;
    return area;
}

double max_triangle_diameter(const TriSurface& s) {
    double h = 0.0;
    for (int t = 0; t < s.triangle_count(); ++t) h = std::max(h, triangle_geometry(s, t).diameter);
    return h;
}

std::vector<Vec3> vertex_normals_area_weighted(const TriSurface& s) {
    std::vector<Vec3> sum(s.vertex_count(), Vec3{0, 0, 0});
    for (int t = 0; t < s.triangle_count(); ++t) {
        const auto g = triangle_geometry(s, t);
        const Vec3 contrib = g.normal * g.area;
        for (int k = 0; k < 3; ++k) sum[s.triangles[t][k]] += contrib;
    }
    for (int j = 0; j < s.vertex_count(); ++j) {
        const double n = norm(sum[j]);
        if (!(n > 0.0))
            fail(ErrorCode::degenerate_normal,
                 "area-weighted normal vanishes at vertex " + std::to_string(j));
        sum[j] = sum[j] / n;
    }
    return sum;
}

}  // namespace gf
