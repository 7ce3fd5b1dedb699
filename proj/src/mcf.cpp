#include "geomflow/mcf.hpp"

#include <algorithm>
#include <cmath>

namespace gf {

const char* mcf_scheme_name(McfScheme s) {
    switch (s) {
        case McfScheme::alg2: return "alg2";
        case McfScheme::alg3: return "alg3";
        case McfScheme::bgn: return "bgn";
    }
    return "unknown";
}

ElementMetricData compute_element_metric(const TriangleGeometry& g, const Vec3 y[3]) {
    ElementMetricData md;
    for (int a = 0; a < 3; ++a)
        for (int beta = 0; beta < 3; ++beta)
            for (int gamma = 0; gamma < 3; ++gamma)
                md.grad_y(beta, gamma) += y[a][beta] * g.grad[a][gamma];
    md.H = md.grad_y.transposed() * md.grad_y + Mat3::outer(g.normal, g.normal);
    const double det = md.H.det();
    if (!(det > 0.0)) fail(ErrorCode::degeneration, "degenerate reference image of a triangle");
    md.H_inv = md.H.inverse();
    md.rho = std::sqrt(det);
    return md;
}

std::vector<Vec3> discrete_map_laplacian_w(const TriSurface& s, const SolverConfig& solver) {
    const auto conn = surface_connectivity(s);
    auto pattern = std::make_shared<SparsityPattern>(conn);

    std::vector<TriangleGeometry> geo(s.triangle_count());
    for (int t = 0; t < s.triangle_count(); ++t) geo[t] = triangle_geometry(s, t);

    BlockSparseMatrix mass = assemble(conn, 1, [&](int e, DenseMatrix& out) {
        const double area = geo[e].area;
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b) out(a, b) = area * (a == b ? 2.0 : 1.0) / 12.0;
    }, pattern);
    BlockSparseMatrix stiffness = assemble(conn, 1, [&](int e, DenseMatrix& out) {
        const auto& g = geo[e];
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b) out(a, b) = g.area * dot(g.grad[a], g.grad[b]);
    }, pattern);

    const int n = s.vertex_count();
    std::vector<Vec3> w(n);
    std::vector<double> y(n), rhs(n), x(n, 0.0);
    for (int comp = 0; comp < 3; ++comp) {
        for (int j = 0; j < n; ++j) y[j] = s.reference_positions[j][comp];
        stiffness.matvec(y, rhs);
        for (auto& v : rhs) v = -v;
        std::fill(x.begin(), x.end(), 0.0);
        const SolveResult res = solve(mass, rhs, x, solver);
        if (!res.converged)
            fail(ErrorCode::solver_failure, "mass solve for the map Laplacian did not converge");
        for (int j = 0; j < n; ++j) w[j][comp] = x[j];
    }
    return w;
}

DenseMatrix surface_stiffness_kernel(const TriangleGeometry& g) {
    DenseMatrix m(9, 9);
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) {
            const double s = g.area * dot(g.grad[a], g.grad[b]);
            for (int p = 0; p < 3; ++p) m(3 * a + p, 3 * b + p) = s;
        }
    return m;
}

DenseMatrix mcf_mass_kernel_alg2(const TriangleGeometry& g, double alpha) {
    Mat3 c = Mat3::identity() * alpha + Mat3::outer(g.normal, g.normal) * (1.0 - alpha);
    DenseMatrix m(9, 9);
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) {
            const double w = g.area * (a == b ? 2.0 : 1.0) / 12.0;
            for (int p = 0; p < 3; ++p)
                for (int q = 0; q < 3; ++q) m(3 * a + p, 3 * b + q) = c(p, q) * w;
        }
    return m;
}

DenseMatrix mcf_transport_kernel_alg2(const TriangleGeometry& g, const ElementMetricData& md,
                                      const Vec3 w[3]) {
    // v = H^-1 (grad y)^T w is linear on the element; integrate
    // int phi_a (grad phi_b . v) exactly.
    const Mat3 map = md.H_inv * md.grad_y.transposed();
    Vec3 v[3];
    for (int c = 0; c < 3; ++c) v[c] = map * w[c];
    DenseMatrix m(9, 9);
    for (int a = 0; a < 3; ++a) {
        Vec3 vint{0, 0, 0};  // sum_c v_c int phi_a phi_c = |T|/12 (1+delta_ac)
        for (int c = 0; c < 3; ++c) vint += v[c] * (g.area * (a == c ? 2.0 : 1.0) / 12.0);
        for (int b = 0; b < 3; ++b) {
            const double s = dot(g.grad[b], vint);
            for (int p = 0; p < 3; ++p) m(3 * a + p, 3 * b + p) = s;
        }
    }
    return m;
}

DenseMatrix mcf_mass_kernel_alg3(const TriangleGeometry& g, const ElementMetricData& md, double alpha,
                                 const Vec3 nutilde[3]) {
    DenseMatrix m(9, 9);
    const double ar = alpha * md.rho;
    const double w = g.area / 3.0;
    for (int a = 0; a < 3; ++a) {
        const Vec3& nu = nutilde[a];
        for (int p = 0; p < 3; ++p)
            for (int q = 0; q < 3; ++q)
                m(3 * a + p, 3 * a + q) = (ar * (p == q ? 1.0 : 0.0) + (1.0 - ar) * nu[p] * nu[q]) * w;
    }
    return m;
}

DenseMatrix mcf_divergence_kernel_alg3(const TriangleGeometry& g, const ElementMetricData& md,
                                       const Vec3 nutilde[3]) {
    DenseMatrix m(9, 9);
    for (int a = 0; a < 3; ++a) {
        const Vec3& nu = nutilde[a];
        const Vec3 hg = md.H_inv * g.grad[a];  // H^-1 is symmetric
        for (int b = 0; b < 3; ++b) {
            const double s = md.rho * g.area * dot(hg, g.grad[b]);
            for (int p = 0; p < 3; ++p)
                for (int q = 0; q < 3; ++q)
                    m(3 * a + p, 3 * b + q) = ((p == q ? 1.0 : 0.0) - nu[p] * nu[q]) * s;
        }
    }
    return m;
}

DenseMatrix mcf_mass_kernel_bgn(const TriangleGeometry& g, const Vec3 nutilde[3]) {
    DenseMatrix m(9, 9);
    const double w = g.area / 3.0;
    for (int a = 0; a < 3; ++a) {
        const Vec3& nu = nutilde[a];
        for (int p = 0; p < 3; ++p)
            for (int q = 0; q < 3; ++q) m(3 * a + p, 3 * a + q) = nu[p] * nu[q] * w;
    }
    return m;
}

McfWorkspace::McfWorkspace(const TriSurface& s)
    : conn_(surface_connectivity(s)),
      pattern_(std::make_shared<SparsityPattern>(conn_)),
      system_(pattern_, 3),
      mass_(pattern_, 3) {}

namespace {

std::vector<double> flatten(const std::vector<Vec3>& v) {
    std::vector<double> x(3 * v.size());
    for (std::size_t j = 0; j < v.size(); ++j) {
        x[3 * j] = v[j].x;
        x[3 * j + 1] = v[j].y;
        x[3 * j + 2] = v[j].z;
    }
    return x;
}

struct DegenerationCheck {
    bool degenerate = false;
};

DegenerationCheck check_mesh(const TriSurface& s, const McfConfig& cfg) {
    for (int t = 0; t < s.triangle_count(); ++t) {
        const auto g = triangle_geometry(s, t);
        if (g.area < cfg.degeneration_area_eps) return {true};
        if (g.inradius <= 0.0 || g.diameter / g.inradius > cfg.degeneration_sigma) return {true};
    }
    return {false};
}

McfStepInfo step_common(McfState& state, const McfConfig& cfg, McfWorkspace* ws, McfScheme scheme) {
    McfStepInfo info;
    TriSurface& s = state.surface;
    const int n = s.vertex_count();
    const int nt = s.triangle_count();

    std::unique_ptr<McfWorkspace> local;
    if (!ws) {
        local = std::make_unique<McfWorkspace>(s);
        ws = local.get();
    }

    const double h = max_triangle_diameter(s);
    const double tau = cfg.tau.tau_for(h);
    const double alpha = cfg.alpha_equals_tau ? tau : cfg.alpha;
    info.tau_used = tau;

    std::vector<TriangleGeometry> geo(nt);
    for (int t = 0; t < nt; ++t) geo[t] = triangle_geometry(s, t);

    std::vector<ElementMetricData> metric;
    std::vector<Vec3> nutilde;
    std::vector<Vec3> w;
    if (scheme == McfScheme::alg2) {
        metric.resize(nt);
        for (int t = 0; t < nt; ++t) {
            const auto& tri = s.triangles[t];
            const Vec3 y[3] = {s.reference_positions[tri[0]], s.reference_positions[tri[1]],
                               s.reference_positions[tri[2]]};
            metric[t] = compute_element_metric(geo[t], y);
        }
        w = discrete_map_laplacian_w(s, cfg.solver);
    } else if (scheme == McfScheme::alg3) {
        metric.resize(nt);
        for (int t = 0; t < nt; ++t) {
            const auto& tri = s.triangles[t];
            const Vec3 y[3] = {s.reference_positions[tri[0]], s.reference_positions[tri[1]],
                               s.reference_positions[tri[2]]};
            metric[t] = compute_element_metric(geo[t], y);
        }
        nutilde = vertex_normals_area_weighted(s);
    } else {
        nutilde = vertex_normals_area_weighted(s);
    }

    BlockSparseMatrix& mass = ws->mass();
    assemble_into(mass, ws->connectivity(), [&](int e, DenseMatrix& out) {
        const auto& tri = s.triangles[e];
        switch (scheme) {
            case McfScheme::alg2:
                out = mcf_mass_kernel_alg2(geo[e], alpha);
                break;
            case McfScheme::alg3: {
                const Vec3 nu[3] = {nutilde[tri[0]], nutilde[tri[1]], nutilde[tri[2]]};
                out = mcf_mass_kernel_alg3(geo[e], metric[e], alpha, nu);
                break;
            }
            case McfScheme::bgn: {
                const Vec3 nu[3] = {nutilde[tri[0]], nutilde[tri[1]], nutilde[tri[2]]};
                out = mcf_mass_kernel_bgn(geo[e], nu);
                break;
            }
        }
    });

    BlockSparseMatrix& system = ws->system();
    assemble_into(system, ws->connectivity(), [&](int e, DenseMatrix& out) {
        out = surface_stiffness_kernel(geo[e]);
        const auto& tri = s.triangles[e];
        switch (scheme) {
            case McfScheme::alg2: {
                const Vec3 wv[3] = {w[tri[0]], w[tri[1]], w[tri[2]]};
                const DenseMatrix b = mcf_transport_kernel_alg2(geo[e], metric[e], wv);
                for (int i = 0; i < 9; ++i)
                    for (int j = 0; j < 9; ++j) out(i, j) += b(i, j);
                break;
            }
            case McfScheme::alg3: {
                const Vec3 nu[3] = {nutilde[tri[0]], nutilde[tri[1]], nutilde[tri[2]]};
                const DenseMatrix d = mcf_divergence_kernel_alg3(geo[e], metric[e], nu);
                for (int i = 0; i < 9; ++i)
                    for (int j = 0; j < 9; ++j) out(i, j) += d(i, j);
                break;
            }
            case McfScheme::bgn:
                break;
        }
    });
    system.add_scaled(mass, 1.0 / tau);

    const std::vector<double> x_old = flatten(s.vertices);
    std::vector<double> rhs(3 * n);
    mass.matvec(x_old, rhs);
    for (auto& v : rhs) v /= tau;

    std::vector<double> x = x_old;
    const SolveResult res = solve(system, rhs, x, cfg.solver);
    info.solver_iterations = res.iterations;
    if (!res.converged) {
        info.status = StepStatus::solver_failure;
        return info;
    }

    TriSurface candidate = s;
    double speed = 0.0;
    for (int j = 0; j < n; ++j) {
        const Vec3 p{x[3 * j], x[3 * j + 1], x[3 * j + 2]};
        speed = std::max(speed, norm(p - s.vertices[j]));
        candidate.vertices[j] = p;
    }
    info.max_vertex_speed = speed / tau;

    if (check_mesh(candidate, cfg).degenerate) {
        info.status = StepStatus::degeneration;
        return info;  // last valid state preserved
    }

    state.surface.vertices = std::move(candidate.vertices);
    state.time += tau;
    state.step_index += 1;
    return info;
}

}  // namespace

McfStepInfo step_mcf_alg2(McfState& state, const McfConfig& cfg, McfWorkspace* ws) {
    return step_common(state, cfg, ws, McfScheme::alg2);
}

McfStepInfo step_mcf_alg3(McfState& state, const McfConfig& cfg, McfWorkspace* ws) {
    return step_common(state, cfg, ws, McfScheme::alg3);
}

McfStepInfo step_mcf_bgn(McfState& state, const McfConfig& cfg, McfWorkspace* ws) {
    return step_common(state, cfg, ws, McfScheme::bgn);
}

McfStepInfo step_mcf(McfState& state, const McfConfig& cfg, McfWorkspace* ws) {
    return step_common(state, cfg, ws, cfg.scheme);
}

}  // namespace gf
