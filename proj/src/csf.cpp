#include "geomflow/csf.hpp"

#include <algorithm>
#include <cmath>

namespace gf {

const char* step_status_name(StepStatus s) {
    switch (s) {
        case StepStatus::ok: return "ok";
        case StepStatus::solver_failure: return "solver-failure";
        case StepStatus::non_convergence: return "non-convergence";
        case StepStatus::degeneration: return "degeneration";
    }
    return "unknown";
}

DenseMatrix csf_element_mass_kernel(const SegmentGeometry& g, double alpha) {
    const double rho2 = norm_sq(g.rho);
    if (!(rho2 > 0.0) && alpha == 0.0)
        fail(ErrorCode::singular_kernel, "degenerate segment with alpha = 0");
    // coefficient block
    double c[2][2];
    c[0][0] = alpha * rho2 + (1.0 - alpha) * g.rho.x * g.rho.x;
    c[0][1] = (1.0 - alpha) * g.rho.x * g.rho.y;
    c[1][0] = c[0][1];
    c[1][1] = alpha * rho2 + (1.0 - alpha) * g.rho.y * g.rho.y;

    DenseMatrix m(4, 4);
    const double diag = g.dtheta / 3.0, off = g.dtheta / 6.0;
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) {
            const double w = (a == b) ? diag : off;
            for (int p = 0; p < 2; ++p)
                for (int q = 0; q < 2; ++q) m(2 * a + p, 2 * b + q) = c[p][q] * w;
        }
    return m;
}

DenseMatrix curve_stiffness_kernel(const SegmentGeometry& g) {
    DenseMatrix m(4, 4);
    const double s = 1.0 / g.dtheta;
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) {
            const double w = (a == b) ? s : -s;
            m(2 * a, 2 * b) = w;
            m(2 * a + 1, 2 * b + 1) = w;
        }
    return m;
}

double curve_parametric_energy(const PolygonalCurve& c) {
    double e = 0.0;
    for (int j = 0; j < c.size(); ++j) e += norm_sq(c.edge(j)) / c.dtheta(j);
    return e;
}

namespace {

std::vector<double> flatten(const std::vector<Vec2>& v) {
    std::vector<double> x(2 * v.size());
    for (std::size_t j = 0; j < v.size(); ++j) {
        x[2 * j] = v[j].x;
        x[2 * j + 1] = v[j].y;
    }
    return x;
}

std::vector<Vec2> unflatten2(const std::vector<double>& x) {
    std::vector<Vec2> v(x.size() / 2);
    for (std::size_t j = 0; j < v.size(); ++j) v[j] = {x[2 * j], x[2 * j + 1]};
    return v;
}

bool curve_degenerate(const std::vector<Vec2>& v) {
    const int n = static_cast<int>(v.size());
    for (int j = 0; j < n; ++j)
        if (!(norm(v[(j + 1) % n] - v[j]) > 0.0)) return true;
    return false;
}

}  // namespace

CsfStepInfo step_csf(CsfState& state, const CsfConfig& cfg) {
    CsfStepInfo info;
    const PolygonalCurve& c = state.curve;
    const int n = c.size();
    const auto conn = curve_connectivity(c);
    auto pattern = std::make_shared<SparsityPattern>(conn);

    std::vector<SegmentGeometry> segs(n);
    for (int j = 0; j < n; ++j) segs[j] = segment_geometry(c, j);

    BlockSparseMatrix mass = assemble(conn, 2, [&](int e, DenseMatrix& out) {
        out = csf_element_mass_kernel(segs[e], cfg.alpha);
    }, pattern);
    BlockSparseMatrix system(pattern, 2);
    assemble_into(system, conn, [&](int e, DenseMatrix& out) { out = curve_stiffness_kernel(segs[e]); });
    const double energy_old = curve_parametric_energy(c);
    system.add_scaled(mass, 1.0 / cfg.tau);

    std::vector<double> x_old = flatten(c.vertices);
    std::vector<double> rhs(2 * n);
    mass.matvec(x_old, rhs);
    for (auto& v : rhs) v /= cfg.tau;

    std::vector<double> x = x_old;  // initial guess
    const SolveResult res = solve(system, rhs, x, cfg.solver);
    info.solver_iterations = res.iterations;
    if (!res.converged) {
        info.status = StepStatus::solver_failure;
        return info;
    }

    auto new_vertices = unflatten2(x);
    if (curve_degenerate(new_vertices)) {
        info.status = StepStatus::degeneration;
        return info;
    }

    // dissipation increment (X_new - X_old)^T M (X_new - X_old) / tau
    std::vector<double> dx(2 * n), mdx(2 * n);
    for (int i = 0; i < 2 * n; ++i) dx[i] = x[i] - x_old[i];
    mass.matvec(dx, mdx);
    double dissipation = 0.0;
    for (int i = 0; i < 2 * n; ++i) dissipation += dx[i] * mdx[i];
    dissipation /= cfg.tau;

    PolygonalCurve next = c;
    next.vertices = std::move(new_vertices);
    const double energy_new = curve_parametric_energy(next);

    info.stability_lhs = 0.5 * energy_new + dissipation;
    info.stability_rhs = 0.5 * energy_old;
    info.stability_violation = info.stability_lhs > info.stability_rhs + 1e-8;
    info.max_vertex_speed = max_vertex_speed(c, next, cfg.tau);

    state.curve = std::move(next);
    state.time += cfg.tau;
    state.step_index += 1;
    state.stability_energy_sum += dissipation;
    return info;
}

namespace {

// Nodal vector field of the BGN scheme: arithmetic mean over the two adjacent
// segments of the piecewise constant field nu_h |X_theta|, which per segment
// equals the rotated parametric tangent.
std::vector<Vec2> bgn_nodal_rho(const PolygonalCurve& c) {
    const int n = c.size();
    std::vector<Vec2> rho(n);
    for (int j = 0; j < n; ++j) {
        const auto prev = segment_geometry(c, (j + n - 1) % n);
        const auto next = segment_geometry(c, j);
        rho[j] = 0.5 * (prev.rho + next.rho);
    }
    return rho;
}

}  // namespace

CsfStepInfo step_bgn_curve(CsfState& state, const BgnCurveConfig& cfg) {
    CsfStepInfo info;
    const PolygonalCurve& c = state.curve;
    const int n = c.size();
    const auto conn = curve_connectivity(c);
    auto pattern = std::make_shared<SparsityPattern>(conn);

    // theta-measure lumped weights
    std::vector<double> w(n);
    for (int j = 0; j < n; ++j) w[j] = 0.5 * (c.dtheta((j + n - 1) % n) + c.dtheta(j));

    BlockSparseMatrix stiffness = assemble(conn, 2, [&](int e, DenseMatrix& out) {
        out = curve_stiffness_kernel(segment_geometry(c, e));
    }, pattern);

    const std::vector<double> x_m = flatten(c.vertices);
    PolygonalCurve iterate = c;

    BlockSparseMatrix system(pattern, 2);
    std::vector<double> rhs(2 * n), x(2 * n);
    std::vector<Vec2> prev_vertices;

    for (int it = 1; it <= cfg.max_fp_iterations; ++it) {
        const auto rho = bgn_nodal_rho(iterate);

        system.set_zero();
        system.add_scaled(stiffness, 1.0);
        for (int j = 0; j < n; ++j) {
            const double f = w[j] / cfg.tau;
            double blk[4] = {f * rho[j].x * rho[j].x, f * rho[j].x * rho[j].y,
                             f * rho[j].y * rho[j].x, f * rho[j].y * rho[j].y};
            system.add_to_block(j, j, blk);
            rhs[2 * j] = f * (rho[j].x * rho[j].x * x_m[2 * j] + rho[j].x * rho[j].y * x_m[2 * j + 1]);
            rhs[2 * j + 1] = f * (rho[j].y * rho[j].x * x_m[2 * j] + rho[j].y * rho[j].y * x_m[2 * j + 1]);
        }

        x = flatten(iterate.vertices);
        const SolveResult res = solve(system, rhs, x, cfg.solver);
        info.solver_iterations += res.iterations;
        if (!res.converged) {
            info.status = StepStatus::solver_failure;
            return info;
        }

        prev_vertices = iterate.vertices;
        double delta = 0.0;
        for (int j = 0; j < n; ++j) {
            const Vec2 solved{x[2 * j], x[2 * j + 1]};
            const Vec2 blended = prev_vertices[j] * (1.0 - cfg.damping) + solved * cfg.damping;
            delta = std::max(delta, norm(blended - prev_vertices[j]));
            iterate.vertices[j] = blended;
        }
        info.fixed_point_iterations = it;

        if (delta < cfg.fp_threshold) {
            if (curve_degenerate(iterate.vertices)) {
                info.status = StepStatus::degeneration;
                return info;
            }
            info.max_vertex_speed = max_vertex_speed(c, iterate, cfg.tau);
            state.curve = std::move(iterate);
            state.time += cfg.tau;
            state.step_index += 1;
            return info;
        }
    }

    info.status = StepStatus::non_convergence;
    info.last_iterate = iterate.vertices;
    info.previous_iterate = std::move(prev_vertices);
    return info;
}

double max_vertex_speed(const PolygonalCurve& prev, const PolygonalCurve& next, double tau) {
    if (prev.size() != next.size())
        fail(ErrorCode::invalid_argument, "max_vertex_speed: vertex counts differ");
    double m = 0.0;
    for (int j = 0; j < prev.size(); ++j)
        m = std::max(m, norm(next.vertices[j] - prev.vertices[j]));
    return m / tau;
}

}  // namespace gf
