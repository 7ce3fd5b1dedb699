#include "geomflow.h"

#include <cstring>
#include <string>

#include "geomflow/csf.hpp"
#include "geomflow/diagnostics.hpp"
#include "geomflow/experiment.hpp"
#include "geomflow/mcf.hpp"
#include "geomflow/mesh_io.hpp"

using namespace gf;

namespace {

thread_local std::string g_last_error = "no error";

gf_status code_of(const Error& e) {
    switch (e.code()) {
        case ErrorCode::invalid_argument: return GF_ERR_INVALID_ARG;
        case ErrorCode::invalid_mesh:
        case ErrorCode::invalid_shape:
        case ErrorCode::degenerate_normal:
        case ErrorCode::singular_kernel:
        case ErrorCode::assembly: return GF_ERR_INVALID_MESH;
        case ErrorCode::parse: return GF_ERR_PARSE;
        case ErrorCode::non_manifold: return GF_ERR_NON_MANIFOLD;
        case ErrorCode::solver_failure: return GF_ERR_SOLVER_FAILURE;
        case ErrorCode::non_convergence: return GF_ERR_NON_CONVERGENCE;
        case ErrorCode::degeneration: return GF_ERR_DEGENERATION;
        case ErrorCode::io: return GF_ERR_IO;
        case ErrorCode::spec: return GF_ERR_SPEC;
    }
    return GF_ERR_UNKNOWN;
}

gf_status status_of(StepStatus s) {
    switch (s) {
        case StepStatus::ok: return GF_OK;
        case StepStatus::solver_failure: return GF_ERR_SOLVER_FAILURE;
        case StepStatus::non_convergence: return GF_ERR_NON_CONVERGENCE;
        case StepStatus::degeneration: return GF_ERR_DEGENERATION;
    }
    return GF_ERR_UNKNOWN;
}

template <typename F>
gf_status guarded(F&& f) {
    try {
        return f();
    } catch (const Error& e) {
        g_last_error = e.what();
        return code_of(e);
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return GF_ERR_UNKNOWN;
    } catch (...) {
        g_last_error = "unknown error";
        return GF_ERR_UNKNOWN;
    }
}

gf_status arg_error(const char* msg) {
    g_last_error = msg;
    return GF_ERR_INVALID_ARG;
}

}  // namespace

struct gf_curve {
    PolygonalCurve c;
};

struct gf_surface {
    TriSurface s;
};

struct gf_csf_stepper {
    CsfState state;
    bool bgn = false;
    CsfConfig alpha_cfg;
    BgnCurveConfig bgn_cfg;
};

struct gf_mcf_stepper {
    McfState state;
    McfConfig cfg;
    std::unique_ptr<McfWorkspace> workspace;
};

extern "C" {

const char* gf_version(void) { return "geomflow 1.0.0"; }

const char* gf_last_error(void) { return g_last_error.c_str(); }

/* ---- curves ---- */

gf_status gf_curve_circle(int n, double radius, gf_curve** out) {
    if (!out) return arg_error("out must not be NULL");
    return guarded([&] {
        *out = new gf_curve{generate_circle(n, radius)};
        return GF_OK;
    });
}

gf_status gf_curve_shape(const char* shape, int n, double grading_ratio, gf_curve** out) {
    if (!out || !shape) return arg_error("shape and out must not be NULL");
    return guarded([&] {
        const CurveShape cs = curve_shape_from_string(shape);
        PolygonalCurve c = (grading_ratio > 0.0) ? generate_parametrized_curve(cs, n, grading_ratio)
                                                 : generate_parametrized_curve(cs, n);
        *out = new gf_curve{std::move(c)};
        return GF_OK;
    });
}

gf_status gf_curve_from_points(const double* xy, int n, gf_curve** out) {
    if (!out || !xy) return arg_error("xy and out must not be NULL");
    return guarded([&] {
        std::vector<Vec2> pts(n);
        for (int j = 0; j < n; ++j) pts[j] = {xy[2 * j], xy[2 * j + 1]};
        auto c = make_curve(std::move(pts));
        c.validate();
        *out = new gf_curve{std::move(c)};
        return GF_OK;
    });
}

int gf_curve_size(const gf_curve* c) { return c ? c->c.size() : 0; }

gf_status gf_curve_positions(const gf_curve* c, double* xy) {
    if (!c || !xy) return arg_error("curve and xy must not be NULL");
    for (int j = 0; j < c->c.size(); ++j) {
        xy[2 * j] = c->c.vertices[j].x;
        xy[2 * j + 1] = c->c.vertices[j].y;
    }
    return GF_OK;
}

gf_status gf_curve_length(const gf_curve* c, double* out) {
    if (!c || !out) return arg_error("curve and out must not be NULL");
    *out = curve_length(c->c);
    return GF_OK;
}

gf_status gf_curve_segment_ratio(const gf_curve* c, double* out) {
    if (!c || !out) return arg_error("curve and out must not be NULL");
    *out = segment_ratio(c->c);
    return GF_OK;
}

gf_status gf_curve_write(const gf_curve* c, const char* path) {
    if (!c || !path) return arg_error("curve and path must not be NULL");
    return guarded([&] {
        const std::string p(path);
        if (p.size() >= 4 && p.substr(p.size() - 4) == ".vtk")
            write_curve_vtk(p, c->c);
        else
            write_curve_csv(p, c->c);
        return GF_OK;
    });
}

gf_status gf_curve_read_csv(const char* path, gf_curve** out) {
    if (!out || !path) return arg_error("path and out must not be NULL");
    return guarded([&] {
        *out = new gf_curve{read_curve_csv(path)};
        return GF_OK;
    });
}

void gf_curve_free(gf_curve* c) { delete c; }

/* ---- surfaces ---- */

gf_status gf_surface_icosphere(int subdivisions, double radius, gf_surface** out) {
    if (!out) return arg_error("out must not be NULL");
    return guarded([&] {
        *out = new gf_surface{generate_icosphere(subdivisions, radius)};
        return GF_OK;
    });
}

gf_status gf_surface_dumbbell(double bulge, int subdivisions, gf_surface** out) {
    if (!out) return arg_error("out must not be NULL");
    return guarded([&] {
        *out = new gf_surface{generate_dumbbell(bulge, subdivisions)};
        return GF_OK;
    });
}

gf_status gf_surface_torus(double r1, double r2, int n_theta, int n_phi, gf_surface** out) {
    if (!out) return arg_error("out must not be NULL");
    return guarded([&] {
        *out = new gf_surface{generate_undulating_torus({r1, r2, n_theta, n_phi})};
        return GF_OK;
    });
}

int gf_surface_vertex_count(const gf_surface* s) { return s ? s->s.vertex_count() : 0; }

int gf_surface_triangle_count(const gf_surface* s) { return s ? s->s.triangle_count() : 0; }

gf_status gf_surface_positions(const gf_surface* s, double* xyz) {
    if (!s || !xyz) return arg_error("surface and xyz must not be NULL");
    for (int j = 0; j < s->s.vertex_count(); ++j)
        for (int k = 0; k < 3; ++k) xyz[3 * j + k] = s->s.vertices[j][k];
    return GF_OK;
}

gf_status gf_surface_reference_positions(const gf_surface* s, double* xyz) {
    if (!s || !xyz) return arg_error("surface and xyz must not be NULL");
    for (int j = 0; j < s->s.vertex_count(); ++j)
        for (int k = 0; k < 3; ++k) xyz[3 * j + k] = s->s.reference_positions[j][k];
    return GF_OK;
}

gf_status gf_surface_triangles(const gf_surface* s, int* indices) {
    if (!s || !indices) return arg_error("surface and indices must not be NULL");
    for (int t = 0; t < s->s.triangle_count(); ++t)
        for (int k = 0; k < 3; ++k) indices[3 * t + k] = s->s.triangles[t][k];
    return GF_OK;
}

gf_status gf_surface_area(const gf_surface* s, double* out) {
    if (!s || !out) return arg_error("surface and out must not be NULL");
    *out = surface_area(s->s);
    return GF_OK;
}

gf_status gf_surface_sigma_max(const gf_surface* s, double* out) {
    if (!s || !out) return arg_error("surface and out must not be NULL");
    *out = sigma_max(s->s);
    return GF_OK;
}

gf_status gf_surface_write(const gf_surface* s, const char* path) {
    if (!s || !path) return arg_error("surface and path must not be NULL");
    return guarded([&] {
        write_surface(path, s->s);
        return GF_OK;
    });
}

gf_status gf_surface_read(const char* path, gf_surface** out) {
    if (!out || !path) return arg_error("path and out must not be NULL");
    return guarded([&] {
        *out = new gf_surface{read_surface(path)};
        return GF_OK;
    });
}

void gf_surface_free(gf_surface* s) { delete s; }

/* ---- curve steppers ---- */

gf_status gf_csf_create(const gf_curve* initial, const char* scheme, double alpha, double tau,
                        double damping, gf_csf_stepper** out) {
    if (!initial || !scheme || !out) return arg_error("initial, scheme and out must not be NULL");
    return guarded([&] {
        const std::string name(scheme);
        auto st = std::make_unique<gf_csf_stepper>();
        st->state.curve = initial->c;
        st->state.curve.validate();
        if (name == "alpha" || name == "alg1" || name == "csf_alpha") {
            st->bgn = false;
            if (!(alpha >= 0.0)) fail(ErrorCode::invalid_argument, "alpha must be >= 0");
            st->alpha_cfg.alpha = alpha;
            st->alpha_cfg.tau = tau;
        } else if (name == "bgn" || name == "csf_bgn") {
            st->bgn = true;
            st->bgn_cfg.tau = tau;
            if (!(damping > 0.0 && damping <= 1.0))
                fail(ErrorCode::invalid_argument, "damping must be in (0,1]");
            st->bgn_cfg.damping = damping;
        } else {
            fail(ErrorCode::invalid_argument, "unknown curve scheme '" + name + "'");
        }
        if (!(tau > 0.0)) fail(ErrorCode::invalid_argument, "tau must be positive");
        *out = st.release();
        return GF_OK;
    });
}

gf_status gf_csf_step(gf_csf_stepper* st, gf_diag_record* record) {
    if (!st) return arg_error("stepper must not be NULL");
    return guarded([&] {
        const CsfStepInfo info =
            st->bgn ? step_bgn_curve(st->state, st->bgn_cfg) : step_csf(st->state, st->alpha_cfg);
        if (record) {
            *record = gf_diag_record{};
            record->time = st->state.time;
            record->size = curve_length(st->state.curve);
            record->sigma_max_or_ratio = segment_ratio(st->state.curve);
            record->max_speed = info.max_vertex_speed;
            record->energy_lhs = info.stability_lhs;
            record->energy_rhs = info.stability_rhs;
            record->iterations = st->bgn ? info.fixed_point_iterations : info.solver_iterations;
            if (info.stability_violation) record->flags |= diag_flag_stability_violation;
        }
        if (info.status != StepStatus::ok) g_last_error = step_status_name(info.status);
        return status_of(info.status);
    });
}

double gf_csf_time(const gf_csf_stepper* st) { return st ? st->state.time : 0.0; }

gf_status gf_csf_curve(const gf_csf_stepper* st, gf_curve** out) {
    if (!st || !out) return arg_error("stepper and out must not be NULL");
    *out = new gf_curve{st->state.curve};
    return GF_OK;
}

void gf_csf_free(gf_csf_stepper* st) { delete st; }

/* ---- surface steppers ---- */

gf_status gf_mcf_create(const gf_surface* initial, const char* scheme, double alpha,
                        const char* tau_rule, double tau_value, gf_mcf_stepper** out) {
    if (!initial || !scheme || !out) return arg_error("initial, scheme and out must not be NULL");
    return guarded([&] {
        auto st = std::make_unique<gf_mcf_stepper>();
        st->state.surface = initial->s;
        st->state.surface.validate();
        const std::string name(scheme);
        if (name == "alg2")
            st->cfg.scheme = McfScheme::alg2;
        else if (name == "alg3")
            st->cfg.scheme = McfScheme::alg3;
        else if (name == "bgn")
            st->cfg.scheme = McfScheme::bgn;
        else
            fail(ErrorCode::invalid_argument, "unknown surface scheme '" + name + "'");
        if (alpha < 0.0) {
            st->cfg.alpha_equals_tau = true;
            st->cfg.alpha = 0.0;
        } else {
            st->cfg.alpha = alpha;
        }
        const std::string rule = tau_rule ? tau_rule : "fixed";
        if (rule == "fixed")
            st->cfg.tau.kind = TauRule::Kind::fixed;
        else if (rule == "h")
            st->cfg.tau.kind = TauRule::Kind::prop_h;
        else if (rule == "h2")
            st->cfg.tau.kind = TauRule::Kind::prop_h2;
        else
            fail(ErrorCode::invalid_argument, "tau_rule must be 'fixed', 'h' or 'h2'");
        if (!(tau_value > 0.0)) fail(ErrorCode::invalid_argument, "tau_value must be positive");
        st->cfg.tau.value = tau_value;
        st->workspace = std::make_unique<McfWorkspace>(st->state.surface);
        *out = st.release();
        return GF_OK;
    });
}

gf_status gf_mcf_step(gf_mcf_stepper* st, gf_diag_record* record) {
    if (!st) return arg_error("stepper must not be NULL");
    return guarded([&] {
        const McfStepInfo info = step_mcf(st->state, st->cfg, st->workspace.get());
        if (record) {
            *record = gf_diag_record{};
            record->time = st->state.time;
            record->size = surface_area(st->state.surface);
            const auto sm = sigma_max_checked(st->state.surface);
            record->sigma_max_or_ratio = sm.value;
            if (sm.degenerate) record->flags |= diag_flag_near_degeneration;
            record->max_speed = info.max_vertex_speed;
            record->iterations = info.solver_iterations;
        }
        if (info.status != StepStatus::ok) g_last_error = step_status_name(info.status);
        return status_of(info.status);
    });
}

double gf_mcf_time(const gf_mcf_stepper* st) { return st ? st->state.time : 0.0; }

gf_status gf_mcf_surface(const gf_mcf_stepper* st, gf_surface** out) {
    if (!st || !out) return arg_error("stepper and out must not be NULL");
    *out = new gf_surface{st->state.surface};
    return GF_OK;
}

void gf_mcf_free(gf_mcf_stepper* st) { delete st; }

/* ---- experiments ---- */

gf_status gf_validate_spec(const char* spec_path) {
    if (!spec_path) return arg_error("spec_path must not be NULL");
    return guarded([&] {
        ExperimentSpec spec = ExperimentSpec::parse_file(spec_path);
        spec.validate();
        return GF_OK;
    });
}

gf_status gf_run_experiment(const char* spec_path, const char* output_dir, int parallel,
                            char* manifest_path_out, size_t cap) {
    if (!spec_path) return arg_error("spec_path must not be NULL");
    return guarded([&] {
        ExperimentSpec spec = ExperimentSpec::parse_file(spec_path);
        if (output_dir) spec.output_dir = output_dir;
        const RunManifest manifest = run_experiment(spec, parallel != 0);
        if (manifest_path_out && cap > 0) {
            const std::string p = spec.output_dir + "/manifest.json";
            std::strncpy(manifest_path_out, p.c_str(), cap - 1);
            manifest_path_out[cap - 1] = '\0';
        }
        for (const auto& s : manifest.schemes) {
            if (s.termination == "degeneration") {
                g_last_error = "scheme '" + s.label + "' ended with mesh degeneration";
                return GF_ERR_DEGENERATION;
            }
            if (s.termination == "solver-failure") {
                g_last_error = "scheme '" + s.label + "' ended with " +
                               (s.detail.empty() ? "a solver failure" : s.detail);
                return GF_ERR_SOLVER_FAILURE;
            }
        }
        return GF_OK;
    });
}

gf_status gf_run_eoc(const char* spec_path, double* h, double* h1_error, double* h1_order,
                     double* l2_error, double* l2_order, int cap, int* n_out) {
    if (!spec_path || !n_out) return arg_error("spec_path and n_out must not be NULL");
    return guarded([&] {
        const EocSpec spec = EocSpec::parse_file(spec_path);
        const EocStudyResult result = run_eoc_study(spec);
        if (result.aborted) {
            g_last_error = "eoc study aborted: " + result.detail;
            return GF_ERR_SOLVER_FAILURE;
        }
        const int n = static_cast<int>(result.h1.h.size());
        if (n > cap) {
            g_last_error = "eoc result does not fit the provided arrays";
            return GF_ERR_INVALID_ARG;
        }
        *n_out = n;
        for (int i = 0; i < n; ++i) {
            if (h) h[i] = result.h1.h[i];
            if (h1_error) h1_error[i] = result.h1.error[i];
            if (l2_error) l2_error[i] = result.l2.error[i];
        }
        for (int i = 0; i + 1 < n; ++i) {
            if (h1_order) h1_order[i] = result.h1.order[i];
            if (l2_order) l2_order[i] = result.l2.order[i];
        }
        return GF_OK;
    });
}

}  // extern "C"
