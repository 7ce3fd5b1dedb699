/*
 * geomflow C API: geometric-flow simulation of closed curves and surfaces.
 *
 * All objects are opaque handles created and destroyed through this
 * interface. Functions return gf_status; on any failure the thread-local
 * message from gf_last_error() describes what went wrong. Out-parameters are
 * only written on GF_OK unless stated otherwise.
 */

#ifndef GEOMFLOW_H
#define GEOMFLOW_H

#include <stddef.h>

#if defined(_WIN32)
#define GF_API __declspec(dllexport)
#else
#define GF_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum gf_status {
    GF_OK = 0,
    GF_ERR_INVALID_ARG = 1,
    GF_ERR_INVALID_MESH = 2,
    GF_ERR_PARSE = 3,
    GF_ERR_NON_MANIFOLD = 4,
    GF_ERR_SOLVER_FAILURE = 5,
    GF_ERR_NON_CONVERGENCE = 6,
    GF_ERR_DEGENERATION = 7,
    GF_ERR_IO = 8,
    GF_ERR_SPEC = 9,
    GF_ERR_UNKNOWN = 10
} gf_status;

typedef struct gf_curve gf_curve;
typedef struct gf_surface gf_surface;
typedef struct gf_csf_stepper gf_csf_stepper;
typedef struct gf_mcf_stepper gf_mcf_stepper;

/* One diagnostics row, mirroring the CSV column order. */
typedef struct gf_diag_record {
    double time;
    double size;                /* curve length or surface area */
    double sigma_max_or_ratio;  /* sigma_max (surfaces) / segment ratio (curves) */
    double max_speed;
    double energy_lhs;
    double energy_rhs;
    int iterations;
    unsigned flags;
} gf_diag_record;

GF_API const char* gf_version(void);
/* Message of the most recent failure on this thread; never NULL. */
GF_API const char* gf_last_error(void);

/* ---- curves ---- */

GF_API gf_status gf_curve_circle(int n, double radius, gf_curve** out);
/* shape: "example1" | "example2" | "example3"; grading_ratio <= 0 selects the
 * default grading for example3 and is ignored otherwise. */
GF_API gf_status gf_curve_shape(const char* shape, int n, double grading_ratio, gf_curve** out);
GF_API gf_status gf_curve_from_points(const double* xy, int n, gf_curve** out);
GF_API int gf_curve_size(const gf_curve* c);
GF_API gf_status gf_curve_positions(const gf_curve* c, double* xy);
GF_API gf_status gf_curve_length(const gf_curve* c, double* out);
GF_API gf_status gf_curve_segment_ratio(const gf_curve* c, double* out);
/* Writes .csv (index,x,y) or .vtk (polyline) depending on the extension. */
GF_API gf_status gf_curve_write(const gf_curve* c, const char* path);
GF_API gf_status gf_curve_read_csv(const char* path, gf_curve** out);
GF_API void gf_curve_free(gf_curve* c);

/* ---- surfaces ---- */

GF_API gf_status gf_surface_icosphere(int subdivisions, double radius, gf_surface** out);
/* bulge: 0.7 for the paper's first dumbbell, 0.6 for the second. */
GF_API gf_status gf_surface_dumbbell(double bulge, int subdivisions, gf_surface** out);
GF_API gf_status gf_surface_torus(double r1, double r2, int n_theta, int n_phi, gf_surface** out);
GF_API int gf_surface_vertex_count(const gf_surface* s);
GF_API int gf_surface_triangle_count(const gf_surface* s);
GF_API gf_status gf_surface_positions(const gf_surface* s, double* xyz);
GF_API gf_status gf_surface_reference_positions(const gf_surface* s, double* xyz);
GF_API gf_status gf_surface_triangles(const gf_surface* s, int* indices);
GF_API gf_status gf_surface_area(const gf_surface* s, double* out);
GF_API gf_status gf_surface_sigma_max(const gf_surface* s, double* out);
/* OFF (.off, with a .ref sidecar for reference positions) or legacy VTK
 * (.vtk, reference positions as POINT_DATA VECTORS "reference_position"). */
GF_API gf_status gf_surface_write(const gf_surface* s, const char* path);
GF_API gf_status gf_surface_read(const char* path, gf_surface** out);
GF_API void gf_surface_free(gf_surface* s);

/* ---- curve steppers ---- */

/* scheme: "alpha" (the alpha-family scheme) or "bgn" (benchmark).
 * damping only applies to "bgn"; pass 1.0 for the undamped iteration. */
GF_API gf_status gf_csf_create(const gf_curve* initial, const char* scheme, double alpha, double tau,
                               double damping, gf_csf_stepper** out);
/* Advances one step. Returns GF_OK, GF_ERR_SOLVER_FAILURE,
 * GF_ERR_NON_CONVERGENCE (BGN fixed point) or GF_ERR_DEGENERATION. The state
 * keeps the last valid step on failure. record may be NULL. */
GF_API gf_status gf_csf_step(gf_csf_stepper* st, gf_diag_record* record);
GF_API double gf_csf_time(const gf_csf_stepper* st);
GF_API gf_status gf_csf_curve(const gf_csf_stepper* st, gf_curve** out);
GF_API void gf_csf_free(gf_csf_stepper* st);

/* ---- surface steppers ---- */

/* scheme: "alg2" | "alg3" | "bgn".
 * tau_rule: "fixed" (tau_value = step size), "h" (tau = tau_value * h) or
 * "h2" (tau = tau_value * h^2) with h the maximal triangle diameter.
 * alpha < 0 couples alpha to the current step size (alpha = tau). */
GF_API gf_status gf_mcf_create(const gf_surface* initial, const char* scheme, double alpha,
                               const char* tau_rule, double tau_value, gf_mcf_stepper** out);
GF_API gf_status gf_mcf_step(gf_mcf_stepper* st, gf_diag_record* record);
GF_API double gf_mcf_time(const gf_mcf_stepper* st);
GF_API gf_status gf_mcf_surface(const gf_mcf_stepper* st, gf_surface** out);
GF_API void gf_mcf_free(gf_mcf_stepper* st);

/* ---- experiments ---- */

/* Validates a spec file without running anything. */
GF_API gf_status gf_validate_spec(const char* spec_path);
/* Runs all schemes of the spec; writes per-scheme CSVs, snapshots and
 * manifest.json into the output directory (output_dir overrides the spec's
 * when non-NULL). Returns GF_OK when every scheme ended by end-time or
 * extinction; GF_ERR_DEGENERATION / GF_ERR_SOLVER_FAILURE when a scheme
 * terminated numerically (the manifest is still written and
 * manifest_path_out, when non-NULL with cap > 0, receives its path);
 * GF_ERR_SPEC / GF_ERR_PARSE / GF_ERR_IO on spec problems. */
GF_API gf_status gf_run_experiment(const char* spec_path, const char* output_dir, int parallel,
                                   char* manifest_path_out, size_t cap);
/* EOC study on the shrinking circle. Arrays must hold cap entries; n_out
 * receives the number of resolutions, orders carry n_out-1 values. */
GF_API gf_status gf_run_eoc(const char* spec_path, double* h, double* h1_error, double* h1_order,
                            double* l2_error, double* l2_order, int cap, int* n_out);

#ifdef __cplusplus
}
#endif

#endif /* GEOMFLOW_H */
