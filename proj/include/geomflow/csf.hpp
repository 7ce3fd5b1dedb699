#pragma once

// Curve shortening flow steppers: the alpha-family semi-implicit scheme and
// the BGN benchmark scheme with damped fixed-point iteration.

#include <vector>

#include "geomflow/fem.hpp"
#include "geomflow/mesh.hpp"

namespace gf {

enum class StepStatus { ok, solver_failure, non_convergence, degeneration };

const char* step_status_name(StepStatus s);

struct CsfConfig {
    double alpha = 1.0;  // alpha >= 0; alpha = 0 is the formal limit
    double tau = 1e-4;
    SolverConfig solver{SolverMethod::cg};
};

struct BgnCurveConfig {
    double tau = 1e-4;
    double fp_threshold = 1e-8;   // max vertex displacement between iterates
    int max_fp_iterations = 1000;
    double damping = 1.0;         // in (0,1], 1 = undamped
    SolverConfig solver{SolverMethod::cg};
};

struct CsfState {
    PolygonalCurve curve;
    double time = 0.0;
    long step_index = 0;
    double stability_energy_sum = 0.0;  // accumulated dissipation increments
};

struct CsfStepInfo {
    StepStatus status = StepStatus::ok;
    int solver_iterations = 0;       // linear solver iterations (total)
    int fixed_point_iterations = 0;  // BGN only
    double max_vertex_speed = 0.0;
    // alpha-scheme stability bookkeeping: 0.5*E(X_new) + dissipation vs 0.5*E(X_old)
    double stability_lhs = 0.0;
    double stability_rhs = 0.0;
    bool stability_violation = false;
    // filled on non_convergence: the last two fixed-point iterates
    std::vector<Vec2> last_iterate;
    std::vector<Vec2> previous_iterate;
};

// Element matrices of the alpha-scheme. Entry ((a,beta),(b,gamma)) at
// (2a+beta, 2b+gamma). The mass coefficient block is
// alpha |rho|^2 I + (1-alpha) rho rho^T with rho the rotated parametric
// tangent of the segment; the segment mass is dtheta/3 (diag), dtheta/6 (off).
DenseMatrix csf_element_mass_kernel(const SegmentGeometry& g, double alpha);
DenseMatrix curve_stiffness_kernel(const SegmentGeometry& g);

// Parametric Dirichlet energy of the curve over the theta grid.
double curve_parametric_energy(const PolygonalCurve& c);

// One semi-implicit step of the alpha-scheme:
// (M(X^m)/tau + S) X^{m+1} = M(X^m) X^m / tau.
// Verifies the discrete stability inequality with 1e-8 absolute slack; a
// violation flags the step but the step is still accepted.
CsfStepInfo step_csf(CsfState& state, const CsfConfig& cfg);

// One step of the BGN benchmark scheme via fixed-point iteration with the
// nodal vector rho lagged one inner iterate and optional damping. On
// non-convergence the state is left unchanged and the last two iterates are
// returned in the info.
CsfStepInfo step_bgn_curve(CsfState& state, const BgnCurveConfig& cfg);

double max_vertex_speed(const PolygonalCurve& prev, const PolygonalCurve& next, double tau);

}  // namespace gf
