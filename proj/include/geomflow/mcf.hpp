#pragma once

// Mean curvature flow steppers for triangulated surfaces: the DeTurck scheme
// with first-order transport term (alg2), the variant DeTurck scheme in
// divergence form (alg3) and the BGN benchmark scheme. The reference nodal
// vector Y never changes; only vertices move.

#include <memory>
#include <optional>
#include <vector>

#include "geomflow/csf.hpp"  // StepStatus
#include "geomflow/fem.hpp"
#include "geomflow/mesh.hpp"

namespace gf {

enum class McfScheme { alg2, alg3, bgn };

const char* mcf_scheme_name(McfScheme s);

struct TauRule {
    enum class Kind { fixed, prop_h, prop_h2 };  // tau, c*h, c*h^2
    Kind kind = Kind::fixed;
    double value = 1e-4;  // tau itself or the coefficient c

    double tau_for(double h) const {
        switch (kind) {
            case Kind::fixed: return value;
            case Kind::prop_h: return value * h;
            case Kind::prop_h2: return value * h * h;
        }
        return value;
    }
};

struct McfConfig {
    McfScheme scheme = McfScheme::alg3;
    double alpha = 1e-2;
    bool alpha_equals_tau = false;  // alpha coupled to the step size
    TauRule tau;
    SolverConfig solver{SolverMethod::bicgstab};
    double degeneration_area_eps = 1e-14;
    double degeneration_sigma = 1e6;
};

struct McfState {
    TriSurface surface;
    double time = 0.0;
    long step_index = 0;
};

struct McfStepInfo {
    StepStatus status = StepStatus::ok;
    int solver_iterations = 0;
    double tau_used = 0.0;
    double max_vertex_speed = 0.0;
};

// Per-element pulled-back metric data of the reference map.
struct ElementMetricData {
    Mat3 grad_y;  // (grad_Gamma y)_{beta gamma} = d_gamma y_beta, constant per element
    Mat3 H;       // (grad y)^T grad y + nu x nu
    Mat3 H_inv;
    double rho = 0.0;  // sqrt(det H)
};

// Throws Error(degeneration) when det H <= 0 (degenerate reference image).
ElementMetricData compute_element_metric(const TriangleGeometry& g, const Vec3 y[3]);

// Weak Laplacian of the reference map: w = -(mass)^-1 (S Y), componentwise.
std::vector<Vec3> discrete_map_laplacian_w(const TriSurface& s,
                                           const SolverConfig& solver = SolverConfig{SolverMethod::cg, 1e-12});

// ---- element kernels (9x9; entry ((a,beta),(b,gamma)) at (3a+beta, 3b+gamma)) ----

DenseMatrix surface_stiffness_kernel(const TriangleGeometry& g);
// alg2 consistent mass: (alpha I + (1-alpha) nu nu^T) * int phi_a phi_b
DenseMatrix mcf_mass_kernel_alg2(const TriangleGeometry& g, double alpha);
// alg2 transport term from H^-1 (grad y)^T w, exact for the linear field w
DenseMatrix mcf_transport_kernel_alg2(const TriangleGeometry& g, const ElementMetricData& md,
                                      const Vec3 w[3]);
// alg3 lumped mass: (alpha rho I + (1 - alpha rho) nu~ nu~^T)(p_a) |T|/3 on the diagonal
DenseMatrix mcf_mass_kernel_alg3(const TriangleGeometry& g, const ElementMetricData& md, double alpha,
                                 const Vec3 nutilde[3]);
// alg3 divergence-form term: P(p_a) rho |T| grad_a^T H^-1 grad_b
DenseMatrix mcf_divergence_kernel_alg3(const TriangleGeometry& g, const ElementMetricData& md,
                                       const Vec3 nutilde[3]);
// BGN lumped normal-projection mass: nu~ nu~^T (p_a) |T|/3 on the diagonal
DenseMatrix mcf_mass_kernel_bgn(const TriangleGeometry& g, const Vec3 nutilde[3]);

// Reusable per-run storage (pattern and matrices survive across steps).
class McfWorkspace {
  public:
    explicit McfWorkspace(const TriSurface& s);

    const ElementConnectivity& connectivity() const { return conn_; }
    std::shared_ptr<const SparsityPattern> pattern() const { return pattern_; }
    BlockSparseMatrix& system() { return system_; }
    BlockSparseMatrix& mass() { return mass_; }

  private:
    ElementConnectivity conn_;
    std::shared_ptr<SparsityPattern> pattern_;
    BlockSparseMatrix system_, mass_;
};

McfStepInfo step_mcf_alg2(McfState& state, const McfConfig& cfg, McfWorkspace* ws = nullptr);
McfStepInfo step_mcf_alg3(McfState& state, const McfConfig& cfg, McfWorkspace* ws = nullptr);
McfStepInfo step_mcf_bgn(McfState& state, const McfConfig& cfg, McfWorkspace* ws = nullptr);
McfStepInfo step_mcf(McfState& state, const McfConfig& cfg, McfWorkspace* ws = nullptr);

}  // namespace gf
