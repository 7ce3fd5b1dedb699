#pragma once

// Mesh-quality metrics, error measurement against the closed-form shrinking
// circle, EOC computation and the per-step diagnostics record.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "geomflow/mesh.hpp"

namespace gf {

enum DiagFlags : unsigned {
    diag_flag_stability_violation = 1u,
    diag_flag_near_degeneration = 2u,
};

struct DiagnosticsRecord {
    double time = 0.0;
    double size = 0.0;                // curve length or surface area
    double sigma_max_or_ratio = 0.0;  // sigma_max (surfaces) / segment ratio (curves)
    double max_speed = 0.0;
    double energy_lhs = 0.0;  // stability inequality sides (alpha-scheme curves)
    double energy_rhs = 0.0;
    int iterations = 0;
    unsigned flags = 0;
};

// One row per record: time,size,sigma_max_or_ratio,max_speed,energy_lhs,
// energy_rhs,iterations,flags. Deterministic formatting.
void write_diagnostics_csv(const std::string& path, std::span<const DiagnosticsRecord> records);

struct SigmaMaxResult {
    double value = 0.0;
    bool degenerate = false;  // some triangle had zero inradius; value is +inf
};

SigmaMaxResult sigma_max_checked(const TriSurface& s);
double sigma_max(const TriSurface& s);  // +inf on degenerate elements

double segment_ratio(const PolygonalCurve& c);

struct CurveErrorNorms {
    double l2 = 0.0;
    double h1_semi = 0.0;
};

// Error of the polygon against the shrinking circle
// X(theta,t) = sqrt(R0^2 - 2 t) (cos theta, sin theta), integrated with
// 5-point Gauss quadrature per segment over the curve's theta grid.
CurveErrorNorms h1_error_vs_circle(const PolygonalCurve& c, double t, double r0);

struct EocTable {
    std::vector<double> h;
    std::vector<double> error;
    std::vector<double> order;  // size h.size()-1
};

EocTable eoc(std::span<const std::pair<double, double>> h_and_error);

// First time the size metric drops below threshold * initial size, linearly
// interpolated between samples; nullopt when never reached.
std::optional<double> extinction_time(std::span<const DiagnosticsRecord> series, double threshold_fraction);

}  // namespace gf
