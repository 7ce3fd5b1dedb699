#include "geomflow/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

namespace gf {

void write_diagnostics_csv(const std::string& path, std::span<const DiagnosticsRecord> records) {
    std::ofstream out(path);
    if (!out) fail(ErrorCode::io, "cannot open '" + path + "' for writing");
    out << "time,size,sigma_max_or_ratio,max_speed,energy_lhs,energy_rhs,iterations,flags\n";
    char buf[256];
    for (const auto& r : records) {
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%d,%u\n", r.time, r.size,
                      r.sigma_max_or_ratio, r.max_speed, r.energy_lhs, r.energy_rhs, r.iterations,
                      r.flags);
        out << buf;
    }
}

SigmaMaxResult sigma_max_checked(const TriSurface& s) {
    SigmaMaxResult result;
    for (int t = 0; t < s.triangle_count(); ++t) {
        const auto g = triangle_geometry(s, t);
        if (!(g.inradius > 0.0)) {
            result.degenerate = true;
            result.value = std::numeric_limits<double>::infinity();
            return result;
        }
        result.value = std::max(result.value, g.diameter / g.inradius);
    }
    return result;
}

double sigma_max(const TriSurface& s) { return sigma_max_checked(s).value; }

double segment_ratio(const PolygonalCurve& c) {
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (int j = 0; j < c.size(); ++j) {
        const double l = c.segment_length(j);
        lo = std::min(lo, l);
        hi = std::max(hi, l);
    }
    return hi / lo;
}

namespace {
// 5-point Gauss-Legendre on [-1,1]
constexpr double kGaussX[5] = {0.0, -0.5384693101056831, 0.5384693101056831, -0.9061798459386640,
                               0.9061798459386640};
constexpr double kGaussW[5] = {0.5688888888888889, 0.4786286704993665, 0.4786286704993665,
                               0.2369268850561891, 0.2369268850561891};
}  // namespace

CurveErrorNorms h1_error_vs_circle(const PolygonalCurve& c, double t, double r0) {
    const double r2 = r0 * r0 - 2.0 * t;
    if (!(r2 > 0.0)) fail(ErrorCode::invalid_argument, "time beyond circle extinction");
    const double r = std::sqrt(r2);

    double l2 = 0.0, h1 = 0.0;
    const int n = c.size();
    for (int j = 0; j < n; ++j) {
        const double ta = c.theta[j];
        const double dt = c.dtheta(j);
        const Vec2 pa = c.vertices[j], pb = c.vertices[(j + 1) % n];
        const Vec2 dX = (pb - pa) / dt;  // parametric derivative of the interpolant
        for (int q = 0; q < 5; ++q) {
            const double s = 0.5 * (kGaussX[q] + 1.0);  // in [0,1]
            const double theta = ta + s * dt;
            const double wq = 0.5 * dt * kGaussW[q];
            const Vec2 xh = pa * (1.0 - s) + pb * s;
            const Vec2 xe{r * std::cos(theta), r * std::sin(theta)};
            const Vec2 dxe{-r * std::sin(theta), r * std::cos(theta)};
            l2 += wq * norm_sq(xh - xe);
            h1 += wq * norm_sq(dX - dxe);
        }
    }
    return {std::sqrt(l2), std::sqrt(h1)};
}

EocTable eoc(std::span<const std::pair<double, double>> h_and_error) {
    if (h_and_error.size() < 2) fail(ErrorCode::invalid_argument, "eoc needs at least 2 rows");
    EocTable table;
    for (const auto& [h, e] : h_and_error) {
        if (!(h > 0.0)) fail(ErrorCode::invalid_argument, "eoc: h must be positive");
        if (!(e > 0.0)) fail(ErrorCode::invalid_argument, "eoc: errors must be positive");
        if (!table.h.empty() && !(h < table.h.back()))
            fail(ErrorCode::invalid_argument, "eoc: h must be strictly decreasing");
        table.h.push_back(h);
        table.error.push_back(e);
    }
    for (std::size_t i = 0; i + 1 < table.h.size(); ++i)
        table.order.push_back(std::log(table.error[i] / table.error[i + 1]) /
                              std::log(table.h[i] / table.h[i + 1]));
    return table;
}

std::optional<double> extinction_time(std::span<const DiagnosticsRecord> series,
                                      double threshold_fraction) {
    if (series.empty()) fail(ErrorCode::invalid_argument, "extinction_time: empty series");
    const double target = threshold_fraction * series.front().size;
    for (std::size_t i = 0; i < series.size(); ++i) {
        if (series[i].size < target) {
            if (i == 0) return series[0].time;
            const auto& a = series[i - 1];
            const auto& b = series[i];
            const double f = (a.size - target) / (a.size - b.size);
            return a.time + f * (b.time - a.time);
        }
    }
    return std::nullopt;
}

}  // namespace gf
