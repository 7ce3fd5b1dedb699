#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "geomflow/diagnostics.hpp"

using namespace gf;

namespace {

constexpr double kPi = PolygonalCurve::pi;

TriSurface one_triangle(const Vec3& a, const Vec3& b, const Vec3& c) {
    TriSurface s;
    s.vertices = {a, b, c};
    s.triangles = {{0, 1, 2}};
    s.reference_positions = s.vertices;
    return s;
}

// independent trapezoid quadrature of the circle error, 2000 samples/segment
CurveErrorNorms oracle_circle_error(const PolygonalCurve& c, double t, double r0) {
    const double r = std::sqrt(r0 * r0 - 2.0 * t);
    const int samples = 2000;
    double l2 = 0.0, h1 = 0.0;
    const int n = c.size();
    for (int j = 0; j < n; ++j) {
        const double ta = c.theta[j], dt = c.dtheta(j);
        const Vec2 pa = c.vertices[j], pb = c.vertices[(j + 1) % n];
        const Vec2 dx = (pb - pa) / dt;
        for (int q = 0; q < samples; ++q) {
            const double s0 = double(q) / samples, s1 = double(q + 1) / samples;
            const auto eval = [&](double s, bool grad) {
                const double theta = ta + s * dt;
                const Vec2 xh = pa * (1.0 - s) + pb * s;
                const Vec2 xe{r * std::cos(theta), r * std::sin(theta)};
                const Vec2 dxe{-r * std::sin(theta), r * std::cos(theta)};
                return grad ? norm_sq(dx - dxe) : norm_sq(xh - xe);
            };
            l2 += 0.5 * (eval(s0, false) + eval(s1, false)) * dt / samples;
            h1 += 0.5 * (eval(s0, true) + eval(s1, true)) * dt / samples;
        }
    }
    return {std::sqrt(l2), std::sqrt(h1)};
}

}  // namespace

TEST_CASE("sigma_max closed forms") {
    const auto eq = one_triangle({0, 0, 0}, {1, 0, 0}, {0.5, std::sqrt(3.0) / 2.0, 0});
    CHECK(sigma_max(eq) == doctest::Approx(2.0 * std::sqrt(3.0)).epsilon(1e-12));

    const auto right = one_triangle({0, 0, 0}, {1, 0, 0}, {0, 1, 0});
    const double expected = std::sqrt(2.0) / ((2.0 - std::sqrt(2.0)) / 2.0);
    CHECK(sigma_max(right) == doctest::Approx(expected).epsilon(1e-12));

    // mixed mesh takes the max
    TriSurface mixed = eq;
    mixed.vertices.push_back({2, 0, 0});
    mixed.vertices.push_back({3, 0, 0});
    mixed.vertices.push_back({2, 1, 0});
    mixed.triangles.push_back({3, 4, 5});
    mixed.reference_positions = mixed.vertices;
    CHECK(sigma_max(mixed) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("sigma_max reports degenerate elements without throwing") {
    auto s = one_triangle({0, 0, 0}, {1, 0, 0}, {2, 0, 0});
    const auto r = sigma_max_checked(s);
    CHECK(r.degenerate);
    CHECK(std::isinf(r.value));
}

TEST_CASE("sigma_max is scale invariant") {
    const auto s = generate_dumbbell(0.7, 2);
    const double base = sigma_max(s);
    for (double lambda : {1e-3, 0.5, 7.0, 1e4}) {
        TriSurface scaled = s;
        for (auto& p : scaled.vertices) p *= lambda;
        CHECK(sigma_max(scaled) == doctest::Approx(base).epsilon(1e-12));
    }
}

TEST_CASE("segment_ratio basics and properties") {
    CHECK(segment_ratio(generate_circle(17, 2.0)) == doctest::Approx(1.0).epsilon(1e-12));
    for (double r : {1.35, 4.0})
        CHECK(segment_ratio(generate_parametrized_curve(CurveShape::example3_graded_circle, 48, r)) ==
              doctest::Approx(r).epsilon(1e-9));

    std::mt19937 rng(10);
    std::uniform_real_distribution<double> u(-0.3, 0.3);
    for (int trial = 0; trial < 10; ++trial) {
        std::vector<Vec2> v(12);
        for (int j = 0; j < 12; ++j) {
            const double t = 2.0 * kPi * j / 12;
            v[j] = {(1.0 + u(rng)) * std::cos(t), (1.0 + u(rng)) * std::sin(t)};
        }
        const auto c = make_curve(std::move(v));
        CHECK(segment_ratio(c) >= 1.0);
    }
}

TEST_CASE("h1 error against the shrinking circle") {
    SUBCASE("matches an independent quadrature oracle") {
        const auto c = generate_circle(24, 1.0);
        const auto got = h1_error_vs_circle(c, 0.2, 1.0);
        const auto oracle = oracle_circle_error(c, 0.2, 1.0);
        CHECK(got.l2 == doctest::Approx(oracle.l2).epsilon(1e-7));
        CHECK(got.h1_semi == doctest::Approx(oracle.h1_semi).epsilon(1e-7));
    }
    SUBCASE("interpolation error at t=0 is small and decays like N^-2 in L2") {
        const auto c64 = generate_circle(64, 1.0);
        const auto e64 = h1_error_vs_circle(c64, 0.0, 1.0);
        CHECK(e64.l2 < 1e-3);
        const auto c128 = generate_circle(128, 1.0);
        const auto e128 = h1_error_vs_circle(c128, 0.0, 1.0);
        CHECK(e64.l2 / e128.l2 == doctest::Approx(4.0).epsilon(0.05));
        CHECK(e64.h1_semi / e128.h1_semi == doctest::Approx(2.0).epsilon(0.05));
    }
    SUBCASE("rotation increases the error of the aligned interpolant") {
        const int n = 32;
        const auto c = generate_circle(n, 1.0);
        PolygonalCurve rot = c;
        const double phi = kPi / n;
        for (auto& p : rot.vertices)
            p = {std::cos(phi) * p.x - std::sin(phi) * p.y, std::sin(phi) * p.x + std::cos(phi) * p.y};
        CHECK(h1_error_vs_circle(rot, 0.0, 1.0).l2 > h1_error_vs_circle(c, 0.0, 1.0).l2);
    }
    SUBCASE("beyond extinction is rejected") {
        const auto c = generate_circle(16, 1.0);
        CHECK_THROWS_AS(h1_error_vs_circle(c, 0.6, 1.0), Error);
    }
}

TEST_CASE("eoc table") {
    {
        const std::pair<double, double> rows[] = {{0.1, 0.2}, {0.05, 0.1}};
        const auto t = eoc(rows);
        REQUIRE(t.order.size() == 1);
        CHECK(t.order[0] == doctest::Approx(1.0).epsilon(1e-12));
    }
    {
        const std::pair<double, double> rows[] = {{0.1, 0.04}, {0.05, 0.01}};
        const auto t = eoc(rows);
        CHECK(t.order[0] == doctest::Approx(2.0).epsilon(1e-12));
    }
    {
        const std::pair<double, double> bad[] = {{0.1, 0.2}, {0.05, 0.0}};
        CHECK_THROWS_AS(eoc(bad), Error);
    }
    {
        const std::pair<double, double> bad[] = {{0.05, 0.2}, {0.1, 0.1}};
        CHECK_THROWS_AS(eoc(bad), Error);
    }
    {
        const std::pair<double, double> single[] = {{0.1, 0.2}};
        CHECK_THROWS_AS(eoc(single), Error);
    }
}

TEST_CASE("extinction time interpolates the threshold crossing") {
    std::vector<DiagnosticsRecord> series;
    const double r0 = 1.0;
    for (int m = 0; m <= 5000; ++m) {
        DiagnosticsRecord r;
        r.time = m * 1e-4;
        const double rr = r0 * r0 - 2.0 * r.time;
        r.size = rr > 0.0 ? 2.0 * kPi * std::sqrt(rr) : 0.0;
        series.push_back(r);
        if (r.size == 0.0) break;
    }
    const auto t = extinction_time(series, 1e-3);
    REQUIRE(t.has_value());
    CHECK(std::abs(*t - 0.5 * r0 * r0) < 1e-4);

    std::vector<DiagnosticsRecord> flat(10);
    for (int m = 0; m < 10; ++m) {
        flat[m].time = m * 0.1;
        flat[m].size = 5.0;
    }
    CHECK_FALSE(extinction_time(flat, 0.5).has_value());
}

TEST_CASE("diagnostics csv is deterministic with the fixed column order") {
    std::vector<DiagnosticsRecord> records(3);
    for (int m = 0; m < 3; ++m) {
        records[m].time = m * 0.1;
        records[m].size = 10.0 - m;
        records[m].sigma_max_or_ratio = 3.5;
        records[m].max_speed = 1.25;
        records[m].iterations = m;
        records[m].flags = m == 2 ? diag_flag_stability_violation : 0;
    }
    namespace fs = std::filesystem;
    const auto p1 = (fs::temp_directory_path() / "gf_diag1.csv").string();
    const auto p2 = (fs::temp_directory_path() / "gf_diag2.csv").string();
    write_diagnostics_csv(p1, records);
    write_diagnostics_csv(p2, records);

    const auto read_all = [](const std::string& p) {
        std::ifstream in(p);
        return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    };
    const std::string a = read_all(p1), b = read_all(p2);
    CHECK(a == b);
    CHECK(a.rfind("time,size,sigma_max_or_ratio,max_speed,energy_lhs,energy_rhs,iterations,flags\n",
                  0) == 0);
    CHECK(std::count(a.begin(), a.end(), '\n') == 4);
}
