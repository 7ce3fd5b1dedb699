#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "geomflow.h"

namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
    const auto dir = fs::temp_directory_path() / "geomflow_capi_tests" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

}  // namespace

TEST_CASE("version and error reporting") {
    CHECK(std::strlen(gf_version()) > 0);
    gf_curve* c = nullptr;
    CHECK(gf_curve_circle(2, 1.0, &c) != GF_OK);
    CHECK(std::strlen(gf_last_error()) > 0);
    CHECK(gf_curve_shape("example9", 64, 0.0, &c) != GF_OK);
    CHECK(std::string(gf_last_error()).find("example9") != std::string::npos);
}

TEST_CASE("curve lifecycle through the C API") {
    gf_curve* c = nullptr;
    REQUIRE(gf_curve_circle(64, 1.0, &c) == GF_OK);
    REQUIRE(c != nullptr);
    CHECK(gf_curve_size(c) == 64);

    double len = 0.0, ratio = 0.0;
    CHECK(gf_curve_length(c, &len) == GF_OK);
    CHECK(len == doctest::Approx(128.0 * std::sin(M_PI / 64.0)));
    CHECK(gf_curve_segment_ratio(c, &ratio) == GF_OK);
    CHECK(ratio == doctest::Approx(1.0));

    std::vector<double> xy(128);
    CHECK(gf_curve_positions(c, xy.data()) == GF_OK);
    CHECK(xy[0] == doctest::Approx(1.0));

    const auto dir = fresh_dir("curve");
    const auto csv = (dir / "c.csv").string();
    CHECK(gf_curve_write(c, csv.c_str()) == GF_OK);
    gf_curve* back = nullptr;
    REQUIRE(gf_curve_read_csv(csv.c_str(), &back) == GF_OK);
    CHECK(gf_curve_size(back) == 64);
    gf_curve_free(back);
    gf_curve_free(c);

    // building from raw points
    const double tri[] = {0, 0, 1, 0, 0, 1};
    gf_curve* t = nullptr;
    REQUIRE(gf_curve_from_points(tri, 3, &t) == GF_OK);
    gf_curve_free(t);
}

TEST_CASE("surface lifecycle through the C API") {
    gf_surface* s = nullptr;
    REQUIRE(gf_surface_icosphere(2, 1.0, &s) == GF_OK);
    CHECK(gf_surface_vertex_count(s) == 162);
    CHECK(gf_surface_triangle_count(s) == 320);

    double area = 0.0, sm = 0.0;
    CHECK(gf_surface_area(s, &area) == GF_OK);
    CHECK(area == doctest::Approx(4.0 * M_PI).epsilon(0.01));
    CHECK(gf_surface_sigma_max(s, &sm) == GF_OK);
    CHECK(sm > 2.0 * std::sqrt(3.0) - 0.1);

    const auto dir = fresh_dir("surface");
    const auto off = (dir / "s.off").string();
    CHECK(gf_surface_write(s, off.c_str()) == GF_OK);
    gf_surface* back = nullptr;
    REQUIRE(gf_surface_read(off.c_str(), &back) == GF_OK);
    CHECK(gf_surface_vertex_count(back) == 162);

    std::vector<double> xyz(3 * 162);
    CHECK(gf_surface_positions(back, xyz.data()) == GF_OK);
    std::vector<double> ref(3 * 162);
    CHECK(gf_surface_reference_positions(back, ref.data()) == GF_OK);
    std::vector<int> tris(3 * 320);
    CHECK(gf_surface_triangles(back, tris.data()) == GF_OK);
    gf_surface_free(back);
    gf_surface_free(s);

    CHECK(gf_surface_torus(1.0, 1.2, 16, 8, &s) != GF_OK);  // self-intersecting
}

TEST_CASE("csf stepper through the C API") {
    gf_curve* c = nullptr;
    REQUIRE(gf_curve_circle(64, 1.0, &c) == GF_OK);
    gf_csf_stepper* st = nullptr;
    REQUIRE(gf_csf_create(c, "alpha", 1.0, 1e-4, 1.0, &st) == GF_OK);
    gf_diag_record rec;
    for (int m = 0; m < 100; ++m) REQUIRE(gf_csf_step(st, &rec) == GF_OK);
    CHECK(gf_csf_time(st) == doctest::Approx(0.01));
    CHECK(rec.size == doctest::Approx(2.0 * M_PI * std::sqrt(1.0 - 2.0 * 0.01)).epsilon(0.01));
    CHECK(rec.energy_lhs <= rec.energy_rhs + 1e-8);
    CHECK(rec.flags == 0);

    gf_curve* now = nullptr;
    REQUIRE(gf_csf_curve(st, &now) == GF_OK);
    double len = 0.0;
    gf_curve_length(now, &len);
    CHECK(len == doctest::Approx(rec.size));
    gf_curve_free(now);
    gf_csf_free(st);
    gf_curve_free(c);
}

TEST_CASE("bgn non-convergence surfaces as a status code") {
    gf_curve* g = nullptr;
    REQUIRE(gf_curve_shape("example3", 64, 0.0, &g) == GF_OK);
    gf_csf_stepper* st = nullptr;
    REQUIRE(gf_csf_create(g, "bgn", 0.0, 1e-4, 1.0, &st) == GF_OK);
    gf_diag_record rec;
    CHECK(gf_csf_step(st, &rec) == GF_ERR_NON_CONVERGENCE);
    CHECK(gf_csf_time(st) == 0.0);  // state untouched
    gf_csf_free(st);

    REQUIRE(gf_csf_create(g, "bgn", 0.0, 1e-4, 0.5, &st) == GF_OK);
    CHECK(gf_csf_step(st, &rec) == GF_OK);
    gf_csf_free(st);
    gf_curve_free(g);
}

TEST_CASE("mcf stepper through the C API") {
    gf_surface* s = nullptr;
    REQUIRE(gf_surface_icosphere(2, 1.0, &s) == GF_OK);
    gf_mcf_stepper* st = nullptr;
    REQUIRE(gf_mcf_create(s, "alg3", 0.01, "fixed", 1e-4, &st) == GF_OK);
    gf_diag_record rec;
    for (int m = 0; m < 50; ++m) REQUIRE(gf_mcf_step(st, &rec) == GF_OK);
    CHECK(rec.size == doctest::Approx(4.0 * M_PI * (1.0 - 4.0 * 0.005)).epsilon(0.02));
    gf_surface* now = nullptr;
    REQUIRE(gf_mcf_surface(st, &now) == GF_OK);
    CHECK(gf_surface_vertex_count(now) == 162);
    gf_surface_free(now);
    gf_mcf_free(st);

    CHECK(gf_mcf_create(s, "alg9", 0.01, "fixed", 1e-4, &st) == GF_ERR_INVALID_ARG);
    gf_surface_free(s);
}

TEST_CASE("experiment and eoc through the C API") {
    const auto dir = fresh_dir("exp");
    const auto spec = dir / "spec.gf";
    std::ofstream(spec) << "problem.kind = curve\n"
                        << "problem.shape = circle\n"
                        << "problem.n = 16\n"
                        << "end.time = 0.001\n"
                        << "output.dir = " << (dir / "out").string() << "\n"
                        << "scheme.1.kind = alg1\n"
                        << "scheme.1.label = a\n"
                        << "scheme.1.alpha = 1.0\n"
                        << "scheme.1.tau = 1e-5\n";
    CHECK(gf_validate_spec(spec.string().c_str()) == GF_OK);

    char manifest[1024] = {0};
    REQUIRE(gf_run_experiment(spec.string().c_str(), nullptr, 0, manifest, sizeof(manifest)) == GF_OK);
    CHECK(fs::exists(manifest));

    const auto bad = dir / "bad.gf";
    std::ofstream(bad) << "problem.kind = curve\n";
    CHECK(gf_validate_spec(bad.string().c_str()) == GF_ERR_SPEC);

    const auto eoc_spec = dir / "eoc.gf";
    std::ofstream(eoc_spec) << "eoc.resolutions = 16, 32\n"
                            << "eoc.tau_coeff = 0.5\n"
                            << "eoc.alpha = 1.0\n"
                            << "eoc.end_time = 0.05\n";
    double h[8], e1[8], o1[8], e2[8], o2[8];
    int n = 0;
    REQUIRE(gf_run_eoc(eoc_spec.string().c_str(), h, e1, o1, e2, o2, 8, &n) == GF_OK);
    REQUIRE(n == 2);
    CHECK(o1[0] > 0.7);
    CHECK(o1[0] < 1.3);
}
