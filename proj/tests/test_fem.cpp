#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "geomflow/csf.hpp"
#include "geomflow/fem.hpp"

using namespace gf;

namespace {

constexpr double kPi = PolygonalCurve::pi;

PolygonalCurve random_curve(int n, std::mt19937& rng) {
    std::uniform_real_distribution<double> u(-0.25, 0.25);
    std::vector<Vec2> v(n);
    for (int j = 0; j < n; ++j) {
        const double t = 2.0 * kPi * j / n;
        const double r = 1.0 + u(rng);
        v[j] = {r * std::cos(t), r * std::sin(t)};
    }
    return make_curve(std::move(v));
}

// parametric Dirichlet energy 0.5 * int |X_theta|^2 dtheta of the polygon
double dirichlet_energy(const PolygonalCurve& c) { return 0.5 * curve_parametric_energy(c); }

}  // namespace

TEST_CASE("curve mass kernel assembles the expected circulant blocks") {
    const auto c = generate_circle(4, 1.0);
    const auto conn = curve_connectivity(c);
    const auto mass = assemble(conn, 2, [&](int e, DenseMatrix& out) {
        out = csf_element_mass_kernel(segment_geometry(c, e), 1.0);
    });

    const double h = kPi / 2.0;
    const double rho2 = norm_sq(segment_geometry(c, 0).rho);
    const double* diag = mass.block(0, 0);
    const double* off = mass.block(0, 1);
    REQUIRE(diag != nullptr);
    REQUIRE(off != nullptr);
    for (int p = 0; p < 2; ++p)
        for (int q = 0; q < 2; ++q) {
            CHECK(diag[2 * p + q] == doctest::Approx(p == q ? 2.0 * rho2 * h / 3.0 : 0.0).epsilon(1e-14));
            CHECK(off[2 * p + q] == doctest::Approx(p == q ? rho2 * h / 6.0 : 0.0).epsilon(1e-14));
        }
    CHECK(mass.block(0, 2) == nullptr);  // sparsity confined to adjacency
    CHECK(mass.max_asymmetry() < 1e-12 * mass.max_abs());
}

TEST_CASE("stiffness row sums vanish") {
    std::mt19937 rng(5);
    const auto c = random_curve(17, rng);
    const auto conn = curve_connectivity(c);
    const auto stiff = assemble(conn, 2, [&](int e, DenseMatrix& out) {
        out = curve_stiffness_kernel(segment_geometry(c, e));
    });
    const int n = c.size();
    std::vector<double> ones(2 * n, 1.0), y(2 * n);
    stiff.matvec(ones, y);
    for (double v : y) CHECK(std::abs(v) < 1e-12 * stiff.max_abs());
}

TEST_CASE("assembled stiffness equals the finite-difference Hessian of the Dirichlet energy") {
    std::mt19937 rng(42);
    const auto c = random_curve(8, rng);
    const auto conn = curve_connectivity(c);
    const auto stiff = assemble(conn, 2, [&](int e, DenseMatrix& out) {
        out = curve_stiffness_kernel(segment_geometry(c, e));
    });
    const DenseMatrix dense = stiff.to_dense();

    const int dim = 2 * c.size();
    const double eps = 1e-4;
    const auto energy_at = [&](const std::vector<double>& x) {
        PolygonalCurve p = c;
        for (int j = 0; j < c.size(); ++j) p.vertices[j] = {x[2 * j], x[2 * j + 1]};
        return dirichlet_energy(p);
    };
    std::vector<double> base(dim);
    for (int j = 0; j < c.size(); ++j) {
        base[2 * j] = c.vertices[j].x;
        base[2 * j + 1] = c.vertices[j].y;
    }
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) {
            auto x = base;
            x[i] += eps; x[j] += eps;
            const double epp = energy_at(x);
            x = base; x[i] += eps; x[j] -= eps;
            const double epm = energy_at(x);
            x = base; x[i] -= eps; x[j] += eps;
            const double emp = energy_at(x);
            x = base; x[i] -= eps; x[j] -= eps;
            const double emm = energy_at(x);
            const double hess = (epp - epm - emp + emm) / (4.0 * eps * eps);
            CHECK(dense(i, j) == doctest::Approx(hess).epsilon(1e-7).scale(stiff.max_abs()));
        }
}

TEST_CASE("cg: identity system solves in one iteration") {
    const auto c = generate_circle(8, 1.0);
    const auto conn = curve_connectivity(c);
    auto ident = assemble(conn, 2, [&](int e, DenseMatrix& out) {
        (void)e;
        for (int a = 0; a < 2; ++a)
            for (int p = 0; p < 2; ++p) out(2 * a + p, 2 * a + p) = 0.5;  // two elements per node
    });
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<double> b(ident.dim()), x;
    for (auto& v : b) v = u(rng);
    const auto res = solve(ident, b, x, SolverConfig{SolverMethod::cg});
    CHECK(res.converged);
    CHECK(res.iterations <= 1);
    for (int i = 0; i < ident.dim(); ++i) CHECK(x[i] == doctest::Approx(b[i]).epsilon(1e-12));
}

TEST_CASE("cg matches the dense LU oracle on an SPD system") {
    std::mt19937 rng(11);
    const auto c = random_curve(24, rng);  // dim 48 <= 96
    const auto conn = curve_connectivity(c);
    auto pattern = std::make_shared<SparsityPattern>(conn);
    auto system = assemble(conn, 2, [&](int e, DenseMatrix& out) {
        out = curve_stiffness_kernel(segment_geometry(c, e));
    }, pattern);
    const auto mass = assemble(conn, 2, [&](int e, DenseMatrix& out) {
        out = csf_element_mass_kernel(segment_geometry(c, e), 0.7);
    }, pattern);
    system.add_scaled(mass, 1e3);

    std::vector<double> b(system.dim()), x;
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (auto& v : b) v = u(rng);

    SolverConfig cfg{SolverMethod::cg, 1e-12};
    const auto res = solve(system, b, x, cfg);
    CHECK(res.converged);
    const auto oracle = dense_lu_solve(system.to_dense(), b);
    for (int i = 0; i < system.dim(); ++i) CHECK(std::abs(x[i] - oracle[i]) < 1e-8);
}

TEST_CASE("cg reports failure on an inconsistent singular system") {
    const auto c = generate_circle(12, 1.0);
    const auto conn = curve_connectivity(c);
    const auto stiff = assemble(conn, 2, [&](int e, DenseMatrix& out) {
        out = curve_stiffness_kernel(segment_geometry(c, e));
    });
    std::vector<double> b(stiff.dim(), 1.0), x;  // nonzero mean: not in the range
    SolverConfig cfg{SolverMethod::cg};
    cfg.max_iterations = 200;
    const auto res = solve(stiff, b, x, cfg);
    CHECK_FALSE(res.converged);
    CHECK(res.rel_residual > 1e-10);
}

TEST_CASE("cg error decreases monotonically in the A-norm") {
    std::mt19937 rng(19);
    const auto c = random_curve(16, rng);
    const auto conn = curve_connectivity(c);
    auto pattern = std::make_shared<SparsityPattern>(conn);
    auto system = assemble(conn, 2, [&](int e, DenseMatrix& out) {
        out = curve_stiffness_kernel(segment_geometry(c, e));
    }, pattern);
    const auto mass = assemble(conn, 2, [&](int e, DenseMatrix& out) {
        out = csf_element_mass_kernel(segment_geometry(c, e), 1.0);
    }, pattern);
    system.add_scaled(mass, 10.0);

    std::vector<double> b(system.dim()), x;
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (auto& v : b) v = u(rng);
    const auto exact = dense_lu_solve(system.to_dense(), b);

    std::vector<double> anorms;
    SolverConfig cfg{SolverMethod::cg, 1e-13};
    cfg.iterate_observer = [&](std::span<const double> xk) {
        std::vector<double> e(xk.size()), ae(xk.size());
        for (std::size_t i = 0; i < xk.size(); ++i) e[i] = xk[i] - exact[i];
        system.matvec(e, ae);
        double s = 0.0;
        for (std::size_t i = 0; i < e.size(); ++i) s += e[i] * ae[i];
        anorms.push_back(std::sqrt(std::max(0.0, s)));
    };
    const auto res = solve(system, b, x, cfg);
    CHECK(res.converged);
    REQUIRE(anorms.size() >= 2);
    for (std::size_t k = 1; k < anorms.size(); ++k) CHECK(anorms[k] <= anorms[k - 1] * (1.0 + 1e-10));
}

TEST_CASE("bicgstab solves a nonsymmetric system to the oracle") {
    std::mt19937 rng(23);
    const auto c = random_curve(20, rng);
    const auto conn = curve_connectivity(c);
    auto pattern = std::make_shared<SparsityPattern>(conn);
    // nonsymmetric: stiffness plus a skewed lumped block
    auto system = assemble(conn, 2, [&](int e, DenseMatrix& out) {
        out = curve_stiffness_kernel(segment_geometry(c, e));
        out(0, 1) += 0.3 * (e % 3);
        out(2, 3) -= 0.1;
    }, pattern);
    const auto mass = assemble(conn, 2, [&](int e, DenseMatrix& out) {
        out = csf_element_mass_kernel(segment_geometry(c, e), 1.0);
    }, pattern);
    system.add_scaled(mass, 50.0);
    CHECK(system.max_asymmetry() > 1e-3);

    std::vector<double> b(system.dim()), x;
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (auto& v : b) v = u(rng);
    const auto res = solve(system, b, x, SolverConfig{SolverMethod::bicgstab, 1e-12});
    CHECK(res.converged);
    const auto oracle = dense_lu_solve(system.to_dense(), b);
    for (int i = 0; i < system.dim(); ++i) CHECK(std::abs(x[i] - oracle[i]) < 1e-8);
}

TEST_CASE("assembly is additive in the kernel") {
    std::mt19937 rng(7);
    const auto c = random_curve(10, rng);
    const auto conn = curve_connectivity(c);
    auto pattern = std::make_shared<SparsityPattern>(conn);

    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<DenseMatrix> k1(conn.num_elements(), DenseMatrix(4, 4));
    std::vector<DenseMatrix> k2(conn.num_elements(), DenseMatrix(4, 4));
    for (int e = 0; e < conn.num_elements(); ++e)
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) {
                k1[e](i, j) = u(rng);
                k2[e](i, j) = u(rng);
            }

    const auto a1 = assemble(conn, 2, [&](int e, DenseMatrix& out) { out = k1[e]; }, pattern);
    auto a2 = assemble(conn, 2, [&](int e, DenseMatrix& out) { out = k2[e]; }, pattern);
    const auto sum = assemble(conn, 2, [&](int e, DenseMatrix& out) {
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) out(i, j) = k1[e](i, j) + k2[e](i, j);
    }, pattern);
    a2.add_scaled(a1, 1.0);

    const auto d1 = a2.to_dense();
    const auto d2 = sum.to_dense();
    for (int i = 0; i < d1.rows(); ++i)
        for (int j = 0; j < d1.cols(); ++j) CHECK(std::abs(d1(i, j) - d2(i, j)) < 1e-14);
}

TEST_CASE("kernels producing non-finite entries abort assembly with the element index") {
    const auto c = generate_circle(6, 1.0);
    const auto conn = curve_connectivity(c);
    try {
        assemble(conn, 2, [&](int e, DenseMatrix& out) {
            if (e == 3) out(0, 0) = std::numeric_limits<double>::quiet_NaN();
        });
        FAIL("expected an assembly error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::assembly);
        CHECK(std::string(e.what()).find("element 3") != std::string::npos);
    }
}

TEST_CASE("lumped mass integrals") {
    TriSurface tri;
    tri.vertices = {{0, 0, 0}, {1, 0, 0}, {0.5, std::sqrt(3.0) / 2.0, 0}};
    tri.triangles = {{0, 1, 2}};
    tri.reference_positions = tri.vertices;
    const auto w = lumped_mass_integrals(tri);
    for (double v : w) CHECK(v == doctest::Approx(std::sqrt(3.0) / 4.0 / 3.0).epsilon(1e-12));

    const auto sphere = generate_icosphere(2, 1.0);
    const auto ws = lumped_mass_integrals(sphere);
    double sum = 0.0;
    for (double v : ws) sum += v;
    CHECK(sum == doctest::Approx(surface_area(sphere)).epsilon(1e-12));

    const auto curve = generate_parametrized_curve(CurveShape::example1_flattened_circle, 24);
    const auto wc = lumped_mass_integrals(curve);
    double csum = 0.0;
    for (double v : wc) csum += v;
    CHECK(csum == doctest::Approx(curve_length(curve)).epsilon(1e-12));
}

TEST_CASE("matrix market export") {
    const auto c = generate_circle(4, 1.0);
    const auto conn = curve_connectivity(c);
    const auto stiff = assemble(conn, 2, [&](int e, DenseMatrix& out) {
        out = curve_stiffness_kernel(segment_geometry(c, e));
    });
    const auto path = (std::filesystem::temp_directory_path() / "geomflow_matrix.mtx").string();
    stiff.export_matrix_market(path);
    std::ifstream in(path);
    std::string header;
    std::getline(in, header);
    CHECK(header == "%%MatrixMarket matrix coordinate real general");
    int rows, cols;
    long nnz;
    in >> rows >> cols >> nnz;
    CHECK(rows == 8);
    CHECK(cols == 8);
    long count = 0;
    int i, j;
    double v;
    while (in >> i >> j >> v) {
        CHECK(i >= 1);
        CHECK(i <= 8);
        ++count;
    }
    CHECK(count == nnz);
}

TEST_CASE("dense LU rejects singular and oversized problems") {
    DenseMatrix singular(3, 3);
    singular(0, 0) = 1.0;
    singular(1, 1) = 1.0;  // third row zero
    std::vector<double> b{1.0, 1.0, 1.0};
    CHECK_THROWS_AS(dense_lu_solve(singular, b), Error);

    DenseMatrix big(600, 600);
    std::vector<double> bb(600, 0.0);
    CHECK_THROWS_AS(dense_lu_solve(big, bb), Error);
}
