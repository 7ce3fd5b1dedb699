// Batch CLI for geomflow. Talks to the library exclusively through the
// public C API.

#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "geomflow.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitSpecError = 2;
constexpr int kExitNumerical = 3;

int fail_with(const char* what, gf_status status) {
    std::fprintf(stderr, "error: %s: %s\n", what, gf_last_error());
    if (status == GF_ERR_DEGENERATION || status == GF_ERR_SOLVER_FAILURE ||
        status == GF_ERR_NON_CONVERGENCE)
        return kExitNumerical;
    return kExitSpecError;
}

int cmd_run(const std::string& spec, const std::string& output_dir, bool parallel) {
    char manifest[4096] = {0};
    const gf_status st = gf_run_experiment(spec.c_str(), output_dir.empty() ? nullptr : output_dir.c_str(),
                                           parallel ? 1 : 0, manifest, sizeof(manifest));
    if (st == GF_OK) {
        std::printf("run complete, manifest: %s\n", manifest);
        return kExitOk;
    }
    if ((st == GF_ERR_DEGENERATION || st == GF_ERR_SOLVER_FAILURE) && manifest[0] != '\0') {
        std::fprintf(stderr, "run terminated numerically: %s\n", gf_last_error());
        std::printf("manifest: %s\n", manifest);
        return kExitNumerical;
    }
    return fail_with("run", st);
}

int cmd_eoc(const std::string& spec) {
    double h[64], e1[64], o1[64], e2[64], o2[64];
    int n = 0;
    const gf_status st = gf_run_eoc(spec.c_str(), h, e1, o1, e2, o2, 64, &n);
    if (st != GF_OK) return fail_with("eoc", st);
    std::printf("%12s %14s %8s %14s %8s\n", "h", "h1_error", "h1_eoc", "l2_error", "l2_eoc");
    for (int i = 0; i < n; ++i) {
        if (i == 0)
            std::printf("%12.6g %14.8g %8s %14.8g %8s\n", h[i], e1[i], "-", e2[i], "-");
        else
            std::printf("%12.6g %14.8g %8.3f %14.8g %8.3f\n", h[i], e1[i], o1[i - 1], e2[i], o2[i - 1]);
    }
    return kExitOk;
}

int cmd_validate(const std::string& spec) {
    const gf_status st = gf_validate_spec(spec.c_str());
    if (st != GF_OK) return fail_with("validate", st);
    std::printf("spec ok: %s\n", spec.c_str());
    return kExitOk;
}

struct MeshGenOptions {
    std::string shape;
    std::string out;
    int n = 64;
    int subdivisions = 3;
    double radius = 1.0;
    double grading_ratio = 0.0;  // 0 selects the default
    double r1 = 1.0;
    double r2 = 0.6;
    int n_theta = 128;
    int n_phi = 64;
};

int cmd_mesh_gen(const MeshGenOptions& opt) {
    const auto is_curve = [&] {
        return opt.shape == "circle" || opt.shape == "example1" || opt.shape == "example2" ||
               opt.shape == "example3";
    };
    gf_status st = GF_OK;
    if (is_curve()) {
        gf_curve* c = nullptr;
        st = (opt.shape == "circle") ? gf_curve_circle(opt.n, opt.radius, &c)
                                     : gf_curve_shape(opt.shape.c_str(), opt.n, opt.grading_ratio, &c);
        if (st != GF_OK) return fail_with("mesh gen", st);
        st = gf_curve_write(c, opt.out.c_str());
        double len = 0.0;
        gf_curve_length(c, &len);
        if (st == GF_OK) std::printf("wrote %s (%d vertices, length %.6g)\n", opt.out.c_str(), gf_curve_size(c), len);
        gf_curve_free(c);
    } else {
        gf_surface* s = nullptr;
        if (opt.shape == "icosphere")
            st = gf_surface_icosphere(opt.subdivisions, opt.radius, &s);
        else if (opt.shape == "dumbbell_07")
            st = gf_surface_dumbbell(0.7, opt.subdivisions, &s);
        else if (opt.shape == "dumbbell_06")
            st = gf_surface_dumbbell(0.6, opt.subdivisions, &s);
        else if (opt.shape == "torus")
            st = gf_surface_torus(opt.r1, opt.r2, opt.n_theta, opt.n_phi, &s);
        else {
            std::fprintf(stderr, "error: unknown shape '%s'\n", opt.shape.c_str());
            return kExitSpecError;
        }
        if (st != GF_OK) return fail_with("mesh gen", st);
        st = gf_surface_write(s, opt.out.c_str());
        double area = 0.0;
        gf_surface_area(s, &area);
        if (st == GF_OK)
            std::printf("wrote %s (%d vertices, %d triangles, area %.6g)\n", opt.out.c_str(),
                        gf_surface_vertex_count(s), gf_surface_triangle_count(s), area);
        gf_surface_free(s);
    }
    if (st != GF_OK) return fail_with("mesh gen", st);
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"geomflow: curve shortening / mean curvature flow experiments"};
    app.require_subcommand(1);

    std::string spec_path, output_dir;
    bool parallel = false;

    auto* run = app.add_subcommand("run", "run all schemes of an experiment spec");
    run->add_option("spec", spec_path, "spec file")->required()->check(CLI::ExistingFile);
    run->add_option("--output-dir", output_dir, "override the spec's output directory");
    run->add_flag("--parallel", parallel, "run schemes as parallel stepper instances");

    auto* eoc = app.add_subcommand("eoc", "shrinking-circle EOC study");
    eoc->add_option("spec", spec_path, "spec file")->required()->check(CLI::ExistingFile);

    auto* validate = app.add_subcommand("validate", "validate a spec file");
    validate->add_option("spec", spec_path, "spec file")->required()->check(CLI::ExistingFile);

    auto* mesh = app.add_subcommand("mesh", "mesh utilities");
    mesh->require_subcommand(1);
    MeshGenOptions opt;
    auto* gen = mesh->add_subcommand("gen", "generate a named shape and write it to a file");
    gen->add_option("shape", opt.shape,
                    "circle | example1 | example2 | example3 | icosphere | dumbbell_07 | dumbbell_06 | torus")
        ->required();
    gen->add_option("out", opt.out, "output path (.csv/.vtk curves, .off/.vtk surfaces)")->required();
    gen->add_option("--n", opt.n, "curve vertex count");
    gen->add_option("--subdivisions", opt.subdivisions, "icosphere/dumbbell subdivisions");
    gen->add_option("--radius", opt.radius, "circle/icosphere radius");
    gen->add_option("--grading-ratio", opt.grading_ratio, "example3 max/min segment ratio");
    gen->add_option("--r1", opt.r1, "torus major radius");
    gen->add_option("--r2", opt.r2, "torus minor radius");
    gen->add_option("--n-theta", opt.n_theta, "torus grid cells around the major circle");
    gen->add_option("--n-phi", opt.n_phi, "torus grid cells around the minor circle");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitSpecError;
    }

    if (run->parsed()) return cmd_run(spec_path, output_dir, parallel);
    if (eoc->parsed()) return cmd_eoc(spec_path);
    if (validate->parsed()) return cmd_validate(spec_path);
    if (mesh->parsed()) return cmd_mesh_gen(opt);
    return kExitSpecError;
}
