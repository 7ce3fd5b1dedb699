#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "geomflow/experiment.hpp"

using namespace gf;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
    const auto dir = fs::temp_directory_path() / "geomflow_exp_tests" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string write_spec(const fs::path& dir, const std::string& body) {
    const auto path = dir / "spec.gf";
    std::ofstream(path) << body;
    return path.string();
}

std::string read_all(const fs::path& p) {
    std::ifstream in(p);
    return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

}  // namespace

TEST_CASE("flat config parsing") {
    const auto cfg = FlatConfig::parse_string(
        "# comment\n"
        "a.b = 1.5\n"
        "name = \"hello world\"  # trailing comment\n"
        "flag = true\n"
        "list = 1, 2,3\n");
    CHECK(cfg.get_double("a.b") == 1.5);
    CHECK(cfg.get_string("name") == "hello world");
    CHECK(cfg.get_bool("flag", false));
    const auto list = cfg.get_int_list("list");
    REQUIRE(list.size() == 3);
    CHECK(list[2] == 3);
    CHECK(cfg.get_int("missing", 7) == 7);
    CHECK_THROWS_AS(cfg.get_string("missing"), Error);
    CHECK_THROWS_AS(FlatConfig::parse_string("a = 1\na = 2\n"), Error);
    CHECK_THROWS_AS(FlatConfig::parse_string("nonsense line\n"), Error);
    CHECK_THROWS_AS((void)FlatConfig::parse_string("k = x\n").get_double("k"), Error);
}

TEST_CASE("experiment spec validation") {
    const auto dir = fresh_dir("validate");

    SUBCASE("unknown key is rejected") {
        const auto cfg = FlatConfig::parse_string(
            "problem.kind = curve\nproblem.shape = circle\nend.time = 0.1\n"
            "scheme.1.kind = alg1\nscheme.1.tau = 1e-4\nscheme.1.typo = 3\n");
        CHECK_THROWS_AS(ExperimentSpec::parse(cfg), Error);
    }
    SUBCASE("scheme/problem mismatch") {
        auto spec = ExperimentSpec::parse(FlatConfig::parse_string(
            "problem.kind = surface\nproblem.shape = icosphere\nend.time = 0.1\n"
            "scheme.1.kind = alg1\nscheme.1.tau = 1e-4\n"));
        spec.output_dir = (dir / "out").string();
        CHECK_THROWS_AS(spec.validate(), Error);
    }
    SUBCASE("missing end condition") {
        auto spec = ExperimentSpec::parse(FlatConfig::parse_string(
            "problem.kind = curve\nproblem.shape = circle\n"
            "scheme.1.kind = alg1\nscheme.1.tau = 1e-4\n"));
        spec.output_dir = (dir / "out").string();
        CHECK_THROWS_AS(spec.validate(), Error);
    }
    SUBCASE("no schemes") {
        auto spec = ExperimentSpec::parse(
            FlatConfig::parse_string("problem.kind = curve\nproblem.shape = circle\nend.time = 0.1\n"));
        spec.output_dir = (dir / "out").string();
        CHECK_THROWS_AS(spec.validate(), Error);
    }
    SUBCASE("unwritable output directory fails before any compute") {
        auto spec = ExperimentSpec::parse(FlatConfig::parse_string(
            "problem.kind = curve\nproblem.shape = circle\nend.time = 0.1\n"
            "scheme.1.kind = alg1\nscheme.1.tau = 1e-4\n"));
        spec.output_dir = "/proc/geomflow_no_such_dir";
        CHECK_THROWS_AS(spec.validate(), Error);
    }
}

TEST_CASE("a small circle run decreases the length monotonically") {
    const auto dir = fresh_dir("circle");
    const auto spec_path = write_spec(dir,
                                      "problem.kind = curve\n"
                                      "problem.shape = circle\n"
                                      "problem.n = 16\n"
                                      "end.time = 0.01\n"
                                      "output.dir = " + (dir / "out").string() + "\n"
                                      "scheme.1.kind = alg1\n"
                                      "scheme.1.label = alg1\n"
                                      "scheme.1.alpha = 1.0\n"
                                      "scheme.1.tau = 1e-6\n");
    const auto manifest = run_experiment(ExperimentSpec::parse_file(spec_path));
    REQUIRE(manifest.schemes.size() == 1);
    CHECK(manifest.schemes[0].termination == "end-time");
    CHECK(manifest.schemes[0].steps == 10000);

    // length column strictly decreasing
    std::ifstream csv(dir / "out" / "alg1.csv");
    std::string line;
    std::getline(csv, line);  // header
    double prev = 1e300;
    int rows = 0;
    while (std::getline(csv, line)) {
        const auto c1 = line.find(',');
        const auto c2 = line.find(',', c1 + 1);
        const double len = std::stod(line.substr(c1 + 1, c2 - c1 - 1));
        CHECK(len < prev);
        prev = len;
        ++rows;
    }
    CHECK(rows == 10001);
    CHECK(fs::exists(dir / "out" / "manifest.json"));
}

TEST_CASE("example 1 experiment reproduces the final length with both schemes") {
    const auto dir = fresh_dir("example1");
    const auto spec_path = write_spec(dir,
                                      "problem.kind = curve\n"
                                      "problem.shape = example1\n"
                                      "problem.n = 64\n"
                                      "end.time = 0.15\n"
                                      "output.dir = " + (dir / "out").string() + "\n"
                                      "output.snapshot_every = 500\n"
                                      "scheme.1.kind = alg1\n"
                                      "scheme.1.label = alg1_a1e-3\n"
                                      "scheme.1.alpha = 1e-3\n"
                                      "scheme.1.tau = 1e-4\n"
                                      "scheme.2.kind = bgn\n"
                                      "scheme.2.label = bgn\n"
                                      "scheme.2.tau = 1e-4\n");
    const auto manifest = run_experiment(ExperimentSpec::parse_file(spec_path));
    REQUIRE(manifest.schemes.size() == 2);
    CHECK(manifest.schemes[0].termination == "end-time");
    CHECK(manifest.schemes[1].termination == "end-time");
    CHECK(manifest.schemes[0].final_size == doctest::Approx(0.98).epsilon(0.03));
    for (const auto& s : manifest.schemes) {
        CHECK(fs::exists(dir / "out" / s.csv_path));
        for (const auto& snap : s.snapshot_paths) CHECK(fs::exists(dir / "out" / snap));
        CHECK_FALSE(s.snapshot_paths.empty());
    }
}

TEST_CASE("identical specs produce byte-identical csv output") {
    for (int round = 0; round < 2; ++round) {
        const auto dir = fresh_dir("determinism_" + std::to_string(round));
        const auto spec_path = write_spec(dir,
                                          "problem.kind = curve\n"
                                          "problem.shape = example1\n"
                                          "problem.n = 32\n"
                                          "end.time = 0.002\n"
                                          "output.dir = " + (dir / "out").string() + "\n"
                                          "scheme.1.kind = alg1\n"
                                          "scheme.1.label = run\n"
                                          "scheme.1.alpha = 0.1\n"
                                          "scheme.1.tau = 1e-4\n");
        run_experiment(ExperimentSpec::parse_file(spec_path));
    }
    const auto base = fs::temp_directory_path() / "geomflow_exp_tests";
    CHECK(read_all(base / "determinism_0" / "out" / "run.csv") ==
          read_all(base / "determinism_1" / "out" / "run.csv"));
}

TEST_CASE("parallel scheme execution matches the serial run") {
    const std::string body =
        "problem.kind = curve\n"
        "problem.shape = example1\n"
        "problem.n = 32\n"
        "end.time = 0.002\n"
        "scheme.1.kind = alg1\n"
        "scheme.1.label = a\n"
        "scheme.1.alpha = 1.0\n"
        "scheme.1.tau = 1e-4\n"
        "scheme.2.kind = alg1\n"
        "scheme.2.label = b\n"
        "scheme.2.alpha = 0.01\n"
        "scheme.2.tau = 1e-4\n";
    const auto d1 = fresh_dir("serial");
    auto s1 = ExperimentSpec::parse_file(write_spec(d1, body + "output.dir = " + (d1 / "out").string() + "\n"));
    run_experiment(s1, false);
    const auto d2 = fresh_dir("parallel");
    auto s2 = ExperimentSpec::parse_file(write_spec(d2, body + "output.dir = " + (d2 / "out").string() + "\n"));
    run_experiment(s2, true);
    for (const char* f : {"a.csv", "b.csv"})
        CHECK(read_all(d1 / "out" / f) == read_all(d2 / "out" / f));
}

TEST_CASE("surface run with extinction stop") {
    const auto dir = fresh_dir("sphere");
    const auto spec_path = write_spec(dir,
                                      "problem.kind = surface\n"
                                      "problem.shape = icosphere\n"
                                      "problem.subdivisions = 1\n"
                                      "end.time = 1.0\n"
                                      "end.extinction_fraction = 0.5\n"
                                      "output.dir = " + (dir / "out").string() + "\n"
                                      "scheme.1.kind = alg3\n"
                                      "scheme.1.label = alg3\n"
                                      "scheme.1.alpha = 0.01\n"
                                      "scheme.1.tau = 1e-4\n");
    const auto manifest = run_experiment(ExperimentSpec::parse_file(spec_path));
    REQUIRE(manifest.schemes.size() == 1);
    CHECK(manifest.schemes[0].termination == "extinction");
    CHECK(manifest.schemes[0].final_size < 0.5 * 4.0 * 3.2);
}

TEST_CASE("bgn non-convergence is recorded as solver-failure, never a crash") {
    const auto dir = fresh_dir("bgnfail");
    const auto spec_path = write_spec(dir,
                                      "problem.kind = curve\n"
                                      "problem.shape = example3\n"
                                      "problem.n = 64\n"
                                      "end.time = 0.01\n"
                                      "output.dir = " + (dir / "out").string() + "\n"
                                      "scheme.1.kind = bgn\n"
                                      "scheme.1.label = bgn\n"
                                      "scheme.1.tau = 1e-4\n");
    const auto manifest = run_experiment(ExperimentSpec::parse_file(spec_path));
    REQUIRE(manifest.schemes.size() == 1);
    CHECK(manifest.schemes[0].termination == "solver-failure");
    CHECK(manifest.schemes[0].detail.find("non-convergence") != std::string::npos);
    CHECK(fs::exists(dir / "out" / "manifest.json"));
    CHECK(fs::exists(dir / "out" / "bgn.csv"));
}

TEST_CASE("eoc study hits first order in h1 and second order in l2") {
    EocSpec spec;
    spec.resolutions = {16, 32, 64, 128};
    spec.tau_coeff = 0.5;
    spec.alpha = 1.0;
    spec.end_time = 0.1;
    const auto result = run_eoc_study(spec);
    REQUIRE_FALSE(result.aborted);
    REQUIRE(result.h1.order.size() == 3);
    for (double o : result.h1.order) {
        CHECK(o > 0.8);
        CHECK(o < 1.2);
    }
    for (double o : result.l2.order) {
        CHECK(o > 1.6);
        CHECK(o < 2.2);
    }
}

TEST_CASE("eoc spec validation") {
    EocSpec spec;
    spec.resolutions = {16};
    CHECK_THROWS_AS(spec.validate(), Error);
    spec.resolutions = {32, 16};
    CHECK_THROWS_AS(spec.validate(), Error);
    spec.resolutions = {16, 32};
    spec.end_time = 0.9;  // beyond extinction of the unit circle
    CHECK_THROWS_AS(spec.validate(), Error);
}
