#pragma once

// Configuration-driven experiment orchestration: parses flat key=value spec
// files, runs one or more schemes on a shared initial mesh, writes per-scheme
// diagnostics CSVs, mesh snapshots and a JSON run manifest.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "geomflow/csf.hpp"
#include "geomflow/diagnostics.hpp"
#include "geomflow/mcf.hpp"

namespace gf {

// Flat "key = value" tree with '#' comments; keys are dotted paths.
struct FlatConfig {
    std::map<std::string, std::string> values;

    static FlatConfig parse_file(const std::string& path);
    static FlatConfig parse_string(const std::string& text, const std::string& origin = "<string>");

    bool has(const std::string& key) const { return values.count(key) != 0; }
    std::string get_string(const std::string& key) const;
    std::string get_string(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key) const;
    double get_double(const std::string& key, double fallback) const;
    int get_int(const std::string& key) const;
    int get_int(const std::string& key, int fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;
    std::vector<int> get_int_list(const std::string& key) const;

    mutable std::vector<std::string> touched;  // keys read so far, for unknown-key checks
};

enum class ProblemKind { curve, surface };

struct ProblemSpec {
    ProblemKind kind = ProblemKind::curve;
    std::string shape = "circle";
    // curve parameters
    int n = 64;
    double radius = 1.0;
    double grading_ratio = 1.35;
    // surface parameters
    int subdivisions = 3;
    TorusGrid torus;
};

enum class SchemeKind { csf_alpha, csf_bgn, mcf_alg2, mcf_alg3, mcf_bgn };

const char* scheme_kind_name(SchemeKind k);

struct SchemeSpec {
    SchemeKind kind = SchemeKind::csf_alpha;
    std::string label;
    double alpha = 1.0;
    bool alpha_equals_tau = false;
    TauRule tau;
    double damping = 1.0;
    double fp_threshold = 1e-8;
    int fp_max_iterations = 1000;
    double solver_tol = 1e-10;
    int solver_max_iterations = 0;
};

struct ExperimentSpec {
    ProblemSpec problem;
    std::vector<SchemeSpec> schemes;
    std::optional<double> end_time;
    std::optional<double> extinction_fraction;
    long max_steps = 10'000'000;
    std::string output_dir = "out";
    int snapshot_every = 0;  // steps; 0 disables snapshots
    unsigned seed = 0;       // for randomized property tests only
    FlatConfig raw;

    static ExperimentSpec parse_file(const std::string& path);
    static ExperimentSpec parse(const FlatConfig& cfg);
    // Throws Error(spec); probes that the output directory is writable.
    void validate() const;
};

struct SchemeRunResult {
    std::string label;
    std::string kind;
    std::string csv_path;
    std::vector<std::string> snapshot_paths;
    std::string termination;  // end-time | extinction | degeneration | solver-failure
    std::string detail;
    long steps = 0;
    double final_time = 0.0;
    double final_size = 0.0;
    double wall_clock_sec = 0.0;
};

struct RunManifest {
    std::string spec_path;
    std::string output_dir;
    std::vector<SchemeRunResult> schemes;

    void write_json(const std::string& path) const;
};

RunManifest run_experiment(const ExperimentSpec& spec, bool parallel = false);

// ---- EOC study ----

struct EocSpec {
    std::vector<int> resolutions;  // strictly increasing vertex counts
    double tau_coeff = 0.5;        // tau = c * h^2, h = 2*pi/N
    double alpha = 1.0;
    double end_time = 0.1;
    double radius = 1.0;

    static EocSpec parse_file(const std::string& path);
    static EocSpec parse(const FlatConfig& cfg);
    void validate() const;
};

struct EocStudyResult {
    EocTable h1;
    EocTable l2;
    bool aborted = false;
    std::string detail;
};

EocStudyResult run_eoc_study(const EocSpec& spec);

}  // namespace gf
