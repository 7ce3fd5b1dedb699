#include "geomflow/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "geomflow/mesh_io.hpp"

namespace gf {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

}  // namespace

FlatConfig FlatConfig::parse_string(const std::string& text, const std::string& origin) {
    FlatConfig cfg;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            fail(ErrorCode::spec, origin + ":" + std::to_string(lineno) + ": expected 'key = value'");
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (value.size() >= 2 && value.front() == '"' && value.back() == '"')
            value = value.substr(1, value.size() - 2);
        if (key.empty() || value.empty())
            fail(ErrorCode::spec, origin + ":" + std::to_string(lineno) + ": empty key or value");
        if (cfg.values.count(key))
            fail(ErrorCode::spec, origin + ":" + std::to_string(lineno) + ": duplicate key '" + key + "'");
        cfg.values[key] = value;
    }
    return cfg;
}

FlatConfig FlatConfig::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorCode::io, "cannot open spec file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_string(ss.str(), path);
}

std::string FlatConfig::get_string(const std::string& key) const {
    auto it = values.find(key);
    if (it == values.end()) fail(ErrorCode::spec, "missing required key '" + key + "'");
    touched.push_back(key);
    return it->second;
}

std::string FlatConfig::get_string(const std::string& key, const std::string& fallback) const {
    auto it = values.find(key);
    if (it == values.end()) return fallback;
    touched.push_back(key);
    return it->second;
}

double FlatConfig::get_double(const std::string& key) const {
    const std::string s = get_string(key);
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        fail(ErrorCode::spec, "key '" + key + "': not a number: '" + s + "'");
    }
}

double FlatConfig::get_double(const std::string& key, double fallback) const {
    return has(key) ? get_double(key) : fallback;
}

int FlatConfig::get_int(const std::string& key) const {
    const std::string s = get_string(key);
    try {
        std::size_t pos = 0;
        const int v = std::stoi(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        fail(ErrorCode::spec, "key '" + key + "': not an integer: '" + s + "'");
    }
}

int FlatConfig::get_int(const std::string& key, int fallback) const {
    return has(key) ? get_int(key) : fallback;
}

bool FlatConfig::get_bool(const std::string& key, bool fallback) const {
    if (!has(key)) return fallback;
    const std::string s = get_string(key);
    if (s == "true" || s == "1" || s == "yes") return true;
    if (s == "false" || s == "0" || s == "no") return false;
    fail(ErrorCode::spec, "key '" + key + "': not a boolean: '" + s + "'");
}

std::vector<int> FlatConfig::get_int_list(const std::string& key) const {
    std::string s = get_string(key);
    for (auto& ch : s)
        if (ch == ',') ch = ' ';
    std::istringstream iss(s);
    std::vector<int> out;
    int v;
    while (iss >> v) out.push_back(v);
    if (out.empty()) fail(ErrorCode::spec, "key '" + key + "': expected a list of integers");
    return out;
}

const char* scheme_kind_name(SchemeKind k) {
    switch (k) {
        case SchemeKind::csf_alpha: return "csf_alpha";
        case SchemeKind::csf_bgn: return "csf_bgn";
        case SchemeKind::mcf_alg2: return "mcf_alg2";
        case SchemeKind::mcf_alg3: return "mcf_alg3";
        case SchemeKind::mcf_bgn: return "mcf_bgn";
    }
    return "unknown";
}

namespace {

SchemeKind parse_scheme_kind(const std::string& name, ProblemKind problem) {
    if (name == "csf_alpha" || name == "alg1" || (name == "alpha" && problem == ProblemKind::curve))
        return SchemeKind::csf_alpha;
    if (name == "csf_bgn" || (name == "bgn" && problem == ProblemKind::curve)) return SchemeKind::csf_bgn;
    if (name == "mcf_alg2" || name == "alg2") return SchemeKind::mcf_alg2;
    if (name == "mcf_alg3" || name == "alg3" || (name == "alpha" && problem == ProblemKind::surface))
        return SchemeKind::mcf_alg3;
    if (name == "mcf_bgn" || (name == "bgn" && problem == ProblemKind::surface)) return SchemeKind::mcf_bgn;
    fail(ErrorCode::spec, "unknown scheme kind '" + name + "'");
}

bool is_curve_scheme(SchemeKind k) { return k == SchemeKind::csf_alpha || k == SchemeKind::csf_bgn; }

}  // namespace

ExperimentSpec ExperimentSpec::parse(const FlatConfig& cfg) {
    ExperimentSpec spec;
    spec.raw = cfg;

    const std::string kind = cfg.get_string("problem.kind");
    if (kind == "curve")
        spec.problem.kind = ProblemKind::curve;
    else if (kind == "surface")
        spec.problem.kind = ProblemKind::surface;
    else
        fail(ErrorCode::spec, "problem.kind must be 'curve' or 'surface'");

    spec.problem.shape = cfg.get_string("problem.shape");
    spec.problem.n = cfg.get_int("problem.n", 64);
    spec.problem.radius = cfg.get_double("problem.radius", 1.0);
    spec.problem.grading_ratio = cfg.get_double("problem.grading_ratio", 1.35);
    spec.problem.subdivisions = cfg.get_int("problem.subdivisions", 3);
    spec.problem.torus.r1 = cfg.get_double("problem.torus_r1", 1.0);
    spec.problem.torus.r2 = cfg.get_double("problem.torus_r2", 0.6);
    spec.problem.torus.n_theta = cfg.get_int("problem.torus_n_theta", 128);
    spec.problem.torus.n_phi = cfg.get_int("problem.torus_n_phi", 64);

    if (cfg.has("end.time")) spec.end_time = cfg.get_double("end.time");
    if (cfg.has("end.extinction_fraction"))
        spec.extinction_fraction = cfg.get_double("end.extinction_fraction");
    spec.max_steps = cfg.get_int("end.max_steps", 10'000'000);

    spec.output_dir = cfg.get_string("output.dir", "out");
    spec.snapshot_every = cfg.get_int("output.snapshot_every", 0);
    spec.seed = static_cast<unsigned>(cfg.get_int("seed", 0));

    // collect scheme indices
    std::set<int> indices;
    for (const auto& [key, value] : cfg.values) {
        (void)value;
        if (key.rfind("scheme.", 0) != 0) continue;
        const auto rest = key.substr(7);
        const auto dot = rest.find('.');
        if (dot == std::string::npos) fail(ErrorCode::spec, "malformed scheme key '" + key + "'");
        try {
            indices.insert(std::stoi(rest.substr(0, dot)));
        } catch (const std::exception&) {
            fail(ErrorCode::spec, "malformed scheme index in '" + key + "'");
        }
    }
    for (int idx : indices) {
        const std::string p = "scheme." + std::to_string(idx) + ".";
        SchemeSpec s;
        s.kind = parse_scheme_kind(cfg.get_string(p + "kind"), spec.problem.kind);
        s.label = cfg.get_string(p + "label", std::string(scheme_kind_name(s.kind)) + "_" + std::to_string(idx));
        s.alpha = cfg.get_double(p + "alpha", 1.0);
        s.alpha_equals_tau = cfg.get_bool(p + "alpha_equals_tau", false);
        if (cfg.has(p + "tau_rule")) {
            const std::string rule = cfg.get_string(p + "tau_rule");
            if (rule == "h")
                s.tau.kind = TauRule::Kind::prop_h;
            else if (rule == "h2")
                s.tau.kind = TauRule::Kind::prop_h2;
            else
                fail(ErrorCode::spec, "scheme tau_rule must be 'h' or 'h2'");
            s.tau.value = cfg.get_double(p + "tau_coeff");
        } else {
            s.tau.kind = TauRule::Kind::fixed;
            s.tau.value = cfg.get_double(p + "tau");
        }
        s.damping = cfg.get_double(p + "damping", 1.0);
        s.fp_threshold = cfg.get_double(p + "fp_threshold", 1e-8);
        s.fp_max_iterations = cfg.get_int(p + "fp_max_iterations", 1000);
        s.solver_tol = cfg.get_double(p + "solver_tol", 1e-10);
        s.solver_max_iterations = cfg.get_int(p + "solver_max_iterations", 0);
        spec.schemes.push_back(std::move(s));
    }

    // reject unknown keys
    std::set<std::string> seen(cfg.touched.begin(), cfg.touched.end());
    for (const auto& [key, value] : cfg.values) {
        (void)value;
        if (!seen.count(key)) fail(ErrorCode::spec, "unknown key '" + key + "'");
    }
    return spec;
}

ExperimentSpec ExperimentSpec::parse_file(const std::string& path) {
    return parse(FlatConfig::parse_file(path));
}

void ExperimentSpec::validate() const {
    if (schemes.empty()) fail(ErrorCode::spec, "at least one scheme is required");
    if (!end_time && !extinction_fraction)
        fail(ErrorCode::spec, "an end condition (end.time or end.extinction_fraction) is required");
    if (end_time && !(*end_time > 0.0)) fail(ErrorCode::spec, "end.time must be positive");
    if (extinction_fraction && !(*extinction_fraction > 0.0 && *extinction_fraction < 1.0))
        fail(ErrorCode::spec, "end.extinction_fraction must be in (0,1)");
    for (const auto& s : schemes) {
        const bool curve_scheme = is_curve_scheme(s.kind);
        if (curve_scheme != (problem.kind == ProblemKind::curve))
            fail(ErrorCode::spec, "scheme '" + s.label + "' does not match the problem kind");
        if (!(s.tau.value > 0.0)) fail(ErrorCode::spec, "scheme '" + s.label + "': tau must be positive");
        if (!(s.alpha >= 0.0)) fail(ErrorCode::spec, "scheme '" + s.label + "': alpha must be >= 0");
        if (!(s.damping > 0.0 && s.damping <= 1.0))
            fail(ErrorCode::spec, "scheme '" + s.label + "': damping must be in (0,1]");
        if (curve_scheme && s.tau.kind != TauRule::Kind::fixed)
            fail(ErrorCode::spec, "scheme '" + s.label + "': adaptive tau is only supported for surfaces");
    }
    if (snapshot_every < 0) fail(ErrorCode::spec, "output.snapshot_every must be >= 0");

    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(output_dir, ec);
    const fs::path probe = fs::path(output_dir) / ".geomflow_probe";
    std::ofstream out(probe);
    if (!out) fail(ErrorCode::spec, "output directory '" + output_dir + "' is not writable");
    out.close();
    fs::remove(probe, ec);
}

namespace {

PolygonalCurve build_curve(const ProblemSpec& p) {
    if (p.shape == "circle") return generate_circle(p.n, p.radius);
    return generate_parametrized_curve(curve_shape_from_string(p.shape), p.n, p.grading_ratio);
}

TriSurface build_surface(const ProblemSpec& p) {
    if (p.shape == "icosphere") return generate_icosphere(p.subdivisions, p.radius);
    const SurfaceShape shape = surface_shape_from_string(p.shape);
    switch (shape) {
        case SurfaceShape::dumbbell_07: return generate_dumbbell(0.7, p.subdivisions);
        case SurfaceShape::dumbbell_06: return generate_dumbbell(0.6, p.subdivisions);
        case SurfaceShape::undulating_torus: return generate_undulating_torus(p.torus);
    }
    fail(ErrorCode::spec, "unhandled surface shape");
}

std::string snapshot_name(const std::string& label, long step, const char* ext) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "_%06ld", step);
    return label + buf + ext;
}

SchemeRunResult run_curve_scheme(const ExperimentSpec& spec, const SchemeSpec& scheme) {
    SchemeRunResult result;
    result.label = scheme.label;
    result.kind = scheme_kind_name(scheme.kind);
    const auto t_start = std::chrono::steady_clock::now();

    CsfState state;
    state.curve = build_curve(spec.problem);

    const double initial_length = curve_length(state.curve);
    const double extinct_frac = spec.extinction_fraction.value_or(1e-3);

    std::vector<DiagnosticsRecord> records;
    DiagnosticsRecord rec;
    rec.time = 0.0;
    rec.size = initial_length;
    rec.sigma_max_or_ratio = segment_ratio(state.curve);
    records.push_back(rec);

    namespace fs = std::filesystem;
    const auto snapshot = [&](long step) {
        if (spec.snapshot_every <= 0) return;
        if (step % spec.snapshot_every != 0) return;
        const std::string name = snapshot_name(scheme.label, step, ".csv");
        write_curve_csv((fs::path(spec.output_dir) / name).string(), state.curve);
        result.snapshot_paths.push_back(name);
    };
    snapshot(0);

    CsfConfig alpha_cfg;
    alpha_cfg.alpha = scheme.alpha;
    alpha_cfg.tau = scheme.tau.value;
    alpha_cfg.solver.rel_tol = scheme.solver_tol;
    alpha_cfg.solver.max_iterations = scheme.solver_max_iterations;
    BgnCurveConfig bgn_cfg;
    bgn_cfg.tau = scheme.tau.value;
    bgn_cfg.damping = scheme.damping;
    bgn_cfg.fp_threshold = scheme.fp_threshold;
    bgn_cfg.max_fp_iterations = scheme.fp_max_iterations;
    bgn_cfg.solver.rel_tol = scheme.solver_tol;
    bgn_cfg.solver.max_iterations = scheme.solver_max_iterations;

    result.termination = "end-time";
    const double tau = scheme.tau.value;
    while (true) {
        if (spec.end_time && state.time + 0.5 * tau >= *spec.end_time) {
            result.termination = "end-time";
            break;
        }
        if (state.step_index >= spec.max_steps) {
            result.termination = "end-time";
            result.detail = "max step count reached";
            break;
        }

        CsfStepInfo info = (scheme.kind == SchemeKind::csf_alpha) ? step_csf(state, alpha_cfg)
                                                                  : step_bgn_curve(state, bgn_cfg);
        if (info.status != StepStatus::ok) {
            result.termination = (info.status == StepStatus::degeneration) ? "degeneration" : "solver-failure";
            result.detail = step_status_name(info.status);
            if (info.status == StepStatus::non_convergence)
                result.detail += " after " + std::to_string(info.fixed_point_iterations) +
                                 " fixed-point iterations";
            break;
        }

        rec = DiagnosticsRecord{};
        rec.time = state.time;
        rec.size = curve_length(state.curve);
        rec.sigma_max_or_ratio = segment_ratio(state.curve);
        rec.max_speed = info.max_vertex_speed;
        rec.energy_lhs = info.stability_lhs;
        rec.energy_rhs = info.stability_rhs;
        rec.iterations = (scheme.kind == SchemeKind::csf_bgn) ? info.fixed_point_iterations
                                                              : info.solver_iterations;
        if (info.stability_violation) rec.flags |= diag_flag_stability_violation;
        records.push_back(rec);
        snapshot(state.step_index);

        bool extinct = rec.size < extinct_frac * initial_length;
        for (int j = 0; j < state.curve.size() && !extinct; ++j)
            if (state.curve.segment_length(j) < 1e-12) extinct = true;
        if (extinct) {
            result.termination = "extinction";
            break;
        }
    }

    const std::string csv_name = scheme.label + ".csv";
    write_diagnostics_csv((fs::path(spec.output_dir) / csv_name).string(), records);
    result.csv_path = csv_name;
    result.steps = state.step_index;
    result.final_time = state.time;
    result.final_size = records.back().size;
    result.wall_clock_sec =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    return result;
}

SchemeRunResult run_surface_scheme(const ExperimentSpec& spec, const SchemeSpec& scheme) {
    SchemeRunResult result;
    result.label = scheme.label;
    result.kind = scheme_kind_name(scheme.kind);
    const auto t_start = std::chrono::steady_clock::now();

    McfState state;
    state.surface = build_surface(spec.problem);
    McfWorkspace workspace(state.surface);

    const double initial_area = surface_area(state.surface);

    std::vector<DiagnosticsRecord> records;
    DiagnosticsRecord rec;
    rec.time = 0.0;
    rec.size = initial_area;
    rec.sigma_max_or_ratio = sigma_max(state.surface);
    records.push_back(rec);

    namespace fs = std::filesystem;
    const auto snapshot = [&](long step) {
        if (spec.snapshot_every <= 0) return;
        if (step % spec.snapshot_every != 0) return;
        const std::string name = snapshot_name(scheme.label, step, ".vtk");
        write_surface((fs::path(spec.output_dir) / name).string(), state.surface, MeshFormat::vtk);
        result.snapshot_paths.push_back(name);
    };
    snapshot(0);

    McfConfig cfg;
    cfg.scheme = (scheme.kind == SchemeKind::mcf_alg2)   ? McfScheme::alg2
                 : (scheme.kind == SchemeKind::mcf_alg3) ? McfScheme::alg3
                                                         : McfScheme::bgn;
    cfg.alpha = scheme.alpha;
    cfg.alpha_equals_tau = scheme.alpha_equals_tau;
    cfg.tau = scheme.tau;
    cfg.solver.rel_tol = scheme.solver_tol;
    cfg.solver.max_iterations = scheme.solver_max_iterations;

    result.termination = "end-time";
    while (true) {
        const double tau_next = cfg.tau.tau_for(max_triangle_diameter(state.surface));
        if (spec.end_time && state.time + 0.5 * tau_next >= *spec.end_time) {
            result.termination = "end-time";
            break;
        }
        if (state.step_index >= spec.max_steps) {
            result.termination = "end-time";
            result.detail = "max step count reached";
            break;
        }

        const McfStepInfo info = step_mcf(state, cfg, &workspace);
        if (info.status != StepStatus::ok) {
            result.termination = (info.status == StepStatus::degeneration) ? "degeneration" : "solver-failure";
            result.detail = step_status_name(info.status);
            break;
        }

        rec = DiagnosticsRecord{};
        rec.time = state.time;
        rec.size = surface_area(state.surface);
        const auto sm = sigma_max_checked(state.surface);
        rec.sigma_max_or_ratio = sm.value;
        if (sm.degenerate || sm.value > 0.5 * 1e6) rec.flags |= diag_flag_near_degeneration;
        rec.max_speed = info.max_vertex_speed;
        rec.iterations = info.solver_iterations;
        records.push_back(rec);
        snapshot(state.step_index);

        if (spec.extinction_fraction && rec.size < *spec.extinction_fraction * initial_area) {
            result.termination = "extinction";
            break;
        }
    }

    const std::string csv_name = scheme.label + ".csv";
    write_diagnostics_csv((fs::path(spec.output_dir) / csv_name).string(), records);
    result.csv_path = csv_name;
    result.steps = state.step_index;
    result.final_time = state.time;
    result.final_size = records.back().size;
    result.wall_clock_sec =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    return result;
}

}  // namespace

void RunManifest::write_json(const std::string& path) const {
    nlohmann::json j;
    j["spec_path"] = spec_path;
    j["output_dir"] = output_dir;
    j["schemes"] = nlohmann::json::array();
    for (const auto& s : schemes) {
        nlohmann::json js;
        js["label"] = s.label;
        js["kind"] = s.kind;
        js["csv"] = s.csv_path;
        js["snapshots"] = s.snapshot_paths;
        js["termination"] = s.termination;
        js["detail"] = s.detail;
        js["steps"] = s.steps;
        js["final_time"] = s.final_time;
        js["final_size"] = s.final_size;
        js["wall_clock_sec"] = s.wall_clock_sec;
        j["schemes"].push_back(js);
    }
    std::ofstream out(path);
    if (!out) fail(ErrorCode::io, "cannot open '" + path + "' for writing");
    out << j.dump(2) << "\n";
}

RunManifest run_experiment(const ExperimentSpec& spec, bool parallel) {
    spec.validate();
    RunManifest manifest;
    manifest.output_dir = spec.output_dir;
    manifest.schemes.resize(spec.schemes.size());

    const auto run_one = [&](std::size_t i) {
        const auto& scheme = spec.schemes[i];
        manifest.schemes[i] = (spec.problem.kind == ProblemKind::curve)
                                  ? run_curve_scheme(spec, scheme)
                                  : run_surface_scheme(spec, scheme);
    };

    if (parallel && spec.schemes.size() > 1) {
        std::vector<std::thread> threads;
        threads.reserve(spec.schemes.size());
        for (std::size_t i = 0; i < spec.schemes.size(); ++i) threads.emplace_back(run_one, i);
        for (auto& t : threads) t.join();
    } else {
        for (std::size_t i = 0; i < spec.schemes.size(); ++i) run_one(i);
    }

    namespace fs = std::filesystem;
    manifest.write_json((fs::path(spec.output_dir) / "manifest.json").string());
    return manifest;
}

EocSpec EocSpec::parse(const FlatConfig& cfg) {
    EocSpec spec;
    spec.resolutions = cfg.get_int_list("eoc.resolutions");
    spec.tau_coeff = cfg.get_double("eoc.tau_coeff", 0.5);
    spec.alpha = cfg.get_double("eoc.alpha", 1.0);
    spec.end_time = cfg.get_double("eoc.end_time", 0.1);
    spec.radius = cfg.get_double("eoc.radius", 1.0);
    return spec;
}

EocSpec EocSpec::parse_file(const std::string& path) {
    return parse(FlatConfig::parse_file(path));
}

void EocSpec::validate() const {
    if (resolutions.size() < 2) fail(ErrorCode::spec, "eoc needs at least 2 resolutions");
    for (std::size_t i = 0; i + 1 < resolutions.size(); ++i)
        if (resolutions[i] >= resolutions[i + 1])
            fail(ErrorCode::spec, "eoc resolutions must be strictly increasing");
    if (resolutions.front() < 3) fail(ErrorCode::spec, "eoc resolutions must be >= 3");
    if (!(tau_coeff > 0.0)) fail(ErrorCode::spec, "eoc.tau_coeff must be positive");
    if (!(end_time > 0.0)) fail(ErrorCode::spec, "eoc.end_time must be positive");
    if (!(end_time < 0.5 * radius * radius))
        fail(ErrorCode::spec, "eoc.end_time must stay below circle extinction");
}

EocStudyResult run_eoc_study(const EocSpec& spec) {
    spec.validate();
    EocStudyResult result;
    std::vector<std::pair<double, double>> h1_rows, l2_rows;

    for (int n : spec.resolutions) {
        const double h = 2.0 * PolygonalCurve::pi / n;
        CsfConfig cfg;
        cfg.alpha = spec.alpha;
        cfg.tau = spec.tau_coeff * h * h;

        CsfState state;
        state.curve = generate_circle(n, spec.radius);

        auto norms = h1_error_vs_circle(state.curve, 0.0, spec.radius);
        double max_l2 = norms.l2, max_h1 = norms.h1_semi;

        bool failed = false;
        while (state.time + 0.5 * cfg.tau < spec.end_time) {
            const CsfStepInfo info = step_csf(state, cfg);
            if (info.status != StepStatus::ok) {
                result.aborted = true;
                result.detail = "run at n=" + std::to_string(n) + " ended with " +
                                step_status_name(info.status);
                failed = true;
                break;
            }
            norms = h1_error_vs_circle(state.curve, state.time, spec.radius);
            max_l2 = std::max(max_l2, norms.l2);
            max_h1 = std::max(max_h1, norms.h1_semi);
        }
        if (failed) break;
        h1_rows.emplace_back(h, max_h1);
        l2_rows.emplace_back(h, max_l2);
    }

    if (h1_rows.size() >= 2) {
        result.h1 = eoc(h1_rows);
        result.l2 = eoc(l2_rows);
    } else {
        result.aborted = true;
        if (result.detail.empty()) result.detail = "fewer than 2 completed resolutions";
        for (const auto& [h, e] : h1_rows) {
            result.h1.h.push_back(h);
            result.h1.error.push_back(e);
        }
        for (const auto& [h, e] : l2_rows) {
            result.l2.h.push_back(h);
            result.l2.error.push_back(e);
        }
    }
    return result;
}

}  // namespace gf
