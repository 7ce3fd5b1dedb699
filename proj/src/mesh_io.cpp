#include "geomflow/mesh_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace gf {

namespace {

std::string fmt_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

[[noreturn]] void parse_fail(const std::string& path, int line, const std::string& what) {
    fail(ErrorCode::parse, path + ":" + std::to_string(line) + ": " + what);
}

// Line-oriented reader that keeps track of the current line number and skips
// blanks and '#' comments.
class LineReader {
  public:
    LineReader(const std::string& path, std::istream& in) : path_(path), in_(in) {}

    bool next(std::string& out) {
        while (std::getline(in_, out)) {
            ++line_;
            const auto pos = out.find_first_not_of(" \t\r");
            if (pos == std::string::npos) continue;
            if (out[pos] == '#') continue;
            return true;
        }
        return false;
    }
    std::string require(const std::string& what) {
        std::string s;
        if (!next(s)) parse_fail(path_, line_ + 1, "unexpected end of file, expected " + what);
        return s;
    }
    int line() const { return line_; }
    const std::string& path() const { return path_; }

  private:
    std::string path_;
    std::istream& in_;
    int line_ = 0;
};

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) fail(ErrorCode::io, "cannot open '" + path + "' for writing");
    return out;
}

std::ifstream open_in(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorCode::io, "cannot open '" + path + "' for reading");
    return in;
}

void write_off(const std::string& path, const TriSurface& s) {
    auto out = open_out(path);
    out << "OFF\n" << s.vertex_count() << " " << s.triangle_count() << " 0\n";
    for (const auto& p : s.vertices)
        out << fmt_double(p.x) << " " << fmt_double(p.y) << " " << fmt_double(p.z) << "\n";
    for (const auto& t : s.triangles) out << "3 " << t[0] << " " << t[1] << " " << t[2] << "\n";

    auto ref = open_out(path + ".ref");
    ref << s.vertex_count() << "\n";
    for (const auto& p : s.reference_positions)
        ref << fmt_double(p.x) << " " << fmt_double(p.y) << " " << fmt_double(p.z) << "\n";
}

TriSurface read_off(const std::string& path) {
    auto in = open_in(path);
    LineReader r(path, in);
    std::string s = r.require("OFF header");
    if (s.find("OFF") == std::string::npos) parse_fail(path, r.line(), "missing OFF header");

    int nv = 0, nt = 0, ne = 0;
    {
        std::istringstream iss(r.require("vertex/face counts"));
        if (!(iss >> nv >> nt >> ne)) parse_fail(path, r.line(), "malformed count line");
        if (nv <= 0 || nt <= 0) parse_fail(path, r.line(), "non-positive mesh counts");
    }

    TriSurface surf;
    surf.vertices.resize(nv);
    for (int i = 0; i < nv; ++i) {
        std::istringstream iss(r.require("vertex coordinates"));
        if (!(iss >> surf.vertices[i].x >> surf.vertices[i].y >> surf.vertices[i].z))
            parse_fail(path, r.line(), "malformed vertex line");
    }
    surf.triangles.resize(nt);
    for (int i = 0; i < nt; ++i) {
        std::istringstream iss(r.require("face"));
        int k = 0;
        if (!(iss >> k)) parse_fail(path, r.line(), "malformed face line");
        if (k != 3) parse_fail(path, r.line(), "only triangle faces are supported");
        if (!(iss >> surf.triangles[i][0] >> surf.triangles[i][1] >> surf.triangles[i][2]))
            parse_fail(path, r.line(), "malformed face line");
    }

    std::ifstream refin(path + ".ref");
    if (refin) {
        LineReader rr(path + ".ref", refin);
        std::istringstream iss(rr.require("reference count"));
        int n = 0;
        if (!(iss >> n) || n != nv) parse_fail(path + ".ref", rr.line(), "reference count mismatch");
        surf.reference_positions.resize(nv);
        for (int i = 0; i < nv; ++i) {
            std::istringstream ls(rr.require("reference position"));
            auto& p = surf.reference_positions[i];
            if (!(ls >> p.x >> p.y >> p.z)) parse_fail(path + ".ref", rr.line(), "malformed line");
        }
    } else {
        surf.reference_positions = surf.vertices;
    }
    surf.validate();
    return surf;
}

void write_vtk_surface(const std::string& path, const TriSurface& s) {
    auto out = open_out(path);
    out << "# vtk DataFile Version 3.0\ngeomflow surface\nASCII\nDATASET POLYDATA\n";
    out << "POINTS " << s.vertex_count() << " double\n";
    for (const auto& p : s.vertices)
        out << fmt_double(p.x) << " " << fmt_double(p.y) << " " << fmt_double(p.z) << "\n";
    out << "POLYGONS " << s.triangle_count() << " " << 4 * s.triangle_count() << "\n";
    for (const auto& t : s.triangles) out << "3 " << t[0] << " " << t[1] << " " << t[2] << "\n";
    out << "POINT_DATA " << s.vertex_count() << "\n";
    out << "VECTORS reference_position double\n";
    for (const auto& p : s.reference_positions)
        out << fmt_double(p.x) << " " << fmt_double(p.y) << " " << fmt_double(p.z) << "\n";
}

TriSurface read_vtk_surface(const std::string& path) {
    auto in = open_in(path);
    LineReader r(path, in);

    std::string line = r.require("vtk header");
    if (line.find("vtk DataFile") == std::string::npos)
        parse_fail(path, r.line(), "not a legacy VTK file");
    r.require("title");
    line = r.require("format");
    if (line.find("ASCII") == std::string::npos) parse_fail(path, r.line(), "only ASCII VTK supported");
    line = r.require("dataset");
    if (line.find("POLYDATA") == std::string::npos)
        parse_fail(path, r.line(), "only DATASET POLYDATA supported");

    TriSurface surf;
    int nv = 0;
    {
        std::istringstream iss(r.require("POINTS"));
        std::string kw, type;
        if (!(iss >> kw >> nv >> type) || kw != "POINTS")
            parse_fail(path, r.line(), "expected POINTS section");
    }
    surf.vertices.resize(nv);
    {
        // coordinates may be wrapped arbitrarily; pull 3*nv numbers
        int got = 0;
        while (got < 3 * nv) {
            std::istringstream iss(r.require("point coordinates"));
            double v;
            while (got < 3 * nv && (iss >> v)) {
                surf.vertices[got / 3][got % 3] = v;
                ++got;
            }
        }
    }
    int nt = 0, list_len = 0;
    {
        std::istringstream iss(r.require("POLYGONS"));
        std::string kw;
        if (!(iss >> kw >> nt >> list_len) || kw != "POLYGONS")
            parse_fail(path, r.line(), "expected POLYGONS section");
    }
    surf.triangles.resize(nt);
    for (int i = 0; i < nt; ++i) {
        std::istringstream iss(r.require("polygon"));
        int k;
        if (!(iss >> k) || k != 3) parse_fail(path, r.line(), "only triangles supported");
        if (!(iss >> surf.triangles[i][0] >> surf.triangles[i][1] >> surf.triangles[i][2]))
            parse_fail(path, r.line(), "malformed polygon line");
    }

    surf.reference_positions = surf.vertices;
    // optional POINT_DATA block with the reference positions
    std::string s;
    while (r.next(s)) {
        if (s.find("VECTORS reference_position") != std::string::npos) {
            int got = 0;
            while (got < 3 * nv) {
                std::istringstream iss(r.require("reference positions"));
                double v;
                while (got < 3 * nv && (iss >> v)) {
                    surf.reference_positions[got / 3][got % 3] = v;
                    ++got;
                }
            }
        }
    }
    surf.validate();
    return surf;
}

}  // namespace

MeshFormat mesh_format_from_path(const std::string& path) {
    const auto dot = path.rfind('.');
    const std::string ext = (dot == std::string::npos) ? "" : path.substr(dot + 1);
    if (ext == "off") return MeshFormat::off;
    if (ext == "vtk") return MeshFormat::vtk;
    fail(ErrorCode::invalid_argument, "cannot infer mesh format from '" + path + "'");
}

void write_surface(const std::string& path, const TriSurface& s, MeshFormat format) {
    format == MeshFormat::off ? write_off(path, s) : write_vtk_surface(path, s);
}

TriSurface read_surface(const std::string& path, MeshFormat format) {
    return format == MeshFormat::off ? read_off(path) : read_vtk_surface(path);
}

void write_curve_csv(const std::string& path, const PolygonalCurve& c) {
    auto out = open_out(path);
    out << "index,x,y\n";
    for (int j = 0; j < c.size(); ++j)
        out << j << "," << fmt_double(c.vertices[j].x) << "," << fmt_double(c.vertices[j].y) << "\n";
}

PolygonalCurve read_curve_csv(const std::string& path) {
    auto in = open_in(path);
    LineReader r(path, in);
    std::string line = r.require("csv header");
    if (line.rfind("index,", 0) != 0) parse_fail(path, r.line(), "expected 'index,x,y' header");
    std::vector<Vec2> pts;
    while (r.next(line)) {
        for (auto& ch : line)
            if (ch == ',') ch = ' ';
        std::istringstream iss(line);
        int idx;
        Vec2 p;
        if (!(iss >> idx >> p.x >> p.y)) parse_fail(path, r.line(), "malformed csv row");
        pts.push_back(p);
    }
    auto c = make_curve(std::move(pts));
    c.validate();
    return c;
}

void write_curve_vtk(const std::string& path, const PolygonalCurve& c) {
    auto out = open_out(path);
    const int n = c.size();
    out << "# vtk DataFile Version 3.0\ngeomflow curve\nASCII\nDATASET POLYDATA\n";
    out << "POINTS " << n << " double\n";
    for (const auto& p : c.vertices) out << fmt_double(p.x) << " " << fmt_double(p.y) << " 0\n";
    out << "LINES 1 " << n + 2 << "\n" << n + 1;
    for (int j = 0; j < n; ++j) out << " " << j;
    out << " 0\n";
}

}  // namespace gf
