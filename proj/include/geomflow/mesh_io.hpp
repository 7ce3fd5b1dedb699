#pragma once

// OFF and legacy-VTK readers/writers for surfaces, CSV and VTK polyline
// writers for curves. Reference positions travel as a POINT_DATA VECTORS
// field named "reference_position" in VTK and as a ".ref" sidecar next to
// OFF files.

#include <string>

#include "geomflow/mesh.hpp"

namespace gf {

enum class MeshFormat { off, vtk };

MeshFormat mesh_format_from_path(const std::string& path);  // by extension

void write_surface(const std::string& path, const TriSurface& s, MeshFormat format);
TriSurface read_surface(const std::string& path, MeshFormat format);

inline void write_surface(const std::string& path, const TriSurface& s) {
    write_surface(path, s, mesh_format_from_path(path));
}
inline TriSurface read_surface(const std::string& path) {
    return read_surface(path, mesh_format_from_path(path));
}

void write_curve_csv(const std::string& path, const PolygonalCurve& c);
PolygonalCurve read_curve_csv(const std::string& path);
void write_curve_vtk(const std::string& path, const PolygonalCurve& c);

}  // namespace gf
