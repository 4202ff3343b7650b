#pragma once

#include <fstream>
#include <string>

#include "rgbdmeas/core/error.hpp"
#include "rgbdmeas/io/ply_io.hpp"
#include "rgbdmeas/meshing/mesh.hpp"

namespace rgbdmeas {

// Wavefront OBJ: positions and faces only (the format has no per-vertex
// scalar channel, so labels stay in the PLY twin). Indices are 1-based.
inline void write_mesh_obj(const std::string& path, const TriangleMesh& mesh) {
    std::ofstream out(path);
    if (!out) throw DatasetError("cannot open OBJ for writing: " + path);
    for (const Vec3& p : mesh.vertices)
        out << "v " << detail::fmt_double(p.x()) << ' ' << detail::fmt_double(p.y()) << ' '
            << detail::fmt_double(p.z()) << '\n';
    if (mesh.has_normals())
        for (const Vec3& n : mesh.vertex_normals)
            out << "vn " << detail::fmt_double(n.x()) << ' ' << detail::fmt_double(n.y()) << ' '
                << detail::fmt_double(n.z()) << '\n';
    for (const auto& f : mesh.faces) {
        if (mesh.has_normals())
            out << "f " << f[0] + 1 << "//" << f[0] + 1 << ' ' << f[1] + 1 << "//" << f[1] + 1
                << ' ' << f[2] + 1 << "//" << f[2] + 1 << '\n';
        else
            out << "f " << f[0] + 1 << ' ' << f[1] + 1 << ' ' << f[2] + 1 << '\n';
    }
    if (!out) throw DatasetError("write failed: " + path);
}

}  // namespace rgbdmeas
