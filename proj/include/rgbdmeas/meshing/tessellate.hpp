#pragma once

#include <vector>

#include "rgbdmeas/core/error.hpp"
#include "rgbdmeas/meshing/bspline.hpp"
#include "rgbdmeas/meshing/mesh.hpp"

namespace rgbdmeas {

// Evaluates the surface on a mu x mv parameter grid and emits two triangles
// per data-supported cell. Orientation follows the parametric normal
// dS/du x dS/dv; vertices unused by any face are dropped.
inline TriangleMesh tessellate(const BsplineSurface& surface, int mu, int mv) {
    surface.validate();
    if (mu < 2 || mv < 2) throw InputError("tessellate: need at least a 2x2 sample grid");

    std::vector<Vec3> grid_points(static_cast<std::size_t>(mu) * static_cast<std::size_t>(mv));
    std::vector<Vec3> grid_normals(grid_points.size());
    for (int i = 0; i < mu; ++i) {
        const double u = static_cast<double>(i) / (mu - 1);
        for (int j = 0; j < mv; ++j) {
            const double v = static_cast<double>(j) / (mv - 1);
            Vec3 p, su, sv;
            surface.evaluate_with_derivatives(u, v, p, su, sv);
            const auto idx = static_cast<std::size_t>(i) * static_cast<std::size_t>(mv) +
                             static_cast<std::size_t>(j);
            grid_points[idx] = p;
            const Vec3 n = su.cross(sv);
            grid_normals[idx] = n.norm() > 1e-12 ? Vec3(n.normalized()) : Vec3(0, 0, 1);
        }
    }

    auto grid_index = [mv](int i, int j) {
        return static_cast<std::size_t>(i) * static_cast<std::size_t>(mv) +
               static_cast<std::size_t>(j);
    };

    std::vector<int> remap(grid_points.size(), -1);
    TriangleMesh mesh;
    auto emit_vertex = [&](std::size_t g) {
        if (remap[g] < 0) {
            remap[g] = static_cast<int>(mesh.vertices.size());
            mesh.vertices.push_back(grid_points[g]);
            mesh.vertex_normals.push_back(grid_normals[g]);
        }
        return remap[g];
    };
    auto emit_face = [&](std::size_t a, std::size_t b, std::size_t c) {
        const Vec3& pa = grid_points[a];
        const Vec3& pb = grid_points[b];
        const Vec3& pc = grid_points[c];
        if ((pb - pa).cross(pc - pa).norm() < 1e-12) return;  // degenerate cell edge
        mesh.faces.push_back({emit_vertex(a), emit_vertex(b), emit_vertex(c)});
    };

    for (int i = 0; i + 1 < mu; ++i) {
        const double uc = (static_cast<double>(i) + 0.5) / (mu - 1);
        for (int j = 0; j + 1 < mv; ++j) {
            const double vc = (static_cast<double>(j) + 0.5) / (mv - 1);
            if (!surface.cell_supported(uc, vc)) continue;
            // Split the quad so both triangles wind consistently with the
            // parametric normal.
            emit_face(grid_index(i, j), grid_index(i + 1, j), grid_index(i + 1, j + 1));
            emit_face(grid_index(i, j), grid_index(i + 1, j + 1), grid_index(i, j + 1));
        }
    }

    mesh.validate();
    return mesh;
}

}  // namespace rgbdmeas
