#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <utility>
#include <vector>

#include "rgbdmeas/core/error.hpp"
#include "rgbdmeas/core/point_cloud.hpp"
#include "rgbdmeas/meshing/delaunay.hpp"
#include "rgbdmeas/meshing/mesh.hpp"

namespace rgbdmeas {

// Alpha-shape surface extraction: tetrahedralize the cloud, keep tets whose
// circumradius is below alpha, and return the boundary triangles of the kept
// complex. Boundary windings point out of the complex. Normals and labels
// present on the cloud are carried onto the surviving vertices.
inline TriangleMesh alpha_shape_mesh(const PointCloud& cloud, double alpha) {
    cloud.validate();
    if (cloud.size() < 4) throw InputError("alpha_shape_mesh: need at least 4 points");
    if (!(alpha > 0.0) || !std::isfinite(alpha))
        throw InputError("alpha_shape_mesh: alpha must be positive");

    const DelaunayTriangulation tri(cloud.points);

    // Count how many kept tets use each face. A face used exactly once is on
    // the boundary; its stored winding already points out of its owning tet
    // and therefore out of the complex.
    std::map<std::array<int, 3>, std::pair<std::array<int, 3>, int>> face_use;
    for (const DelaunayTet& t : tri.tets()) {
        if (!tri.is_real_tet(t)) continue;
        if (!(tri.circumsphere(t).second < alpha)) continue;
        for (int i = 0; i < 4; ++i) {
            const std::array<int, 3> wound = tet_face_opposite(t, i);
            std::array<int, 3> key = wound;
            std::sort(key.begin(), key.end());
            auto [it, inserted] = face_use.try_emplace(key, wound, 0);
            ++it->second.second;
        }
    }

    TriangleMesh mesh;
    std::vector<int> remap(cloud.size(), -1);
    for (const auto& [key, entry] : face_use) {
        if (entry.second != 1) continue;
        std::array<int, 3> f{};
        for (int c = 0; c < 3; ++c) {
            const int v = entry.first[static_cast<std::size_t>(c)];
            int& slot = remap[static_cast<std::size_t>(v)];
            if (slot < 0) {
                slot = static_cast<int>(mesh.vertices.size());
                mesh.vertices.push_back(cloud.points[static_cast<std::size_t>(v)]);
                if (cloud.has_normals())
                    mesh.vertex_normals.push_back(cloud.normals[static_cast<std::size_t>(v)]);
                if (cloud.has_labels())
                    mesh.vertex_labels.push_back(cloud.labels[static_cast<std::size_t>(v)]);
            }
            f[static_cast<std::size_t>(c)] = slot;
        }
        mesh.faces.push_back(f);
    }

    if (mesh.faces.empty())
        throw EmptyMeshError("alpha_shape_mesh: all simplices filtered out, increase alpha");
    mesh.validate();
    return mesh;
}

}  // namespace rgbdmeas
