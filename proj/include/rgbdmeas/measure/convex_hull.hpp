#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <utility>
#include <vector>

#include "rgbdmeas/core/error.hpp"
#include "rgbdmeas/core/rng.hpp"
#include "rgbdmeas/core/transform.hpp"
#include "rgbdmeas/meshing/predicates.hpp"

namespace rgbdmeas {

// Triangulated 3D convex hull. Face and vertex indices refer to the input
// point list; faces are wound so their normals point out of the hull.
struct ConvexHull {
    std::vector<std::array<int, 3>> faces;
    std::vector<int> vertices;
};

namespace detail {

// Four affinely independent input points, or nothing when the set is
// coplanar. Selection maximizes floating-point spread for conditioning but
// the independence decision itself uses the exact orientation predicate.
inline std::optional<std::array<int, 4>> find_initial_simplex(const std::vector<Vec3>& pts) {
    const int n = static_cast<int>(pts.size());
    if (n < 4) return std::nullopt;

    const int i0 = 0;
    int i1 = -1;
    double best = 0.0;
    for (int i = 1; i < n; ++i) {
        const double d = (pts[static_cast<std::size_t>(i)] - pts[0]).squaredNorm();
        if (d > best) {
            best = d;
            i1 = i;
        }
    }
    if (i1 < 0) return std::nullopt;

    int i2 = -1;
    best = 0.0;
    const Vec3 dir = pts[static_cast<std::size_t>(i1)] - pts[0];
    for (int i = 1; i < n; ++i) {
        if (i == i1) continue;
        const double a = dir.cross(pts[static_cast<std::size_t>(i)] - pts[0]).squaredNorm();
        if (a > best) {
            best = a;
            i2 = i;
        }
    }
    if (i2 < 0 || best == 0.0) return std::nullopt;

    // Floating-point argmax first; exact sign check decides, with a full
    // exact scan as the fallback when the argmax happens to be coplanar.
    int i3 = -1;
    best = 0.0;
    const Vec3 a = pts[0], b = pts[static_cast<std::size_t>(i1)], c = pts[static_cast<std::size_t>(i2)];
    for (int i = 1; i < n; ++i) {
        if (i == i1 || i == i2) continue;
        const double v = std::abs((pts[static_cast<std::size_t>(i)] - a).dot(dir.cross(c - a)));
        if (v > best) {
            best = v;
            i3 = i;
        }
    }
    if (i3 >= 0 && predicates::orient3d(a, b, c, pts[static_cast<std::size_t>(i3)]) != 0)
        return std::array<int, 4>{i0, i1, i2, i3};
    for (int i = 1; i < n; ++i) {
        if (i == i1 || i == i2) continue;
        if (predicates::orient3d(a, b, c, pts[static_cast<std::size_t>(i)]) != 0)
            return std::array<int, 4>{i0, i1, i2, i};
    }
    return std::nullopt;
}

}  // namespace detail

// Incremental convex hull with exact orientation tests. A point lying
// exactly on a face plane is treated as interior, so hull vertices can omit
// points on faces; callers needing extremes must still project the full
// input set, which is how the bounding-box search uses this hull.
inline ConvexHull convex_hull(const std::vector<Vec3>& points) {
    const auto simplex = detail::find_initial_simplex(points);
    if (!simplex)
        throw InputError("convex_hull: needs at least 4 affinely independent points");
    auto [s0, s1, s2, s3] = *simplex;
    if (predicates::orient3d(points[static_cast<std::size_t>(s0)], points[static_cast<std::size_t>(s1)],
                             points[static_cast<std::size_t>(s2)],
                             points[static_cast<std::size_t>(s3)]) < 0)
        std::swap(s1, s2);

    struct Face {
        std::array<int, 3> v;
        bool alive = true;
    };
    // Faces of a positively oriented tetrahedron, wound outward.
    std::vector<Face> faces = {{{s1, s3, s2}, true},
                               {{s0, s2, s3}, true},
                               {{s0, s3, s1}, true},
                               {{s0, s1, s2}, true}};

    std::vector<int> order;
    order.reserve(points.size());
    for (int i = 0; i < static_cast<int>(points.size()); ++i)
        if (i != s0 && i != s1 && i != s2 && i != s3) order.push_back(i);
    Rng rng(0x5ca1ab1eu);
    for (int i = static_cast<int>(order.size()) - 1; i > 0; --i)
        std::swap(order[static_cast<std::size_t>(i)],
                  order[static_cast<std::size_t>(rng.uniform_int(0, i))]);

    const auto sees = [&points, &faces](int face_idx, int p) {
        const auto& f = faces[static_cast<std::size_t>(face_idx)].v;
        return predicates::orient3d(points[static_cast<std::size_t>(f[0])],
                                    points[static_cast<std::size_t>(f[1])],
                                    points[static_cast<std::size_t>(f[2])],
                                    points[static_cast<std::size_t>(p)]) < 0;
    };

    for (int p : order) {
        std::vector<int> visible;
        for (int f = 0; f < static_cast<int>(faces.size()); ++f)
            if (faces[static_cast<std::size_t>(f)].alive && sees(f, p)) visible.push_back(f);
        if (visible.empty()) continue;

        // A directed edge of a visible face is on the horizon when its
        // reverse does not appear in any visible face.
        std::set<std::pair<int, int>> visible_edges;
        for (int f : visible) {
            const auto& v = faces[static_cast<std::size_t>(f)].v;
            for (int e = 0; e < 3; ++e)
                visible_edges.insert({v[static_cast<std::size_t>(e)],
                                      v[static_cast<std::size_t>((e + 1) % 3)]});
        }
        std::vector<std::pair<int, int>> horizon;
        for (const auto& edge : visible_edges)
            if (!visible_edges.count({edge.second, edge.first})) horizon.push_back(edge);

        for (int f : visible) faces[static_cast<std::size_t>(f)].alive = false;
        for (const auto& [ea, eb] : horizon) faces.push_back({{ea, eb, p}, true});
    }

    ConvexHull hull;
    std::set<int> used;
    for (const Face& f : faces) {
        if (!f.alive) continue;
        hull.faces.push_back(f.v);
        used.insert(f.v.begin(), f.v.end());
    }
    hull.vertices.assign(used.begin(), used.end());
    return hull;
}

}  // namespace rgbdmeas
