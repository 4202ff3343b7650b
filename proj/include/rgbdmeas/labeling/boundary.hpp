#pragma once

#include <algorithm>
#include <cstdint>
#include <cstddef>
#include <limits>
#include <map>
#include <numeric>
#include <utility>
#include <vector>

#include "rgbdmeas/core/error.hpp"
#include "rgbdmeas/meshing/mesh.hpp"

namespace rgbdmeas {

// Ordered closed polyline in mm. The first vertex is not repeated at the
// end; the closing edge back to the front is implicit.
struct BoundaryLoop {
    std::vector<Vec3> vertices;

    std::size_t size() const { return vertices.size(); }

    void validate() const {
        if (vertices.size() < 3) throw InputError("BoundaryLoop: needs at least 3 vertices");
        for (std::size_t i = 0; i < vertices.size(); ++i) {
            const Vec3& a = vertices[i];
            const Vec3& b = vertices[(i + 1) % vertices.size()];
            if (!a.allFinite()) throw InputError("BoundaryLoop: non-finite vertex");
            if (a == b) throw InputError("BoundaryLoop: repeated consecutive vertex");
        }
    }

    // Polyline length including the implicit closing edge.
    double polygon_length() const {
        double length = 0.0;
        for (std::size_t i = 0; i < vertices.size(); ++i)
            length += (vertices[(i + 1) % vertices.size()] - vertices[i]).norm();
        return length;
    }

    Vec3 centroid() const {
        Vec3 sum = Vec3::Zero();
        for (const Vec3& v : vertices) sum += v;
        return sum / static_cast<double>(vertices.size());
    }
};

namespace detail {

inline double point_segment_distance(const Vec3& p, const Vec3& a, const Vec3& b) {
    const Vec3 ab = b - a;
    const double len_sq = ab.squaredNorm();
    if (len_sq == 0.0) return (p - a).norm();
    const double t = std::clamp((p - a).dot(ab) / len_sq, 0.0, 1.0);
    return (p - (a + t * ab)).norm();
}

inline double point_loop_distance(const Vec3& p, const std::vector<Vec3>& loop) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < loop.size(); ++i)
        best = std::min(best, point_segment_distance(p, loop[i], loop[(i + 1) % loop.size()]));
    return best;
}

}  // namespace detail

// Indices of the faces whose three vertices all carry `label`. With
// largest_only set the result is restricted to the largest connected
// component under shared-edge adjacency; the flag exists so area tests can
// check additivity over disjoint components.
inline std::vector<int> region_faces(const TriangleMesh& mesh, std::uint8_t label,
                                     bool largest_only = true) {
    mesh.validate();
    if (!mesh.has_labels()) throw InputError("region_faces: mesh has no vertex labels");

    std::vector<int> region;
    for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
        const auto& face = mesh.faces[f];
        if (mesh.vertex_labels[static_cast<std::size_t>(face[0])] == label &&
            mesh.vertex_labels[static_cast<std::size_t>(face[1])] == label &&
            mesh.vertex_labels[static_cast<std::size_t>(face[2])] == label)
            region.push_back(static_cast<int>(f));
    }
    if (region.empty())
        throw EmptyRegionError("region_faces: no face has all three vertices labeled");
    if (!largest_only || region.size() == 1) return region;

    // Union-find over region faces; faces sharing an undirected edge join.
    std::vector<int> parent(region.size());
    std::iota(parent.begin(), parent.end(), 0);
    const auto find = [&parent](int x) {
        while (parent[static_cast<std::size_t>(x)] != x) {
            parent[static_cast<std::size_t>(x)] =
                parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
            x = parent[static_cast<std::size_t>(x)];
        }
        return x;
    };
    std::map<std::pair<int, int>, int> edge_owner;
    for (std::size_t i = 0; i < region.size(); ++i) {
        const auto& face = mesh.faces[static_cast<std::size_t>(region[i])];
        for (int e = 0; e < 3; ++e) {
            const auto key = edge_key(face[static_cast<std::size_t>(e)],
                                      face[static_cast<std::size_t>((e + 1) % 3)]);
            auto [it, inserted] = edge_owner.try_emplace(key, static_cast<int>(i));
            if (!inserted) parent[static_cast<std::size_t>(find(static_cast<int>(i)))] = find(it->second);
        }
    }
    std::map<int, int> component_size;
    for (std::size_t i = 0; i < region.size(); ++i) ++component_size[find(static_cast<int>(i))];
    int best_root = -1;
    int best_size = 0;
    for (const auto& [root, size] : component_size) {
        if (size > best_size) {
            best_root = root;
            best_size = size;
        }
    }
    std::vector<int> largest;
    largest.reserve(static_cast<std::size_t>(best_size));
    for (std::size_t i = 0; i < region.size(); ++i)
        if (find(static_cast<int>(i)) == best_root) largest.push_back(region[i]);
    return largest;
}

// Boundary of the largest face-connected component labeled `label`. Open
// edges (edges used by exactly one region face) are chained into closed
// loops following the face winding. The longest-perimeter loop is kept;
// any other loop whose centroid lies within merge_dist of the kept loop is
// spliced in through the shortest vertex-to-vertex bridge, and farther
// loops are dropped.
inline BoundaryLoop extract_region_boundary(const TriangleMesh& mesh, std::uint8_t label,
                                            double merge_dist = 10.0) {
    const std::vector<int> region = region_faces(mesh, label, true);

    // Undirected use counts; the stored directed edge comes from the first
    // face so an open edge keeps that face's winding.
    std::map<std::pair<int, int>, std::pair<std::pair<int, int>, int>> edge_use;
    for (int f : region) {
        const auto& face = mesh.faces[static_cast<std::size_t>(f)];
        for (int e = 0; e < 3; ++e) {
            const int a = face[static_cast<std::size_t>(e)];
            const int b = face[static_cast<std::size_t>((e + 1) % 3)];
            auto [it, inserted] = edge_use.try_emplace(edge_key(a, b), std::make_pair(a, b), 0);
            ++it->second.second;
        }
    }
    std::vector<std::pair<int, int>> open_edges;
    for (const auto& [key, entry] : edge_use)
        if (entry.second == 1) open_edges.push_back(entry.first);
    if (open_edges.empty())
        throw WholeSurfaceLabeledError(
            "extract_region_boundary: the region covers a closed surface with no open edges");

    // Directed chaining. Every boundary vertex has equal in and out degree
    // over the open edges, so each walk can only terminate back at its
    // start vertex.
    std::map<int, std::vector<int>> outgoing;
    for (std::size_t e = 0; e < open_edges.size(); ++e)
        outgoing[open_edges[e].first].push_back(static_cast<int>(e));
    for (auto& [vertex, edges] : outgoing)
        std::sort(edges.begin(), edges.end(), [&open_edges](int a, int b) {
            return open_edges[static_cast<std::size_t>(a)].second <
                   open_edges[static_cast<std::size_t>(b)].second;
        });

    std::vector<char> used(open_edges.size(), 0);
    std::vector<std::vector<int>> loops;
    for (std::size_t start = 0; start < open_edges.size(); ++start) {
        if (used[start]) continue;
        std::vector<int> sequence;
        const int origin = open_edges[start].first;
        used[start] = 1;
        sequence.push_back(origin);
        int current = open_edges[start].second;
        while (current != origin) {
            sequence.push_back(current);
            int next_edge = -1;
            for (int e : outgoing[current]) {
                if (!used[static_cast<std::size_t>(e)]) {
                    next_edge = e;
                    break;
                }
            }
            if (next_edge < 0)
                throw Error("extract_region_boundary: open edge chaining failed");
            used[static_cast<std::size_t>(next_edge)] = 1;
            current = open_edges[static_cast<std::size_t>(next_edge)].second;
        }
        loops.push_back(std::move(sequence));
    }

    // Positions per loop; selection works on geometry, not indices.
    std::vector<std::vector<Vec3>> loop_points(loops.size());
    for (std::size_t l = 0; l < loops.size(); ++l) {
        loop_points[l].reserve(loops[l].size());
        for (int v : loops[l]) loop_points[l].push_back(mesh.vertices[static_cast<std::size_t>(v)]);
    }
    const auto loop_length = [](const std::vector<Vec3>& pts) {
        double length = 0.0;
        for (std::size_t i = 0; i < pts.size(); ++i)
            length += (pts[(i + 1) % pts.size()] - pts[i]).norm();
        return length;
    };

    std::size_t main_idx = 0;
    double main_len = -1.0;
    for (std::size_t l = 0; l < loop_points.size(); ++l) {
        const double len = loop_length(loop_points[l]);
        if (len > main_len) {
            main_len = len;
            main_idx = l;
        }
    }
    std::vector<Vec3> main_loop = std::move(loop_points[main_idx]);

    // Remaining loops in descending length order; merge until no candidate
    // centroid lies within reach of the growing main loop.
    std::vector<std::size_t> others;
    for (std::size_t l = 0; l < loop_points.size(); ++l)
        if (l != main_idx) others.push_back(l);
    std::sort(others.begin(), others.end(), [&](std::size_t a, std::size_t b) {
        return loop_length(loop_points[a]) > loop_length(loop_points[b]);
    });
    std::vector<char> merged(others.size(), 0);
    bool changed = true;
    while (changed) {
        changed = false;
        for (std::size_t o = 0; o < others.size(); ++o) {
            if (merged[o]) continue;
            const std::vector<Vec3>& minor = loop_points[others[o]];
            Vec3 minor_centroid = Vec3::Zero();
            for (const Vec3& p : minor) minor_centroid += p;
            minor_centroid /= static_cast<double>(minor.size());
            if (detail::point_loop_distance(minor_centroid, main_loop) > merge_dist) continue;

            std::size_t best_main = 0, best_minor = 0;
            double best_gap = std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < main_loop.size(); ++i) {
                for (std::size_t j = 0; j < minor.size(); ++j) {
                    const double gap = (main_loop[i] - minor[j]).squaredNorm();
                    if (gap < best_gap) {
                        best_gap = gap;
                        best_main = i;
                        best_minor = j;
                    }
                }
            }
            std::vector<Vec3> spliced;
            spliced.reserve(main_loop.size() + minor.size());
            for (std::size_t i = 0; i <= best_main; ++i) spliced.push_back(main_loop[i]);
            for (std::size_t j = 0; j < minor.size(); ++j)
                spliced.push_back(minor[(best_minor + j) % minor.size()]);
            for (std::size_t i = best_main + 1; i < main_loop.size(); ++i)
                spliced.push_back(main_loop[i]);
            main_loop = std::move(spliced);
            merged[o] = 1;
            changed = true;
        }
    }

    // Coincident splice points would create zero-length edges; drop exact
    // consecutive duplicates.
    BoundaryLoop loop;
    loop.vertices.reserve(main_loop.size());
    for (const Vec3& p : main_loop)
        if (loop.vertices.empty() || loop.vertices.back() != p) loop.vertices.push_back(p);
    while (loop.vertices.size() > 1 && loop.vertices.front() == loop.vertices.back())
        loop.vertices.pop_back();
    loop.validate();
    return loop;
}

}  // namespace rgbdmeas
