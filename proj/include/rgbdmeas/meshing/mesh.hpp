#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include "rgbdmeas/core/error.hpp"
#include "rgbdmeas/core/transform.hpp"

namespace rgbdmeas {

// Indexed triangle mesh. Vertex normals and labels are optional and, when
// present, parallel to vertices.
struct TriangleMesh {
    std::vector<Vec3> vertices;
    std::vector<std::array<int, 3>> faces;
    std::vector<Vec3> vertex_normals;
    std::vector<std::uint8_t> vertex_labels;

    std::size_t vertex_count() const { return vertices.size(); }
    std::size_t face_count() const { return faces.size(); }
    bool empty() const { return vertices.empty() || faces.empty(); }
    bool has_normals() const { return !vertex_normals.empty(); }
    bool has_labels() const { return !vertex_labels.empty(); }

    void validate() const {
        if (has_normals() && vertex_normals.size() != vertices.size())
            throw InputError("mesh: vertex_normals length mismatch");
        if (has_labels() && vertex_labels.size() != vertices.size())
            throw InputError("mesh: vertex_labels length mismatch");
        const int n = static_cast<int>(vertices.size());
        for (const auto& f : faces) {
            for (int c = 0; c < 3; ++c)
                if (f[c] < 0 || f[c] >= n) throw InputError("mesh: face index out of range");
            if (f[0] == f[1] || f[1] == f[2] || f[0] == f[2])
                throw InputError("mesh: degenerate face with repeated vertex");
        }
    }
};

// Undirected edge key with the smaller index first.
inline std::pair<int, int> edge_key(int a, int b) {
    return a < b ? std::make_pair(a, b) : std::make_pair(b, a);
}

inline Vec3 face_normal(const TriangleMesh& mesh, std::size_t f) {
    const auto& t = mesh.faces[f];
    const Vec3 n = (mesh.vertices[t[1]] - mesh.vertices[t[0]])
                       .cross(mesh.vertices[t[2]] - mesh.vertices[t[0]]);
    const double len = n.norm();
    return len > 0.0 ? Vec3(n / len) : Vec3(0, 0, 1);
}

inline double face_area(const TriangleMesh& mesh, std::size_t f) {
    const auto& t = mesh.faces[f];
    return 0.5 * (mesh.vertices[t[1]] - mesh.vertices[t[0]])
                     .cross(mesh.vertices[t[2]] - mesh.vertices[t[0]])
                     .norm();
}

inline double surface_area(const TriangleMesh& mesh) {
    double a = 0.0;
    for (std::size_t f = 0; f < mesh.faces.size(); ++f) a += face_area(mesh, f);
    return a;
}

// Counts each undirected edge once, over all faces.
inline std::size_t edge_count(const TriangleMesh& mesh) {
    std::map<std::pair<int, int>, int> edges;
    for (const auto& t : mesh.faces)
        for (int c = 0; c < 3; ++c) edges[edge_key(t[c], t[(c + 1) % 3])]++;
    return edges.size();
}

// V - E + F; 2 for a closed surface of genus 0, 1 for a disk.
inline long euler_characteristic(const TriangleMesh& mesh) {
    return static_cast<long>(mesh.vertices.size()) - static_cast<long>(edge_count(mesh)) +
           static_cast<long>(mesh.faces.size());
}

}  // namespace rgbdmeas
