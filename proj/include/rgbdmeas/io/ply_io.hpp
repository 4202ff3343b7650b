#pragma once

#include <array>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "rgbdmeas/core/error.hpp"
#include "rgbdmeas/core/point_cloud.hpp"
#include "rgbdmeas/meshing/mesh.hpp"

namespace rgbdmeas {
namespace detail {

// Fixed 17-significant-digit formatting: round-trips any double exactly and
// keeps emitted files byte-identical across runs.
inline std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

struct PlyProperty {
    std::string name;
    bool is_list = false;
};

struct PlyElement {
    std::string name;
    std::size_t count = 0;
    std::vector<PlyProperty> properties;
};

// Everything an ASCII PLY in this project may carry. Unknown properties are
// consumed and dropped.
struct PlyData {
    std::vector<Vec3> positions;
    std::vector<Vec3> normals;
    std::vector<Rgb8> colors;
    std::vector<std::uint8_t> labels;
    std::vector<std::array<int, 3>> faces;
    std::vector<std::pair<int, int>> edges;
};

inline PlyData read_ply(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DatasetError("cannot open PLY: " + path);
    std::string line;
    if (!std::getline(in, line) || line.substr(0, 3) != "ply")
        throw DatasetError("not a PLY file: " + path);
    std::vector<PlyElement> elements;
    bool ascii = false;
    while (std::getline(in, line)) {
        std::istringstream ls(line);
        std::string tok;
        ls >> tok;
        if (tok == "format") {
            std::string fmt;
            ls >> fmt;
            ascii = (fmt == "ascii");
        } else if (tok == "element") {
            PlyElement el;
            ls >> el.name >> el.count;
            elements.push_back(el);
        } else if (tok == "property") {
            if (elements.empty()) throw DatasetError("PLY property before element: " + path);
            PlyProperty prop;
            std::string type;
            ls >> type;
            if (type == "list") {
                std::string count_type, value_type;
                ls >> count_type >> value_type >> prop.name;
                prop.is_list = true;
            } else {
                ls >> prop.name;
            }
            elements.back().properties.push_back(prop);
        } else if (tok == "end_header") {
            break;
        }
    }
    if (!ascii) throw DatasetError("only ASCII PLY is supported: " + path);

    PlyData out;
    for (const auto& el : elements) {
        if (el.name == "vertex") {
            bool has_n = false, has_c = false, has_l = false;
            for (const auto& p : el.properties) {
                if (p.name == "nx") has_n = true;
                if (p.name == "red") has_c = true;
                if (p.name == "label") has_l = true;
            }
            out.positions.reserve(el.count);
            if (has_n) out.normals.reserve(el.count);
            if (has_c) out.colors.reserve(el.count);
            if (has_l) out.labels.reserve(el.count);
            for (std::size_t i = 0; i < el.count; ++i) {
                Vec3 pos = Vec3::Zero(), nrm = Vec3::Zero();
                Rgb8 col{0, 0, 0};
                double label = 0;
                for (const auto& p : el.properties) {
                    double v;
                    if (!(in >> v)) throw DatasetError("truncated PLY vertex data: " + path);
                    if (p.name == "x") pos.x() = v;
                    else if (p.name == "y") pos.y() = v;
                    else if (p.name == "z") pos.z() = v;
                    else if (p.name == "nx") nrm.x() = v;
                    else if (p.name == "ny") nrm.y() = v;
                    else if (p.name == "nz") nrm.z() = v;
                    else if (p.name == "red") col[0] = static_cast<std::uint8_t>(v);
                    else if (p.name == "green") col[1] = static_cast<std::uint8_t>(v);
                    else if (p.name == "blue") col[2] = static_cast<std::uint8_t>(v);
                    else if (p.name == "label") label = v;
                }
                out.positions.push_back(pos);
                if (has_n) out.normals.push_back(nrm);
                if (has_c) out.colors.push_back(col);
                if (has_l) out.labels.push_back(static_cast<std::uint8_t>(label));
            }
        } else if (el.name == "face") {
            out.faces.reserve(el.count);
            for (std::size_t i = 0; i < el.count; ++i) {
                for (const auto& p : el.properties) {
                    if (p.is_list) {
                        int n;
                        if (!(in >> n) || n < 3)
                            throw DatasetError("bad PLY face list: " + path);
                        std::vector<int> idx(n);
                        for (int& v : idx)
                            if (!(in >> v)) throw DatasetError("truncated PLY face: " + path);
                        for (int t = 1; t + 1 < n; ++t)
                            out.faces.push_back({idx[0], idx[t], idx[t + 1]});
                    } else {
                        double skip;
                        in >> skip;
                    }
                }
            }
        } else if (el.name == "edge") {
            out.edges.reserve(el.count);
            for (std::size_t i = 0; i < el.count; ++i) {
                std::pair<int, int> e{0, 0};
                for (const auto& p : el.properties) {
                    double v;
                    if (!(in >> v)) throw DatasetError("truncated PLY edge data: " + path);
                    if (p.name == "vertex1") e.first = static_cast<int>(v);
                    if (p.name == "vertex2") e.second = static_cast<int>(v);
                }
                out.edges.push_back(e);
            }
        } else {
            // Unknown element: consume its tokens.
            for (std::size_t i = 0; i < el.count; ++i) {
                for (const auto& p : el.properties) {
                    if (p.is_list) {
                        int n;
                        in >> n;
                        double skip;
                        for (int t = 0; t < n; ++t) in >> skip;
                    } else {
                        double skip;
                        in >> skip;
                    }
                }
            }
        }
    }
    return out;
}

}  // namespace detail

inline void write_cloud_ply(const std::string& path, const PointCloud& cloud) {
    std::ofstream out(path);
    if (!out) throw DatasetError("cannot open PLY for writing: " + path);
    out << "ply\nformat ascii 1.0\n";
    out << "element vertex " << cloud.size() << "\n";
    out << "property double x\nproperty double y\nproperty double z\n";
    if (cloud.has_colors()) out << "property uchar red\nproperty uchar green\nproperty uchar blue\n";
    if (cloud.has_normals()) out << "property double nx\nproperty double ny\nproperty double nz\n";
    if (cloud.has_labels()) out << "property uchar label\n";
    out << "end_header\n";
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        const Vec3& p = cloud.points[i];
        out << detail::fmt_double(p.x()) << ' ' << detail::fmt_double(p.y()) << ' '
            << detail::fmt_double(p.z());
        if (cloud.has_colors())
            out << ' ' << int(cloud.colors[i][0]) << ' ' << int(cloud.colors[i][1]) << ' '
                << int(cloud.colors[i][2]);
        if (cloud.has_normals()) {
            const Vec3& n = cloud.normals[i];
            out << ' ' << detail::fmt_double(n.x()) << ' ' << detail::fmt_double(n.y()) << ' '
                << detail::fmt_double(n.z());
        }
        if (cloud.has_labels()) out << ' ' << int(cloud.labels[i]);
        out << '\n';
    }
    if (!out) throw DatasetError("write failed: " + path);
}

inline PointCloud read_cloud_ply(const std::string& path) {
    detail::PlyData data = detail::read_ply(path);
    PointCloud cloud;
    cloud.points = std::move(data.positions);
    cloud.normals = std::move(data.normals);
    cloud.colors = std::move(data.colors);
    cloud.labels = std::move(data.labels);
    cloud.validate();
    return cloud;
}

inline void write_mesh_ply(const std::string& path, const TriangleMesh& mesh) {
    std::ofstream out(path);
    if (!out) throw DatasetError("cannot open PLY for writing: " + path);
    out << "ply\nformat ascii 1.0\n";
    out << "element vertex " << mesh.vertex_count() << "\n";
    out << "property double x\nproperty double y\nproperty double z\n";
    if (mesh.has_normals()) out << "property double nx\nproperty double ny\nproperty double nz\n";
    if (mesh.has_labels()) out << "property uchar label\n";
    out << "element face " << mesh.face_count() << "\n";
    out << "property list uchar int vertex_indices\n";
    out << "end_header\n";
    for (std::size_t i = 0; i < mesh.vertex_count(); ++i) {
        const Vec3& p = mesh.vertices[i];
        out << detail::fmt_double(p.x()) << ' ' << detail::fmt_double(p.y()) << ' '
            << detail::fmt_double(p.z());
        if (mesh.has_normals()) {
            const Vec3& n = mesh.vertex_normals[i];
            out << ' ' << detail::fmt_double(n.x()) << ' ' << detail::fmt_double(n.y()) << ' '
                << detail::fmt_double(n.z());
        }
        if (mesh.has_labels()) out << ' ' << int(mesh.vertex_labels[i]);
        out << '\n';
    }
    for (const auto& f : mesh.faces) out << "3 " << f[0] << ' ' << f[1] << ' ' << f[2] << '\n';
    if (!out) throw DatasetError("write failed: " + path);
}

inline TriangleMesh read_mesh_ply(const std::string& path) {
    detail::PlyData data = detail::read_ply(path);
    TriangleMesh mesh;
    mesh.vertices = std::move(data.positions);
    mesh.vertex_normals = std::move(data.normals);
    mesh.vertex_labels = std::move(data.labels);
    mesh.faces = std::move(data.faces);
    mesh.validate();
    return mesh;
}

// Closed polyline as a PLY edge element; vertex order is the loop order.
inline void write_polyline_ply(const std::string& path, const std::vector<Vec3>& loop) {
    std::ofstream out(path);
    if (!out) throw DatasetError("cannot open PLY for writing: " + path);
    out << "ply\nformat ascii 1.0\n";
    out << "element vertex " << loop.size() << "\n";
    out << "property double x\nproperty double y\nproperty double z\n";
    out << "element edge " << loop.size() << "\n";
    out << "property int vertex1\nproperty int vertex2\n";
    out << "end_header\n";
    for (const Vec3& p : loop)
        out << detail::fmt_double(p.x()) << ' ' << detail::fmt_double(p.y()) << ' '
            << detail::fmt_double(p.z()) << '\n';
    const int n = static_cast<int>(loop.size());
    for (int i = 0; i < n; ++i) out << i << ' ' << (i + 1) % n << '\n';
    if (!out) throw DatasetError("write failed: " + path);
}

inline std::vector<Vec3> read_polyline_ply(const std::string& path) {
    return detail::read_ply(path).positions;
}

}  // namespace rgbdmeas
