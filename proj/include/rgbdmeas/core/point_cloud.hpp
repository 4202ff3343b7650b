#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "rgbdmeas/core/error.hpp"
#include "rgbdmeas/core/image.hpp"
#include "rgbdmeas/core/transform.hpp"

namespace rgbdmeas {

// Pixel a point came from: frame index plus (x, y).
struct SourcePixel {
    int frame = 0;
    int x = 0;
    int y = 0;
};

// Points in millimetres with optional per-point attributes. Attribute
// vectors are either empty or exactly points.size() long.
struct PointCloud {
    std::vector<Vec3> points;
    std::vector<Rgb8> colors;
    std::vector<Vec3> normals;
    std::vector<std::uint8_t> labels;
    std::vector<SourcePixel> source_pixels;

    size_t size() const { return points.size(); }
    bool empty() const { return points.empty(); }
    bool has_colors() const { return !colors.empty(); }
    bool has_normals() const { return !normals.empty(); }
    bool has_labels() const { return !labels.empty(); }
    bool has_source_pixels() const { return !source_pixels.empty(); }

    void validate() const {
        auto check = [&](size_t n, const char* name) {
            if (n != 0 && n != points.size())
                throw InputError(std::string("PointCloud: ") + name + " length mismatch");
        };
        check(colors.size(), "colors");
        check(normals.size(), "normals");
        check(labels.size(), "labels");
        check(source_pixels.size(), "source_pixels");
        for (const Vec3& n : normals)
            if (std::abs(n.norm() - 1.0) > 1e-6)
                throw InputError("PointCloud: normal is not unit length");
    }

    // Transform points (and rotate normals) in place.
    void transform(const RigidTransform& t) {
        for (Vec3& p : points) p = t.apply(p);
        for (Vec3& n : normals) n = t.rotation * n;
    }

    PointCloud transformed(const RigidTransform& t) const {
        PointCloud out = *this;
        out.transform(t);
        return out;
    }

    void append(const PointCloud& other) {
        auto extend = [](auto& dst, const auto& src, size_t dst_points, size_t src_points) {
            using V = std::decay_t<decltype(dst)>;
            if (dst.empty() && src.empty()) return;
            // Attribute present on one side only: pad with defaults so the
            // parallel-length invariant keeps holding.
            if (dst.empty()) dst.resize(dst_points, typename V::value_type{});
            V padded_src = src;
            if (padded_src.empty()) padded_src.resize(src_points, typename V::value_type{});
            dst.insert(dst.end(), padded_src.begin(), padded_src.end());
        };
        const size_t np = points.size();
        const size_t no = other.points.size();
        extend(colors, other.colors, np, no);
        extend(labels, other.labels, np, no);
        extend(source_pixels, other.source_pixels, np, no);
        // Normals cannot be padded (a default is not unit length); keep them
        // only if both sides carry them.
        if ((np == 0 || has_normals()) && (no == 0 || other.has_normals())) {
            normals.insert(normals.end(), other.normals.begin(), other.normals.end());
        } else {
            normals.clear();
        }
        points.insert(points.end(), other.points.begin(), other.points.end());
    }
};

}  // namespace rgbdmeas
