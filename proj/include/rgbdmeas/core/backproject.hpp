#pragma once

#include <optional>
#include <utility>

#include <Eigen/Core>

#include "rgbdmeas/core/error.hpp"
#include "rgbdmeas/core/frame.hpp"
#include "rgbdmeas/core/point_cloud.hpp"

namespace rgbdmeas {

struct DepthRange {
    double min_mm = 300.0;
    double max_mm = 800.0;
};

// Lift every pixel with valid depth in range into a camera-space 3D point:
// [X Y Z]^T = Z * K^-1 * [x y 1]^T. Point order is row-major over pixels.
// Colors, labels (if the frame has a mask), and source pixels ride along.
inline PointCloud back_project(const RgbdFrame& frame, double depth_scale = 1.0,
                               DepthRange z_range = DepthRange{}) {
    frame.validate();
    if (z_range.min_mm < 0.0)
        throw InputError("back_project: z_range.min must be non-negative");

    const CameraIntrinsics& k = frame.intrinsics;
    const double inv_fx = 1.0 / k.fx;
    const double inv_fy = 1.0 / k.fy;
    const bool has_color = !frame.color.empty();
    const bool has_mask = frame.mask.has_value();

    PointCloud cloud;
    for (int y = 0; y < k.height; ++y) {
        for (int x = 0; x < k.width; ++x) {
            const std::uint16_t raw = frame.depth.at(x, y);
            if (raw == 0) continue;
            const double z = raw * depth_scale;
            if (z < z_range.min_mm || z > z_range.max_mm) continue;
            cloud.points.emplace_back((x - k.cx) * z * inv_fx, (y - k.cy) * z * inv_fy, z);
            if (has_color) cloud.colors.push_back(frame.color.at(x, y));
            if (has_mask) cloud.labels.push_back(frame.mask->at(x, y));
            cloud.source_pixels.push_back({frame.timestamp_index, x, y});
        }
    }
    return cloud;
}

struct Projection {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;
    bool in_frame = false;
};

// Perspective projection, the inverse of back_project up to pixel
// quantization. Continuous coordinates outside [0,width)x[0,height) are
// flagged out-of-frame rather than rejected.
inline Projection project(const Vec3& point, const CameraIntrinsics& k) {
    if (point.z() <= 0.0)
        throw BehindCameraError("project: point has non-positive Z");
    Projection p;
    p.x = k.fx * point.x() / point.z() + k.cx;
    p.y = k.fy * point.y() / point.z() + k.cy;
    p.z = point.z();
    p.in_frame = p.x >= 0.0 && p.x < k.width && p.y >= 0.0 && p.y < k.height;
    return p;
}

}  // namespace rgbdmeas
