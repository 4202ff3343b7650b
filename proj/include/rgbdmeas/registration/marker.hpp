#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "rgbdmeas/core/error.hpp"
#include "rgbdmeas/core/frame.hpp"
#include "rgbdmeas/core/transform.hpp"
#include "rgbdmeas/registration/kabsch.hpp"

namespace rgbdmeas {
namespace detail {

// Depth at a continuous pixel: bilinear over the nonzero neighbors with
// renormalized weights; if all four are zero, mean of the nonzero 3x3
// neighborhood around the rounded pixel.
inline double sample_corner_depth(const DepthImage& depth, double u, double v,
                                  double depth_scale) {
    const int x0 = static_cast<int>(std::floor(u));
    const int y0 = static_cast<int>(std::floor(v));
    const double a = u - x0;
    const double b = v - y0;
    const double weights[4] = {(1 - a) * (1 - b), a * (1 - b), (1 - a) * b, a * b};
    const int offs[4][2] = {{0, 0}, {1, 0}, {0, 1}, {1, 1}};
    double acc = 0.0, wsum = 0.0;
    for (int i = 0; i < 4; ++i) {
        const int x = x0 + offs[i][0];
        const int y = y0 + offs[i][1];
        if (!depth.contains(x, y)) continue;
        const std::uint16_t d = depth.at(x, y);
        if (d == 0) continue;
        acc += weights[i] * d;
        wsum += weights[i];
    }
    if (wsum > 0.0) return acc / wsum * depth_scale;

    const int cx = static_cast<int>(std::lround(u));
    const int cy = static_cast<int>(std::lround(v));
    double sum = 0.0;
    int count = 0;
    for (int dy = -1; dy <= 1; ++dy)
        for (int dx = -1; dx <= 1; ++dx) {
            if (!depth.contains(cx + dx, cy + dy)) continue;
            const std::uint16_t d = depth.at(cx + dx, cy + dy);
            if (d == 0) continue;
            sum += d;
            count++;
        }
    if (count == 0)
        throw InvalidCornerDepthError("marker corner at (" + std::to_string(u) + ", " +
                                      std::to_string(v) + ") has no valid depth in its 3x3 "
                                      "neighborhood");
    return sum / count * depth_scale;
}

}  // namespace detail

// Lift a continuous pixel to camera space using interpolated depth.
inline Vec3 lift_corner(const RgbdFrame& frame, const Eigen::Vector2d& corner,
                        double depth_scale = 1.0) {
    const double z = detail::sample_corner_depth(frame.depth, corner.x(), corner.y(), depth_scale);
    const CameraIntrinsics& k = frame.intrinsics;
    return Vec3((corner.x() - k.cx) * z / k.fx, (corner.y() - k.cy) * z / k.fy, z);
}

// Corner pairs matched by (marker id, corner index) across two frames,
// lifted to 3D in each frame. Two shared 4-corner markers give the 8-pair
// correspondence set.
inline CorrespondenceSet marker_correspondences(const RgbdFrame& source, const RgbdFrame& target,
                                                double depth_scale = 1.0) {
    std::map<int, const MarkerCorners*> source_by_id;
    for (const MarkerCorners& m : source.marker_corners) source_by_id.emplace(m.id, &m);
    std::map<int, const MarkerCorners*> target_by_id;
    for (const MarkerCorners& m : target.marker_corners) target_by_id.emplace(m.id, &m);

    std::vector<std::pair<const MarkerCorners*, const MarkerCorners*>> shared;
    for (const auto& [id, src] : source_by_id) {
        auto it = target_by_id.find(id);
        if (it != target_by_id.end()) shared.emplace_back(src, it->second);
    }
    if (shared.size() < 2)
        throw InsufficientLandmarksError("marker_alignment: " + std::to_string(shared.size()) +
                                         " shared marker(s); need at least 2");

    CorrespondenceSet corr;
    for (const auto& [src, tgt] : shared)
        for (int c = 0; c < 4; ++c)
            corr.add(lift_corner(source, src->corners[c], depth_scale),
                     lift_corner(target, tgt->corners[c], depth_scale));
    return corr;
}

// Rigid transform mapping source-frame camera space onto target-frame camera
// space, from shared fiducial corners.
inline RigidTransform marker_alignment(const RgbdFrame& source, const RgbdFrame& target,
                                       double depth_scale = 1.0) {
    return rigid_from_correspondences(marker_correspondences(source, target, depth_scale));
}

}  // namespace rgbdmeas
