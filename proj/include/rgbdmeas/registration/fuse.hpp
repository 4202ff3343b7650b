#pragma once

#include <string>
#include <utility>
#include <vector>

#include "rgbdmeas/core/backproject.hpp"
#include "rgbdmeas/core/error.hpp"
#include "rgbdmeas/core/frame.hpp"
#include "rgbdmeas/core/normals.hpp"
#include "rgbdmeas/core/point_cloud.hpp"
#include "rgbdmeas/core/transform.hpp"
#include "rgbdmeas/core/voxel.hpp"
#include "rgbdmeas/registration/marker.hpp"
#include "rgbdmeas/registration/odometry.hpp"

namespace rgbdmeas {

enum class RegistrationMethod { odometry, marker };

struct FuseConfig {
    RegistrationMethod method = RegistrationMethod::odometry;
    OdometryConfig odometry{};  // depth_scale and z_range also govern back-projection
    double voxel_mm = 1.0;
    // Neighborhood size for per-frame normal estimation; 0 disables normals.
    int normals_k = 16;
};

struct FuseResult {
    PointCloud cloud;
    std::vector<RigidTransform> poses;  // frame i camera space -> frame 0 camera space
};

namespace detail {

template <typename Fn>
auto annotate_frame_errors(int frame_index, Fn&& fn) {
    const std::string prefix = "frame " + std::to_string(frame_index) + ": ";
    try {
        return fn();
    } catch (const InsufficientOverlapError& e) {
        throw InsufficientOverlapError(prefix + e.what());
    } catch (const InsufficientLandmarksError& e) {
        throw InsufficientLandmarksError(prefix + e.what());
    } catch (const InvalidCornerDepthError& e) {
        throw InvalidCornerDepthError(prefix + e.what());
    } catch (const DegenerateCorrespondencesError& e) {
        throw DegenerateCorrespondencesError(prefix + e.what());
    } catch (const InputError& e) {
        throw InputError(prefix + e.what());
    }
}

}  // namespace detail

// Star registration: every frame is aligned pairwise to frame 0, never
// chained. Clouds are back-projected, given per-frame normals (oriented to
// each camera), moved into the reference frame, concatenated, and voxel
// downsampled.
inline FuseResult fuse_frames(const std::vector<RgbdFrame>& frames, const FuseConfig& config = {}) {
    if (frames.empty()) throw InputError("fuse_frames: no frames");
    if (config.voxel_mm <= 0.0) throw InputError("fuse_frames: voxel_mm must be > 0");

    FuseResult result;
    result.poses.resize(frames.size(), RigidTransform::identity());
    for (std::size_t i = 1; i < frames.size(); ++i) {
        result.poses[i] = detail::annotate_frame_errors(static_cast<int>(i), [&] {
            if (config.method == RegistrationMethod::marker)
                return marker_alignment(frames[i], frames[0], config.odometry.depth_scale);
            return rgbd_odometry(frames[i], frames[0], config.odometry).transform;
        });
    }

    PointCloud merged;
    for (std::size_t i = 0; i < frames.size(); ++i) {
        PointCloud cloud = detail::annotate_frame_errors(static_cast<int>(i), [&] {
            PointCloud c = back_project(frames[i], config.odometry.depth_scale,
                                        config.odometry.z_range);
            if (config.normals_k > 0 && c.size() > static_cast<std::size_t>(config.normals_k))
                c = estimate_normals(c, config.normals_k, Vec3::Zero());
            return c;
        });
        cloud.transform(result.poses[i]);
        merged.append(cloud);
    }
    if (merged.empty()) throw InputError("fuse_frames: no valid depth in any frame");
    result.cloud = voxel_downsample(merged, config.voxel_mm);
    return result;
}

}  // namespace rgbdmeas
