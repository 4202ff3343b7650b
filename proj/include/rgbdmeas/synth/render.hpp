#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "rgbdmeas/core/error.hpp"
#include "rgbdmeas/core/frame.hpp"
#include "rgbdmeas/core/intrinsics.hpp"
#include "rgbdmeas/core/rng.hpp"
#include "rgbdmeas/core/transform.hpp"
#include "rgbdmeas/synth/scene.hpp"

namespace rgbdmeas {

struct RenderConfig {
    double depth_noise_sigma = 0.0;  // mm, gaussian, applied before quantization
    std::uint64_t noise_seed = 0;
    double depth_scale = 1.0;   // mm per stored depth unit
    double march_step = 0.25;   // mm of camera depth per raymarch step
    double bisection_tol = 1e-4;  // mm, bracket width at which the hit is accepted
};

namespace detail {

// Signed clearance of the ray point at camera depth t above the surface.
// Positive above, negative below; the surface crossing is its root.
inline double ray_clearance(const SyntheticScene& scene, const Vec3& origin, const Vec3& dir,
                            double t) {
    const Vec3 p = origin + t * dir;
    return p.z() - scene.height(p.x(), p.y());
}

}  // namespace detail

// Camera-to-world pose with +z looking from camera_pos toward target. The
// image +y axis maps to world -y when looking straight down, matching a
// camera hovering over a bench-top scene.
inline RigidTransform look_at_pose(const Vec3& camera_pos, const Vec3& target,
                                   const Vec3& y_ref = Vec3(0, -1, 0)) {
    Vec3 z_c = target - camera_pos;
    const double norm = z_c.norm();
    if (norm < 1e-12) throw InputError("look_at_pose: camera position equals target");
    z_c /= norm;
    Vec3 x_c = y_ref.cross(z_c);
    if (x_c.norm() < 1e-9) {
        // View axis parallel to the reference up; fall back to a fixed right.
        x_c = Vec3(1, 0, 0).cross(z_c);
        if (x_c.norm() < 1e-9) x_c = Vec3(0, 1, 0).cross(z_c);
    }
    x_c.normalize();
    const Vec3 y_c = z_c.cross(x_c).normalized();
    RigidTransform pose;
    pose.rotation.col(0) = x_c;
    pose.rotation.col(1) = y_c;
    pose.rotation.col(2) = z_c;
    pose.translation = camera_pos;
    return pose;
}

// count camera-to-world poses on a cone around +z through target: equal
// azimuth steps at the given tilt from vertical, all fixating the target.
inline std::vector<RigidTransform> orbit_poses(int count, double distance_mm, double tilt_rad,
                                               const Vec3& target = Vec3::Zero()) {
    if (count < 1) throw InputError("orbit_poses: count must be >= 1");
    if (distance_mm <= 0.0) throw InputError("orbit_poses: distance must be positive");
    std::vector<RigidTransform> poses;
    poses.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        const double az = 2.0 * EIGEN_PI * i / count;
        const Vec3 offset(distance_mm * std::sin(tilt_rad) * std::cos(az),
                          distance_mm * std::sin(tilt_rad) * std::sin(az),
                          distance_mm * std::cos(tilt_rad));
        poses.push_back(look_at_pose(target + offset, target));
    }
    return poses;
}

// Transform taking source-camera coordinates to target-camera coordinates,
// given both camera-to-world poses.
inline RigidTransform relative_transform(const RigidTransform& pose_source,
                                         const RigidTransform& pose_target) {
    return pose_target.inverse().compose(pose_source);
}

// Ray-cast the scene into an RGB-D frame. Depth stores camera z in
// depth_scale units; rays that miss the finite plane store 0. The region
// mask and fiducial corner metadata come from the same analytic geometry.
inline RgbdFrame render_frame(const SyntheticScene& scene, const RigidTransform& camera_pose,
                              const CameraIntrinsics& k, const RenderConfig& cfg = {}) {
    k.validate();
    if (cfg.depth_scale <= 0.0) throw InputError("render_frame: depth_scale must be positive");
    if (cfg.march_step <= 0.0 || cfg.bisection_tol <= 0.0)
        throw InputError("render_frame: march_step and bisection_tol must be positive");
    if (!camera_pose.is_valid(1e-9)) throw InputError("render_frame: camera pose is not rigid");

    double min_floor = 0.0;
    for (const Crater& c : scene.craters) min_floor = std::min(min_floor, -c.depth);

    RgbdFrame frame;
    frame.intrinsics = k;
    frame.color = ColorImage(k.width, k.height, Rgb8{0, 0, 0});
    frame.depth = DepthImage(k.width, k.height, 0);
    LabelMask mask(k.width, k.height, 0);

    const Vec3 origin = camera_pose.translation;
    Rng noise_rng(cfg.noise_seed);
    std::size_t hits = 0;

    for (int y = 0; y < k.height; ++y) {
        for (int x = 0; x < k.width; ++x) {
            const Vec3 dir_cam((x - k.cx) / k.fx, (y - k.cy) / k.fy, 1.0);
            const Vec3 dir = camera_pose.rotation * dir_cam;
            if (dir.z() >= -1e-12) continue;  // not descending toward the plane
            const double t_plane = -origin.z() / dir.z();
            if (t_plane <= 0.0) continue;

            const Vec3 q = origin + t_plane * dir;
            if (!scene.in_domain(q.x(), q.y())) continue;

            double t_hit = t_plane;
            if (scene.height(q.x(), q.y()) < 0.0) {
                // Below the plane at the plane crossing: march down the ray
                // until the clearance goes negative, then bisect the bracket.
                const double t_end = (min_floor - 1.0 - origin.z()) / dir.z();
                double t_lo = t_plane;
                double t_hi = t_plane;
                bool bracketed = false;
                while (t_hi < t_end) {
                    t_lo = t_hi;
                    t_hi = std::min(t_hi + cfg.march_step, t_end);
                    if (detail::ray_clearance(scene, origin, dir, t_hi) < 0.0) {
                        bracketed = true;
                        break;
                    }
                }
                if (!bracketed) continue;  // grazing ray left the crater sideways
                while (t_hi - t_lo > cfg.bisection_tol) {
                    const double t_mid = 0.5 * (t_lo + t_hi);
                    if (detail::ray_clearance(scene, origin, dir, t_mid) < 0.0)
                        t_hi = t_mid;
                    else
                        t_lo = t_mid;
                }
                t_hit = 0.5 * (t_lo + t_hi);
            }

            const Vec3 p = origin + t_hit * dir;
            double depth_mm = t_hit;  // dir_cam.z == 1, so ray parameter is camera z
            if (cfg.depth_noise_sigma > 0.0)
                depth_mm += cfg.depth_noise_sigma * noise_rng.gaussian();
            const auto quantized = std::llround(depth_mm / cfg.depth_scale);
            if (quantized < 1 || quantized > 65535) continue;

            frame.depth.at(x, y) = static_cast<std::uint16_t>(quantized);
            frame.color.at(x, y) = scene.texture(p.x(), p.y());
            mask.at(x, y) = scene.in_region(p.x(), p.y()) ? 1 : 0;
            ++hits;
        }
    }

    if (hits == 0) throw EmptyFrameError("render_frame: no ray hit the scene surface");

    frame.mask = std::move(mask);

    const RigidTransform world_to_cam = camera_pose.inverse();
    for (const MarkerPlacement& m : scene.markers) {
        MarkerCorners det;
        det.id = m.id;
        bool all_visible = true;
        const auto corners = scene.marker_corners_3d(m);
        for (int i = 0; i < 4 && all_visible; ++i) {
            const Vec3 pc = world_to_cam.apply(corners[static_cast<std::size_t>(i)]);
            if (pc.z() <= 0.0) {
                all_visible = false;
                break;
            }
            const double u = k.fx * pc.x() / pc.z() + k.cx;
            const double v = k.fy * pc.y() / pc.z() + k.cy;
            if (u < 0.0 || u > k.width - 1.0 || v < 0.0 || v > k.height - 1.0) {
                all_visible = false;
                break;
            }
            det.corners[static_cast<std::size_t>(i)] = Eigen::Vector2d(u, v);
        }
        if (all_visible) frame.marker_corners.push_back(det);
    }

    frame.validate();
    return frame;
}

}  // namespace rgbdmeas
