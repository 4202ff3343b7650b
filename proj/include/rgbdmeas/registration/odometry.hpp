#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Cholesky>

#include "rgbdmeas/core/backproject.hpp"
#include "rgbdmeas/core/error.hpp"
#include "rgbdmeas/core/frame.hpp"
#include "rgbdmeas/core/image.hpp"
#include "rgbdmeas/core/intrinsics.hpp"
#include "rgbdmeas/core/transform.hpp"

namespace rgbdmeas {

struct OdometryConfig {
    // Geometric-term weight in E = (1-lambda)*sum r_I^2 + lambda*sum r_D^2.
    double lambda = 0.9;
    int pyramid_levels = 3;
    int max_iterations_per_level = 10;
    // Relative per-step energy decrease below which a level is converged.
    double convergence_eps = 1e-8;
    // Residual pairs with |depth residual| above this are occlusion outliers.
    double max_depth_diff = 30.0;
    double depth_scale = 1.0;
    DepthRange z_range{};

    void validate() const {
        if (lambda < 0.0 || lambda > 1.0)
            throw InputError("OdometryConfig: lambda must be in [0,1]");
        if (pyramid_levels < 1) throw InputError("OdometryConfig: pyramid_levels must be >= 1");
        if (max_iterations_per_level < 1)
            throw InputError("OdometryConfig: max_iterations_per_level must be >= 1");
        if (max_depth_diff <= 0.0) throw InputError("OdometryConfig: max_depth_diff must be > 0");
    }
};

struct OdometryResult {
    RigidTransform transform;
    double final_energy = 0.0;
    bool converged = false;
    std::size_t valid_residuals = 0;
};

// One preprocessed pyramid level: grayscale in [0,1], depth in mm (0 =
// invalid), intrinsics scaled to the level's resolution.
struct OdometryLevel {
    GrayImage gray;
    Image<double> depth;
    CameraIntrinsics intrinsics;
};

namespace detail {

inline Image<double> depth_to_mm(const DepthImage& depth, double scale) {
    Image<double> out(depth.width(), depth.height());
    for (std::size_t i = 0; i < depth.data().size(); ++i)
        out.data()[i] = depth.data()[i] * scale;
    return out;
}

inline GrayImage downsample_gray(const GrayImage& g) {
    GrayImage out(g.width() / 2, g.height() / 2);
    for (int y = 0; y < out.height(); ++y)
        for (int x = 0; x < out.width(); ++x)
            out.at(x, y) = 0.25 * (g.at(2 * x, 2 * y) + g.at(2 * x + 1, 2 * y) +
                                   g.at(2 * x, 2 * y + 1) + g.at(2 * x + 1, 2 * y + 1));
    return out;
}

// Median of the valid (nonzero) depths per 2x2 block; never mixes foreground
// with background the way averaging would.
inline Image<double> downsample_depth(const Image<double>& d) {
    Image<double> out(d.width() / 2, d.height() / 2);
    for (int y = 0; y < out.height(); ++y)
        for (int x = 0; x < out.width(); ++x) {
            double vals[4];
            int n = 0;
            for (int dy = 0; dy < 2; ++dy)
                for (int dx = 0; dx < 2; ++dx) {
                    const double v = d.at(2 * x + dx, 2 * y + dy);
                    if (v > 0.0) vals[n++] = v;
                }
            if (n == 0) {
                out.at(x, y) = 0.0;
                continue;
            }
            std::sort(vals, vals + n);
            out.at(x, y) = (n % 2 == 1) ? vals[n / 2] : 0.5 * (vals[n / 2 - 1] + vals[n / 2]);
        }
    return out;
}

}  // namespace detail

// Level 0 is the finest (input) resolution.
inline std::vector<OdometryLevel> build_odometry_pyramid(const RgbdFrame& frame,
                                                         const OdometryConfig& config) {
    frame.validate();
    std::vector<OdometryLevel> pyramid;
    pyramid.push_back({to_grayscale(frame.color),
                       detail::depth_to_mm(frame.depth, config.depth_scale), frame.intrinsics});
    for (int level = 1; level < config.pyramid_levels; ++level) {
        const OdometryLevel& prev = pyramid.back();
        if (prev.gray.width() < 8 || prev.gray.height() < 8)
            throw InputError("build_odometry_pyramid: image too small for requested levels");
        pyramid.push_back({detail::downsample_gray(prev.gray),
                           detail::downsample_depth(prev.depth), prev.intrinsics.halved()});
    }
    return pyramid;
}

// Bilinear sample carrying the exact in-cell gradient, so analytic Jacobians
// and finite differences of the same interpolant agree.
struct BilinearSample {
    double value = 0.0;
    double du = 0.0;
    double dv = 0.0;
    bool valid = false;
};

namespace detail {

inline BilinearSample sample_gray(const GrayImage& img, double u, double v) {
    const int x0 = static_cast<int>(std::floor(u));
    const int y0 = static_cast<int>(std::floor(v));
    const double a = u - x0;
    const double b = v - y0;
    const double f00 = img.at(x0, y0), f10 = img.at(x0 + 1, y0);
    const double f01 = img.at(x0, y0 + 1), f11 = img.at(x0 + 1, y0 + 1);
    BilinearSample s;
    s.value = (1 - a) * (1 - b) * f00 + a * (1 - b) * f10 + (1 - a) * b * f01 + a * b * f11;
    s.du = (1 - b) * (f10 - f00) + b * (f11 - f01);
    s.dv = (1 - a) * (f01 - f00) + a * (f11 - f10);
    s.valid = true;
    return s;
}

// Valid only when all four neighbors carry depth: a residual built on a
// partially valid cell would have a discontinuous derivative.
inline BilinearSample sample_depth(const Image<double>& img, double u, double v) {
    const int x0 = static_cast<int>(std::floor(u));
    const int y0 = static_cast<int>(std::floor(v));
    const double f00 = img.at(x0, y0), f10 = img.at(x0 + 1, y0);
    const double f01 = img.at(x0, y0 + 1), f11 = img.at(x0 + 1, y0 + 1);
    BilinearSample s;
    if (f00 <= 0.0 || f10 <= 0.0 || f01 <= 0.0 || f11 <= 0.0) return s;
    const double a = u - x0;
    const double b = v - y0;
    s.value = (1 - a) * (1 - b) * f00 + a * (1 - b) * f10 + (1 - a) * b * f01 + a * b * f11;
    s.du = (1 - b) * (f10 - f00) + b * (f11 - f01);
    s.dv = (1 - a) * (f01 - f00) + a * (f11 - f10);
    s.valid = true;
    return s;
}

}  // namespace detail

// Photometric + geometric residual pair for one source pixel under T, with
// analytic Jacobians with respect to a left perturbation exp(xi^)*T, twist
// layout [omega, v]. The pair is all-or-nothing: if either residual is
// ungateable the whole pair is skipped.
struct ResidualEval {
    bool valid = false;
    double r_photo = 0.0;
    double r_geo = 0.0;
    Twist j_photo = Twist::Zero();
    Twist j_geo = Twist::Zero();
    Eigen::Vector2d target_pixel = Eigen::Vector2d::Zero();
};

inline ResidualEval evaluate_residual(const OdometryLevel& source, const OdometryLevel& target,
                                      const RigidTransform& t, int x, int y,
                                      const OdometryConfig& config) {
    ResidualEval out;
    const double zs = source.depth.at(x, y);
    if (zs <= 0.0 || zs < config.z_range.min_mm || zs > config.z_range.max_mm) return out;
    const CameraIntrinsics& ks = source.intrinsics;
    const Vec3 ps((x - ks.cx) * zs / ks.fx, (y - ks.cy) * zs / ks.fy, zs);
    const Vec3 pt = t.apply(ps);
    if (pt.z() <= 1e-9) return out;

    const CameraIntrinsics& kt = target.intrinsics;
    const double zinv = 1.0 / pt.z();
    const double u = kt.fx * pt.x() * zinv + kt.cx;
    const double v = kt.fy * pt.y() * zinv + kt.cy;
    if (!(u >= 0.0 && u < kt.width - 1 && v >= 0.0 && v < kt.height - 1)) return out;

    const BilinearSample gi = detail::sample_gray(target.gray, u, v);
    const BilinearSample gd = detail::sample_depth(target.depth, u, v);
    if (!gd.valid) return out;
    const double r_geo = gd.value - pt.z();
    if (std::abs(r_geo) > config.max_depth_diff) return out;

    // Chain rule through projection: du/dP = (fx/Z, 0, -fx X/Z^2),
    // dv/dP = (0, fy/Z, -fy Y/Z^2); dP/domega = -[P]x, dP/dv = I.
    const Vec3 g_photo(gi.du * kt.fx * zinv, gi.dv * kt.fy * zinv,
                       -(gi.du * kt.fx * pt.x() + gi.dv * kt.fy * pt.y()) * zinv * zinv);
    const Vec3 g_geo(gd.du * kt.fx * zinv, gd.dv * kt.fy * zinv,
                     -(gd.du * kt.fx * pt.x() + gd.dv * kt.fy * pt.y()) * zinv * zinv - 1.0);
    out.valid = true;
    out.r_photo = gi.value - source.gray.at(x, y);
    out.r_geo = r_geo;
    out.j_photo.head<3>() = pt.cross(g_photo);
    out.j_photo.tail<3>() = g_photo;
    out.j_geo.head<3>() = pt.cross(g_geo);
    out.j_geo.tail<3>() = g_geo;
    out.target_pixel = Eigen::Vector2d(u, v);
    return out;
}

namespace detail {

struct OdometryLevelEval {
    double energy = 0.0;  // mean weighted squared residual per valid pair
    std::size_t count = 0;
    Eigen::Matrix<double, 6, 6> h = Eigen::Matrix<double, 6, 6>::Zero();
    Twist g = Twist::Zero();
};

inline OdometryLevelEval accumulate_level(const OdometryLevel& source,
                                          const OdometryLevel& target, const RigidTransform& t,
                                          const OdometryConfig& config, bool with_jacobians) {
    OdometryLevelEval acc;
    const double wp = 1.0 - config.lambda;
    const double wg = config.lambda;
    double energy_sum = 0.0;
    for (int y = 0; y < source.gray.height(); ++y) {
        for (int x = 0; x < source.gray.width(); ++x) {
            const ResidualEval r = evaluate_residual(source, target, t, x, y, config);
            if (!r.valid) continue;
            energy_sum += wp * r.r_photo * r.r_photo + wg * r.r_geo * r.r_geo;
            acc.count++;
            if (with_jacobians) {
                acc.h.noalias() += wp * r.j_photo * r.j_photo.transpose() +
                                   wg * r.j_geo * r.j_geo.transpose();
                acc.g.noalias() += wp * r.j_photo * r.r_photo + wg * r.j_geo * r.r_geo;
            }
        }
    }
    if (acc.count > 0) acc.energy = energy_sum / static_cast<double>(acc.count);
    return acc;
}

}  // namespace detail

// Hybrid photometric + geometric Gauss-Newton over a coarse-to-fine pyramid.
// The returned transform maps source-frame camera space onto target-frame
// camera space; its finest-level energy never exceeds the energy at init.
inline OdometryResult rgbd_odometry(const RgbdFrame& source, const RgbdFrame& target,
                                    const OdometryConfig& config = {},
                                    const RigidTransform& init = RigidTransform::identity()) {
    config.validate();
    if (source.color.width() != target.color.width() ||
        source.color.height() != target.color.height())
        throw InputError("rgbd_odometry: frames must share dimensions");
    if (!init.is_valid(1e-6)) throw InputError("rgbd_odometry: invalid init transform");

    const std::vector<OdometryLevel> src = build_odometry_pyramid(source, config);
    const std::vector<OdometryLevel> tgt = build_odometry_pyramid(target, config);

    OdometryResult result;
    RigidTransform t = init;
    for (int level = config.pyramid_levels - 1; level >= 0; --level) {
        const OdometryLevel& s = src[level];
        const OdometryLevel& g = tgt[level];
        detail::OdometryLevelEval cur = detail::accumulate_level(s, g, t, config, true);
        if (level == config.pyramid_levels - 1 && cur.count < 6)
            throw InsufficientOverlapError("rgbd_odometry: only " + std::to_string(cur.count) +
                                           " valid residuals at the coarsest level");
        if (level == 0) {
            // The coarse cascade is a heuristic; the contract is relative to
            // init. Restart from init if the cascade drifted above it.
            const detail::OdometryLevelEval at_init =
                detail::accumulate_level(s, g, init, config, false);
            if (at_init.count >= 6 && (cur.count < 6 || at_init.energy < cur.energy)) {
                t = init;
                cur = detail::accumulate_level(s, g, t, config, true);
            }
        }

        bool level_converged = false;
        for (int iter = 0; iter < config.max_iterations_per_level; ++iter) {
            if (cur.count < 6) break;
            const Twist delta = cur.h.ldlt().solve(-cur.g);
            if (!delta.allFinite()) break;

            bool accepted = false;
            double step = 1.0;
            for (int halving = 0; halving <= 8; ++halving) {
                const RigidTransform cand = RigidTransform::exp(step * delta).compose(t);
                const detail::OdometryLevelEval cand_eval =
                    detail::accumulate_level(s, g, cand, config, true);
                if (cand_eval.count >= 6 && cand_eval.energy <= cur.energy) {
                    const double rel = (cur.energy - cand_eval.energy) /
                                       std::max(cur.energy, 1e-300);
                    t = cand;
                    cur = cand_eval;
                    accepted = true;
                    if (rel < config.convergence_eps) level_converged = true;
                    break;
                }
                step *= 0.5;
            }
            if (!accepted) {
                level_converged = true;
                break;
            }
            if (level_converged) break;
        }

        if (level == 0) {
            result.converged = level_converged;
            result.final_energy = cur.energy;
            result.valid_residuals = cur.count;
        }
    }
    t.orthonormalize();
    result.transform = t;
    return result;
}

}  // namespace rgbdmeas
