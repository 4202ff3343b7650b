#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <vector>

#include "rgbdmeas/core/error.hpp"
#include "rgbdmeas/core/image.hpp"
#include "rgbdmeas/core/point_cloud.hpp"
#include "rgbdmeas/core/rng.hpp"
#include "rgbdmeas/core/transform.hpp"
#include "rgbdmeas/measure/report.hpp"

namespace rgbdmeas {

// Spherical-cap depression in the base plane: z = 0 at the rim circle,
// z = -depth at the center. depth = 0 degenerates to a flat labeled disk.
struct Crater {
    Eigen::Vector2d center = Eigen::Vector2d::Zero();
    double rim_radius = 20.0;
    double depth = 5.0;

    // R = (r^2 + h^2) / (2h), the radius of the sphere the cap lives on.
    double sphere_radius() const {
        return (rim_radius * rim_radius + depth * depth) / (2.0 * depth);
    }
};

// Square fiducial outline lying in the base plane.
struct MarkerPlacement {
    int id = 0;
    Eigen::Vector2d center = Eigen::Vector2d::Zero();
    double side_mm = 13.0;
    double angle_rad = 0.0;
};

namespace detail {

// Single octave of lattice value noise with smoothstep interpolation.
inline double value_noise(std::uint64_t seed, double x, double y, double cell) {
    const double gx = x / cell;
    const double gy = y / cell;
    const double fx = std::floor(gx);
    const double fy = std::floor(gy);
    const auto ix = static_cast<std::int64_t>(fx);
    const auto iy = static_cast<std::int64_t>(fy);
    auto lattice = [&](std::int64_t a, std::int64_t b) {
        return (hash_coords(seed, a, b) >> 11) * 0x1.0p-53;
    };
    const double v00 = lattice(ix, iy), v10 = lattice(ix + 1, iy);
    const double v01 = lattice(ix, iy + 1), v11 = lattice(ix + 1, iy + 1);
    double tx = gx - fx, ty = gy - fy;
    tx = tx * tx * (3.0 - 2.0 * tx);
    ty = ty * ty * (3.0 - 2.0 * ty);
    return (1 - tx) * (1 - ty) * v00 + tx * (1 - ty) * v10 + (1 - tx) * ty * v01 + tx * ty * v11;
}

inline double fbm_noise(std::uint64_t seed, double x, double y, double base_cell, int octaves) {
    double sum = 0.0, amp = 1.0, norm = 0.0, cell = base_cell;
    for (int o = 0; o < octaves; ++o) {
        sum += amp * value_noise(seed + static_cast<std::uint64_t>(o) * 7919, x, y, cell);
        norm += amp;
        amp *= 0.5;
        cell *= 0.5;
    }
    return sum / norm;
}

}  // namespace detail

// Analytic height-field phantom: a textured base plane (z = 0, normal +z)
// with crater depressions, a labeled region (the union of crater disks), and
// two square fiducials. Everything about it has a closed form.
struct SyntheticScene {
    double half_extent_mm = 75.0;  // plane spans [-half, half]^2
    std::vector<Crater> craters;
    std::vector<MarkerPlacement> markers;
    std::uint64_t texture_seed = 1;
    double texture_cell_mm = 8.0;
    int texture_octaves = 4;

    bool in_domain(double x, double y) const {
        return std::abs(x) <= half_extent_mm && std::abs(y) <= half_extent_mm;
    }

    // Surface height; craters superpose by min, so overlaps stay well defined.
    double height(double x, double y) const {
        double z = 0.0;
        for (const Crater& c : craters) {
            if (c.depth <= 0.0) continue;
            const double rho_sq = (Eigen::Vector2d(x, y) - c.center).squaredNorm();
            if (rho_sq >= c.rim_radius * c.rim_radius) continue;
            const double big_r = c.sphere_radius();
            const double cz = big_r - c.depth;
            z = std::min(z, cz - std::sqrt(big_r * big_r - rho_sq));
        }
        return z;
    }

    // Outward (+z side) unit normal. On a cap the normal of the depression
    // surface points at the sphere center, which sits above the surface.
    Vec3 normal(double x, double y) const {
        const double z = height(x, y);
        if (z >= 0.0) return Vec3(0, 0, 1);
        for (const Crater& c : craters) {
            if (c.depth <= 0.0) continue;
            const double rho_sq = (Eigen::Vector2d(x, y) - c.center).squaredNorm();
            if (rho_sq >= c.rim_radius * c.rim_radius) continue;
            const double big_r = c.sphere_radius();
            const double cz = big_r - c.depth;
            if (std::abs((cz - std::sqrt(big_r * big_r - rho_sq)) - z) < 1e-12) {
                const Vec3 center3(c.center.x(), c.center.y(), cz);
                return (center3 - Vec3(x, y, z)) / big_r;
            }
        }
        return Vec3(0, 0, 1);
    }

    bool in_region(double x, double y) const {
        for (const Crater& c : craters)
            if ((Eigen::Vector2d(x, y) - c.center).squaredNorm() < c.rim_radius * c.rim_radius)
                return true;
        return false;
    }

    std::array<Vec3, 4> marker_corners_3d(const MarkerPlacement& m) const {
        const double h = m.side_mm / 2.0;
        const double ca = std::cos(m.angle_rad), sa = std::sin(m.angle_rad);
        const Eigen::Vector2d local[4] = {{-h, -h}, {h, -h}, {h, h}, {-h, h}};
        std::array<Vec3, 4> out;
        for (int i = 0; i < 4; ++i) {
            const double lx = local[i].x(), ly = local[i].y();
            out[i] = Vec3(m.center.x() + ca * lx - sa * ly, m.center.y() + sa * lx + ca * ly, 0.0);
        }
        return out;
    }

    // Procedural RGB at a surface location: multi-octave value noise with a
    // ~55% dynamic-range swing (the photometric term needs texture), a tint
    // inside the region, and painted fiducial patterns.
    Rgb8 texture(double x, double y) const {
        for (const MarkerPlacement& m : markers) {
            const double ca = std::cos(m.angle_rad), sa = std::sin(m.angle_rad);
            const double dx = x - m.center.x(), dy = y - m.center.y();
            const double lx = ca * dx + sa * dy;
            const double ly = -sa * dx + ca * dy;
            const double h = m.side_mm / 2.0;
            if (std::abs(lx) <= h && std::abs(ly) <= h) {
                if (std::max(std::abs(lx), std::abs(ly)) > 0.7 * h) return Rgb8{25, 25, 25};
                const double cell = m.side_mm / 4.0;
                const auto qx = static_cast<std::int64_t>(std::floor(lx / cell));
                const auto qy = static_cast<std::int64_t>(std::floor(ly / cell));
                const bool lit = hash_coords(texture_seed ^ 0xabcdULL, qx * 31 + m.id, qy) & 1;
                return lit ? Rgb8{235, 235, 235} : Rgb8{40, 40, 40};
            }
        }
        const double n1 = detail::fbm_noise(texture_seed, x, y, texture_cell_mm, texture_octaves);
        const double n2 =
            detail::fbm_noise(texture_seed + 101, x, y, texture_cell_mm, texture_octaves);
        auto clamp8 = [](double v) {
            return static_cast<std::uint8_t>(std::clamp(v, 0.0, 255.0));
        };
        double r = 80.0 + 140.0 * n1;
        double g = 80.0 + 140.0 * (0.7 * n1 + 0.3 * n2);
        double b = 80.0 + 140.0 * (0.45 * n1 + 0.55 * n2);
        if (in_region(x, y)) {
            r += 30.0;
            g -= 20.0;
            b -= 20.0;
        }
        return Rgb8{clamp8(r), clamp8(g), clamp8(b)};
    }
};

// Paper-scale preset: 150x150 mm plane, one crater (rim 20 mm, depth 5 mm),
// two 13 mm markers on opposite sides of the region.
inline SyntheticScene default_crater_scene() {
    SyntheticScene scene;
    scene.craters = {Crater{Eigen::Vector2d(0, 0), 20.0, 5.0}};
    scene.markers = {MarkerPlacement{0, Eigen::Vector2d(-42.0, 0.0), 13.0, 0.25},
                     MarkerPlacement{1, Eigen::Vector2d(42.0, 0.0), 13.0, -0.4}};
    return scene;
}

// Closed-form oracle: rim perimeter 2*pi*r, spherical-cap area 2*pi*R*h,
// box extents (2r, 2r, h) sorted descending. Single-crater regions only.
inline MeasurementReport analytic_measurements(const SyntheticScene& scene) {
    if (scene.craters.size() != 1)
        throw UnsupportedOracleError(
            "analytic_measurements: closed forms exist for single-crater regions only");
    const Crater& c = scene.craters[0];
    const double r = c.rim_radius;
    const double h = c.depth;
    MeasurementReport report;
    report.perimeter_mm = 2.0 * EIGEN_PI * r;
    report.surface_area_mm2 =
        h > 0.0 ? 2.0 * EIGEN_PI * c.sphere_radius() * h : EIGEN_PI * r * r;
    double dims[3] = {2.0 * r, 2.0 * r, h};
    std::sort(dims, dims + 3, std::greater<>());
    report.height_mm = dims[0];
    report.width_mm = dims[1];
    report.depth_mm = dims[2];
    report.validate();
    return report;
}

// n samples uniform over the base domain, lifted to the surface, with exact
// normals and region labels. Same seed, same cloud.
inline PointCloud sample_ground_truth(const SyntheticScene& scene, std::size_t n,
                                      std::uint64_t seed) {
    if (n < 1) throw InputError("sample_ground_truth: n must be >= 1");
    Rng rng(seed);
    PointCloud cloud;
    cloud.points.reserve(n);
    cloud.normals.reserve(n);
    cloud.labels.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double x = rng.uniform(-scene.half_extent_mm, scene.half_extent_mm);
        const double y = rng.uniform(-scene.half_extent_mm, scene.half_extent_mm);
        cloud.points.emplace_back(x, y, scene.height(x, y));
        cloud.normals.push_back(scene.normal(x, y));
        cloud.labels.push_back(scene.in_region(x, y) ? 1 : 0);
    }
    return cloud;
}

}  // namespace rgbdmeas
