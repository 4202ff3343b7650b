#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <map>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "rgbdmeas/core/error.hpp"
#include "rgbdmeas/core/transform.hpp"
#include "rgbdmeas/measure/convex_hull.hpp"

namespace rgbdmeas {

// Oriented box: axes columns are unit length and right-handed, and
// half_extents[k] measures along column k, sorted descending.
struct OrientedBox {
    Vec3 center = Vec3::Zero();
    Mat3 axes = Mat3::Identity();
    Vec3 half_extents = Vec3::Zero();

    void validate() const {
        if (!center.allFinite() || !axes.allFinite() || !half_extents.allFinite())
            throw InputError("OrientedBox: non-finite field");
        if ((axes * axes.transpose() - Mat3::Identity()).norm() > 1e-9)
            throw InputError("OrientedBox: axes must be orthonormal");
        if (half_extents.minCoeff() < 0.0)
            throw InputError("OrientedBox: negative half extent");
        if (!(half_extents(0) >= half_extents(1) && half_extents(1) >= half_extents(2)))
            throw InputError("OrientedBox: half extents must be sorted descending");
    }

    bool contains(const Vec3& p, double margin = 0.0) const {
        const Vec3 local = axes.transpose() * (p - center);
        return std::abs(local(0)) <= half_extents(0) + margin &&
               std::abs(local(1)) <= half_extents(1) + margin &&
               std::abs(local(2)) <= half_extents(2) + margin;
    }

    double volume() const { return 8.0 * half_extents.prod(); }
};

namespace detail {

// 2D monotone chain hull, counterclockwise, no repeated endpoint.
inline std::vector<Eigen::Vector2d> convex_hull_2d(std::vector<Eigen::Vector2d> pts) {
    std::sort(pts.begin(), pts.end(), [](const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
        return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
    });
    pts.erase(std::unique(pts.begin(), pts.end(),
                          [](const Eigen::Vector2d& a, const Eigen::Vector2d& b) { return a == b; }),
              pts.end());
    const std::size_t n = pts.size();
    if (n < 3) return pts;
    const auto cross = [](const Eigen::Vector2d& o, const Eigen::Vector2d& a,
                          const Eigen::Vector2d& b) {
        return (a.x() - o.x()) * (b.y() - o.y()) - (a.y() - o.y()) * (b.x() - o.x());
    };
    std::vector<Eigen::Vector2d> hull(2 * n);
    std::size_t k = 0;
    for (std::size_t i = 0; i < n; ++i) {
        while (k >= 2 && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0.0) --k;
        hull[k++] = pts[i];
    }
    const std::size_t lower = k + 1;
    for (std::size_t i = n - 1; i-- > 0;) {
        while (k >= lower && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0.0) --k;
        hull[k++] = pts[i];
    }
    hull.resize(k - 1);
    return hull;
}

// Smallest-area enclosing rectangle of 2D points. One rectangle side is
// collinear with a hull edge, which makes the search exact over that family
// and exact for rectangular inputs. Returns the two unit directions and
// projection intervals.
struct Rectangle2d {
    Eigen::Vector2d dir_u = Eigen::Vector2d::UnitX();
    Eigen::Vector2d dir_v = Eigen::Vector2d::UnitY();
    double min_u = 0.0, max_u = 0.0, min_v = 0.0, max_v = 0.0;
    double area() const { return (max_u - min_u) * (max_v - min_v); }
};

inline Rectangle2d min_area_rectangle(const std::vector<Eigen::Vector2d>& pts) {
    Rectangle2d best;
    const std::vector<Eigen::Vector2d> hull = convex_hull_2d(pts);
    if (hull.empty()) return best;
    if (hull.size() == 1) {
        best.min_u = best.max_u = hull[0].x();
        best.min_v = best.max_v = hull[0].y();
        return best;
    }
    std::vector<Eigen::Vector2d> dirs;
    if (hull.size() == 2) {
        dirs.push_back((hull[1] - hull[0]).normalized());
    } else {
        for (std::size_t i = 0; i < hull.size(); ++i) {
            const Eigen::Vector2d edge = hull[(i + 1) % hull.size()] - hull[i];
            const double len = edge.norm();
            if (len > 0.0) dirs.push_back(edge / len);
        }
    }
    double best_area = std::numeric_limits<double>::infinity();
    for (const Eigen::Vector2d& u : dirs) {
        const Eigen::Vector2d v(-u.y(), u.x());
        double min_u = std::numeric_limits<double>::infinity(), max_u = -min_u;
        double min_v = min_u, max_v = -min_u;
        for (const Eigen::Vector2d& p : hull) {
            min_u = std::min(min_u, p.dot(u));
            max_u = std::max(max_u, p.dot(u));
            min_v = std::min(min_v, p.dot(v));
            max_v = std::max(max_v, p.dot(v));
        }
        const double area = (max_u - min_u) * (max_v - min_v);
        if (area < best_area) {
            best_area = area;
            best = {u, v, min_u, max_u, min_v, max_v};
        }
    }
    return best;
}

// Orthonormal pair spanning the plane orthogonal to the unit normal.
inline std::pair<Vec3, Vec3> plane_basis(const Vec3& normal) {
    const Vec3 seed = std::abs(normal.x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitY();
    const Vec3 u = normal.cross(seed).normalized();
    return {u, normal.cross(u)};
}

}  // namespace detail

// Minimal-volume oriented box over the candidate family of convex hull face
// normals plus the PCA axes, with an exact in-plane rectangle search per
// candidate. The result is therefore never worse than the PCA-aligned box
// and exact whenever the point set is itself a box.
inline OrientedBox minimal_volume_obb(const std::vector<Vec3>& points) {
    if (points.empty()) throw InputError("minimal_volume_obb: empty point set");
    for (const Vec3& p : points)
        if (!p.allFinite()) throw InputError("minimal_volume_obb: non-finite point");

    Vec3 mean = Vec3::Zero();
    for (const Vec3& p : points) mean += p;
    mean /= static_cast<double>(points.size());
    Mat3 covariance = Mat3::Zero();
    for (const Vec3& p : points) {
        const Vec3 d = p - mean;
        covariance += d * d.transpose();
    }
    Eigen::SelfAdjointEigenSolver<Mat3> eig(covariance);
    const Mat3 pca = eig.eigenvectors();

    // Candidate normals: deduplicated hull face normals when the points
    // span 3D, and always the three PCA axes (which also carry the
    // degenerate planar and collinear cases).
    std::vector<Vec3> normals;
    std::vector<Vec3> support;
    const auto add_normal = [&normals](const Vec3& n) {
        const double len = n.norm();
        if (!(len > 1e-12)) return;
        Vec3 unit = n / len;
        for (int c = 0; c < 3; ++c) {
            if (unit(c) != 0.0) {
                if (unit(c) < 0.0) unit = -unit;
                break;
            }
        }
        for (const Vec3& seen : normals)
            if ((seen - unit).cwiseAbs().maxCoeff() < 1e-12) return;
        normals.push_back(unit);
    };

    const auto simplex = detail::find_initial_simplex(points);
    if (simplex) {
        const ConvexHull hull = convex_hull(points);
        support.reserve(hull.vertices.size());
        for (int v : hull.vertices) support.push_back(points[static_cast<std::size_t>(v)]);
        for (const auto& f : hull.faces) {
            const Vec3 n = (points[static_cast<std::size_t>(f[1])] - points[static_cast<std::size_t>(f[0])])
                               .cross(points[static_cast<std::size_t>(f[2])] -
                                      points[static_cast<std::size_t>(f[0])]);
            add_normal(n);
        }
    } else {
        support = points;
    }
    for (int c = 0; c < 3; ++c) add_normal(pca.col(c));

    // Degenerate sets make raw volume a noise-dominated objective: every
    // candidate of a flat cloud has volume near zero and the ordering would
    // follow rounding error. Extents far below the dominant one are clamped
    // to zero and candidates compare lexicographically by volume, then
    // footprint area, then longest extent, which reduces to minimal area
    // for planar sets and minimal length for collinear ones.
    const auto score_of = [](double a, double b, double c) {
        std::array<double, 3> e = {a, b, c};
        std::sort(e.begin(), e.end(), std::greater<>());
        for (int k = 1; k < 3; ++k)
            if (e[static_cast<std::size_t>(k)] < 1e-9 * e[0]) e[static_cast<std::size_t>(k)] = 0.0;
        return std::array<double, 3>{e[0] * e[1] * e[2], e[0] * e[1], e[0]};
    };

    OrientedBox best;
    std::array<double, 3> best_score = {std::numeric_limits<double>::infinity(), 0.0, 0.0};
    for (const Vec3& normal : normals) {
        const auto [u, v] = detail::plane_basis(normal);
        std::vector<Eigen::Vector2d> projected;
        projected.reserve(support.size());
        double min_n = std::numeric_limits<double>::infinity(), max_n = -min_n;
        for (const Vec3& p : support) {
            const Vec3 d = p - mean;
            projected.emplace_back(d.dot(u), d.dot(v));
            min_n = std::min(min_n, d.dot(normal));
            max_n = std::max(max_n, d.dot(normal));
        }
        const detail::Rectangle2d rect = detail::min_area_rectangle(projected);
        const std::array<double, 3> score =
            score_of(rect.max_u - rect.min_u, rect.max_v - rect.min_v, max_n - min_n);
        if (score < best_score) {
            best_score = score;
            const Vec3 world_u = rect.dir_u.x() * u + rect.dir_u.y() * v;
            const Vec3 world_v = rect.dir_v.x() * u + rect.dir_v.y() * v;
            best.axes.col(0) = world_u;
            best.axes.col(1) = world_v;
            best.axes.col(2) = normal;
            best.center = mean + world_u * 0.5 * (rect.min_u + rect.max_u) +
                          world_v * 0.5 * (rect.min_v + rect.max_v) +
                          normal * 0.5 * (min_n + max_n);
            best.half_extents = Vec3(0.5 * (rect.max_u - rect.min_u),
                                     0.5 * (rect.max_v - rect.min_v), 0.5 * (max_n - min_n));
        }
    }

    // Re-span the chosen frame over every input point so the box encloses
    // the set even if a point sits exactly on a hull face.
    Vec3 lo = Vec3::Constant(std::numeric_limits<double>::infinity());
    Vec3 hi = -lo;
    for (const Vec3& p : points) {
        const Vec3 local = best.axes.transpose() * (p - mean);
        lo = lo.cwiseMin(local);
        hi = hi.cwiseMax(local);
    }
    best.center = mean + best.axes * (0.5 * (lo + hi));
    best.half_extents = 0.5 * (hi - lo);

    // Sort axes by extent descending and keep the frame right-handed.
    std::array<int, 3> idx = {0, 1, 2};
    std::sort(idx.begin(), idx.end(), [&best](int a, int b) {
        return best.half_extents(a) > best.half_extents(b);
    });
    Mat3 sorted_axes;
    Vec3 sorted_half;
    for (int k = 0; k < 3; ++k) {
        sorted_axes.col(k) = best.axes.col(idx[static_cast<std::size_t>(k)]);
        sorted_half(k) = best.half_extents(idx[static_cast<std::size_t>(k)]);
    }
    if (sorted_axes.determinant() < 0.0) sorted_axes.col(2) = -sorted_axes.col(2);
    best.axes = sorted_axes;
    best.half_extents = sorted_half;
    best.validate();
    return best;
}

// Full box extents sorted descending: (height, width, depth).
inline std::array<double, 3> box_dimensions(const std::vector<Vec3>& points) {
    const OrientedBox box = minimal_volume_obb(points);
    return {2.0 * box.half_extents(0), 2.0 * box.half_extents(1), 2.0 * box.half_extents(2)};
}

}  // namespace rgbdmeas
