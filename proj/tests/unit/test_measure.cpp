#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <set>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Geometry>

#include "rgbdmeas/core/rng.hpp"
#include "rgbdmeas/measure/convex_hull.hpp"
#include "rgbdmeas/measure/measure.hpp"
#include "rgbdmeas/measure/obb.hpp"
#include "rgbdmeas/measure/spline_curve.hpp"
#include "rgbdmeas/meshing/mesh.hpp"

namespace {

using rgbdmeas::BoundaryLoop;
using rgbdmeas::Mat3;
using rgbdmeas::MeasurementReport;
using rgbdmeas::OrientedBox;
using rgbdmeas::Rng;
using rgbdmeas::TriangleMesh;
using rgbdmeas::Vec3;

constexpr double kPi = 3.14159265358979323846;

BoundaryLoop circle_loop(double radius, int count, double z = 0.0) {
    BoundaryLoop loop;
    for (int i = 0; i < count; ++i) {
        const double a = 2.0 * kPi * i / count;
        loop.vertices.push_back(Vec3(radius * std::cos(a), radius * std::sin(a), z));
    }
    return loop;
}

// Polar-grid mesh of the spherical cap x^2+y^2+z^2 = R^2, z >= R-h, built
// from rings of constant polar angle, shifted so the rim sits at z = 0.
TriangleMesh polar_cap_mesh(double sphere_radius, double cap_height, int rings, int sectors) {
    TriangleMesh mesh;
    const double theta_max = std::acos((sphere_radius - cap_height) / sphere_radius);
    mesh.vertices.push_back(Vec3(0, 0, cap_height));
    for (int r = 1; r <= rings; ++r) {
        const double theta = theta_max * r / rings;
        for (int s = 0; s < sectors; ++s) {
            const double phi = 2.0 * kPi * s / sectors;
            mesh.vertices.push_back(Vec3(sphere_radius * std::sin(theta) * std::cos(phi),
                                         sphere_radius * std::sin(theta) * std::sin(phi),
                                         sphere_radius * std::cos(theta) -
                                             (sphere_radius - cap_height)));
        }
    }
    const auto vid = [sectors](int r, int s) { return 1 + (r - 1) * sectors + s % sectors; };
    for (int s = 0; s < sectors; ++s) mesh.faces.push_back({0, vid(1, s), vid(1, s + 1)});
    for (int r = 1; r < rings; ++r) {
        for (int s = 0; s < sectors; ++s) {
            mesh.faces.push_back({vid(r, s), vid(r + 1, s), vid(r + 1, s + 1)});
            mesh.faces.push_back({vid(r, s), vid(r + 1, s + 1), vid(r, s + 1)});
        }
    }
    mesh.validate();
    return mesh;
}

// Flat polar disk mesh in the z = plane_z plane.
TriangleMesh polar_disk_mesh(double radius, int rings, int sectors, double plane_z) {
    TriangleMesh mesh;
    mesh.vertices.push_back(Vec3(0, 0, plane_z));
    for (int r = 1; r <= rings; ++r) {
        const double rho = radius * r / rings;
        for (int s = 0; s < sectors; ++s) {
            const double phi = 2.0 * kPi * s / sectors;
            mesh.vertices.push_back(Vec3(rho * std::cos(phi), rho * std::sin(phi), plane_z));
        }
    }
    const auto vid = [sectors](int r, int s) { return 1 + (r - 1) * sectors + s % sectors; };
    for (int s = 0; s < sectors; ++s) mesh.faces.push_back({0, vid(1, s), vid(1, s + 1)});
    for (int r = 1; r < rings; ++r) {
        for (int s = 0; s < sectors; ++s) {
            mesh.faces.push_back({vid(r, s), vid(r + 1, s), vid(r + 1, s + 1)});
            mesh.faces.push_back({vid(r, s), vid(r + 1, s + 1), vid(r, s + 1)});
        }
    }
    mesh.validate();
    return mesh;
}

Mat3 rotation_from(double angle, const Vec3& axis) {
    return Eigen::AngleAxisd(angle, axis.normalized()).toRotationMatrix();
}

std::vector<Vec3> box_corners(double sx, double sy, double sz) {
    std::vector<Vec3> corners;
    for (int i = 0; i < 8; ++i)
        corners.push_back(Vec3((i & 1 ? 0.5 : -0.5) * sx, (i & 2 ? 0.5 : -0.5) * sy,
                               (i & 4 ? 0.5 : -0.5) * sz));
    return corners;
}

// PCA-aligned bounding box volume, the baseline the minimal box must beat.
double pca_box_volume(const std::vector<Vec3>& points) {
    Vec3 mean = Vec3::Zero();
    for (const Vec3& p : points) mean += p;
    mean /= static_cast<double>(points.size());
    Mat3 cov = Mat3::Zero();
    for (const Vec3& p : points) {
        const Vec3 d = p - mean;
        cov += d * d.transpose();
    }
    Eigen::SelfAdjointEigenSolver<Mat3> eig(cov);
    Vec3 lo = Vec3::Constant(std::numeric_limits<double>::infinity());
    Vec3 hi = -lo;
    for (const Vec3& p : points) {
        const Vec3 local = eig.eigenvectors().transpose() * (p - mean);
        lo = lo.cwiseMin(local);
        hi = hi.cwiseMax(local);
    }
    return (hi - lo).prod();
}

}  // namespace

TEST_CASE("perimeter of a sampled circle matches the circumference", "[measure]") {
    const BoundaryLoop loop = circle_loop(20.0, 100);
    const double length = rgbdmeas::perimeter(loop, 1000);
    REQUIRE(length == Catch::Approx(2.0 * kPi * 20.0).epsilon(1e-3));
}

TEST_CASE("perimeter quadrature is converged in the sample budget", "[measure]") {
    BoundaryLoop triangle;
    triangle.vertices = {Vec3(0, 0, 0), Vec3(10, 0, 0), Vec3(5, 5.0 * std::sqrt(3.0), 0)};
    const double coarse = rgbdmeas::perimeter(triangle, 30);
    const double fine = rgbdmeas::perimeter(triangle, 60);
    REQUIRE(std::isfinite(coarse));
    REQUIRE(std::abs(fine - coarse) <= 1e-6 * std::abs(fine));
}

TEST_CASE("perimeter of collinear points is finite and spans the segment twice", "[measure]") {
    BoundaryLoop line;
    line.vertices = {Vec3(0, 0, 0), Vec3(5, 0, 0), Vec3(10, 0, 0)};
    const double length = rgbdmeas::perimeter(line, 30);
    REQUIRE(std::isfinite(length));
    REQUIRE(length >= 2.0 * 10.0);
}

TEST_CASE("perimeter enforces the sample budget precondition", "[measure]") {
    const BoundaryLoop loop = circle_loop(10.0, 50);
    REQUIRE_THROWS_AS(rgbdmeas::perimeter(loop, 499), rgbdmeas::InputError);
    REQUIRE_NOTHROW(rgbdmeas::perimeter(loop, 500));
}

TEST_CASE("periodic spline interpolates its control loop", "[measure]") {
    const BoundaryLoop loop = circle_loop(7.0, 12);
    const rgbdmeas::PeriodicCubicSpline spline(loop.vertices);
    double t = 0.0;
    for (std::size_t i = 0; i < loop.size(); ++i) {
        REQUIRE((spline.evaluate(t) - loop.vertices[i]).norm() < 1e-9);
        t += (loop.vertices[(i + 1) % loop.size()] - loop.vertices[i]).norm();
    }
    // Wrapping by a full period changes nothing.
    REQUIRE((spline.evaluate(0.0) - spline.evaluate(spline.total_parameter())).norm() < 1e-9);
}

TEST_CASE("perimeter is invariant under rigid motion", "[measure]") {
    const BoundaryLoop loop = circle_loop(15.0, 64);
    const double base = rgbdmeas::perimeter(loop, 640);
    const Mat3 rot = rotation_from(0.83, Vec3(1, -2, 0.5));
    const Vec3 shift(12.0, -7.0, 30.0);
    BoundaryLoop moved;
    for (const Vec3& v : loop.vertices) moved.vertices.push_back(rot * v + shift);
    const double transformed = rgbdmeas::perimeter(moved, 640);
    REQUIRE(transformed == Catch::Approx(base).epsilon(1e-9));
}

TEST_CASE("labeled surface area of a unit square is exact", "[measure]") {
    TriangleMesh mesh;
    mesh.vertices = {Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(1, 1, 0), Vec3(0, 1, 0)};
    mesh.faces = {{0, 1, 2}, {0, 2, 3}};
    mesh.vertex_labels = {1, 1, 1, 1};
    REQUIRE(rgbdmeas::surface_area(mesh, 1) == Catch::Approx(1.0).margin(1e-15));
}

TEST_CASE("labeled surface area of a tessellated cap matches the analytic area", "[measure]") {
    TriangleMesh cap = polar_cap_mesh(25.0, 5.0, 64, 64);
    cap.vertex_labels.assign(cap.vertices.size(), 1);
    const double area = rgbdmeas::surface_area(cap, 1);
    REQUIRE(area == Catch::Approx(2.0 * kPi * 25.0 * 5.0).epsilon(0.01));
}

TEST_CASE("surface area is additive over components when filtering is off", "[measure]") {
    TriangleMesh mesh;
    // Two separated unit squares; the second is half-size.
    mesh.vertices = {Vec3(0, 0, 0), Vec3(2, 0, 0),  Vec3(2, 2, 0),  Vec3(0, 2, 0),
                     Vec3(10, 0, 0), Vec3(11, 0, 0), Vec3(11, 1, 0), Vec3(10, 1, 0)};
    mesh.faces = {{0, 1, 2}, {0, 2, 3}, {4, 5, 6}, {4, 6, 7}};
    mesh.vertex_labels.assign(8, 1);
    REQUIRE(rgbdmeas::surface_area(mesh, 1, true) == Catch::Approx(4.0).margin(1e-12));
    REQUIRE(rgbdmeas::surface_area(mesh, 1, false) == Catch::Approx(5.0).margin(1e-12));
}

TEST_CASE("surface area reports empty regions", "[measure]") {
    TriangleMesh mesh;
    mesh.vertices = {Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0)};
    mesh.faces = {{0, 1, 2}};
    mesh.vertex_labels = {0, 0, 0};
    REQUIRE_THROWS_AS(rgbdmeas::surface_area(mesh, 1), rgbdmeas::EmptyRegionError);
}

TEST_CASE("box dimensions of an axis aligned box are exact", "[measure]") {
    const std::vector<Vec3> corners = box_corners(50.0, 30.0, 10.0);
    const std::array<double, 3> dims = rgbdmeas::box_dimensions(corners);
    REQUIRE(dims[0] == Catch::Approx(50.0).margin(1e-9));
    REQUIRE(dims[1] == Catch::Approx(30.0).margin(1e-9));
    REQUIRE(dims[2] == Catch::Approx(10.0).margin(1e-9));
}

TEST_CASE("box dimensions are invariant under rotation", "[measure]") {
    const std::vector<Vec3> corners = box_corners(50.0, 30.0, 10.0);
    const Mat3 rot = rotation_from(1.13, Vec3(0.3, 0.8, -0.5));
    const Vec3 shift(7.0, -3.0, 11.0);
    std::vector<Vec3> moved;
    for (const Vec3& c : corners) moved.push_back(rot * c + shift);
    const std::array<double, 3> dims = rgbdmeas::box_dimensions(moved);
    REQUIRE(dims[0] == Catch::Approx(50.0).epsilon(1e-6));
    REQUIRE(dims[1] == Catch::Approx(30.0).epsilon(1e-6));
    REQUIRE(dims[2] == Catch::Approx(10.0).epsilon(1e-6));
}

TEST_CASE("box dimensions handle coplanar and degenerate inputs", "[measure]") {
    // Coplanar rectangle with interior samples.
    std::vector<Vec3> plane;
    Rng rng(31u);
    for (int i = 0; i <= 8; ++i)
        for (int j = 0; j <= 4; ++j) plane.push_back(Vec3(5.0 * i, 5.0 * j, 3.0));
    for (int i = 0; i < 40; ++i)
        plane.push_back(Vec3(rng.uniform(0.0, 40.0), rng.uniform(0.0, 20.0), 3.0));
    const std::array<double, 3> flat = rgbdmeas::box_dimensions(plane);
    REQUIRE(flat[0] == Catch::Approx(40.0).margin(1e-9));
    REQUIRE(flat[1] == Catch::Approx(20.0).margin(1e-9));
    REQUIRE(flat[2] <= 1e-9);

    // Collinear, two-point, and single-point sets.
    const std::array<double, 3> seg =
        rgbdmeas::box_dimensions({Vec3(0, 0, 0), Vec3(1, 1, 1), Vec3(3, 3, 3), Vec3(5, 5, 5)});
    REQUIRE(seg[0] == Catch::Approx(5.0 * std::sqrt(3.0)).margin(1e-9));
    REQUIRE(seg[1] <= 1e-9);
    REQUIRE(seg[2] <= 1e-9);
    const std::array<double, 3> pair = rgbdmeas::box_dimensions({Vec3(0, 0, 0), Vec3(0, 0, 4)});
    REQUIRE(pair[0] == Catch::Approx(4.0).margin(1e-12));
    REQUIRE(pair[1] <= 1e-12);
    const std::array<double, 3> single = rgbdmeas::box_dimensions({Vec3(1, 2, 3)});
    REQUIRE(single[0] == 0.0);
    REQUIRE_THROWS_AS(rgbdmeas::box_dimensions({}), rgbdmeas::InputError);
}

TEST_CASE("minimal box encloses the points and beats the PCA baseline", "[measure]") {
    for (int trial = 0; trial < 100; ++trial) {
        Rng rng(1000u + static_cast<std::uint64_t>(trial));
        const int count = rng.uniform_int(20, 80);
        // Anisotropic cloud in a rotated frame so PCA is a meaningful baseline.
        const Mat3 rot = rotation_from(rng.uniform(0.0, 3.0),
                                       Vec3(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0),
                                            rng.uniform(-1.0, 1.0) + 1.5));
        std::vector<Vec3> points;
        for (int i = 0; i < count; ++i)
            points.push_back(rot * Vec3(rng.uniform(-20.0, 20.0), rng.uniform(-8.0, 8.0),
                                        rng.gaussian() * 2.0));
        const OrientedBox box = rgbdmeas::minimal_volume_obb(points);
        box.validate();
        for (const Vec3& p : points) REQUIRE(box.contains(p, 1e-9));
        REQUIRE(box.volume() <= pca_box_volume(points) * (1.0 + 1e-12) + 1e-12);

        // Projection widths along random directions never exceed the box's.
        for (int d = 0; d < 10; ++d) {
            Vec3 dir(rng.gaussian(), rng.gaussian(), rng.gaussian());
            if (dir.norm() < 1e-6) continue;
            dir.normalize();
            double lo = std::numeric_limits<double>::infinity(), hi = -lo;
            for (const Vec3& p : points) {
                lo = std::min(lo, dir.dot(p));
                hi = std::max(hi, dir.dot(p));
            }
            double box_width = 0.0;
            for (int k = 0; k < 3; ++k)
                box_width += 2.0 * box.half_extents(k) * std::abs(dir.dot(box.axes.col(k)));
            REQUIRE(hi - lo <= box_width + 1e-9);
        }
    }
}

TEST_CASE("convex hull of a cube is its surface", "[measure]") {
    std::vector<Vec3> pts = box_corners(2.0, 2.0, 2.0);
    // Interior and on-edge points must not join the hull vertex set.
    pts.push_back(Vec3(0, 0, 0));
    pts.push_back(Vec3(0.2, -0.3, 0.1));
    const rgbdmeas::ConvexHull hull = rgbdmeas::convex_hull(pts);
    REQUIRE(hull.vertices.size() == 8);
    REQUIRE(hull.faces.size() == 12);
    for (int v : hull.vertices) REQUIRE(v < 8);
    // Every face normal points away from the origin (the cube center).
    for (const auto& f : hull.faces) {
        const Vec3 n = (pts[static_cast<std::size_t>(f[1])] - pts[static_cast<std::size_t>(f[0])])
                           .cross(pts[static_cast<std::size_t>(f[2])] -
                                  pts[static_cast<std::size_t>(f[0])]);
        REQUIRE(n.dot(pts[static_cast<std::size_t>(f[0])]) > 0.0);
    }
}

TEST_CASE("convex hull contains every input point", "[measure]") {
    Rng rng(404u);
    std::vector<Vec3> pts;
    for (int i = 0; i < 400; ++i)
        pts.push_back(Vec3(rng.gaussian() * 8.0, rng.gaussian() * 5.0, rng.gaussian() * 2.0));
    const rgbdmeas::ConvexHull hull = rgbdmeas::convex_hull(pts);
    for (const Vec3& p : pts) {
        for (const auto& f : hull.faces) {
            REQUIRE(rgbdmeas::predicates::orient3d(pts[static_cast<std::size_t>(f[0])],
                                                   pts[static_cast<std::size_t>(f[1])],
                                                   pts[static_cast<std::size_t>(f[2])], p) >= 0);
        }
    }
}

TEST_CASE("measure region of a flat labeled disk matches the analytic values", "[measure]") {
    TriangleMesh disk = polar_disk_mesh(20.0, 32, 64, 5.0);
    disk.vertex_labels.assign(disk.vertices.size(), 1);
    const MeasurementReport report = rgbdmeas::measure_region(disk, 1);
    REQUIRE(report.perimeter_mm == Catch::Approx(2.0 * kPi * 20.0).epsilon(0.02));
    REQUIRE(report.surface_area_mm2 == Catch::Approx(kPi * 400.0).epsilon(0.02));
    REQUIRE(report.height_mm == Catch::Approx(40.0).epsilon(0.02));
    REQUIRE(report.width_mm == Catch::Approx(40.0).epsilon(0.02));
    REQUIRE(report.depth_mm <= 1e-9);
    REQUIRE(report.loop_vertex_count == 64);
    REQUIRE(report.region_face_count == static_cast<long>(disk.faces.size()));
}

TEST_CASE("measure region measurements are invariant under rigid motion", "[measure]") {
    TriangleMesh disk = polar_disk_mesh(20.0, 16, 48, 0.0);
    disk.vertex_labels.assign(disk.vertices.size(), 1);
    const MeasurementReport base = rgbdmeas::measure_region(disk, 1);

    const Mat3 rot = rotation_from(0.62, Vec3(0.2, 1.0, -0.7));
    const Vec3 shift(4.0, 9.0, -2.0);
    TriangleMesh moved = disk;
    for (Vec3& v : moved.vertices) v = rot * v + shift;
    const MeasurementReport other = rgbdmeas::measure_region(moved, 1);
    REQUIRE(other.perimeter_mm == Catch::Approx(base.perimeter_mm).epsilon(1e-9));
    REQUIRE(other.surface_area_mm2 == Catch::Approx(base.surface_area_mm2).epsilon(1e-9));
    REQUIRE(other.height_mm == Catch::Approx(base.height_mm).epsilon(1e-6));
    REQUIRE(other.width_mm == Catch::Approx(base.width_mm).epsilon(1e-6));
    REQUIRE(other.depth_mm == Catch::Approx(base.depth_mm).margin(1e-6));
}

TEST_CASE("measure region propagates empty region errors", "[measure]") {
    TriangleMesh disk = polar_disk_mesh(10.0, 4, 12, 0.0);
    disk.vertex_labels.assign(disk.vertices.size(), 0);
    REQUIRE_THROWS_AS(rgbdmeas::measure_region(disk, 1), rgbdmeas::EmptyRegionError);
    TriangleMesh unlabeled = polar_disk_mesh(10.0, 4, 12, 0.0);
    REQUIRE_THROWS_AS(rgbdmeas::measure_region(unlabeled, 1), rgbdmeas::InputError);
}

TEST_CASE("repeatability statistics match the enumerated pairs", "[measure]") {
    MeasurementReport a, b, c;
    a.perimeter_mm = 100.0;
    b.perimeter_mm = 102.0;
    c.perimeter_mm = 104.0;
    a.surface_area_mm2 = b.surface_area_mm2 = c.surface_area_mm2 = 50.0;
    const rgbdmeas::RepeatabilityStats stats = rgbdmeas::repeatability({a, b, c});
    REQUIRE(stats.runs == 3);
    REQUIRE(stats.perimeter_mm.mean == Catch::Approx(102.0).margin(1e-12));
    REQUIRE(stats.perimeter_mm.max_pairwise_diff == Catch::Approx(4.0).margin(1e-12));
    REQUIRE(stats.perimeter_mm.mean_pairwise_diff == Catch::Approx(8.0 / 3.0).margin(1e-12));
    REQUIRE(stats.surface_area_mm2.max_pairwise_diff == 0.0);
    REQUIRE(stats.surface_area_mm2.mean_pairwise_diff == 0.0);

    const rgbdmeas::RepeatabilityStats same = rgbdmeas::repeatability({a, a, a, a, a});
    REQUIRE(same.perimeter_mm.max_pairwise_diff == 0.0);
    REQUIRE(same.perimeter_mm.mean == Catch::Approx(100.0).margin(1e-12));

    REQUIRE_THROWS_AS(rgbdmeas::repeatability({a}), rgbdmeas::InputError);
    REQUIRE_THROWS_AS(rgbdmeas::repeatability({}), rgbdmeas::InputError);
}
