#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <random>

#include "rgbdmeas/core/backproject.hpp"
#include "rgbdmeas/core/depth_filter.hpp"
#include "rgbdmeas/core/normals.hpp"

using namespace rgbdmeas;

namespace {

CameraIntrinsics test_intrinsics() { return CameraIntrinsics(500, 500, 320, 240, 640, 480); }

RgbdFrame frame_with_depth(const CameraIntrinsics& k, std::uint16_t fill) {
    RgbdFrame f;
    f.intrinsics = k;
    f.color = ColorImage(k.width, k.height, Rgb8{128, 128, 128});
    f.depth = DepthImage(k.width, k.height, fill);
    return f;
}

}  // namespace

TEST_CASE("back_project principal point lies on the optical axis", "[core]") {
    auto k = test_intrinsics();
    RgbdFrame f = frame_with_depth(k, 0);
    f.depth.at(320, 240) = 500;
    PointCloud cloud = back_project(f);
    REQUIRE(cloud.size() == 1);
    CHECK(cloud.points[0].isApprox(Vec3(0, 0, 500), 1e-12));
    CHECK(cloud.source_pixels[0].x == 320);
    CHECK(cloud.source_pixels[0].y == 240);
}

TEST_CASE("back_project matches the pinhole model by hand", "[core]") {
    // X = Z*(x-cx)/fx = 1000*(420-320)/500 = 200
    auto k = test_intrinsics();
    RgbdFrame f = frame_with_depth(k, 0);
    f.depth.at(420, 240) = 1000;
    PointCloud cloud = back_project(f, 1.0, {300, 1500});
    REQUIRE(cloud.size() == 1);
    CHECK(cloud.points[0].isApprox(Vec3(200, 0, 1000), 1e-12));
}

TEST_CASE("back_project of an all-zero depth frame is empty", "[core]") {
    RgbdFrame f = frame_with_depth(test_intrinsics(), 0);
    CHECK(back_project(f).empty());
}

TEST_CASE("back_project point count equals pixels with depth in range", "[core]") {
    auto k = test_intrinsics();
    RgbdFrame f = frame_with_depth(k, 0);
    std::mt19937 rng(7);
    std::uniform_int_distribution<int> d(0, 1200);
    int expected = 0;
    for (int y = 0; y < k.height; y += 7)
        for (int x = 0; x < k.width; x += 7) {
            const auto z = static_cast<std::uint16_t>(d(rng));
            f.depth.at(x, y) = z;
            if (z != 0 && z >= 300 && z <= 800) expected++;
        }
    CHECK(back_project(f).size() == static_cast<size_t>(expected));
}

TEST_CASE("back_project carries mask labels and colors", "[core]") {
    auto k = test_intrinsics();
    RgbdFrame f = frame_with_depth(k, 500);
    f.mask = LabelMask(k.width, k.height, 0);
    f.mask->at(10, 20) = 1;
    f.color.at(10, 20) = Rgb8{200, 10, 30};
    PointCloud cloud = back_project(f);
    REQUIRE(cloud.has_labels());
    size_t idx = 20 * 640 + 10;
    CHECK(cloud.labels[idx] == 1);
    CHECK(cloud.colors[idx] == Rgb8{200, 10, 30});
    CHECK(std::count(cloud.labels.begin(), cloud.labels.end(), 1) == 1);
}

TEST_CASE("project returns the optical-axis pixel", "[core]") {
    auto p = project(Vec3(0, 0, 500), test_intrinsics());
    CHECK(p.x == Catch::Approx(320).margin(1e-12));
    CHECK(p.y == Catch::Approx(240).margin(1e-12));
    CHECK(p.z == 500.0);
    CHECK(p.in_frame);
}

TEST_CASE("project inverts the back_project example", "[core]") {
    auto p = project(Vec3(200, 0, 1000), test_intrinsics());
    CHECK(p.x == Catch::Approx(420).margin(1e-12));
    CHECK(p.y == Catch::Approx(240).margin(1e-12));
}

TEST_CASE("project throws behind the camera", "[core]") {
    CHECK_THROWS_AS(project(Vec3(0, 0, -1), test_intrinsics()), BehindCameraError);
}

TEST_CASE("project/back_project round trip over a full frame", "[core]") {
    auto k = test_intrinsics();
    RgbdFrame f = frame_with_depth(k, 0);
    std::mt19937 rng(11);
    std::uniform_int_distribution<int> d(300, 800);
    for (int y = 0; y < k.height; y += 13)
        for (int x = 0; x < k.width; x += 13)
            f.depth.at(x, y) = static_cast<std::uint16_t>(d(rng));
    PointCloud cloud = back_project(f);
    REQUIRE_FALSE(cloud.empty());
    for (size_t i = 0; i < cloud.size(); ++i) {
        auto p = project(cloud.points[i], k);
        CHECK(std::abs(p.x - cloud.source_pixels[i].x) < 1e-9);
        CHECK(std::abs(p.y - cloud.source_pixels[i].y) < 1e-9);
        CHECK(p.z == cloud.points[i].z());
    }
}

TEST_CASE("back_project rejects mismatched dimensions", "[core]") {
    RgbdFrame f = frame_with_depth(test_intrinsics(), 500);
    f.depth = DepthImage(100, 100, 500);
    CHECK_THROWS_AS(back_project(f), InputError);
}

TEST_CASE("fill_depth_holes fills a hole in a constant image", "[core]") {
    DepthImage d(8, 8, 400);
    d.at(4, 4) = 0;
    DepthImage out = fill_depth_holes(d, 3, 1);
    CHECK(out.at(4, 4) == 400);
    for (int y = 0; y < 8; ++y)
        for (int x = 0; x < 8; ++x) CHECK(out.at(x, y) == 400);
}

TEST_CASE("fill_depth_holes leaves an all-zero image unchanged", "[core]") {
    DepthImage d(6, 6, 0);
    DepthImage out = fill_depth_holes(d, 3, 1);
    for (int y = 0; y < 6; ++y)
        for (int x = 0; x < 6; ++x) CHECK(out.at(x, y) == 0);
}

TEST_CASE("fill_depth_holes replaces a ramp hole by the neighbor median", "[core]") {
    DepthImage d(5, 5);
    for (int y = 0; y < 5; ++y)
        for (int x = 0; x < 5; ++x) d.at(x, y) = static_cast<std::uint16_t>(100 * (y * 5 + x + 1));
    d.at(2, 2) = 0;

    // oracle: enumerate the 8 neighbors and take their median
    std::vector<std::uint16_t> nb;
    for (int dy = -1; dy <= 1; ++dy)
        for (int dx = -1; dx <= 1; ++dx)
            if (dx != 0 || dy != 0) nb.push_back(d.at(2 + dx, 2 + dy));
    std::sort(nb.begin(), nb.end());
    const auto expected =
        static_cast<std::uint16_t>(std::lround((nb[3] + nb[4]) / 2.0));

    DepthImage out = fill_depth_holes(d, 3, 1);
    CHECK(out.at(2, 2) == expected);
}

TEST_CASE("fill_depth_holes respects min_valid", "[core]") {
    DepthImage d(7, 7, 0);
    d.at(0, 0) = 500;  // the only valid pixel
    DepthImage out = fill_depth_holes(d, 3, 2);
    CHECK(out.at(1, 1) == 0);
    DepthImage out2 = fill_depth_holes(d, 3, 1);
    CHECK(out2.at(1, 1) == 500);
}

TEST_CASE("fill_depth_holes never zeroes a valid pixel", "[core]") {
    std::mt19937 rng(3);
    std::uniform_int_distribution<int> d(0, 5);
    DepthImage img(32, 32);
    for (auto& v : img.data()) v = d(rng) == 0 ? 0 : static_cast<std::uint16_t>(300 + d(rng));
    DepthImage out = fill_depth_holes(img, 3, 3);
    for (int y = 0; y < 32; ++y)
        for (int x = 0; x < 32; ++x)
            if (img.at(x, y) != 0) CHECK(out.at(x, y) != 0);
}

TEST_CASE("fill_depth_holes is idempotent on hole-free constant images", "[core]") {
    DepthImage d(9, 9, 650);
    DepthImage once = fill_depth_holes(d, 5, 1);
    DepthImage twice = fill_depth_holes(once, 5, 1);
    CHECK(once.data() == d.data());
    CHECK(twice.data() == once.data());
}

TEST_CASE("fill_depth_holes validates the window", "[core]") {
    DepthImage d(4, 4, 100);
    CHECK_THROWS_AS(fill_depth_holes(d, 4, 1), InputError);
    CHECK_THROWS_AS(fill_depth_holes(d, 1, 1), InputError);
}

TEST_CASE("estimate_normals on a plane faces the viewpoint", "[core]") {
    PointCloud cloud;
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> u(-50, 50);
    for (int i = 0; i < 100; ++i) cloud.points.emplace_back(u(rng), u(rng), 0.0);
    PointCloud out = estimate_normals(cloud, 8, Vec3(0, 0, -10));
    REQUIRE(out.has_normals());
    for (const Vec3& n : out.normals) {
        CHECK(n.norm() == Catch::Approx(1.0).margin(1e-9));
        CHECK((n - Vec3(0, 0, -1)).norm() < 1e-6);
    }
}

TEST_CASE("estimate_normals approximates sphere normals", "[core]") {
    // Fibonacci sphere sampling; analytic normal is radial.
    PointCloud cloud;
    const int n = 4000;
    const double r = 100.0;
    const double ga = M_PI * (3.0 - std::sqrt(5.0));
    for (int i = 0; i < n; ++i) {
        const double z = 1.0 - 2.0 * (i + 0.5) / n;
        const double rho = std::sqrt(1.0 - z * z);
        const double th = ga * i;
        cloud.points.emplace_back(r * rho * std::cos(th), r * rho * std::sin(th), r * z);
    }
    PointCloud out = estimate_normals(cloud, 10, Vec3::Zero());
    for (size_t i = 0; i < out.size(); ++i) {
        const Vec3 inward = -out.points[i].normalized();
        CHECK(out.normals[i].dot(inward) > 0.999);
    }
}

TEST_CASE("estimate_normals on collinear points is orthogonal to the line", "[core]") {
    PointCloud cloud;
    const Vec3 dir = Vec3(1, 2, 0.5).normalized();
    for (int i = 0; i < 5; ++i) cloud.points.push_back(i * 3.0 * dir);
    PointCloud out = estimate_normals(cloud, 4, Vec3(0, 0, -100));
    for (const Vec3& n : out.normals) {
        CHECK(n.norm() == Catch::Approx(1.0).margin(1e-9));
        CHECK(std::abs(n.dot(dir)) < 1e-9);
    }
}

TEST_CASE("estimate_normals requires k+1 points", "[core]") {
    PointCloud cloud;
    cloud.points = {Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0)};
    CHECK_THROWS_AS(estimate_normals(cloud, 3, Vec3::Zero()), InputError);
}

TEST_CASE("estimate_normals is rotation-invariant up to sign", "[core]") {
    PointCloud cloud;
    std::mt19937 rng(17);
    std::uniform_real_distribution<double> u(-30, 30);
    for (int i = 0; i < 200; ++i) {
        const double x = u(rng), y = u(rng);
        cloud.points.emplace_back(x, y, 0.02 * x * x - 0.01 * y * y);
    }
    const Vec3 vp(5, -3, -200);
    PointCloud base = estimate_normals(cloud, 8, vp);

    const RigidTransform rot = axis_angle(Vec3(1, 1, 2), 0.8, Vec3(10, -4, 7));
    PointCloud rotated = cloud.transformed(rot);
    PointCloud out = estimate_normals(rotated, 8, rot.apply(vp));
    for (size_t i = 0; i < out.size(); ++i) {
        const Vec3 expected = rot.rotation * base.normals[i];
        CHECK((out.normals[i] - expected).norm() < 1e-6);
    }
}
