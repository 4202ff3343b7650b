#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "rgbdmeas/core/transform.hpp"

using namespace rgbdmeas;

TEST_CASE("exp/log round trip", "[transform]") {
    std::mt19937 rng(2);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int i = 0; i < 50; ++i) {
        Twist xi;
        for (int j = 0; j < 6; ++j) xi[j] = u(rng) * (j < 3 ? 1.5 : 80.0);
        RigidTransform t = RigidTransform::exp(xi);
        CHECK(t.is_valid(1e-9));
        Twist back = t.log();
        CHECK((back - xi).norm() < 1e-9);
    }
}

TEST_CASE("exp of zero twist is identity", "[transform]") {
    RigidTransform t = RigidTransform::exp(Twist::Zero());
    CHECK(t.rotation.isApprox(Mat3::Identity(), 1e-15));
    CHECK(t.translation.norm() == 0.0);
}

TEST_CASE("compose and inverse are consistent", "[transform]") {
    std::mt19937 rng(4);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int i = 0; i < 20; ++i) {
        Twist a, b;
        for (int j = 0; j < 6; ++j) {
            a[j] = u(rng);
            b[j] = u(rng);
        }
        RigidTransform ta = RigidTransform::exp(a);
        RigidTransform tb = RigidTransform::exp(b);
        RigidTransform tab = ta.compose(tb);
        CHECK(tab.is_valid(1e-9));

        const Vec3 p(u(rng) * 100, u(rng) * 100, u(rng) * 100);
        CHECK((tab.apply(p) - ta.apply(tb.apply(p))).norm() < 1e-9);

        RigidTransform id = ta.compose(ta.inverse());
        CHECK(rotation_error(id, RigidTransform::identity()) < 1e-12);
        CHECK(id.translation.norm() < 1e-9);
    }
}

TEST_CASE("axis_angle produces expected rotations", "[transform]") {
    RigidTransform t = axis_angle(Vec3(0, 0, 1), M_PI / 2);
    CHECK((t.apply(Vec3(1, 0, 0)) - Vec3(0, 1, 0)).norm() < 1e-12);
    CHECK(t.rotation_angle() == Catch::Approx(M_PI / 2).margin(1e-12));
}

TEST_CASE("rotation and translation errors", "[transform]") {
    RigidTransform a = axis_angle(Vec3(1, 0, 0), 0.2, Vec3(1, 2, 3));
    RigidTransform b = axis_angle(Vec3(1, 0, 0), 0.25, Vec3(1, 2, 7));
    CHECK(rotation_error(a, b) == Catch::Approx(0.05).margin(1e-12));
    CHECK(translation_error(a, b) == Catch::Approx(4.0).margin(1e-12));
}
