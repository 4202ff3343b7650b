#pragma once

#include <cmath>

#include <Eigen/Core>
#include <Eigen/Geometry>

#include "rgbdmeas/core/error.hpp"

namespace rgbdmeas {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

// Twist layout used throughout: [omega_x, omega_y, omega_z, v_x, v_y, v_z].
using Twist = Eigen::Matrix<double, 6, 1>;

inline Mat3 skew(const Vec3& w) {
    Mat3 s;
    s << 0, -w.z(), w.y(), w.z(), 0, -w.x(), -w.y(), w.x(), 0;
    return s;
}

// Rigid motion in SE(3). Rotation is kept orthonormal with det +1;
// translation is in millimetres.
struct RigidTransform {
    Mat3 rotation = Mat3::Identity();
    Vec3 translation = Vec3::Zero();

    static RigidTransform identity() { return RigidTransform{}; }

    Vec3 apply(const Vec3& p) const { return rotation * p + translation; }

    RigidTransform compose(const RigidTransform& other) const {
        // (this o other)(p) = this(other(p))
        RigidTransform out;
        out.rotation = rotation * other.rotation;
        out.translation = rotation * other.translation + translation;
        return out;
    }

    RigidTransform inverse() const {
        RigidTransform out;
        out.rotation = rotation.transpose();
        out.translation = -(rotation.transpose() * translation);
        return out;
    }

    bool is_valid(double tol = 1e-9) const {
        if (!rotation.allFinite() || !translation.allFinite()) return false;
        Mat3 rtr = rotation.transpose() * rotation;
        if ((rtr - Mat3::Identity()).cwiseAbs().maxCoeff() > tol) return false;
        return std::abs(rotation.determinant() - 1.0) <= tol;
    }

    // Angle of the rotation part, radians. atan2 of the skew norm against
    // the trace stays well conditioned near zero, where acos loses half the
    // significant digits.
    double rotation_angle() const {
        const double c = (rotation.trace() - 1.0) / 2.0;
        const Vec3 v(rotation(2, 1) - rotation(1, 2), rotation(0, 2) - rotation(2, 0),
                     rotation(1, 0) - rotation(0, 1));
        return std::atan2(0.5 * v.norm(), c);
    }

    // Exponential map. For small angles falls back to the series expansion.
    static RigidTransform exp(const Twist& xi) {
        const Vec3 w = xi.head<3>();
        const Vec3 v = xi.tail<3>();
        const double theta = w.norm();
        const Mat3 wx = skew(w);
        Mat3 r, j;
        if (theta < 1e-10) {
            r = Mat3::Identity() + wx + 0.5 * wx * wx;
            j = Mat3::Identity() + 0.5 * wx + (1.0 / 6.0) * wx * wx;
        } else {
            const double a = std::sin(theta) / theta;
            const double b = (1.0 - std::cos(theta)) / (theta * theta);
            const double c = (1.0 - a) / (theta * theta);
            r = Mat3::Identity() + a * wx + b * wx * wx;
            j = Mat3::Identity() + b * wx + c * wx * wx;
        }
        RigidTransform out;
        out.rotation = r;
        out.translation = j * v;
        return out;
    }

    Twist log() const {
        const double theta = rotation_angle();
        Vec3 w;
        if (theta < 1e-10) {
            w = 0.5 * Vec3(rotation(2, 1) - rotation(1, 2), rotation(0, 2) - rotation(2, 0),
                           rotation(1, 0) - rotation(0, 1));
        } else {
            w = theta / (2.0 * std::sin(theta)) *
                Vec3(rotation(2, 1) - rotation(1, 2), rotation(0, 2) - rotation(2, 0),
                     rotation(1, 0) - rotation(0, 1));
        }
        const Mat3 wx = skew(w);
        Mat3 j_inv;
        if (theta < 1e-10) {
            j_inv = Mat3::Identity() - 0.5 * wx + (1.0 / 12.0) * wx * wx;
        } else {
            const double half = theta / 2.0;
            const double cot = half / std::tan(half);
            j_inv = Mat3::Identity() - 0.5 * wx + (1.0 - cot) / (theta * theta) * wx * wx;
        }
        Twist xi;
        xi.head<3>() = w;
        xi.tail<3>() = j_inv * translation;
        return xi;
    }

    // Re-orthonormalize the rotation (nearest rotation by SVD).
    void orthonormalize() {
        Eigen::JacobiSVD<Mat3> svd(rotation, Eigen::ComputeFullU | Eigen::ComputeFullV);
        Mat3 r = svd.matrixU() * svd.matrixV().transpose();
        if (r.determinant() < 0) {
            Mat3 d = Mat3::Identity();
            d(2, 2) = -1.0;
            r = svd.matrixU() * d * svd.matrixV().transpose();
        }
        rotation = r;
    }
};

inline RigidTransform axis_angle(const Vec3& axis, double angle_rad, const Vec3& t = Vec3::Zero()) {
    RigidTransform out;
    out.rotation = Eigen::AngleAxisd(angle_rad, axis.normalized()).toRotationMatrix();
    out.translation = t;
    return out;
}

// Rotation angle between two transforms, radians.
inline double rotation_error(const RigidTransform& a, const RigidTransform& b) {
    RigidTransform d{Mat3(a.rotation.transpose() * b.rotation), Vec3::Zero()};
    return d.rotation_angle();
}

inline double translation_error(const RigidTransform& a, const RigidTransform& b) {
    return (a.translation - b.translation).norm();
}

}  // namespace rgbdmeas
