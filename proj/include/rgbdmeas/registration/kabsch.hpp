#pragma once

#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "rgbdmeas/core/error.hpp"
#include "rgbdmeas/core/transform.hpp"

namespace rgbdmeas {

// Matched 3D point pairs (source, target) in millimetres.
struct CorrespondenceSet {
    std::vector<std::pair<Vec3, Vec3>> pairs;

    std::size_t size() const { return pairs.size(); }
    void add(const Vec3& source, const Vec3& target) { pairs.emplace_back(source, target); }
};

// Closed-form minimizer of sum ||R*p_i + t - q_i||^2: center both sets,
// SVD the cross-covariance, correct an improper rotation via the sign of
// the determinant. Exact for noise-free rigidly related sets.
inline RigidTransform rigid_from_correspondences(const CorrespondenceSet& corr) {
    const std::size_t n = corr.size();
    if (n < 3)
        throw DegenerateCorrespondencesError(
            "rigid_from_correspondences: need at least 3 pairs, got " + std::to_string(n));

    Vec3 src_centroid = Vec3::Zero();
    Vec3 tgt_centroid = Vec3::Zero();
    for (const auto& [p, q] : corr.pairs) {
        src_centroid += p;
        tgt_centroid += q;
    }
    src_centroid /= static_cast<double>(n);
    tgt_centroid /= static_cast<double>(n);

    Mat3 cross = Mat3::Zero();
    for (const auto& [p, q] : corr.pairs)
        cross += (p - src_centroid) * (q - tgt_centroid).transpose();

    Eigen::JacobiSVD<Mat3> svd(cross, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const Vec3 s = svd.singularValues();
    // Rank < 2 means the source points are collinear (or coincident): the
    // rotation about that axis is unobservable.
    if (s(1) <= 1e-9 * std::max(s(0), 1e-300))
        throw DegenerateCorrespondencesError(
            "rigid_from_correspondences: degenerate (collinear or coincident) configuration");

    Mat3 d = Mat3::Identity();
    d(2, 2) = (svd.matrixV() * svd.matrixU().transpose()).determinant() < 0.0 ? -1.0 : 1.0;
    RigidTransform t;
    t.rotation = svd.matrixV() * d * svd.matrixU().transpose();
    t.translation = tgt_centroid - t.rotation * src_centroid;
    return t;
}

}  // namespace rgbdmeas
