#pragma once

#include <Eigen/Dense>

#include "rgbdmeas/core/kdtree.hpp"
#include "rgbdmeas/core/point_cloud.hpp"

namespace rgbdmeas {

// Per-point normals from local PCA: the unit eigenvector of the smallest
// eigenvalue of each point's k-neighborhood covariance, oriented to face the
// viewpoint. The neighborhood is the point itself plus its k nearest
// neighbors.
inline PointCloud estimate_normals(const PointCloud& cloud, int k, const Vec3& viewpoint) {
    if (k < 3) throw InputError("estimate_normals: k must be >= 3");
    if (cloud.size() < static_cast<size_t>(k) + 1)
        throw InputError("estimate_normals: cloud needs at least k+1 points");

    KdTree3 tree(cloud.points);
    PointCloud out = cloud;
    out.normals.resize(cloud.size());

    for (size_t i = 0; i < cloud.size(); ++i) {
        const std::vector<KdHit> hits = tree.knn(cloud.points[i], k + 1);
        Vec3 mean = Vec3::Zero();
        for (const KdHit& h : hits) mean += cloud.points[h.index];
        mean /= static_cast<double>(hits.size());
        Mat3 cov = Mat3::Zero();
        for (const KdHit& h : hits) {
            const Vec3 d = cloud.points[h.index] - mean;
            cov += d * d.transpose();
        }
        Eigen::SelfAdjointEigenSolver<Mat3> eig(cov);
        Vec3 n = eig.eigenvectors().col(0).normalized();
        if (n.dot(cloud.points[i] - viewpoint) > 0.0) n = -n;
        out.normals[i] = n;
    }
    return out;
}

}  // namespace rgbdmeas
