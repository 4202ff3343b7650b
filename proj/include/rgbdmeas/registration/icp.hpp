#pragma once

#include <cmath>
#include <vector>

#include "rgbdmeas/core/error.hpp"
#include "rgbdmeas/core/kdtree.hpp"
#include "rgbdmeas/core/point_cloud.hpp"
#include "rgbdmeas/core/transform.hpp"
#include "rgbdmeas/registration/kabsch.hpp"

namespace rgbdmeas {

struct IcpResult {
    RigidTransform transform;
    double rmse = 0.0;
    int iterations = 0;
    std::size_t correspondences = 0;
};

// Point-to-point ICP: alternate gated nearest-neighbor matching against a
// fixed target kd-tree with the closed-form rigid fit. Each refit is the
// global minimizer over the current matches, and a re-match that would raise
// the RMSE is rejected, so the reported RMSE sequence never increases.
inline IcpResult icp_point_to_point(const PointCloud& source, const PointCloud& target,
                                    const RigidTransform& init, double max_corr_dist,
                                    int max_iterations = 30, double rel_fitness_eps = 1e-8) {
    if (source.empty() || target.empty())
        throw InputError("icp_point_to_point: empty cloud");
    if (max_corr_dist <= 0.0) throw InputError("icp_point_to_point: max_corr_dist must be > 0");

    const KdTree3 tree(target.points);
    const double gate_sq = max_corr_dist * max_corr_dist;

    IcpResult result;
    result.transform = init;
    double prev_rmse = std::numeric_limits<double>::infinity();

    for (int iter = 0; iter < max_iterations; ++iter) {
        CorrespondenceSet corr;
        double sq_sum = 0.0;
        for (const Vec3& p : source.points) {
            const Vec3 moved = result.transform.apply(p);
            const KdHit hit = tree.nearest(moved);
            if (hit.sq_dist > gate_sq) continue;
            corr.add(p, target.points[hit.index]);
            sq_sum += hit.sq_dist;
        }
        if (corr.size() == 0) {
            if (iter == 0)
                throw NoOverlapError(
                    "icp_point_to_point: no correspondences within gate at initialization");
            break;
        }
        const double matched_rmse = std::sqrt(sq_sum / static_cast<double>(corr.size()));
        if (matched_rmse > prev_rmse) break;

        RigidTransform refit;
        try {
            refit = rigid_from_correspondences(corr);
        } catch (const DegenerateCorrespondencesError&) {
            result.rmse = matched_rmse;
            result.correspondences = corr.size();
            break;
        }

        double refit_sq_sum = 0.0;
        for (const auto& [p, q] : corr.pairs) refit_sq_sum += (refit.apply(p) - q).squaredNorm();
        const double rmse = std::sqrt(refit_sq_sum / static_cast<double>(corr.size()));

        result.transform = refit;
        result.rmse = rmse;
        result.correspondences = corr.size();
        result.iterations = iter + 1;
        if (prev_rmse - rmse < rel_fitness_eps * std::max(prev_rmse, 1e-12)) {
            prev_rmse = rmse;
            break;
        }
        prev_rmse = rmse;
    }
    return result;
}

}  // namespace rgbdmeas
