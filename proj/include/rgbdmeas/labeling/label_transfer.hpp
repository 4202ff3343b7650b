#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <cstddef>
#include <vector>

#include "rgbdmeas/core/error.hpp"
#include "rgbdmeas/core/kdtree.hpp"
#include "rgbdmeas/core/point_cloud.hpp"
#include "rgbdmeas/meshing/mesh.hpp"

namespace rgbdmeas {

namespace detail {

// Majority label among the selected votes. A count tie involving label 1
// resolves to 1 so borderline vertices stay inside the region of interest;
// other ties resolve to the smallest label for determinism.
inline std::uint8_t majority_label(const std::array<int, 256>& votes) {
    int best = -1;
    for (int label = 0; label < 256; ++label) {
        if (votes[label] == 0) continue;
        if (best < 0 || votes[label] > votes[best]) best = label;
    }
    if (best != 1 && votes[1] > 0 && votes[1] == votes[best]) best = 1;
    return static_cast<std::uint8_t>(best);
}

}  // namespace detail

// Assigns each mesh vertex the majority label of its k nearest reference
// points, where the reference set is the concatenation of all input clouds.
// Neighbors strictly inside the k-th distance always vote; when several
// reference points are tied exactly at the k-th distance, the remaining
// slots are filled from that tie ring preferring label 1, then smaller
// labels, then lower point index.
inline TriangleMesh knn_label_transfer(const TriangleMesh& mesh,
                                       const std::vector<PointCloud>& labeled_clouds,
                                       int k = 9) {
    mesh.validate();
    if (k < 1 || k % 2 == 0) throw InputError("knn_label_transfer: k must be a positive odd count");

    std::vector<Vec3> ref_points;
    std::vector<std::uint8_t> ref_labels;
    for (const PointCloud& cloud : labeled_clouds) {
        cloud.validate();
        if (cloud.empty()) continue;
        if (!cloud.has_labels())
            throw InputError("knn_label_transfer: every reference cloud must carry labels");
        ref_points.insert(ref_points.end(), cloud.points.begin(), cloud.points.end());
        ref_labels.insert(ref_labels.end(), cloud.labels.begin(), cloud.labels.end());
    }
    if (ref_points.empty()) throw InputError("knn_label_transfer: reference set is empty");

    const int n_ref = static_cast<int>(ref_points.size());
    const int k_eff = std::min(k, n_ref);
    const KdTree3 tree(ref_points);

    TriangleMesh out = mesh;
    out.vertex_labels.assign(mesh.vertices.size(), 0);
    for (std::size_t v = 0; v < mesh.vertices.size(); ++v) {
        const Vec3& query = mesh.vertices[v];
        std::vector<KdHit> hits = tree.knn(query, k_eff);
        const double ring = hits.back().sq_dist;

        // Widen the query until it steps past the k-th distance (or runs out
        // of points) so the full tie ring is visible.
        int k_wide = k_eff;
        while (k_wide < n_ref && hits.back().sq_dist == ring) {
            k_wide = std::min(n_ref, 2 * k_wide + 8);
            hits = tree.knn(query, k_wide);
        }

        std::array<int, 256> votes{};
        int taken = 0;
        std::vector<int> ring_members;
        for (const KdHit& hit : hits) {
            if (hit.sq_dist < ring) {
                ++votes[ref_labels[static_cast<std::size_t>(hit.index)]];
                ++taken;
            } else if (hit.sq_dist == ring) {
                ring_members.push_back(hit.index);
            }
        }
        std::sort(ring_members.begin(), ring_members.end(), [&](int a, int b) {
            const std::uint8_t la = ref_labels[static_cast<std::size_t>(a)];
            const std::uint8_t lb = ref_labels[static_cast<std::size_t>(b)];
            const int ra = la == 1 ? -1 : la;
            const int rb = lb == 1 ? -1 : lb;
            if (ra != rb) return ra < rb;
            return a < b;
        });
        for (int idx : ring_members) {
            if (taken == k_eff) break;
            ++votes[ref_labels[static_cast<std::size_t>(idx)]];
            ++taken;
        }
        out.vertex_labels[v] = detail::majority_label(votes);
    }
    out.validate();
    return out;
}

}  // namespace rgbdmeas
