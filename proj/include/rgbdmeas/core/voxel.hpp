#pragma once

#include <cmath>
#include <cstdint>
#include <unordered_map>
#include <vector>

#include "rgbdmeas/core/point_cloud.hpp"

namespace rgbdmeas {

// Average points (and colors/normals) per voxel; labels take the majority,
// ties breaking toward label 1 so region-of-interest points survive merging.
// Output voxels appear in first-seen order, which keeps results deterministic
// for a given input order.
inline PointCloud voxel_downsample(const PointCloud& cloud, double voxel_mm) {
    if (voxel_mm <= 0.0) throw InputError("voxel_downsample: voxel size must be positive");
    if (cloud.empty()) return {};

    struct Acc {
        Vec3 pos_sum = Vec3::Zero();
        Vec3 normal_sum = Vec3::Zero();
        double color_sum[3] = {0, 0, 0};
        int label_counts[2] = {0, 0};
        SourcePixel first_pixel;
        int count = 0;
    };

    auto key_of = [&](const Vec3& p) {
        const auto ix = static_cast<std::int64_t>(std::floor(p.x() / voxel_mm));
        const auto iy = static_cast<std::int64_t>(std::floor(p.y() / voxel_mm));
        const auto iz = static_cast<std::int64_t>(std::floor(p.z() / voxel_mm));
        // pack into one 64-bit key; 21 bits per axis covers +-1e6 voxels
        const std::uint64_t m = (1u << 21) - 1;
        return ((static_cast<std::uint64_t>(ix) & m) << 42) |
               ((static_cast<std::uint64_t>(iy) & m) << 21) |
               (static_cast<std::uint64_t>(iz) & m);
    };

    std::unordered_map<std::uint64_t, int> slot;
    slot.reserve(cloud.size());
    std::vector<Acc> accs;
    accs.reserve(cloud.size() / 4);

    for (size_t i = 0; i < cloud.size(); ++i) {
        const std::uint64_t key = key_of(cloud.points[i]);
        auto [it, inserted] = slot.try_emplace(key, static_cast<int>(accs.size()));
        if (inserted) accs.emplace_back();
        Acc& a = accs[it->second];
        a.pos_sum += cloud.points[i];
        if (cloud.has_colors())
            for (int c = 0; c < 3; ++c) a.color_sum[c] += cloud.colors[i][c];
        if (cloud.has_normals()) a.normal_sum += cloud.normals[i];
        if (cloud.has_labels()) a.label_counts[cloud.labels[i] != 0 ? 1 : 0]++;
        if (a.count == 0 && cloud.has_source_pixels()) a.first_pixel = cloud.source_pixels[i];
        a.count++;
    }

    PointCloud out;
    out.points.reserve(accs.size());
    if (cloud.has_colors()) out.colors.reserve(accs.size());
    if (cloud.has_normals()) out.normals.reserve(accs.size());
    if (cloud.has_labels()) out.labels.reserve(accs.size());
    if (cloud.has_source_pixels()) out.source_pixels.reserve(accs.size());

    for (const Acc& a : accs) {
        out.points.push_back(a.pos_sum / a.count);
        if (cloud.has_colors()) {
            Rgb8 c;
            for (int i = 0; i < 3; ++i)
                c[i] = static_cast<std::uint8_t>(std::lround(a.color_sum[i] / a.count));
            out.colors.push_back(c);
        }
        if (cloud.has_normals()) {
            const double n = a.normal_sum.norm();
            // opposing normals can cancel; fall back to +z rather than emit NaN
            out.normals.push_back(n > 1e-12 ? Vec3(a.normal_sum / n) : Vec3(0, 0, 1));
        }
        if (cloud.has_labels())
            out.labels.push_back(a.label_counts[1] >= a.label_counts[0] ? 1 : 0);
        if (cloud.has_source_pixels()) out.source_pixels.push_back(a.first_pixel);
    }
    return out;
}

}  // namespace rgbdmeas
