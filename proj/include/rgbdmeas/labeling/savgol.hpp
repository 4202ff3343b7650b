#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "rgbdmeas/core/error.hpp"
#include "rgbdmeas/labeling/boundary.hpp"

namespace rgbdmeas {

// Central Savitzky-Golay weights: the row that evaluates the least-squares
// polynomial of degree `order` fitted over offsets -h..h at offset 0. The
// weights sum to 1 because the fit reproduces constants.
inline Eigen::VectorXd savitzky_golay_kernel(int window, int order) {
    if (window < 1 || window % 2 == 0)
        throw InputError("savitzky_golay_kernel: window must be a positive odd count");
    if (order < 0 || order >= window)
        throw InputError("savitzky_golay_kernel: order must be smaller than the window");
    const int half = window / 2;
    Eigen::MatrixXd design(window, order + 1);
    for (int r = 0; r < window; ++r) {
        double power = 1.0;
        for (int c = 0; c <= order; ++c) {
            design(r, c) = power;
            power *= static_cast<double>(r - half);
        }
    }
    Eigen::VectorXd origin_row = Eigen::VectorXd::Zero(order + 1);
    origin_row(0) = 1.0;
    const Eigen::MatrixXd gram = design.transpose() * design;
    return design * gram.ldlt().solve(origin_row);
}

// Smooths each coordinate channel with the Savitzky-Golay kernel using
// circular indexing, matching the loop's implicit closure. The vertex count
// is unchanged.
inline BoundaryLoop savitzky_golay_smooth(const BoundaryLoop& loop, int window = 9,
                                          int order = 2) {
    loop.validate();
    if (window < 1 || window % 2 == 0)
        throw InputError("savitzky_golay_smooth: window must be a positive odd count");
    if (order < 0 || order >= window)
        throw InputError("savitzky_golay_smooth: order must be smaller than the window");
    const int n = static_cast<int>(loop.vertices.size());
    if (window >= n)
        throw InputError("savitzky_golay_smooth: window must be smaller than the loop length");

    const Eigen::VectorXd kernel = savitzky_golay_kernel(window, order);
    const int half = window / 2;
    BoundaryLoop smoothed;
    smoothed.vertices.resize(loop.vertices.size());
    for (int i = 0; i < n; ++i) {
        Vec3 value = Vec3::Zero();
        for (int j = 0; j < window; ++j) {
            const int idx = ((i + j - half) % n + n) % n;
            value += kernel(j) * loop.vertices[static_cast<std::size_t>(idx)];
        }
        smoothed.vertices[static_cast<std::size_t>(i)] = value;
    }
    return smoothed;
}

}  // namespace rgbdmeas
