#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "rgbdmeas/core/error.hpp"
#include "rgbdmeas/core/image.hpp"

namespace rgbdmeas {

namespace detail {

// Median of a small value list; even counts average the two middle values
// (rounded to the nearest integer).
inline std::uint16_t median_u16(std::vector<std::uint16_t>& v) {
    std::sort(v.begin(), v.end());
    const size_t n = v.size();
    if (n % 2 == 1) return v[n / 2];
    return static_cast<std::uint16_t>(std::lround((v[n / 2 - 1] + v[n / 2]) / 2.0));
}

}  // namespace detail

// Median-based spatial smoothing plus hole filling. Zero pixels whose window
// holds at least min_valid nonzero neighbors take the median of those
// neighbors; nonzero pixels take the median over the window's nonzero values
// (self included). Reads the input image only, so filled holes never cascade.
inline DepthImage fill_depth_holes(const DepthImage& depth, int window = 3, int min_valid = 3) {
    if (window < 3 || window % 2 == 0)
        throw InputError("fill_depth_holes: window must be odd and >= 3");
    if (min_valid < 1)
        throw InputError("fill_depth_holes: min_valid must be >= 1");

    const int r = window / 2;
    DepthImage out(depth.width(), depth.height());
    std::vector<std::uint16_t> vals;
    vals.reserve(static_cast<size_t>(window) * window);

    for (int y = 0; y < depth.height(); ++y) {
        for (int x = 0; x < depth.width(); ++x) {
            const std::uint16_t center = depth.at(x, y);
            vals.clear();
            for (int dy = -r; dy <= r; ++dy) {
                for (int dx = -r; dx <= r; ++dx) {
                    if (center == 0 && dx == 0 && dy == 0) continue;
                    const int nx = x + dx;
                    const int ny = y + dy;
                    if (!depth.contains(nx, ny)) continue;
                    const std::uint16_t v = depth.at(nx, ny);
                    if (v != 0) vals.push_back(v);
                }
            }
            if (center == 0) {
                out.at(x, y) = (static_cast<int>(vals.size()) >= min_valid)
                                   ? detail::median_u16(vals)
                                   : 0;
            } else {
                // vals includes the center, so it is never empty here.
                out.at(x, y) = detail::median_u16(vals);
            }
        }
    }
    return out;
}

}  // namespace rgbdmeas
