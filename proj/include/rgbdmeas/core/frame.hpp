#pragma once

#include <array>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "rgbdmeas/core/error.hpp"
#include "rgbdmeas/core/image.hpp"
#include "rgbdmeas/core/intrinsics.hpp"

namespace rgbdmeas {

// Four ordered corner pixels of one square fiducial marker.
struct MarkerCorners {
    int id = 0;
    std::array<Eigen::Vector2d, 4> corners;
};

// Calibrated color + depth pair, the pipeline's atomic input.
struct RgbdFrame {
    ColorImage color;
    DepthImage depth;
    CameraIntrinsics intrinsics;
    std::optional<LabelMask> mask;
    std::vector<MarkerCorners> marker_corners;
    int timestamp_index = 0;

    void validate() const {
        intrinsics.validate();
        if (color.width() != intrinsics.width || color.height() != intrinsics.height)
            throw InputError("RgbdFrame: color size does not match intrinsics");
        if (depth.width() != intrinsics.width || depth.height() != intrinsics.height)
            throw InputError("RgbdFrame: depth size does not match intrinsics");
        if (mask && (mask->width() != intrinsics.width || mask->height() != intrinsics.height))
            throw InputError("RgbdFrame: mask size does not match intrinsics");
        for (const MarkerCorners& m : marker_corners)
            for (const Eigen::Vector2d& c : m.corners)
                if (c.x() < 0 || c.x() >= intrinsics.width || c.y() < 0 ||
                    c.y() >= intrinsics.height)
                    throw InputError("RgbdFrame: marker corner outside image bounds");
    }
};

}  // namespace rgbdmeas
