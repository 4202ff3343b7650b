#pragma once

#include <Eigen/Core>

#include "rgbdmeas/core/error.hpp"

namespace rgbdmeas {

// Pinhole camera model, pixel units. Frames are assumed rectified; no
// distortion terms.
struct CameraIntrinsics {
    double fx = 0.0;
    double fy = 0.0;
    double cx = 0.0;
    double cy = 0.0;
    int width = 0;
    int height = 0;

    CameraIntrinsics() = default;
    CameraIntrinsics(double fx_, double fy_, double cx_, double cy_, int width_, int height_)
        : fx(fx_), fy(fy_), cx(cx_), cy(cy_), width(width_), height(height_) {
        validate();
    }

    void validate() const {
        if (fx <= 0.0 || fy <= 0.0)
            throw InputError("CameraIntrinsics: focal lengths must be positive");
        if (width <= 0 || height <= 0)
            throw InputError("CameraIntrinsics: image size must be positive");
        if (cx < 0.0 || cx >= width || cy < 0.0 || cy >= height)
            throw InputError("CameraIntrinsics: principal point outside image");
    }

    Eigen::Matrix3d matrix() const {
        Eigen::Matrix3d k;
        k << fx, 0, cx, 0, fy, cy, 0, 0, 1;
        return k;
    }

    Eigen::Matrix3d inverse_matrix() const {
        Eigen::Matrix3d ki;
        ki << 1.0 / fx, 0, -cx / fx, 0, 1.0 / fy, -cy / fy, 0, 0, 1;
        return ki;
    }

    // Intrinsics of the next coarser pyramid level (2x downsampling).
    // Pixel centers sit at integer coordinates, so the principal point maps
    // as c -> (c + 0.5)/2 - 0.5.
    CameraIntrinsics halved() const {
        CameraIntrinsics h;
        h.fx = fx / 2.0;
        h.fy = fy / 2.0;
        h.cx = (cx + 0.5) / 2.0 - 0.5;
        h.cy = (cy + 0.5) / 2.0 - 0.5;
        h.width = width / 2;
        h.height = height / 2;
        return h;
    }
};

}  // namespace rgbdmeas
