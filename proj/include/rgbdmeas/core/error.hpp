#pragma once

#include <stdexcept>
#include <string>

namespace rgbdmeas {

// Base class for all library errors. Subtypes exist so callers can
// distinguish recoverable conditions (e.g. empty region) from bad input.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Malformed or inconsistent input (dimension mismatch, too few points, ...).
class InputError : public Error {
public:
    explicit InputError(const std::string& what) : Error(what) {}
};

// Point with non-positive Z handed to a perspective projection.
class BehindCameraError : public Error {
public:
    explicit BehindCameraError(const std::string& what) : Error(what) {}
};

// Odometry could not form enough valid residuals at the coarsest level.
class InsufficientOverlapError : public Error {
public:
    explicit InsufficientOverlapError(const std::string& what) : Error(what) {}
};

// Fewer than 3 pairs, or a collinear/degenerate correspondence set.
class DegenerateCorrespondencesError : public Error {
public:
    explicit DegenerateCorrespondencesError(const std::string& what) : Error(what) {}
};

// Fewer than 2 markers shared between two frames.
class InsufficientLandmarksError : public Error {
public:
    explicit InsufficientLandmarksError(const std::string& what) : Error(what) {}
};

// Marker corner with no valid depth in its neighborhood.
class InvalidCornerDepthError : public Error {
public:
    explicit InvalidCornerDepthError(const std::string& what) : Error(what) {}
};

// ICP found no correspondences within the gating distance.
class NoOverlapError : public Error {
public:
    explicit NoOverlapError(const std::string& what) : Error(what) {}
};

// Surface fit normal system is singular at the requested smoothness.
class IncreaseSmoothnessError : public Error {
public:
    explicit IncreaseSmoothnessError(const std::string& what) : Error(what) {}
};

// Alpha-shape filter removed every simplex.
class EmptyMeshError : public Error {
public:
    explicit EmptyMeshError(const std::string& what) : Error(what) {}
};

// No face carries the requested label.
class EmptyRegionError : public Error {
public:
    explicit EmptyRegionError(const std::string& what) : Error(what) {}
};

// Labeled region covers a closed surface; no boundary exists.
class WholeSurfaceLabeledError : public Error {
public:
    explicit WholeSurfaceLabeledError(const std::string& what) : Error(what) {}
};

// Rendered frame has no surface intersection at any pixel.
class EmptyFrameError : public Error {
public:
    explicit EmptyFrameError(const std::string& what) : Error(what) {}
};

// Closed-form measurement oracle asked about an unsupported scene.
class UnsupportedOracleError : public Error {
public:
    explicit UnsupportedOracleError(const std::string& what) : Error(what) {}
};

// Missing, unreadable, or inconsistent files in a dataset directory.
class DatasetError : public Error {
public:
    explicit DatasetError(const std::string& what) : Error(what) {}
};

}  // namespace rgbdmeas
