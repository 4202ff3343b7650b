#pragma once

#include "rgbdmeas/core/error.hpp"

namespace rgbdmeas {

// Region measurements in millimetres. Box extents are sorted descending:
// height >= width >= depth.
struct MeasurementReport {
    double perimeter_mm = 0.0;
    double surface_area_mm2 = 0.0;
    double height_mm = 0.0;
    double width_mm = 0.0;
    double depth_mm = 0.0;
    long loop_vertex_count = 0;
    long region_face_count = 0;

    void validate() const {
        if (perimeter_mm < 0 || surface_area_mm2 < 0 || height_mm < 0 || width_mm < 0 ||
            depth_mm < 0)
            throw InputError("MeasurementReport: negative measurement");
        if (!(height_mm >= width_mm && width_mm >= depth_mm))
            throw InputError("MeasurementReport: box extents must be sorted descending");
    }
};

// Spread of one metric over n repeated runs.
struct RepeatabilityMetric {
    double mean = 0.0;
    double max_pairwise_diff = 0.0;
    double mean_pairwise_diff = 0.0;
};

struct RepeatabilityStats {
    RepeatabilityMetric perimeter_mm;
    RepeatabilityMetric surface_area_mm2;
    RepeatabilityMetric height_mm;
    RepeatabilityMetric width_mm;
    RepeatabilityMetric depth_mm;
    int runs = 0;
};

}  // namespace rgbdmeas
