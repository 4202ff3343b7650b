#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <set>
#include <vector>

#include "rgbdmeas/core/error.hpp"
#include "rgbdmeas/labeling/boundary.hpp"
#include "rgbdmeas/labeling/savgol.hpp"
#include "rgbdmeas/measure/obb.hpp"
#include "rgbdmeas/measure/report.hpp"
#include "rgbdmeas/measure/spline_curve.hpp"
#include "rgbdmeas/meshing/mesh.hpp"

namespace rgbdmeas {

// Area of the faces fully labeled `label`. By default only the largest
// connected component counts, matching the boundary extraction; disabling
// the filter sums every labeled component.
inline double surface_area(const TriangleMesh& mesh, std::uint8_t label,
                           bool largest_component_only = true) {
    const std::vector<int> region = region_faces(mesh, label, largest_component_only);
    double area = 0.0;
    for (int f : region) area += face_area(mesh, static_cast<std::size_t>(f));
    return area;
}

// Boundary, area, and box measurements of the labeled region. The perimeter
// sample budget is raised to the smoothed loop's minimum requirement when
// the requested budget is too small for the loop at hand.
inline MeasurementReport measure_region(const TriangleMesh& mesh, std::uint8_t label,
                                        int sg_window = 9, int sg_order = 2,
                                        long spline_samples = 2000, double merge_dist = 10.0) {
    const std::vector<int> region = region_faces(mesh, label, true);
    const BoundaryLoop raw = extract_region_boundary(mesh, label, merge_dist);
    const BoundaryLoop smoothed = savitzky_golay_smooth(raw, sg_window, sg_order);

    MeasurementReport report;
    const long min_samples = 10L * static_cast<long>(smoothed.size());
    report.perimeter_mm = perimeter(smoothed, std::max(spline_samples, min_samples));

    double area = 0.0;
    for (int f : region) area += face_area(mesh, static_cast<std::size_t>(f));
    report.surface_area_mm2 = area;

    std::set<int> region_vertex_ids;
    for (int f : region)
        for (int v : mesh.faces[static_cast<std::size_t>(f)]) region_vertex_ids.insert(v);
    std::vector<Vec3> region_vertices;
    region_vertices.reserve(region_vertex_ids.size());
    for (int v : region_vertex_ids) region_vertices.push_back(mesh.vertices[static_cast<std::size_t>(v)]);
    const std::array<double, 3> dims = box_dimensions(region_vertices);
    report.height_mm = dims[0];
    report.width_mm = dims[1];
    report.depth_mm = dims[2];

    report.loop_vertex_count = static_cast<long>(smoothed.size());
    report.region_face_count = static_cast<long>(region.size());
    report.validate();
    return report;
}

// Mean plus max and mean absolute pairwise differences per metric.
inline RepeatabilityStats repeatability(const std::vector<MeasurementReport>& reports) {
    if (reports.size() < 2) throw InputError("repeatability: need at least 2 reports");
    for (const MeasurementReport& r : reports) r.validate();

    RepeatabilityStats stats;
    stats.runs = static_cast<int>(reports.size());
    const auto fill = [&reports](RepeatabilityMetric& metric, auto getter) {
        std::vector<double> values;
        values.reserve(reports.size());
        for (const MeasurementReport& r : reports) values.push_back(getter(r));
        double sum = 0.0;
        for (double v : values) sum += v;
        metric.mean = sum / static_cast<double>(values.size());
        double diff_sum = 0.0, diff_max = 0.0;
        long pairs = 0;
        for (std::size_t i = 0; i < values.size(); ++i) {
            for (std::size_t j = i + 1; j < values.size(); ++j) {
                const double d = std::abs(values[i] - values[j]);
                diff_sum += d;
                diff_max = std::max(diff_max, d);
                ++pairs;
            }
        }
        metric.max_pairwise_diff = diff_max;
        metric.mean_pairwise_diff = diff_sum / static_cast<double>(pairs);
    };
    fill(stats.perimeter_mm, [](const MeasurementReport& r) { return r.perimeter_mm; });
    fill(stats.surface_area_mm2, [](const MeasurementReport& r) { return r.surface_area_mm2; });
    fill(stats.height_mm, [](const MeasurementReport& r) { return r.height_mm; });
    fill(stats.width_mm, [](const MeasurementReport& r) { return r.width_mm; });
    fill(stats.depth_mm, [](const MeasurementReport& r) { return r.depth_mm; });
    return stats;
}

}  // namespace rgbdmeas
