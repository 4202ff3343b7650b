#pragma once

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "rgbdmeas/core/error.hpp"
#include "rgbdmeas/core/frame.hpp"
#include "rgbdmeas/io/json_io.hpp"
#include "rgbdmeas/io/png_io.hpp"

namespace rgbdmeas {

// Layout: <dir>/intrinsics.json plus <dir>/frames/NNNN.{color.png, depth.png,
// mask.png, markers.json}. Mask and markers are optional per frame.
struct Dataset {
    CameraIntrinsics intrinsics;
    std::vector<RgbdFrame> frames;
};

namespace detail {

inline std::string frame_stem(int index) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d", index);
    return buf;
}

}  // namespace detail

inline void write_frame(const std::filesystem::path& dir, int index, const RgbdFrame& frame) {
    const std::filesystem::path frames = dir / "frames";
    std::filesystem::create_directories(frames);
    const std::string stem = detail::frame_stem(index);
    write_color_png((frames / (stem + ".color.png")).string(), frame.color);
    write_depth_png((frames / (stem + ".depth.png")).string(), frame.depth);
    if (frame.mask) write_mask_png((frames / (stem + ".mask.png")).string(), *frame.mask);
    if (!frame.marker_corners.empty())
        save_json((frames / (stem + ".markers.json")).string(),
                  markers_to_json(frame.marker_corners));
}

inline void write_dataset(const std::filesystem::path& dir, const Dataset& dataset) {
    std::filesystem::create_directories(dir);
    save_json((dir / "intrinsics.json").string(), intrinsics_to_json(dataset.intrinsics));
    for (std::size_t i = 0; i < dataset.frames.size(); ++i)
        write_frame(dir, dataset.frames[i].timestamp_index, dataset.frames[i]);
}

inline RgbdFrame read_frame(const std::filesystem::path& dir, int index,
                            const CameraIntrinsics& intrinsics) {
    const std::filesystem::path frames = dir / "frames";
    const std::string stem = detail::frame_stem(index);
    RgbdFrame frame;
    frame.intrinsics = intrinsics;
    frame.timestamp_index = index;
    const std::filesystem::path color = frames / (stem + ".color.png");
    const std::filesystem::path depth = frames / (stem + ".depth.png");
    if (!std::filesystem::exists(color)) throw DatasetError("missing file: " + color.string());
    if (!std::filesystem::exists(depth)) throw DatasetError("missing file: " + depth.string());
    frame.color = read_color_png(color.string());
    frame.depth = read_depth_png(depth.string());
    const std::filesystem::path mask = frames / (stem + ".mask.png");
    if (std::filesystem::exists(mask)) frame.mask = read_mask_png(mask.string());
    const std::filesystem::path markers = frames / (stem + ".markers.json");
    if (std::filesystem::exists(markers))
        frame.marker_corners = markers_from_json(load_json(markers.string()));
    try {
        frame.validate();
    } catch (const InputError& e) {
        throw DatasetError("inconsistent frame " + stem + " in " + dir.string() + ": " + e.what());
    }
    return frame;
}

inline std::vector<int> list_frame_indices(const std::filesystem::path& dir) {
    const std::filesystem::path frames = dir / "frames";
    if (!std::filesystem::is_directory(frames))
        throw DatasetError("missing frames directory: " + frames.string());
    std::vector<int> indices;
    for (const auto& entry : std::filesystem::directory_iterator(frames)) {
        const std::string name = entry.path().filename().string();
        const std::string suffix = ".depth.png";
        if (name.size() <= suffix.size() ||
            name.compare(name.size() - suffix.size(), suffix.size(), suffix) != 0)
            continue;
        const std::string stem = name.substr(0, name.size() - suffix.size());
        if (stem.empty() || stem.find_first_not_of("0123456789") != std::string::npos)
            throw DatasetError("unrecognized frame file name: " + entry.path().string());
        indices.push_back(std::stoi(stem));
    }
    std::sort(indices.begin(), indices.end());
    if (indices.empty()) throw DatasetError("no frames found in " + frames.string());
    return indices;
}

// Reads the whole dataset, or only `indices` when given.
inline Dataset read_dataset(const std::filesystem::path& dir, std::vector<int> indices = {}) {
    const std::filesystem::path intr = dir / "intrinsics.json";
    if (!std::filesystem::exists(intr)) throw DatasetError("missing file: " + intr.string());
    Dataset dataset;
    dataset.intrinsics = intrinsics_from_json(load_json(intr.string()));
    if (indices.empty()) indices = list_frame_indices(dir);
    for (int index : indices) dataset.frames.push_back(read_frame(dir, index, dataset.intrinsics));
    return dataset;
}

}  // namespace rgbdmeas
