#pragma once

#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "rgbdmeas/core/error.hpp"
#include "rgbdmeas/core/frame.hpp"
#include "rgbdmeas/core/intrinsics.hpp"
#include "rgbdmeas/core/transform.hpp"

namespace rgbdmeas {

// ordered_json keeps keys in insertion order, so emitted reports are stable
// byte-for-byte across runs.
using Json = nlohmann::ordered_json;

inline Json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DatasetError("cannot open JSON: " + path);
    try {
        return Json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw DatasetError("malformed JSON in " + path + ": " + e.what());
    }
}

inline void save_json(const std::string& path, const Json& j) {
    std::ofstream out(path);
    if (!out) throw DatasetError("cannot open JSON for writing: " + path);
    out << j.dump(2) << '\n';
    if (!out) throw DatasetError("write failed: " + path);
}

inline Json intrinsics_to_json(const CameraIntrinsics& k) {
    return Json{{"fx", k.fx}, {"fy", k.fy}, {"cx", k.cx},
                {"cy", k.cy}, {"width", k.width}, {"height", k.height}};
}

inline CameraIntrinsics intrinsics_from_json(const Json& j) {
    try {
        CameraIntrinsics k;
        k.fx = j.at("fx").get<double>();
        k.fy = j.at("fy").get<double>();
        k.cx = j.at("cx").get<double>();
        k.cy = j.at("cy").get<double>();
        k.width = j.at("width").get<int>();
        k.height = j.at("height").get<int>();
        k.validate();
        return k;
    } catch (const nlohmann::json::exception& e) {
        throw DatasetError(std::string("bad intrinsics JSON: ") + e.what());
    }
}

inline Json markers_to_json(const std::vector<MarkerCorners>& markers) {
    Json arr = Json::array();
    for (const MarkerCorners& m : markers) {
        Json corners = Json::array();
        for (const Eigen::Vector2d& c : m.corners) corners.push_back(Json::array({c.x(), c.y()}));
        arr.push_back(Json{{"id", m.id}, {"corners", corners}});
    }
    return arr;
}

inline std::vector<MarkerCorners> markers_from_json(const Json& j) {
    try {
        std::vector<MarkerCorners> markers;
        for (const Json& item : j) {
            MarkerCorners m;
            m.id = item.at("id").get<int>();
            const Json& corners = item.at("corners");
            if (corners.size() != 4) throw DatasetError("marker needs exactly 4 corners");
            for (int c = 0; c < 4; ++c)
                m.corners[c] = Eigen::Vector2d(corners[c].at(0).get<double>(),
                                               corners[c].at(1).get<double>());
            markers.push_back(m);
        }
        return markers;
    } catch (const nlohmann::json::exception& e) {
        throw DatasetError(std::string("bad marker JSON: ") + e.what());
    }
}

// Poses as [{"frame": i, "rotation": [9 row-major], "translation_mm": [3]}].
inline Json poses_to_json(const std::vector<RigidTransform>& poses) {
    Json arr = Json::array();
    for (std::size_t i = 0; i < poses.size(); ++i) {
        Json rot = Json::array();
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c) rot.push_back(poses[i].rotation(r, c));
        Json t = Json::array(
            {poses[i].translation.x(), poses[i].translation.y(), poses[i].translation.z()});
        arr.push_back(Json{{"frame", i}, {"rotation", rot}, {"translation_mm", t}});
    }
    return arr;
}

inline std::vector<RigidTransform> poses_from_json(const Json& j) {
    try {
        std::vector<RigidTransform> poses(j.size(), RigidTransform::identity());
        for (const Json& item : j) {
            const std::size_t idx = item.at("frame").get<std::size_t>();
            if (idx >= poses.size()) throw DatasetError("pose frame index out of range");
            RigidTransform t;
            const Json& rot = item.at("rotation");
            if (rot.size() != 9) throw DatasetError("pose rotation needs 9 entries");
            for (int r = 0; r < 3; ++r)
                for (int c = 0; c < 3; ++c) t.rotation(r, c) = rot[3 * r + c].get<double>();
            const Json& tr = item.at("translation_mm");
            if (tr.size() != 3) throw DatasetError("pose translation needs 3 entries");
            t.translation = Vec3(tr[0].get<double>(), tr[1].get<double>(), tr[2].get<double>());
            poses[idx] = t;
        }
        return poses;
    } catch (const nlohmann::json::exception& e) {
        throw DatasetError(std::string("bad poses JSON: ") + e.what());
    }
}

inline Json loop_to_json(const std::vector<Vec3>& loop) {
    Json arr = Json::array();
    for (const Vec3& p : loop) arr.push_back(Json::array({p.x(), p.y(), p.z()}));
    return arr;
}

inline std::vector<Vec3> loop_from_json(const Json& j) {
    try {
        std::vector<Vec3> loop;
        for (const Json& p : j)
            loop.emplace_back(p.at(0).get<double>(), p.at(1).get<double>(), p.at(2).get<double>());
        return loop;
    } catch (const nlohmann::json::exception& e) {
        throw DatasetError(std::string("bad loop JSON: ") + e.what());
    }
}

}  // namespace rgbdmeas
