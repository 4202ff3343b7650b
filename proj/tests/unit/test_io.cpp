#include <catch2/catch_amalgamated.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>

#include "rgbdmeas/io/dataset.hpp"
#include "rgbdmeas/io/json_io.hpp"
#include "rgbdmeas/io/obj_io.hpp"
#include "rgbdmeas/io/ply_io.hpp"
#include "rgbdmeas/io/png_io.hpp"

using namespace rgbdmeas;

namespace {

struct TempDir {
    std::filesystem::path path;
    TempDir() {
        static int counter = 0;
        path = std::filesystem::temp_directory_path() /
               ("rgbdmeas_io_test_" + std::to_string(counter++));
        std::filesystem::remove_all(path);
        std::filesystem::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path, ec);
    }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

}  // namespace

TEST_CASE("depth PNG round trip is exact", "[io][png]") {
    TempDir tmp;
    std::mt19937 rng(7);
    std::uniform_int_distribution<int> dist(0, 65535);
    DepthImage depth(37, 21);
    for (auto& v : depth.data()) v = static_cast<std::uint16_t>(dist(rng));
    depth.at(0, 0) = 0;
    depth.at(36, 20) = 65535;
    write_depth_png(tmp.file("d.png"), depth);
    DepthImage back = read_depth_png(tmp.file("d.png"));
    REQUIRE(back.width() == depth.width());
    REQUIRE(back.height() == depth.height());
    CHECK(back.data() == depth.data());
}

TEST_CASE("color PNG round trip is exact", "[io][png]") {
    TempDir tmp;
    std::mt19937 rng(8);
    std::uniform_int_distribution<int> dist(0, 255);
    ColorImage color(33, 17);
    for (auto& c : color.data())
        c = {static_cast<std::uint8_t>(dist(rng)), static_cast<std::uint8_t>(dist(rng)),
             static_cast<std::uint8_t>(dist(rng))};
    write_color_png(tmp.file("c.png"), color);
    ColorImage back = read_color_png(tmp.file("c.png"));
    REQUIRE(back.width() == color.width());
    REQUIRE(back.height() == color.height());
    CHECK(back.data() == color.data());
}

TEST_CASE("mask PNG round trip maps 255 to label 1", "[io][png]") {
    TempDir tmp;
    LabelMask mask(16, 9);
    for (int y = 0; y < 9; ++y)
        for (int x = 0; x < 16; ++x) mask.at(x, y) = (x + y) % 3 == 0 ? 1 : 0;
    write_mask_png(tmp.file("m.png"), mask);
    LabelMask back = read_mask_png(tmp.file("m.png"));
    REQUIRE(back.width() == mask.width());
    CHECK(back.data() == mask.data());
}

TEST_CASE("corrupt PNG raises a dataset error", "[io][png]") {
    TempDir tmp;
    {
        std::ofstream out(tmp.file("bad.png"), std::ios::binary);
        out << "this is not a png at all, not even close";
    }
    CHECK_THROWS_AS(read_depth_png(tmp.file("bad.png")), DatasetError);
    CHECK_THROWS_AS(read_color_png(tmp.file("bad.png")), DatasetError);
    CHECK_THROWS_AS(read_depth_png(tmp.file("missing.png")), DatasetError);
}

TEST_CASE("color PNG read as depth is rejected", "[io][png]") {
    TempDir tmp;
    write_color_png(tmp.file("c.png"), ColorImage(4, 4));
    CHECK_THROWS_AS(read_depth_png(tmp.file("c.png")), DatasetError);
}

TEST_CASE("cloud PLY round trip preserves doubles bitwise", "[io][ply]") {
    TempDir tmp;
    std::mt19937 rng(9);
    std::uniform_real_distribution<double> dist(-500.0, 500.0);
    std::uniform_int_distribution<int> byte(0, 255);
    PointCloud cloud;
    for (int i = 0; i < 200; ++i) {
        cloud.points.emplace_back(dist(rng), dist(rng), dist(rng));
        cloud.colors.push_back({static_cast<std::uint8_t>(byte(rng)),
                                static_cast<std::uint8_t>(byte(rng)),
                                static_cast<std::uint8_t>(byte(rng))});
        Vec3 n(dist(rng), dist(rng), dist(rng));
        cloud.normals.push_back(n.normalized());
        cloud.labels.push_back(i % 2);
    }
    cloud.points.push_back(Vec3(1.0 / 3.0, -2.0e-13, 123456.78901234567));
    cloud.colors.push_back({1, 2, 3});
    cloud.normals.push_back(Vec3(0, 0, 1));
    cloud.labels.push_back(1);
    write_cloud_ply(tmp.file("c.ply"), cloud);
    PointCloud back = read_cloud_ply(tmp.file("c.ply"));
    REQUIRE(back.size() == cloud.size());
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        CHECK(back.points[i] == cloud.points[i]);
        CHECK(back.normals[i] == cloud.normals[i]);
        CHECK(back.colors[i] == cloud.colors[i]);
        CHECK(back.labels[i] == cloud.labels[i]);
    }
}

TEST_CASE("cloud PLY without optional channels", "[io][ply]") {
    TempDir tmp;
    PointCloud cloud;
    cloud.points = {Vec3(0, 0, 0), Vec3(1, 2, 3)};
    write_cloud_ply(tmp.file("bare.ply"), cloud);
    PointCloud back = read_cloud_ply(tmp.file("bare.ply"));
    REQUIRE(back.size() == 2);
    CHECK_FALSE(back.has_colors());
    CHECK_FALSE(back.has_normals());
    CHECK_FALSE(back.has_labels());
    CHECK(back.points[1] == Vec3(1, 2, 3));
}

TEST_CASE("mesh PLY round trip with labels", "[io][ply]") {
    TempDir tmp;
    TriangleMesh mesh;
    mesh.vertices = {Vec3(0, 0, 0), Vec3(10, 0, 0), Vec3(0, 10, 0), Vec3(10, 10, 1)};
    mesh.faces = {{0, 1, 2}, {1, 3, 2}};
    mesh.vertex_labels = {1, 1, 0, 0};
    write_mesh_ply(tmp.file("m.ply"), mesh);
    TriangleMesh back = read_mesh_ply(tmp.file("m.ply"));
    REQUIRE(back.vertex_count() == 4);
    REQUIRE(back.face_count() == 2);
    CHECK(back.vertices[3] == mesh.vertices[3]);
    CHECK(back.faces == mesh.faces);
    CHECK(back.vertex_labels == mesh.vertex_labels);
}

TEST_CASE("quad faces are triangulated on read", "[io][ply]") {
    TempDir tmp;
    {
        std::ofstream out(tmp.file("quad.ply"));
        out << "ply\nformat ascii 1.0\nelement vertex 4\n"
               "property double x\nproperty double y\nproperty double z\n"
               "element face 1\nproperty list uchar int vertex_indices\nend_header\n"
               "0 0 0\n1 0 0\n1 1 0\n0 1 0\n4 0 1 2 3\n";
    }
    TriangleMesh mesh = read_mesh_ply(tmp.file("quad.ply"));
    REQUIRE(mesh.face_count() == 2);
    CHECK(mesh.faces[0] == std::array<int, 3>{0, 1, 2});
    CHECK(mesh.faces[1] == std::array<int, 3>{0, 2, 3});
}

TEST_CASE("polyline PLY round trip", "[io][ply]") {
    TempDir tmp;
    std::vector<Vec3> loop = {Vec3(0, 0, 0), Vec3(5, 0, 0), Vec3(5, 5, 0), Vec3(0, 5, 0)};
    write_polyline_ply(tmp.file("loop.ply"), loop);
    std::vector<Vec3> back = read_polyline_ply(tmp.file("loop.ply"));
    REQUIRE(back.size() == 4);
    for (std::size_t i = 0; i < 4; ++i) CHECK(back[i] == loop[i]);
}

TEST_CASE("OBJ mesh export is 1-based and parseable", "[io][obj]") {
    TempDir tmp;
    TriangleMesh mesh;
    mesh.vertices = {Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0)};
    mesh.faces = {{0, 1, 2}};
    write_mesh_obj(tmp.file("m.obj"), mesh);
    std::ifstream in(tmp.file("m.obj"));
    std::string line;
    int v = 0, f = 0;
    while (std::getline(in, line)) {
        if (line.rfind("v ", 0) == 0) v++;
        if (line.rfind("f ", 0) == 0) {
            f++;
            CHECK(line == "f 1 2 3");
        }
    }
    CHECK(v == 3);
    CHECK(f == 1);
}

TEST_CASE("intrinsics JSON round trip", "[io][json]") {
    TempDir tmp;
    CameraIntrinsics k{525.5, 525.25, 319.75, 239.5, 640, 480};
    save_json(tmp.file("k.json"), intrinsics_to_json(k));
    CameraIntrinsics back = intrinsics_from_json(load_json(tmp.file("k.json")));
    CHECK(back.fx == k.fx);
    CHECK(back.fy == k.fy);
    CHECK(back.cx == k.cx);
    CHECK(back.cy == k.cy);
    CHECK(back.width == k.width);
    CHECK(back.height == k.height);
}

TEST_CASE("malformed JSON raises a dataset error", "[io][json]") {
    TempDir tmp;
    {
        std::ofstream out(tmp.file("bad.json"));
        out << "{ not json";
    }
    CHECK_THROWS_AS(load_json(tmp.file("bad.json")), DatasetError);
    CHECK_THROWS_AS(intrinsics_from_json(Json{{"fx", 1.0}}), DatasetError);
}

TEST_CASE("marker JSON round trip", "[io][json]") {
    MarkerCorners a;
    a.id = 17;
    a.corners = {Eigen::Vector2d(1.5, 2.5), Eigen::Vector2d(3.25, 2.5),
                 Eigen::Vector2d(3.25, 4.0), Eigen::Vector2d(1.5, 4.0)};
    MarkerCorners b;
    b.id = 42;
    b.corners = {Eigen::Vector2d(10, 10), Eigen::Vector2d(20, 10), Eigen::Vector2d(20, 20),
                 Eigen::Vector2d(10, 20)};
    auto back = markers_from_json(markers_to_json({a, b}));
    REQUIRE(back.size() == 2);
    CHECK(back[0].id == 17);
    CHECK(back[1].id == 42);
    CHECK(back[0].corners[2] == Eigen::Vector2d(3.25, 4.0));
    CHECK(back[1].corners[3] == Eigen::Vector2d(10, 20));
}

TEST_CASE("poses JSON round trip preserves row-major rotation", "[io][json]") {
    std::vector<RigidTransform> poses;
    poses.push_back(RigidTransform::identity());
    poses.push_back(axis_angle(Vec3(0, 0, 1), 0.5, Vec3(10, -20, 30)));
    Json j = poses_to_json(poses);
    CHECK(j[1]["rotation"][1].get<double>() == poses[1].rotation(0, 1));
    CHECK(j[1]["rotation"][3].get<double>() == poses[1].rotation(1, 0));
    auto back = poses_from_json(j);
    REQUIRE(back.size() == 2);
    CHECK((back[1].rotation - poses[1].rotation).cwiseAbs().maxCoeff() == 0.0);
    CHECK(back[1].translation == poses[1].translation);
}

TEST_CASE("loop JSON round trip", "[io][json]") {
    std::vector<Vec3> loop = {Vec3(0.125, -3.5, 7.75), Vec3(1, 2, 3)};
    auto back = loop_from_json(loop_to_json(loop));
    REQUIRE(back.size() == 2);
    CHECK(back[0] == loop[0]);
    CHECK(back[1] == loop[1]);
}

TEST_CASE("dataset round trip with masks and markers", "[io][dataset]") {
    TempDir tmp;
    Dataset ds;
    ds.intrinsics = CameraIntrinsics{500, 500, 31.5, 23.5, 64, 48};
    for (int i = 0; i < 2; ++i) {
        RgbdFrame f;
        f.intrinsics = ds.intrinsics;
        f.color = ColorImage(64, 48, Rgb8{static_cast<std::uint8_t>(10 * i), 20, 30});
        f.depth = DepthImage(64, 48, static_cast<std::uint16_t>(400 + i));
        LabelMask m(64, 48, 0);
        m.at(30 + i, 20) = 1;
        f.mask = m;
        MarkerCorners mc;
        mc.id = i;
        mc.corners = {Eigen::Vector2d(1, 1), Eigen::Vector2d(10, 1), Eigen::Vector2d(10, 10),
                      Eigen::Vector2d(1, 10)};
        f.marker_corners = {mc};
        f.timestamp_index = i;
        ds.frames.push_back(std::move(f));
    }
    write_dataset(tmp.path, ds);
    Dataset back = read_dataset(tmp.path);
    REQUIRE(back.frames.size() == 2);
    CHECK(back.intrinsics.fx == 500);
    CHECK(back.frames[0].depth.at(5, 5) == 400);
    CHECK(back.frames[1].depth.at(5, 5) == 401);
    CHECK(back.frames[1].color.at(0, 0)[0] == 10);
    REQUIRE(back.frames[0].mask.has_value());
    CHECK(back.frames[0].mask->at(30, 20) == 1);
    CHECK(back.frames[0].mask->at(0, 0) == 0);
    REQUIRE(back.frames[1].marker_corners.size() == 1);
    CHECK(back.frames[1].marker_corners[0].id == 1);

    Dataset subset = read_dataset(tmp.path, {1});
    REQUIRE(subset.frames.size() == 1);
    CHECK(subset.frames[0].timestamp_index == 1);
}

TEST_CASE("dataset with missing pieces raises errors naming the path", "[io][dataset]") {
    TempDir tmp;
    CHECK_THROWS_AS(read_dataset(tmp.path), DatasetError);

    Dataset ds;
    ds.intrinsics = CameraIntrinsics{500, 500, 15.5, 11.5, 32, 24};
    RgbdFrame f;
    f.intrinsics = ds.intrinsics;
    f.color = ColorImage(32, 24);
    f.depth = DepthImage(32, 24, 500);
    f.timestamp_index = 0;
    ds.frames.push_back(std::move(f));
    write_dataset(tmp.path, ds);
    std::filesystem::remove(tmp.path / "frames" / "0000.color.png");
    try {
        read_dataset(tmp.path);
        FAIL("expected DatasetError");
    } catch (const DatasetError& e) {
        CHECK(std::string(e.what()).find("0000.color.png") != std::string::npos);
    }
}
