#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "handdmp/demo_io.hpp"
#include "handdmp/error.hpp"
#include "handdmp/hand_geometry.hpp"
#include "handdmp/preprocess.hpp"
#include "test_support.hpp"

using namespace handdmp;
namespace ht = handdmp::testing;

namespace {

const std::string kCamera =
    R"({"H": 1.0, "X": 640, "Y": 480, "theta_x_deg": 69.0, "theta_y_deg": 42.0})";

std::string frame_line(double t, double x_p = 320, double y_p = 240, double d = 0.5,
                       int count = 21) {
    std::ostringstream out;
    out << "{\"t\": " << t << ", \"keypoints\": [";
    for (int i = 0; i < count; ++i) {
        if (i) out << ", ";
        out << "[" << x_p + i << ", " << y_p << ", " << d << "]";
    }
    out << "]}";
    return out.str();
}

CameraConfig camera() { return CameraConfig::from_degrees(1.0, 640, 480, 69.0, 42.0); }

std::size_t parse_error_line(const std::string& text) {
    const auto dir = ht::scratch_dir("demo_parse");
    ht::write_file(dir / "r.demo.jsonl", text);
    try {
        load_recording(dir / "r.demo.jsonl", camera());
    } catch (const ParseError& e) {
        return e.line();
    }
    return 0;
}

}  // namespace

TEST(Camera, LoadsBenchConfiguration) {
    const auto dir = ht::scratch_dir("camera");
    ht::write_file(dir / "camera.json", kCamera);
    const auto cam = load_camera_config(dir / "camera.json");
    EXPECT_EQ(cam.mount_height, 1.0);
    EXPECT_EQ(cam.res_x, 640);
    EXPECT_EQ(cam.res_y, 480);
    EXPECT_NEAR(cam.fov_x, 69.0 * std::numbers::pi / 180, 1e-15);
    EXPECT_NEAR(cam.fov_y, 42.0 * std::numbers::pi / 180, 1e-15);
}

TEST(Camera, RoundTrip) {
    const auto dir = ht::scratch_dir("camera_rt");
    write_camera_config(camera(), dir / "c.json");
    const auto back = load_camera_config(dir / "c.json");
    EXPECT_EQ(back.mount_height, camera().mount_height);
    EXPECT_EQ(back.res_x, 640);
    EXPECT_NEAR(back.fov_x, camera().fov_x, 1e-15);
}

TEST(Camera, RejectsMissingOrInvalidFields) {
    const auto dir = ht::scratch_dir("camera_bad");
    for (const std::string text :
         {std::string(R"({"H": 1.0, "X": 640, "Y": 480, "theta_x_deg": 69.0})"),
          std::string(R"({"H": -1.0, "X": 640, "Y": 480, "theta_x_deg": 69.0, "theta_y_deg": 42.0})"),
          std::string(R"({"H": 1.0, "X": 0, "Y": 480, "theta_x_deg": 69.0, "theta_y_deg": 42.0})"),
          std::string(R"({"H": 1.0, "X": 640, "Y": 480, "theta_x_deg": 180.0, "theta_y_deg": 42.0})"),
          std::string("not json")}) {
        ht::write_file(dir / "c.json", text);
        EXPECT_THROW(load_camera_config(dir / "c.json"), Error) << text;
    }
    EXPECT_THROW(load_camera_config(dir / "missing.json"), Error);
}

TEST(Recording, LoadsValidFile) {
    const auto dir = ht::scratch_dir("rec_ok");
    ht::write_file(dir / "r.demo.jsonl", frame_line(0.0) + "\n\n" + frame_line(0.033) + "\n");
    const auto rec = load_recording(dir / "r.demo.jsonl", camera());
    ASSERT_EQ(rec.frames.size(), 2u);
    EXPECT_EQ(rec.frames[1].t, 0.033);
    EXPECT_EQ(rec.frames[0].keypoints[4].x_p, 324.0);
    EXPECT_EQ(rec.frames[0].keypoints[4].depth, 0.5);
}

TEST(Recording, RoundTripIsExact) {
    DemonstrationRecording rec;
    rec.camera = camera();
    for (int i = 0; i < 3; ++i) {
        KeypointFrame f;
        f.t = 0.1 * i + 1e-17;
        for (std::size_t k = 0; k < kKeypointCount; ++k)
            f.keypoints[k] = {100.0 / 3.0 + double(k), 200.0 + 0.1 * i, 0.3 + 1.0 / 7.0};
        rec.frames.push_back(f);
    }
    const auto dir = ht::scratch_dir("rec_rt");
    write_recording(rec, dir / "r.demo.jsonl");
    const auto back = load_recording(dir / "r.demo.jsonl", camera());
    ASSERT_EQ(back.frames.size(), rec.frames.size());
    for (std::size_t i = 0; i < rec.frames.size(); ++i) {
        EXPECT_EQ(back.frames[i].t, rec.frames[i].t);
        for (std::size_t k = 0; k < kKeypointCount; ++k) {
            EXPECT_EQ(back.frames[i].keypoints[k].x_p, rec.frames[i].keypoints[k].x_p);
            EXPECT_EQ(back.frames[i].keypoints[k].y_p, rec.frames[i].keypoints[k].y_p);
            EXPECT_EQ(back.frames[i].keypoints[k].depth, rec.frames[i].keypoints[k].depth);
        }
    }
}

TEST(Recording, ErrorsCarryLineNumbers) {
    const auto ok0 = frame_line(0.0), ok1 = frame_line(0.1);
    EXPECT_EQ(parse_error_line(ok0 + "\n" + "{broken\n"), 2u);
    EXPECT_EQ(parse_error_line(ok0 + "\n" + frame_line(0.1, 320, 240, 0.5, 20) + "\n"), 2u);
    EXPECT_EQ(parse_error_line(ok0 + "\n" + ok1 + "\n" + frame_line(0.2, 320, 240, 0.0) + "\n"), 3u);
    EXPECT_EQ(parse_error_line(ok0 + "\n" + frame_line(0.1, 700) + "\n"), 2u);
    EXPECT_EQ(parse_error_line(ok0 + "\n" + frame_line(0.1, 320, -1) + "\n"), 2u);
    EXPECT_EQ(parse_error_line(ok1 + "\n" + ok0 + "\n"), 2u);  // time goes backwards
    EXPECT_EQ(parse_error_line(ok0 + "\n" + R"({"keypoints": []})" + "\n"), 2u);
}

TEST(Recording, RejectsTooShortOrMissing) {
    const auto dir = ht::scratch_dir("rec_short");
    ht::write_file(dir / "r.demo.jsonl", frame_line(0.0) + "\n");
    EXPECT_THROW(load_recording(dir / "r.demo.jsonl", camera()), ParseError);
    EXPECT_THROW(load_recording(dir / "none.demo.jsonl", camera()), Error);
}

TEST(Recording, BundledFilesLoad) {
    const auto cam = load_camera_config(ht::data_dir() / "camera.json");
    const auto rec = load_recording(ht::data_dir() / "pick_place.demo.jsonl", cam);
    EXPECT_GE(rec.frames.size(), 300u);
    const auto loop = load_recording(ht::data_dir() / "return_loop.demo.jsonl", cam);
    EXPECT_GE(loop.frames.size(), 50u);
}

namespace {

PoseTrajectory small_trajectory() {
    PoseTrajectory traj;
    for (int k = 0; k < 4; ++k) {
        traj.t.push_back(0.1 * k);
        const EulerAngles e{0.1 * k, -0.2 + 0.05 * k, 0.3};
        traj.position[0].push_back(0.1 + 1.0 / 3.0 * k);
        traj.position[1].push_back(-0.2);
        traj.position[2].push_back(0.25 + 1e-9 * k);
        traj.euler[0].push_back(e.yaw);
        traj.euler[1].push_back(e.pitch);
        traj.euler[2].push_back(e.roll);
        traj.orientation.push_back(apply_end_effector_correction(euler_to_quaternion(e)));
        traj.thumb_index_distance.push_back(0.15 - 0.03 * k);
        traj.grasp.push_back(k >= 2);
    }
    return traj;
}

}  // namespace

TEST(TrajectoryCsv, HeaderAndRoundTrip) {
    const auto traj = small_trajectory();
    const auto dir = ht::scratch_dir("traj_csv");
    write_trajectory(traj, dir / "t.csv");
    const auto text = ht::read_file(dir / "t.csv");
    EXPECT_EQ(text.substr(0, text.find('\n')), "t,x,y,z,qw,qx,qy,qz,d_ti,grasp");

    const auto back = read_trajectory(dir / "t.csv");
    ASSERT_EQ(back.size(), traj.size());
    EXPECT_FALSE(back.has_derivatives());
    for (std::size_t k = 0; k < traj.size(); ++k) {
        EXPECT_EQ(back.t[k], traj.t[k]);
        for (int a = 0; a < 3; ++a) {
            EXPECT_EQ(back.position[a][k], traj.position[a][k]);
            EXPECT_NEAR(back.euler[a][k], traj.euler[a][k], 1e-12);
        }
        EXPECT_EQ(back.orientation[k].w, traj.orientation[k].w);
        EXPECT_EQ(back.orientation[k].z, traj.orientation[k].z);
        EXPECT_EQ(back.thumb_index_distance[k], traj.thumb_index_distance[k]);
        EXPECT_EQ(back.grasp[k], traj.grasp[k]);
    }
}

TEST(TrajectoryCsv, TenColumnsPerRow) {
    const auto dir = ht::scratch_dir("traj_cols");
    write_trajectory(small_trajectory(), dir / "t.csv");
    std::istringstream in(ht::read_file(dir / "t.csv"));
    std::string line;
    while (std::getline(in, line)) EXPECT_EQ(std::count(line.begin(), line.end(), ','), 9);
}

TEST(TrajectoryCsv, RejectsWrongHeaderAndShortRows) {
    const auto dir = ht::scratch_dir("traj_bad");
    ht::write_file(dir / "a.csv", "t,x,y,z\n0,0,0,0\n");
    EXPECT_THROW(read_trajectory(dir / "a.csv"), ParseError);
    ht::write_file(dir / "b.csv", "t,x,y,z,qw,qx,qy,qz,d_ti,grasp\n0,0,0,0,1,0,0,0,0.2\n");
    try {
        read_trajectory(dir / "b.csv");
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 2u);
    }
}

TEST(TrajectoryCsv, EmptyTrajectoryNotWritten) {
    const auto dir = ht::scratch_dir("traj_empty");
    EXPECT_THROW(write_trajectory(PoseTrajectory{}, dir / "t.csv"), InvalidInput);
    EXPECT_THROW(write_trajectory(small_trajectory(), dir / "no_such_dir" / "t.csv"), IoError);
}
