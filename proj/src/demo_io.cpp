#include "handdmp/demo_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>

#include <json.hpp>

#include "handdmp/error.hpp"
#include "handdmp/preprocess.hpp"
#include "handdmp/text_format.hpp"

namespace handdmp {

using nlohmann::json;

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;
constexpr const char* kTrajectoryHeader = "t,x,y,z,qw,qx,qy,qz,d_ti,grasp";

double require_number(const json& doc, const char* key) {
    if (!doc.contains(key)) throw ParseError(0, std::string("missing field '") + key + "'");
    const json& v = doc.at(key);
    if (!v.is_number()) throw ParseError(0, std::string("field '") + key + "' is not a number");
    return v.get<double>();
}

int require_pixels(const json& doc, const char* key) {
    const double v = require_number(doc, key);
    if (v != std::floor(v) || v <= 0.0 || v > 1e6) {
        throw ParseError(0, std::string("field '") + key + "' must be a positive integer");
    }
    return static_cast<int>(v);
}

std::ifstream open_input(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    return in;
}

std::ofstream open_output(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    return out;
}

}  // namespace

CameraConfig CameraConfig::from_degrees(double mount_height, int res_x, int res_y,
                                        double fov_x_deg, double fov_y_deg) {
    CameraConfig c{mount_height, res_x, res_y, fov_x_deg * kDegToRad, fov_y_deg * kDegToRad};
    c.validate();
    return c;
}

void CameraConfig::validate() const {
    if (!(mount_height > 0.0) || !std::isfinite(mount_height)) {
        throw InvalidInput("camera height H must be positive");
    }
    if (res_x <= 0 || res_y <= 0) throw InvalidInput("camera resolution must be positive");
    if (!(fov_x > 0.0 && fov_x < std::numbers::pi)) {
        throw InvalidInput("horizontal field of view must lie in (0, 180) degrees");
    }
    if (!(fov_y > 0.0 && fov_y < std::numbers::pi)) {
        throw InvalidInput("vertical field of view must lie in (0, 180) degrees");
    }
}

CameraConfig load_camera_config(const std::filesystem::path& path) {
    auto in = open_input(path);
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ParseError(0, path.string() + ": " + e.what());
    }
    if (!doc.is_object()) throw ParseError(0, path.string() + ": expected an object");
    try {
        return CameraConfig::from_degrees(require_number(doc, "H"), require_pixels(doc, "X"),
                                          require_pixels(doc, "Y"),
                                          require_number(doc, "theta_x_deg"),
                                          require_number(doc, "theta_y_deg"));
    } catch (const InvalidInput& e) {
        throw ParseError(0, path.string() + ": " + e.what());
    }
}

void write_camera_config(const CameraConfig& camera, const std::filesystem::path& path) {
    json doc = {{"H", camera.mount_height},
                {"X", camera.res_x},
                {"Y", camera.res_y},
                {"theta_x_deg", camera.fov_x / kDegToRad},
                {"theta_y_deg", camera.fov_y / kDegToRad}};
    auto out = open_output(path);
    out << doc.dump(2) << '\n';
}

void validate_frame(const KeypointFrame& frame, const CameraConfig& camera, std::size_t line) {
    if (!std::isfinite(frame.t)) throw ParseError(line, "timestamp is not finite");
    for (std::size_t i = 0; i < kKeypointCount; ++i) {
        const Keypoint& k = frame.keypoints[i];
        const std::string which = "keypoint " + std::to_string(i);
        if (!(k.x_p >= 0.0 && k.x_p <= camera.res_x)) {
            throw ParseError(line, which + ": x_p = " + format_double(k.x_p) +
                                       " outside [0, " + std::to_string(camera.res_x) + "]");
        }
        if (!(k.y_p >= 0.0 && k.y_p <= camera.res_y)) {
            throw ParseError(line, which + ": y_p = " + format_double(k.y_p) +
                                       " outside [0, " + std::to_string(camera.res_y) + "]");
        }
        if (!(k.depth > 0.0) || !std::isfinite(k.depth)) {
            throw ParseError(line, which + ": depth must be positive");
        }
    }
}

namespace {

KeypointFrame parse_frame(const std::string& text, std::size_t line) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error&) {
        throw ParseError(line, "malformed record");
    }
    if (!doc.is_object() || !doc.contains("t") || !doc.at("t").is_number()) {
        throw ParseError(line, "record needs a numeric 't'");
    }
    if (!doc.contains("keypoints") || !doc.at("keypoints").is_array()) {
        throw ParseError(line, "record needs a 'keypoints' array");
    }
    const json& kps = doc.at("keypoints");
    if (kps.size() != kKeypointCount) {
        throw ParseError(line, "expected 21 keypoints, found " + std::to_string(kps.size()));
    }
    KeypointFrame frame;
    frame.t = doc.at("t").get<double>();
    for (std::size_t i = 0; i < kKeypointCount; ++i) {
        const json& k = kps[i];
        if (!k.is_array() || k.size() != 3 || !k[0].is_number() || !k[1].is_number() ||
            !k[2].is_number()) {
            throw ParseError(line, "keypoint " + std::to_string(i) + " must be [x_p, y_p, d]");
        }
        frame.keypoints[i] = {k[0].get<double>(), k[1].get<double>(), k[2].get<double>()};
    }
    return frame;
}

}  // namespace

DemonstrationRecording load_recording(const std::filesystem::path& path,
                                      const CameraConfig& camera) {
    camera.validate();
    auto in = open_input(path);
    DemonstrationRecording rec{camera, {}};
    std::string text;
    std::size_t line = 0;
    while (std::getline(in, text)) {
        ++line;
        if (text.find_first_not_of(" \t\r") == std::string::npos) continue;
        KeypointFrame frame = parse_frame(text, line);
        validate_frame(frame, camera, line);
        if (!rec.frames.empty() && !(frame.t > rec.frames.back().t)) {
            throw ParseError(line, "timestamp " + format_double(frame.t) +
                                       " does not increase");
        }
        rec.frames.push_back(frame);
    }
    if (rec.frames.size() < 2) {
        throw ParseError(line, "recording needs at least 2 frames, found " +
                                   std::to_string(rec.frames.size()));
    }
    return rec;
}

void write_recording(const DemonstrationRecording& recording,
                     const std::filesystem::path& path) {
    auto out = open_output(path);
    for (const auto& frame : recording.frames) {
        json kps = json::array();
        for (const auto& k : frame.keypoints) kps.push_back({k.x_p, k.y_p, k.depth});
        out << json{{"t", frame.t}, {"keypoints", kps}}.dump() << '\n';
    }
}

void write_trajectory(const PoseTrajectory& traj, const std::filesystem::path& path) {
    if (traj.empty()) throw InvalidInput("cannot write an empty trajectory");
    if (traj.orientation.size() != traj.size() ||
        traj.thumb_index_distance.size() != traj.size() || traj.grasp.size() != traj.size()) {
        throw InvalidInput("trajectory channels have inconsistent lengths");
    }
    std::ostringstream os;
    os << kTrajectoryHeader << '\n';
    for (std::size_t i = 0; i < traj.size(); ++i) {
        const Quaternion& q = traj.orientation[i];
        os << format_double(traj.t[i]) << ',' << format_double(traj.position[0][i]) << ','
           << format_double(traj.position[1][i]) << ',' << format_double(traj.position[2][i])
           << ',' << format_double(q.w) << ',' << format_double(q.x) << ','
           << format_double(q.y) << ',' << format_double(q.z) << ','
           << format_double(traj.thumb_index_distance[i]) << ',' << (traj.grasp[i] ? 1 : 0)
           << '\n';
    }
    auto out = open_output(path);
    out << os.str();
    if (!out) throw IoError("failed writing " + path.string());
}

PoseTrajectory read_trajectory(const std::filesystem::path& path) {
    auto in = open_input(path);
    std::string text;
    if (!std::getline(in, text) || trim_cr(text) != kTrajectoryHeader) {
        throw ParseError(1, std::string("expected header '") + kTrajectoryHeader + "'");
    }
    PoseTrajectory traj;
    std::size_t line = 1;
    while (std::getline(in, text)) {
        ++line;
        text = trim_cr(text);
        if (text.empty() || text[0] == '#') continue;
        const auto cells = split_numbers(text, line);
        if (cells.size() != 10) {
            throw ParseError(line, "expected 10 columns, found " + std::to_string(cells.size()));
        }
        if (!traj.t.empty() && !(cells[0] > traj.t.back())) {
            throw ParseError(line, "time does not increase");
        }
        traj.t.push_back(cells[0]);
        for (int a = 0; a < 3; ++a) traj.position[a].push_back(cells[1 + a]);
        const Quaternion q{cells[4], cells[5], cells[6], cells[7]};
        if (std::abs(q.norm() - 1.0) > 1e-6) throw ParseError(line, "quaternion is not unit");
        traj.orientation.push_back(q);
        const EulerAngles e = quaternion_to_euler(remove_end_effector_correction(q));
        traj.euler[0].push_back(e.yaw);
        traj.euler[1].push_back(e.pitch);
        traj.euler[2].push_back(e.roll);
        if (cells[8] < 0.0) throw ParseError(line, "d_ti must be non-negative");
        traj.thumb_index_distance.push_back(cells[8]);
        if (cells[9] != 0.0 && cells[9] != 1.0) throw ParseError(line, "grasp must be 0 or 1");
        traj.grasp.push_back(cells[9] == 1.0);
    }
    if (traj.empty()) throw ParseError(line, "trajectory has no rows");
    return traj;
}

}  // namespace handdmp
