#include "handdmp/hand_geometry.hpp"

#include <algorithm>
#include <cmath>

#include "handdmp/error.hpp"

namespace handdmp {

double distance(const WorldPoint& a, const WorldPoint& b) {
    const double dx = a.x - b.x;
    const double dy = a.y - b.y;
    const double dz = a.z - b.z;
    return std::sqrt(dx * dx + dy * dy + dz * dz);
}

Quaternion Quaternion::about_x(double angle) {
    return {std::cos(angle / 2), std::sin(angle / 2), 0.0, 0.0};
}
Quaternion Quaternion::about_y(double angle) {
    return {std::cos(angle / 2), 0.0, std::sin(angle / 2), 0.0};
}
Quaternion Quaternion::about_z(double angle) {
    return {std::cos(angle / 2), 0.0, 0.0, std::sin(angle / 2)};
}

Quaternion Quaternion::normalized() const {
    const double n = norm();
    if (!(n > 0.0) || !std::isfinite(n)) {
        throw InvalidInput("cannot normalize a zero or non-finite quaternion");
    }
    return {w / n, x / n, y / n, z / n};
}

std::array<double, 9> Quaternion::to_matrix() const {
    return {1 - 2 * (y * y + z * z), 2 * (x * y - w * z),     2 * (x * z + w * y),
            2 * (x * y + w * z),     1 - 2 * (x * x + z * z), 2 * (y * z - w * x),
            2 * (x * z - w * y),     2 * (y * z + w * x),     1 - 2 * (x * x + y * y)};
}

Quaternion quaternion_multiply(const Quaternion& a, const Quaternion& b) {
    // w = w1 w2 - v1.v2 ; v = w1 v2 + w2 v1 + v1 x v2
    const Quaternion r{a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z,
                       a.w * b.x + b.w * a.x + a.y * b.z - a.z * b.y,
                       a.w * b.y + b.w * a.y + a.z * b.x - a.x * b.z,
                       a.w * b.z + b.w * a.z + a.x * b.y - a.y * b.x};
    return r.normalized();
}

Quaternion euler_to_quaternion(const EulerAngles& e) {
    const double cr = std::cos(e.roll / 2), sr = std::sin(e.roll / 2);
    const double cp = std::cos(e.pitch / 2), sp = std::sin(e.pitch / 2);
    const double cy = std::cos(e.yaw / 2), sy = std::sin(e.yaw / 2);
    // Expanded xi_x(roll) xi_y(pitch) xi_z(yaw).
    const Quaternion q{cr * cp * cy - sr * sp * sy,
                       sr * cp * cy + cr * sp * sy,
                       cr * sp * cy - sr * cp * sy,
                       cr * cp * sy + sr * sp * cy};
    return q.normalized();
}

EulerAngles quaternion_to_euler(const Quaternion& q) {
    const auto r = q.normalized().to_matrix();
    const double sin_pitch = std::clamp(r[2], -1.0, 1.0);
    EulerAngles e;
    e.pitch = std::asin(sin_pitch);
    if (std::abs(sin_pitch) < 1.0 - 1e-12) {
        e.yaw = std::atan2(-r[1], r[0]);
        e.roll = std::atan2(-r[5], r[8]);
    } else {
        // Gimbal lock: only yaw +- roll is observable; put all of it in yaw.
        e.roll = 0.0;
        e.yaw = std::atan2(r[3], r[4]);
    }
    return e;
}

Quaternion apply_end_effector_correction(const Quaternion& hand) {
    return quaternion_multiply(hand, Quaternion::about_y(std::numbers::pi / 2));
}

Quaternion remove_end_effector_correction(const Quaternion& gripper) {
    return quaternion_multiply(gripper, Quaternion::about_y(-std::numbers::pi / 2));
}

WorldPoint pixel_to_world(double x_p, double y_p, double depth, const CameraConfig& cam) {
    if (!(depth > 0.0) || !std::isfinite(depth)) {
        throw InvalidInput("depth must be positive and finite");
    }
    const double half_x = cam.res_x / 2.0;
    const double half_y = cam.res_y / 2.0;
    return {depth * std::tan((x_p - half_x) / cam.res_x * cam.fov_x),
            depth * std::tan((y_p - half_y) / cam.res_y * cam.fov_y),
            cam.mount_height - depth};
}

PixelDepth world_to_pixel(const WorldPoint& p, const CameraConfig& cam) {
    const double depth = cam.mount_height - p.z;
    if (!(depth > 0.0)) {
        throw InvalidInput("point is at or above the camera height");
    }
    return {cam.res_x / 2.0 + std::atan(p.x / depth) / cam.fov_x * cam.res_x,
            cam.res_y / 2.0 + std::atan(p.y / depth) / cam.fov_y * cam.res_y, depth};
}

EulerAngles euler_from_keypoints(const WorldPoint& thumb, const WorldPoint& index,
                                 const WorldPoint& wrist) {
    constexpr double kCoincident = 1e-12;
    if (distance(thumb, index) < kCoincident && distance(thumb, wrist) < kCoincident) {
        throw DegenerateGeometry("wrist, thumb and index landmarks coincide");
    }
    EulerAngles e;
    e.yaw = std::atan2(index.x - thumb.x, thumb.y - index.y);
    e.pitch = std::atan2(wrist.z - thumb.z, thumb.x - wrist.x);
    e.roll = std::atan2(index.z - thumb.z, thumb.y - index.y);
    return e;
}

bool grasp_from_distance(double d_ti, const GraspParams& params, bool previous) {
    if (!(d_ti >= 0.0) || !(params.threshold > 0.0) || !(params.hysteresis >= 0.0)) {
        throw InvalidInput("grasp: distance must be >= 0 and threshold > 0");
    }
    if (d_ti < params.threshold - params.hysteresis) return true;
    if (d_ti > params.threshold + params.hysteresis) return false;
    return previous;
}

HandPose frame_to_pose(const KeypointFrame& frame, const CameraConfig& cam,
                       bool previous_grasp, const GraspParams& params) {
    auto world = [&](std::size_t landmark) {
        const Keypoint& k = frame.keypoints[landmark];
        return pixel_to_world(k.x_p, k.y_p, k.depth, cam);
    };
    const WorldPoint wrist = world(kWristLandmark);
    const WorldPoint thumb = world(kThumbTipLandmark);
    const WorldPoint index = world(kIndexTipLandmark);

    HandPose pose;
    pose.position = wrist;
    pose.euler = euler_from_keypoints(thumb, index, wrist);
    pose.orientation = apply_end_effector_correction(euler_to_quaternion(pose.euler));
    pose.thumb_index_distance = distance(thumb, index);
    pose.grasp = grasp_from_distance(pose.thumb_index_distance, params, previous_grasp);
    return pose;
}

std::vector<StampedPose> recording_to_poses(const DemonstrationRecording& recording,
                                            const GraspParams& params) {
    std::vector<StampedPose> out;
    out.reserve(recording.frames.size());
    bool grasp = false;
    for (const auto& frame : recording.frames) {
        HandPose pose = frame_to_pose(frame, recording.camera, grasp, params);
        grasp = pose.grasp;
        out.push_back({frame.t, pose});
    }
    return out;
}

double wrap_angle(double a) {
    constexpr double two_pi = 2 * std::numbers::pi;
    double r = std::remainder(a, two_pi);  // [-pi, pi]
    if (r <= -std::numbers::pi) r += two_pi;
    return r;
}

}  // namespace handdmp
