#pragma once

#include <array>
#include <cmath>
#include <numbers>

#include "handdmp/demo_io.hpp"

namespace handdmp {

struct WorldPoint {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;
};

double distance(const WorldPoint& a, const WorldPoint& b);

/// Yaw about Z, pitch about Y, roll about X, radians.
struct EulerAngles {
    double yaw = 0.0;
    double pitch = 0.0;
    double roll = 0.0;
};

/// Rotation quaternion stored (w, x, y, z).
struct Quaternion {
    double w = 1.0;
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    static constexpr Quaternion identity() { return {1.0, 0.0, 0.0, 0.0}; }
    static Quaternion about_x(double angle);
    static Quaternion about_y(double angle);
    static Quaternion about_z(double angle);

    double norm() const { return std::sqrt(w * w + x * x + y * y + z * z); }
    Quaternion normalized() const;
    Quaternion conjugate() const { return {w, -x, -y, -z}; }

    /// Row-major 3x3 rotation matrix.
    std::array<double, 9> to_matrix() const;
};

/// Hamilton product, renormalized.
Quaternion quaternion_multiply(const Quaternion& a, const Quaternion& b);
inline Quaternion operator*(const Quaternion& a, const Quaternion& b) {
    return quaternion_multiply(a, b);
}

/// xi_x(roll) * xi_y(pitch) * xi_z(yaw), i.e. R = Rx(roll) Ry(pitch) Rz(yaw).
Quaternion euler_to_quaternion(const EulerAngles& e);

/// Inverse of euler_to_quaternion; pitch is returned in [-pi/2, pi/2].
EulerAngles quaternion_to_euler(const Quaternion& q);

/// The gripper's rest orientation is perpendicular to the hand's: right-multiply by a
/// quarter turn about Y.
Quaternion apply_end_effector_correction(const Quaternion& hand);
Quaternion remove_end_effector_correction(const Quaternion& gripper);

WorldPoint pixel_to_world(double x_p, double y_p, double depth, const CameraConfig& cam);

struct PixelDepth {
    double x_p = 0.0;
    double y_p = 0.0;
    double depth = 0.0;
};

/// Exact inverse of pixel_to_world. Throws InvalidInput when the point is at or above
/// the camera.
PixelDepth world_to_pixel(const WorldPoint& p, const CameraConfig& cam);

/// Hand orientation from three landmarks. Every quotient is evaluated with atan2 so a
/// zero denominator yields +-pi/2. Throws DegenerateGeometry if all three coincide.
EulerAngles euler_from_keypoints(const WorldPoint& thumb, const WorldPoint& index,
                                 const WorldPoint& wrist);

struct GraspParams {
    double threshold = 0.10;   // meters
    double hysteresis = 0.01;  // half-width of the dead band
};

/// Closes below threshold - hysteresis, opens above threshold + hysteresis, otherwise
/// keeps `previous`.
bool grasp_from_distance(double d_ti, const GraspParams& params, bool previous);

struct HandPose {
    WorldPoint position;  // wrist
    EulerAngles euler;
    Quaternion orientation;  // gripper target, correction applied
    double thumb_index_distance = 0.0;
    bool grasp = false;
};

HandPose frame_to_pose(const KeypointFrame& frame, const CameraConfig& cam,
                       bool previous_grasp, const GraspParams& params = {});

struct StampedPose {
    double t = 0.0;
    HandPose pose;
};

/// Maps every frame and folds the grasp state sequentially, starting open.
std::vector<StampedPose> recording_to_poses(const DemonstrationRecording& recording,
                                            const GraspParams& params = {});

/// Maps an angle to (-pi, pi].
double wrap_angle(double a);

}  // namespace handdmp
