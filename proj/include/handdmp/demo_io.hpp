#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <vector>

namespace handdmp {

/// Pinhole-with-field-of-view camera model. Angles are radians in memory and degrees
/// on disk.
struct CameraConfig {
    double mount_height = 1.0;  // meters above the workplane
    int res_x = 640;
    int res_y = 480;
    double fov_x = 0.0;  // radians
    double fov_y = 0.0;

    /// Builds a config from on-disk units; throws InvalidInput on any bad field.
    static CameraConfig from_degrees(double mount_height, int res_x, int res_y,
                                     double fov_x_deg, double fov_y_deg);
    void validate() const;
};

inline constexpr std::size_t kKeypointCount = 21;
inline constexpr std::size_t kWristLandmark = 0;
inline constexpr std::size_t kThumbTipLandmark = 4;
inline constexpr std::size_t kIndexTipLandmark = 8;

struct Keypoint {
    double x_p = 0.0;    // pixel column
    double y_p = 0.0;    // pixel row
    double depth = 0.0;  // meters
};

struct KeypointFrame {
    double t = 0.0;
    std::array<Keypoint, kKeypointCount> keypoints{};
};

struct DemonstrationRecording {
    CameraConfig camera;
    std::vector<KeypointFrame> frames;
};

struct PoseTrajectory;

CameraConfig load_camera_config(const std::filesystem::path& path);
void write_camera_config(const CameraConfig& camera, const std::filesystem::path& path);

/// Reads a `.demo.jsonl` file, one `{"t": .., "keypoints": [[x_p, y_p, d] x21]}`
/// record per line. Blank lines are ignored. Any defect raises ParseError with the
/// 1-based line number; no partial recording is ever returned.
DemonstrationRecording load_recording(const std::filesystem::path& path,
                                      const CameraConfig& camera);
void write_recording(const DemonstrationRecording& recording,
                     const std::filesystem::path& path);

/// Checks one frame against the camera bounds. Throws ParseError tagged with `line`.
void validate_frame(const KeypointFrame& frame, const CameraConfig& camera, std::size_t line);

/// CSV with header `t,x,y,z,qw,qx,qy,qz,d_ti,grasp`, 17 significant digits.
void write_trajectory(const PoseTrajectory& traj, const std::filesystem::path& path);

/// Inverse of write_trajectory. Euler channels are recovered from the stored
/// (corrected) quaternion; velocity and acceleration are left empty.
PoseTrajectory read_trajectory(const std::filesystem::path& path);

}  // namespace handdmp
