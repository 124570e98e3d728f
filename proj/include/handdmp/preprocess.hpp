#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "handdmp/hand_geometry.hpp"

namespace handdmp {

struct SignalChannel {
    std::string name;
    std::vector<double> samples;
    double dt = 0.0;
};

/// Uniformly sampled end-effector trajectory. Position axes are x, y, z; euler
/// channels are yaw, pitch, roll. Velocity and acceleration are filled by
/// differentiate() and may be empty before that.
struct PoseTrajectory {
    std::vector<double> t;
    std::array<std::vector<double>, 3> position;
    std::array<std::vector<double>, 3> velocity;
    std::array<std::vector<double>, 3> acceleration;
    std::array<std::vector<double>, 3> euler;
    std::vector<Quaternion> orientation;
    std::vector<double> thumb_index_distance;
    std::vector<bool> grasp;

    std::size_t size() const { return t.size(); }
    bool empty() const { return t.empty(); }
    double duration() const { return t.empty() ? 0.0 : t.back() - t.front(); }
    /// Mean sample interval.
    double dt() const { return t.size() < 2 ? 0.0 : duration() / double(t.size() - 1); }
    bool has_derivatives() const { return velocity[0].size() == t.size(); }

    /// Throws InvalidInput if channel lengths disagree or fewer than 2 samples.
    void check_consistent() const;
};

inline constexpr int kDefaultWindow = 10;

/// Centered moving average. Window i covers [i - floor((k-1)/2), i + ceil((k-1)/2)],
/// truncated at the signal ends and averaged over the samples actually present.
std::vector<double> mean_filter(std::span<const double> samples, int k);
SignalChannel mean_filter(const SignalChannel& channel, int k);

/// Removes 2*pi jumps between consecutive samples.
std::vector<double> unwrap_angles(std::span<const double> angles);

/// Linear interpolation onto a uniform grid spanning the first to last timestamp.
/// The grid has round(T / median_dt) intervals, so its step is the median frame
/// interval adjusted to land exactly on the final timestamp. Between frames,
/// quaternions are rebuilt from the interpolated Euler angles; grid points that fall on
/// a frame keep its pose as-is. Grasp is re-thresholded from d_ti.
PoseTrajectory resample_uniform(std::span<const StampedPose> frames,
                                const GraspParams& grasp = {});

/// Same, with the step requested explicitly (rounded so the grid still ends on the
/// final timestamp).
PoseTrajectory resample_uniform(std::span<const StampedPose> frames, double target_step,
                                const GraspParams& grasp = {});

/// Mean-filters position, Euler and d_ti channels, then rebuilds quaternions and
/// grasp from the filtered values. Derivatives are cleared.
PoseTrajectory smooth(const PoseTrajectory& traj, int k, const GraspParams& grasp = {});

struct Derivatives {
    std::vector<double> velocity;
    std::vector<double> acceleration;
};

/// Second-order finite differences: central inside, one-sided at the ends.
Derivatives finite_differences(std::span<const double> samples, double dt);

/// Fills velocity and acceleration for every position axis.
PoseTrajectory differentiate(const PoseTrajectory& traj);

}  // namespace handdmp
