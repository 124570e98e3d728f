#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "handdmp/dmp.hpp"
#include "handdmp/error.hpp"
#include "handdmp/preprocess.hpp"
#include "handdmp/robot_sim.hpp"

namespace handdmp {

/// Wraps the error of a failed pipeline stage with the stage name.
class StageError : public Error {
public:
    StageError(std::string stage, const std::string& what)
        : Error(stage + ": " + what), stage_(std::move(stage)) {}
    const std::string& stage() const { return stage_; }

private:
    std::string stage_;
};

struct PipelineConfig {
    std::filesystem::path camera;
    std::filesystem::path demo;
    std::filesystem::path out_dir = ".";
    int window = kDefaultWindow;
    DmpParams dmp;
    GraspParams grasp;
    std::optional<std::array<double, 3>> start;
    std::optional<std::array<double, 3>> goal;
    double impedance_stiffness = 400.0;
    double impedance_damping = 40.0;
    double settle_fraction = 1.5;

    void validate() const;
};

/// JSON document; relative paths resolve against the config file's directory.
PipelineConfig load_pipeline_config(const std::filesystem::path& path);

/// Per-frame poses at the recording's own timestamps (not resampled).
PoseTrajectory poses_to_trajectory(std::span<const StampedPose> poses);
std::vector<StampedPose> trajectory_to_poses(const PoseTrajectory& traj);

PoseTrajectory convert_recording(const DemonstrationRecording& recording,
                                 const GraspParams& grasp = {});

/// Resample onto a uniform grid, then mean-filter.
PoseTrajectory smooth_poses(const PoseTrajectory& poses, int window,
                            const GraspParams& grasp = {});

struct FitReport {
    DmpModel model;
    PoseTrajectory demo;  // resampled, differentiated
    std::array<double, 3> rmse{};
    std::array<double, 3> range{};
    /// rmse / range per axis, 0 for an axis without range.
    std::array<double, 3> relative_rmse{};
};

/// Fits a 3-axis model and measures how well a rollout with the demonstration's own
/// endpoints reproduces it.
FitReport fit_poses(const PoseTrajectory& poses, const DmpParams& params,
                    const GraspParams& grasp = {});

struct RolloutReport {
    PoseTrajectory trajectory;
    RolloutResult raw;
    std::array<double, 3> endpoint_error{};
};

RolloutReport rollout_poses(const DmpModel& model, const PoseTrajectory& demo_poses,
                            std::optional<std::array<double, 3>> start,
                            std::optional<std::array<double, 3>> goal,
                            double settle_fraction = 1.5, const GraspParams& grasp = {});

sim::SimulationLog simulate_trajectory(const PoseTrajectory& traj, double stiffness,
                                       double damping);

struct PipelineOutputs {
    std::filesystem::path poses, smoothed, model, rollout, simulation;
};

struct PipelineSummary {
    PipelineOutputs files;
    FitReport fit;
    RolloutReport rollout;
    sim::SimulationLog simulation;
};

/// convert -> smooth -> fit -> rollout -> simulate, writing five files into out_dir.
/// The first failing stage throws StageError naming it.
PipelineSummary run_pipeline(const PipelineConfig& config);

}  // namespace handdmp
