#include "handdmp/pipeline.hpp"

#include <cmath>
#include <fstream>

#include <json.hpp>

#include "handdmp/demo_io.hpp"

namespace handdmp {

using nlohmann::json;

void PipelineConfig::validate() const {
    if (window < 1) throw InvalidInput("window must be >= 1");
    dmp.validate();
    if (!(grasp.threshold > 0.0)) throw InvalidInput("grasp threshold must be positive");
    sim::ImpedanceGains::uniform(impedance_stiffness, impedance_damping);
    if (!(settle_fraction >= 0.0)) throw InvalidInput("settle fraction must be >= 0");
}

namespace {

std::array<double, 3> to_point(const json& v, const char* key) {
    const auto values = v.get<std::vector<double>>();
    if (values.size() != 3) throw InvalidInput(std::string(key) + " needs 3 components");
    return {values[0], values[1], values[2]};
}

}  // namespace

PipelineConfig load_pipeline_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    const auto base = path.parent_path();
    auto resolve = [&](const std::string& p) {
        const std::filesystem::path fp(p);
        return fp.is_absolute() ? fp : base / fp;
    };
    PipelineConfig c;
    try {
        const json doc = json::parse(in);
        c.camera = resolve(doc.at("camera").get<std::string>());
        c.demo = resolve(doc.at("demo").get<std::string>());
        if (doc.contains("out")) c.out_dir = resolve(doc.at("out").get<std::string>());
        c.window = doc.value("window", c.window);
        c.dmp.basis_count = doc.value("basis", c.dmp.basis_count);
        c.dmp.stiffness = doc.value("stiffness", c.dmp.stiffness);
        c.dmp.damping = doc.value("damping", 2.0 * std::sqrt(c.dmp.stiffness));
        if (doc.contains("variant")) c.dmp.variant = parse_variant(doc.at("variant"));
        c.grasp.threshold = doc.value("grasp_threshold", c.grasp.threshold);
        if (doc.contains("start")) c.start = to_point(doc.at("start"), "start");
        if (doc.contains("goal")) c.goal = to_point(doc.at("goal"), "goal");
        c.impedance_stiffness = doc.value("impedance_stiffness", c.impedance_stiffness);
        c.impedance_damping = doc.value("impedance_damping", c.impedance_damping);
    } catch (const json::exception& e) {
        throw ParseError(0, path.string() + ": " + e.what());
    }
    c.validate();
    return c;
}

PoseTrajectory poses_to_trajectory(std::span<const StampedPose> poses) {
    PoseTrajectory traj;
    for (const auto& sp : poses) {
        traj.t.push_back(sp.t);
        traj.position[0].push_back(sp.pose.position.x);
        traj.position[1].push_back(sp.pose.position.y);
        traj.position[2].push_back(sp.pose.position.z);
        traj.euler[0].push_back(sp.pose.euler.yaw);
        traj.euler[1].push_back(sp.pose.euler.pitch);
        traj.euler[2].push_back(sp.pose.euler.roll);
        traj.orientation.push_back(sp.pose.orientation);
        traj.thumb_index_distance.push_back(sp.pose.thumb_index_distance);
        traj.grasp.push_back(sp.pose.grasp);
    }
    return traj;
}

std::vector<StampedPose> trajectory_to_poses(const PoseTrajectory& traj) {
    std::vector<StampedPose> out(traj.size());
    for (std::size_t i = 0; i < traj.size(); ++i) {
        HandPose& p = out[i].pose;
        out[i].t = traj.t[i];
        p.position = {traj.position[0][i], traj.position[1][i], traj.position[2][i]};
        p.euler = {traj.euler[0][i], traj.euler[1][i], traj.euler[2][i]};
        p.orientation = traj.orientation[i];
        p.thumb_index_distance = traj.thumb_index_distance[i];
        p.grasp = traj.grasp[i];
    }
    return out;
}

PoseTrajectory convert_recording(const DemonstrationRecording& recording,
                                 const GraspParams& grasp) {
    return poses_to_trajectory(recording_to_poses(recording, grasp));
}

PoseTrajectory smooth_poses(const PoseTrajectory& poses, int window, const GraspParams& grasp) {
    poses.check_consistent();
    return smooth(resample_uniform(trajectory_to_poses(poses), grasp), window, grasp);
}

FitReport fit_poses(const PoseTrajectory& poses, const DmpParams& params,
                    const GraspParams& grasp) {
    poses.check_consistent();
    FitReport report;
    report.demo = differentiate(resample_uniform(trajectory_to_poses(poses), grasp));
    report.model = fit_dmp(Demonstration::from_trajectory(report.demo), params);
    const auto repro = rollout(report.model, report.model.start, report.model.goal,
                               report.model.samples, report.model.dt);
    for (int a = 0; a < 3; ++a) {
        const auto& demo_axis = report.demo.position[a];
        double sq = 0.0;
        for (std::size_t k = 0; k < demo_axis.size(); ++k) {
            const double e = repro.position[a][k] - demo_axis[k];
            sq += e * e;
        }
        report.rmse[a] = std::sqrt(sq / double(demo_axis.size()));
        const auto [lo, hi] = std::minmax_element(demo_axis.begin(), demo_axis.end());
        report.range[a] = *hi - *lo;
        report.relative_rmse[a] = report.range[a] > 0.0 ? report.rmse[a] / report.range[a] : 0.0;
    }
    return report;
}

RolloutReport rollout_poses(const DmpModel& model, const PoseTrajectory& demo_poses,
                            std::optional<std::array<double, 3>> start,
                            std::optional<std::array<double, 3>> goal, double settle_fraction,
                            const GraspParams& grasp) {
    if (model.axes() != 3) throw InvalidInput("rollout expects a 3-axis position model");
    demo_poses.check_consistent();
    const PoseTrajectory demo = resample_uniform(trajectory_to_poses(demo_poses), grasp);
    if (demo.size() != model.samples) {
        throw InvalidInput("demonstration has " + std::to_string(demo.size()) +
                           " samples on the uniform grid, model was fitted on " +
                           std::to_string(model.samples));
    }
    const std::array<double, 3> x0 =
        start.value_or(std::array<double, 3>{model.start[0], model.start[1], model.start[2]});
    const std::array<double, 3> g =
        goal.value_or(std::array<double, 3>{model.goal[0], model.goal[1], model.goal[2]});
    RolloutReport report;
    report.raw = rollout_with_settling(model, x0, g, settle_fraction);
    report.trajectory = replay_attach(report.raw, demo);
    for (int a = 0; a < 3; ++a) {
        report.endpoint_error[a] = std::abs(report.raw.position[a].back() - g[a]);
    }
    return report;
}

sim::SimulationLog simulate_trajectory(const PoseTrajectory& traj, double stiffness,
                                       double damping) {
    const auto gains = sim::ImpedanceGains::uniform(stiffness, damping);
    return sim::simulate_tracking(traj, gains, sim::Matrix6::Identity(), traj.dt());
}

namespace {

template <class F>
auto stage(const char* name, F&& f) {
    try {
        return f();
    } catch (const StageError&) {
        throw;
    } catch (const std::exception& e) {
        throw StageError(name, e.what());
    }
}

}  // namespace

PipelineSummary run_pipeline(const PipelineConfig& config) {
    stage("config", [&] {
        config.validate();
        std::filesystem::create_directories(config.out_dir);
        return 0;
    });
    PipelineSummary s;
    s.files = {config.out_dir / "poses.csv", config.out_dir / "smoothed.csv",
               config.out_dir / "model.json", config.out_dir / "rollout.csv",
               config.out_dir / "simulation.csv"};

    const PoseTrajectory poses = stage("convert", [&] {
        const CameraConfig camera = load_camera_config(config.camera);
        auto traj = convert_recording(load_recording(config.demo, camera), config.grasp);
        write_trajectory(traj, s.files.poses);
        return traj;
    });
    const PoseTrajectory smoothed = stage("smooth", [&] {
        auto traj = smooth_poses(poses, config.window, config.grasp);
        write_trajectory(traj, s.files.smoothed);
        return traj;
    });
    s.fit = stage("fit", [&] {
        auto report = fit_poses(smoothed, config.dmp, config.grasp);
        save_model(report.model, s.files.model);
        return report;
    });
    s.rollout = stage("rollout", [&] {
        auto report = rollout_poses(s.fit.model, smoothed, config.start, config.goal,
                                    config.settle_fraction, config.grasp);
        write_trajectory(report.trajectory, s.files.rollout);
        return report;
    });
    s.simulation = stage("simulate", [&] {
        auto log = simulate_trajectory(s.rollout.trajectory, config.impedance_stiffness,
                                       config.impedance_damping);
        sim::write_simulation_log(log, s.files.simulation);
        return log;
    });
    return s;
}

}  // namespace handdmp
