// Command-line driver: convert, smooth, fit, rollout, simulate, pipeline.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "handdmp/demo_io.hpp"
#include "handdmp/pipeline.hpp"
#include "handdmp/text_format.hpp"

namespace fs = std::filesystem;
using namespace handdmp;

namespace {

std::optional<std::array<double, 3>> parse_point(const std::string& text, const char* flag) {
    if (text.empty()) return std::nullopt;
    const auto v = parse_vector(text);
    if (v.size() != 3) {
        throw InvalidInput(std::string(flag) + " expects x,y,z");
    }
    return std::array<double, 3>{v[0], v[1], v[2]};
}

fs::path output_path(const fs::path& dir, const std::string& explicit_name,
                     const char* default_name) {
    fs::create_directories(dir);
    return explicit_name.empty() ? dir / default_name : dir / explicit_name;
}

void print_axes(const char* label, const std::array<double, 3>& v) {
    std::cout << label << " x=" << format_double(v[0]) << " y=" << format_double(v[1])
              << " z=" << format_double(v[2]) << '\n';
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Learning-from-demonstration toolkit: hand recordings to DMP trajectories"};
    app.require_subcommand(1);

    std::string camera_path, demo_path, out_dir = ".", output_name, variant = "modified";
    std::string start_text, goal_text, config_path;
    int window = kDefaultWindow;
    int basis = kDefaultBasisCount;
    std::optional<double> stiffness, damping;
    double threshold = GraspParams{}.threshold;

    auto add_out = [&](CLI::App* cmd) {
        cmd->add_option("--out", out_dir, "Output directory")->capture_default_str();
        cmd->add_option("-o,--output", output_name, "Output file name inside --out");
    };
    auto add_grasp = [&](CLI::App* cmd) {
        cmd->add_option("--grasp-threshold", threshold, "Thumb-index grasp threshold (m)")
            ->capture_default_str();
    };

    auto* convert = app.add_subcommand("convert", "Recording -> per-frame pose CSV");
    convert->add_option("--demo", demo_path, "Demonstration .demo.jsonl")->required();
    convert->add_option("--camera", camera_path, "Camera config JSON")->required();
    add_grasp(convert);
    add_out(convert);

    std::string input_path;
    auto* smooth_cmd = app.add_subcommand("smooth", "Resample and mean-filter a pose CSV");
    smooth_cmd->add_option("poses", input_path, "Pose CSV")->required();
    smooth_cmd->add_option("--window", window, "Mean filter window k")->capture_default_str();
    add_grasp(smooth_cmd);
    add_out(smooth_cmd);

    auto* fit = app.add_subcommand("fit", "Fit a 3-axis DMP to a pose CSV");
    fit->add_option("poses", input_path, "Pose CSV (usually smoothed)")->required();
    fit->add_option("--basis", basis, "Number of basis functions")->capture_default_str();
    fit->add_option("--stiffness", stiffness, "Spring stiffness K (default 150)");
    fit->add_option("--damping", damping, "Damping D (default 2 sqrt(K))");
    fit->add_option("--variant", variant, "original | modified")
        ->check(CLI::IsMember({"original", "modified"}))
        ->capture_default_str();
    add_out(fit);

    std::string model_path;
    auto* roll = app.add_subcommand("rollout", "Roll out a model with new start/goal");
    roll->add_option("model", model_path, "Model JSON")->required();
    roll->add_option("poses", input_path, "Pose CSV the model was fitted on")->required();
    roll->add_option("--start", start_text, "New start x,y,z");
    roll->add_option("--goal", goal_text, "New goal x,y,z");
    add_grasp(roll);
    add_out(roll);

    auto* simulate = app.add_subcommand("simulate", "Impedance-controlled tracking simulation");
    simulate->add_option("trajectory", input_path, "Trajectory CSV")->required();
    simulate->add_option("--stiffness", stiffness, "Impedance stiffness K_d (default 400)");
    simulate->add_option("--damping", damping, "Impedance damping D_d (default 40)");
    add_out(simulate);

    auto* pipeline = app.add_subcommand("pipeline", "convert -> smooth -> fit -> rollout -> simulate");
    pipeline->add_option("--config", config_path, "Pipeline config JSON");
    pipeline->add_option("--demo", demo_path, "Demonstration .demo.jsonl");
    pipeline->add_option("--camera", camera_path, "Camera config JSON");
    pipeline->add_option("--window", window, "Mean filter window k");
    pipeline->add_option("--basis", basis, "Number of basis functions");
    pipeline->add_option("--stiffness", stiffness, "DMP stiffness K");
    pipeline->add_option("--damping", damping, "DMP damping D");
    pipeline->add_option("--variant", variant, "original | modified")
        ->check(CLI::IsMember({"original", "modified"}));
    pipeline->add_option("--start", start_text, "New start x,y,z");
    pipeline->add_option("--goal", goal_text, "New goal x,y,z");
    pipeline->add_option("--out", out_dir, "Output directory");
    add_grasp(pipeline);

    CLI11_PARSE(app, argc, argv);

    try {
        const GraspParams grasp{threshold, GraspParams{}.hysteresis};
        if (convert->parsed()) {
            const auto camera = load_camera_config(camera_path);
            const auto traj = convert_recording(load_recording(demo_path, camera), grasp);
            const auto path = output_path(out_dir, output_name, "poses.csv");
            write_trajectory(traj, path);
            std::cout << "wrote " << traj.size() << " poses to " << path.string() << '\n';
        } else if (smooth_cmd->parsed()) {
            const auto traj = smooth_poses(read_trajectory(input_path), window, grasp);
            const auto path = output_path(out_dir, output_name, "smoothed.csv");
            write_trajectory(traj, path);
            std::cout << "wrote " << traj.size() << " samples (dt=" << format_double(traj.dt())
                      << ") to " << path.string() << '\n';
        } else if (fit->parsed()) {
            DmpParams params;
            params.basis_count = basis;
            params.stiffness = stiffness.value_or(kDefaultStiffness);
            params.damping = damping.value_or(2.0 * std::sqrt(params.stiffness));
            params.variant = parse_variant(variant);
            const auto report = fit_poses(read_trajectory(input_path), params, grasp);
            const auto path = output_path(out_dir, output_name, "model.json");
            save_model(report.model, path);
            std::cout << "wrote " << to_string(params.variant) << " model ("
                      << report.model.basis.size() << " basis functions, 3 axes) to "
                      << path.string() << '\n';
            print_axes("reproduction rmse", report.rmse);
            print_axes("reproduction rmse / range", report.relative_rmse);
        } else if (roll->parsed()) {
            const auto model = load_model(model_path);
            const auto report =
                rollout_poses(model, read_trajectory(input_path), parse_point(start_text, "--start"),
                              parse_point(goal_text, "--goal"), PipelineConfig{}.settle_fraction, grasp);
            const auto path = output_path(out_dir, output_name, "rollout.csv");
            write_trajectory(report.trajectory, path);
            std::cout << "wrote " << report.trajectory.size() << " samples to " << path.string()
                      << '\n';
            print_axes("endpoint error", report.endpoint_error);
        } else if (simulate->parsed()) {
            const double kd = stiffness.value_or(400.0);
            const double dd = damping.value_or(40.0);
            const auto log = simulate_trajectory(read_trajectory(input_path), kd, dd);
            const auto path = output_path(out_dir, output_name, "simulation.csv");
            sim::write_simulation_log(log, path);
            std::cout << sim::summary_line(log) << '\n';
        } else if (pipeline->parsed()) {
            PipelineConfig config;
            if (!config_path.empty()) config = load_pipeline_config(config_path);
            if (!demo_path.empty()) config.demo = demo_path;
            if (!camera_path.empty()) config.camera = camera_path;
            if (pipeline->count("--out")) config.out_dir = out_dir;
            if (pipeline->count("--window")) config.window = window;
            if (pipeline->count("--basis")) config.dmp.basis_count = basis;
            if (stiffness) {
                config.dmp.stiffness = *stiffness;
                config.dmp.damping = 2.0 * std::sqrt(*stiffness);
            }
            if (damping) config.dmp.damping = *damping;
            if (pipeline->count("--variant")) config.dmp.variant = parse_variant(variant);
            if (pipeline->count("--grasp-threshold")) config.grasp.threshold = threshold;
            if (auto p = parse_point(start_text, "--start")) config.start = p;
            if (auto p = parse_point(goal_text, "--goal")) config.goal = p;
            if (config.demo.empty() || config.camera.empty()) {
                throw InvalidInput("pipeline needs --demo and --camera (or --config)");
            }
            const auto s = run_pipeline(config);
            for (const auto* p : {&s.files.poses, &s.files.smoothed, &s.files.model,
                                  &s.files.rollout, &s.files.simulation}) {
                std::cout << "wrote " << p->string() << '\n';
            }
            print_axes("reproduction rmse / range", s.fit.relative_rmse);
            print_axes("endpoint error", s.rollout.endpoint_error);
            std::cout << sim::summary_line(s.simulation) << '\n';
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
