// Python bindings for the core library.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "handdmp/demo_io.hpp"
#include "handdmp/dmp.hpp"
#include "handdmp/error.hpp"
#include "handdmp/hand_geometry.hpp"
#include "handdmp/pipeline.hpp"
#include "handdmp/preprocess.hpp"
#include "handdmp/robot_sim.hpp"

namespace py = pybind11;
using namespace handdmp;

namespace {

std::vector<std::vector<double>> axes_of(const std::array<std::vector<double>, 3>& a) {
    return {a[0], a[1], a[2]};
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Hand demonstrations to dynamic movement primitives";

    auto error = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<InvalidInput>(m, "InvalidInput", error.ptr());
    py::register_exception<ParseError>(m, "ParseError", error.ptr());
    py::register_exception<IoError>(m, "IoError", error.ptr());
    py::register_exception<DegenerateGeometry>(m, "DegenerateGeometry", error.ptr());
    py::register_exception<DegenerateSpan>(m, "DegenerateSpan", error.ptr());
    py::register_exception<UnsupportedBasis>(m, "UnsupportedBasis", error.ptr());
    py::register_exception<IntegrationFailure>(m, "IntegrationFailure", error.ptr());
    py::register_exception<SingularJacobian>(m, "SingularJacobian", error.ptr());
    py::register_exception<StageError>(m, "StageError", error.ptr());

    // Camera and recordings.
    py::class_<CameraConfig>(m, "CameraConfig")
        .def(py::init(&CameraConfig::from_degrees), py::arg("H") = 1.0, py::arg("X") = 640,
             py::arg("Y") = 480, py::arg("theta_x_deg") = 69.0, py::arg("theta_y_deg") = 42.0)
        .def_readonly("mount_height", &CameraConfig::mount_height)
        .def_readonly("res_x", &CameraConfig::res_x)
        .def_readonly("res_y", &CameraConfig::res_y)
        .def_readonly("fov_x", &CameraConfig::fov_x)
        .def_readonly("fov_y", &CameraConfig::fov_y);
    m.def("load_camera_config", &load_camera_config, py::arg("path"));

    py::class_<KeypointFrame>(m, "KeypointFrame")
        .def_readonly("t", &KeypointFrame::t)
        .def_property_readonly("keypoints", [](const KeypointFrame& f) {
            std::vector<std::array<double, 3>> out;
            for (const auto& k : f.keypoints) out.push_back({k.x_p, k.y_p, k.depth});
            return out;
        });
    py::class_<DemonstrationRecording>(m, "DemonstrationRecording")
        .def_readonly("camera", &DemonstrationRecording::camera)
        .def_readonly("frames", &DemonstrationRecording::frames)
        .def("__len__", [](const DemonstrationRecording& r) { return r.frames.size(); });
    m.def("load_recording", &load_recording, py::arg("path"), py::arg("camera"));

    // Geometry.
    py::class_<WorldPoint>(m, "WorldPoint")
        .def(py::init([](double x, double y, double z) { return WorldPoint{x, y, z}; }),
             py::arg("x"), py::arg("y"), py::arg("z"))
        .def_readwrite("x", &WorldPoint::x)
        .def_readwrite("y", &WorldPoint::y)
        .def_readwrite("z", &WorldPoint::z)
        .def("__iter__", [](const WorldPoint& p) {
            return py::iter(py::make_tuple(p.x, p.y, p.z));
        })
        .def("__repr__", [](const WorldPoint& p) {
            return "WorldPoint(" + std::to_string(p.x) + ", " + std::to_string(p.y) + ", " +
                   std::to_string(p.z) + ")";
        });
    py::class_<EulerAngles>(m, "EulerAngles")
        .def(py::init([](double yaw, double pitch, double roll) {
                 return EulerAngles{yaw, pitch, roll};
             }),
             py::arg("yaw") = 0.0, py::arg("pitch") = 0.0, py::arg("roll") = 0.0)
        .def_readwrite("yaw", &EulerAngles::yaw)
        .def_readwrite("pitch", &EulerAngles::pitch)
        .def_readwrite("roll", &EulerAngles::roll);
    py::class_<Quaternion>(m, "Quaternion")
        .def(py::init([](double w, double x, double y, double z) { return Quaternion{w, x, y, z}; }),
             py::arg("w") = 1.0, py::arg("x") = 0.0, py::arg("y") = 0.0, py::arg("z") = 0.0)
        .def_readwrite("w", &Quaternion::w)
        .def_readwrite("x", &Quaternion::x)
        .def_readwrite("y", &Quaternion::y)
        .def_readwrite("z", &Quaternion::z)
        .def("norm", &Quaternion::norm)
        .def("normalized", &Quaternion::normalized)
        .def("conjugate", &Quaternion::conjugate)
        .def("to_matrix", &Quaternion::to_matrix)
        .def("__mul__", &quaternion_multiply)
        .def("__iter__", [](const Quaternion& q) {
            return py::iter(py::make_tuple(q.w, q.x, q.y, q.z));
        })
        .def("__repr__", [](const Quaternion& q) {
            return "Quaternion(" + std::to_string(q.w) + ", " + std::to_string(q.x) + ", " +
                   std::to_string(q.y) + ", " + std::to_string(q.z) + ")";
        });

    m.def("pixel_to_world", &pixel_to_world, py::arg("x_p"), py::arg("y_p"), py::arg("depth"),
          py::arg("camera"));
    m.def(
        "world_to_pixel",
        [](const WorldPoint& p, const CameraConfig& cam) {
            const auto r = world_to_pixel(p, cam);
            return py::make_tuple(r.x_p, r.y_p, r.depth);
        },
        py::arg("point"), py::arg("camera"), "Returns (x_p, y_p, depth).");
    m.def("euler_from_keypoints", &euler_from_keypoints, py::arg("thumb"), py::arg("index"),
          py::arg("wrist"));
    m.def("euler_to_quaternion", &euler_to_quaternion, py::arg("euler"));
    m.def("quaternion_to_euler", &quaternion_to_euler, py::arg("q"));
    m.def("quaternion_multiply", &quaternion_multiply, py::arg("a"), py::arg("b"));
    m.def("apply_end_effector_correction", &apply_end_effector_correction, py::arg("q"));
    m.def(
        "grasp_from_distance",
        [](double d, double threshold, bool previous, double hysteresis) {
            return grasp_from_distance(d, GraspParams{threshold, hysteresis}, previous);
        },
        py::arg("d_ti"), py::arg("threshold") = 0.10, py::arg("previous") = false,
        py::arg("hysteresis") = 0.01);

    // Preprocessing.
    m.def(
        "mean_filter",
        [](const std::vector<double>& x, int k) { return mean_filter(x, k); },
        py::arg("samples"), py::arg("k") = kDefaultWindow);
    m.def(
        "finite_differences",
        [](const std::vector<double>& x, double dt) {
            auto d = finite_differences(x, dt);
            return py::make_tuple(d.velocity, d.acceleration);
        },
        py::arg("samples"), py::arg("dt"), "Returns (velocity, acceleration).");

    py::class_<PoseTrajectory>(m, "PoseTrajectory")
        .def_readonly("t", &PoseTrajectory::t)
        .def_property_readonly("position", [](const PoseTrajectory& p) { return axes_of(p.position); })
        .def_property_readonly("velocity", [](const PoseTrajectory& p) { return axes_of(p.velocity); })
        .def_property_readonly("euler", [](const PoseTrajectory& p) { return axes_of(p.euler); })
        .def_readonly("orientation", &PoseTrajectory::orientation)
        .def_readonly("thumb_index_distance", &PoseTrajectory::thumb_index_distance)
        .def_property_readonly("grasp",
                               [](const PoseTrajectory& p) { return std::vector<bool>(p.grasp); })
        .def("duration", &PoseTrajectory::duration)
        .def("dt", &PoseTrajectory::dt)
        .def("__len__", &PoseTrajectory::size);
    m.def("read_trajectory", &read_trajectory, py::arg("path"));
    m.def("write_trajectory", &write_trajectory, py::arg("trajectory"), py::arg("path"));
    m.def(
        "convert_recording",
        [](const DemonstrationRecording& r, double threshold) {
            return convert_recording(r, GraspParams{threshold, GraspParams{}.hysteresis});
        },
        py::arg("recording"), py::arg("grasp_threshold") = 0.10);
    m.def(
        "smooth_poses",
        [](const PoseTrajectory& p, int window) { return smooth_poses(p, window); },
        py::arg("poses"), py::arg("window") = kDefaultWindow);

    // DMP.
    py::enum_<DmpVariant>(m, "DmpVariant")
        .value("original", DmpVariant::Original)
        .value("modified", DmpVariant::Modified);
    py::class_<DmpParams>(m, "DmpParams")
        .def(py::init([](int basis, double stiffness, std::optional<double> damping,
                         DmpVariant variant) {
                 DmpParams p;
                 p.basis_count = basis;
                 p.stiffness = stiffness;
                 p.damping = damping.value_or(2.0 * std::sqrt(stiffness));
                 p.variant = variant;
                 return p;
             }),
             py::arg("basis") = kDefaultBasisCount, py::arg("stiffness") = kDefaultStiffness,
             py::arg("damping") = py::none(), py::arg("variant") = DmpVariant::Modified)
        .def_readwrite("stiffness", &DmpParams::stiffness)
        .def_readwrite("damping", &DmpParams::damping)
        .def_readwrite("alpha", &DmpParams::alpha)
        .def_readwrite("basis_count", &DmpParams::basis_count)
        .def_readwrite("variant", &DmpParams::variant);
    py::class_<DmpModel>(m, "DmpModel")
        .def_readonly("stiffness", &DmpModel::stiffness)
        .def_readonly("damping", &DmpModel::damping)
        .def_readonly("duration", &DmpModel::duration)
        .def_readonly("alpha", &DmpModel::alpha)
        .def_readonly("dt", &DmpModel::dt)
        .def_readonly("samples", &DmpModel::samples)
        .def_readonly("start", &DmpModel::start)
        .def_readonly("goal", &DmpModel::goal)
        .def_readonly("variant", &DmpModel::variant)
        .def_property_readonly("weights", [](const DmpModel& mo) { return mo.basis.weights; })
        .def_property_readonly("centers", [](const DmpModel& mo) { return mo.basis.centers; })
        .def_property_readonly("widths", [](const DmpModel& mo) { return mo.basis.widths; })
        .def("to_json", &model_to_json)
        .def_static("from_json", &model_from_json, py::arg("text"));
    m.def("save_model", &save_model, py::arg("model"), py::arg("path"));
    m.def("load_model", &load_model, py::arg("path"));

    py::class_<Demonstration>(m, "Demonstration")
        .def(py::init([](std::vector<double> time, std::vector<std::vector<double>> position,
                         std::vector<std::vector<double>> velocity,
                         std::vector<std::vector<double>> acceleration) {
                 return Demonstration{std::move(time), std::move(position), std::move(velocity),
                                      std::move(acceleration)};
             }),
             py::arg("time"), py::arg("position"), py::arg("velocity"), py::arg("acceleration"),
             "Per-axis samples on a uniform grid: position[axis][sample].")
        .def_readonly("time", &Demonstration::time)
        .def_readonly("position", &Demonstration::position);
    m.def("fit_dmp", &fit_dmp, py::arg("demo"), py::arg("params") = DmpParams{});

    py::class_<RolloutResult>(m, "RolloutResult")
        .def_readonly("time", &RolloutResult::time)
        .def_readonly("phase", &RolloutResult::phase)
        .def_readonly("position", &RolloutResult::position)
        .def_readonly("velocity", &RolloutResult::velocity)
        .def_readonly("forcing", &RolloutResult::forcing)
        .def("__len__", &RolloutResult::size);
    m.def("rollout", &rollout, py::arg("model"), py::arg("start"), py::arg("goal"),
          py::arg("n_steps"), py::arg("dt"));
    m.def("rollout_with_settling", &rollout_with_settling, py::arg("model"), py::arg("start"),
          py::arg("goal"), py::arg("settle_fraction") = 1.5);

    py::class_<FitReport>(m, "FitReport")
        .def_readonly("model", &FitReport::model)
        .def_readonly("demo", &FitReport::demo)
        .def_readonly("rmse", &FitReport::rmse)
        .def_readonly("range", &FitReport::range)
        .def_readonly("relative_rmse", &FitReport::relative_rmse);
    m.def(
        "fit_poses", [](const PoseTrajectory& p, const DmpParams& params) { return fit_poses(p, params); },
        py::arg("poses"), py::arg("params") = DmpParams{});

    py::class_<RolloutReport>(m, "RolloutReport")
        .def_readonly("trajectory", &RolloutReport::trajectory)
        .def_readonly("raw", &RolloutReport::raw)
        .def_readonly("endpoint_error", &RolloutReport::endpoint_error);
    m.def(
        "rollout_poses",
        [](const DmpModel& model, const PoseTrajectory& demo,
           std::optional<std::array<double, 3>> start, std::optional<std::array<double, 3>> goal,
           double settle) { return rollout_poses(model, demo, start, goal, settle); },
        py::arg("model"), py::arg("demo_poses"), py::arg("start") = py::none(),
        py::arg("goal") = py::none(), py::arg("settle_fraction") = PipelineConfig{}.settle_fraction);

    // Simulation.
    py::class_<sim::SimulationLog>(m, "SimulationLog")
        .def_readonly("rmse_axis", &sim::SimulationLog::rmse_axis)
        .def_readonly("rmse_position", &sim::SimulationLog::rmse_position)
        .def_readonly("rmse_orientation", &sim::SimulationLog::rmse_orientation)
        .def_readonly("max_position_error", &sim::SimulationLog::max_position_error)
        .def("summary_line", &sim::summary_line)
        .def("__len__", [](const sim::SimulationLog& l) { return l.states.size(); });
    m.def("simulate_trajectory", &simulate_trajectory, py::arg("trajectory"),
          py::arg("stiffness") = 400.0, py::arg("damping") = 40.0);

    // Pipeline.
    py::class_<PipelineSummary>(m, "PipelineSummary")
        .def_property_readonly("files",
                               [](const PipelineSummary& s) {
                                   py::dict d;
                                   d["poses"] = s.files.poses;
                                   d["smoothed"] = s.files.smoothed;
                                   d["model"] = s.files.model;
                                   d["rollout"] = s.files.rollout;
                                   d["simulation"] = s.files.simulation;
                                   return d;
                               })
        .def_readonly("fit", &PipelineSummary::fit)
        .def_readonly("rollout", &PipelineSummary::rollout)
        .def_readonly("simulation", &PipelineSummary::simulation);
    m.def(
        "run_pipeline",
        [](const std::filesystem::path& config, std::optional<std::filesystem::path> out) {
            auto c = load_pipeline_config(config);
            if (out) c.out_dir = *out;
            return run_pipeline(c);
        },
        py::arg("config"), py::arg("out") = py::none(),
        "Runs convert -> smooth -> fit -> rollout -> simulate from a JSON config file.");
}
