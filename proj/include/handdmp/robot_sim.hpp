#pragma once

#include <array>
#include <filesystem>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "handdmp/hand_geometry.hpp"

namespace handdmp {

struct PoseTrajectory;

namespace sim {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Vector6 = Eigen::Matrix<double, 6, 1>;
using Matrix6 = Eigen::Matrix<double, 6, 6>;

/// M(q) q'' + C(q', q) q' + G(q) = tau, with task Jacobian J(q).
struct JointSpaceModel {
    std::size_t joints = 0;
    std::function<Matrix(const Vector& q)> inertia;
    std::function<Matrix(const Vector& q, const Vector& qdot)> coriolis;
    std::function<Vector(const Vector& q)> gravity;
    std::function<Matrix(const Vector& q)> jacobian;
};

/// Mbar x'' + Cbar x' + Gbar = u.
struct CartesianModel {
    Matrix inertia;
    Matrix coriolis;
    Vector gravity;
};

/// dJ/dt along q', by central differences of J(q +- h q').
Matrix jacobian_rate(const JointSpaceModel& model, const Vector& q, const Vector& qdot,
                     double h = 1e-6);

/// Condition number above which a Jacobian counts as singular.
inline constexpr double kSingularCondition = 1e10;

/// Mbar = J^-T M J^-1, Cbar = J^-T (C - M J^-1 Jdot) J^-1, Gbar = J^-T G.
/// Restricted to square Jacobians; throws SingularJacobian otherwise.
CartesianModel to_cartesian(const JointSpaceModel& model, const Vector& q, const Vector& qdot);

struct TaskMotion {
    Vector velocity;      // J q'
    Vector acceleration;  // J q'' + Jdot q'
};

TaskMotion twist_from_joint(const JointSpaceModel& model, const Vector& q, const Vector& qdot,
                            const Vector& qddot);

/// tau = J^T u + C q' + G.
Vector joint_torque(const JointSpaceModel& model, const Vector& q, const Vector& qdot,
                    const Vector& wrench);

struct PlantState {
    Eigen::Vector3d position = Eigen::Vector3d::Zero();
    Quaternion orientation;
    Vector6 twist = Vector6::Zero();  // linear velocity, then world-frame angular velocity
    double t = 0.0;
};

struct TargetPose {
    Eigen::Vector3d position = Eigen::Vector3d::Zero();
    Quaternion orientation;
};

struct ImpedanceGains {
    Vector6 stiffness = Vector6::Constant(400.0);  // diagonal of K_d
    Vector6 damping = Vector6::Constant(40.0);     // diagonal of D_d

    static ImpedanceGains uniform(double k, double d);
    void validate() const;
};

/// Position error stacked over the vector part of xi * target^-1, taken on the
/// shorter rotation (w >= 0).
Vector6 pose_error(const PlantState& state, const TargetPose& target);

/// -K_d e - D_d x'.
Vector6 impedance_wrench(const PlantState& state, const TargetPose& target,
                         const ImpedanceGains& gains);

/// Kinetic energy of the twist plus the spring potential, 0.5 e_p^T K e_p +
/// sum_k 2 K_k (1 - |w|) over the rotational axes.
double plant_energy(const PlantState& state, const TargetPose& target,
                    const ImpedanceGains& gains, const Matrix6& inertia);

struct SimulationLog {
    std::vector<PlantState> states;
    std::vector<TargetPose> targets;
    std::vector<Eigen::Vector3d> position_error;
    std::array<double, 3> rmse_axis{};
    double rmse_position = 0.0;     // RMS of the Euclidean position error
    double rmse_orientation = 0.0;  // RMS of the rotation angle error (rad)
    double max_position_error = 0.0;
};

/// Advances the plant one semi-implicit Euler step of M x'' = wrench.
PlantState step_plant(const PlantState& state, const TargetPose& target,
                      const ImpedanceGains& gains, const Matrix6& inertia, double dt);

/// Drives a constant-inertia Cartesian plant (gravity pre-compensated) along the
/// trajectory with the impedance law. The plant starts at rest on the first pose and
/// the target is interpolated between trajectory samples. dt must not exceed the
/// trajectory's sample interval. Throws IntegrationFailure on divergence.
SimulationLog simulate_tracking(const PoseTrajectory& traj, const ImpedanceGains& gains,
                                const Matrix6& inertia, double dt);

/// Same, against a fixed target starting from `initial`.
SimulationLog simulate_constant_target(const PlantState& initial, const TargetPose& target,
                                       const ImpedanceGains& gains, const Matrix6& inertia,
                                       double dt, std::size_t steps);

/// CSV `t,x,y,z,qw,qx,qy,qz,ex,ey,ez` followed by a `# rmse_position=...` summary line.
void write_simulation_log(const SimulationLog& log, const std::filesystem::path& path);
std::string summary_line(const SimulationLog& log);

}  // namespace sim
}  // namespace handdmp
