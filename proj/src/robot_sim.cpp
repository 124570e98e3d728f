#include "handdmp/robot_sim.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "handdmp/error.hpp"
#include "handdmp/preprocess.hpp"
#include "handdmp/text_format.hpp"

namespace handdmp::sim {

namespace {

struct InvertedJacobian {
    Matrix jacobian;
    Matrix inverse;
};

InvertedJacobian invert_jacobian(const JointSpaceModel& model, const Vector& q) {
    Matrix j = model.jacobian(q);
    if (j.rows() != j.cols()) {
        throw InvalidInput("to_cartesian supports square Jacobians only (got " +
                           std::to_string(j.rows()) + "x" + std::to_string(j.cols()) + ")");
    }
    Eigen::JacobiSVD<Matrix> svd(j);
    const auto& sv = svd.singularValues();
    const double smallest = sv(sv.size() - 1);
    const double condition = smallest > 0.0 ? sv(0) / smallest : INFINITY;
    if (!(condition < kSingularCondition)) throw SingularJacobian(condition);
    Matrix inv = j.partialPivLu().inverse();
    return {std::move(j), std::move(inv)};
}

}  // namespace

Matrix jacobian_rate(const JointSpaceModel& model, const Vector& q, const Vector& qdot,
                     double h) {
    return (model.jacobian(q + h * qdot) - model.jacobian(q - h * qdot)) / (2.0 * h);
}

CartesianModel to_cartesian(const JointSpaceModel& model, const Vector& q, const Vector& qdot) {
    const auto [j, j_inv] = invert_jacobian(model, q);
    const Matrix m = model.inertia(q);
    const Matrix c = model.coriolis(q, qdot);
    const Vector g = model.gravity(q);
    const Matrix j_inv_t = j_inv.transpose();
    const Matrix j_dot = jacobian_rate(model, q, qdot);
    CartesianModel out;
    out.inertia = j_inv_t * m * j_inv;
    out.coriolis = j_inv_t * (c - m * j_inv * j_dot) * j_inv;
    out.gravity = j_inv_t * g;
    return out;
}

TaskMotion twist_from_joint(const JointSpaceModel& model, const Vector& q, const Vector& qdot,
                            const Vector& qddot) {
    const Matrix j = model.jacobian(q);
    if (j.cols() != qdot.size() || j.cols() != qddot.size()) {
        throw InvalidInput("joint vectors do not match the Jacobian width");
    }
    return {j * qdot, j * qddot + jacobian_rate(model, q, qdot) * qdot};
}

Vector joint_torque(const JointSpaceModel& model, const Vector& q, const Vector& qdot,
                    const Vector& wrench) {
    return model.jacobian(q).transpose() * wrench + model.coriolis(q, qdot) * qdot +
           model.gravity(q);
}

ImpedanceGains ImpedanceGains::uniform(double k, double d) {
    ImpedanceGains g{Vector6::Constant(k), Vector6::Constant(d)};
    g.validate();
    return g;
}

void ImpedanceGains::validate() const {
    for (int i = 0; i < 6; ++i) {
        if (!(stiffness(i) > 0.0) || !std::isfinite(stiffness(i))) {
            throw InvalidInput("impedance stiffness must be positive");
        }
        if (!(damping(i) > 0.0) || !std::isfinite(damping(i))) {
            throw InvalidInput("impedance damping must be positive");
        }
    }
}

namespace {

Quaternion orientation_error(const Quaternion& current, const Quaternion& target) {
    Quaternion e = quaternion_multiply(current, target.conjugate());
    if (e.w < 0.0) e = {-e.w, -e.x, -e.y, -e.z};
    return e;
}

}  // namespace

Vector6 pose_error(const PlantState& state, const TargetPose& target) {
    const Quaternion e = orientation_error(state.orientation, target.orientation);
    Vector6 err;
    err.head<3>() = state.position - target.position;
    err.tail<3>() << e.x, e.y, e.z;
    return err;
}

Vector6 impedance_wrench(const PlantState& state, const TargetPose& target,
                         const ImpedanceGains& gains) {
    const Vector6 e = pose_error(state, target);
    return -(gains.stiffness.cwiseProduct(e)) - gains.damping.cwiseProduct(state.twist);
}

double plant_energy(const PlantState& state, const TargetPose& target,
                    const ImpedanceGains& gains, const Matrix6& inertia) {
    const Vector6 e = pose_error(state, target);
    const Quaternion qe = orientation_error(state.orientation, target.orientation);
    double potential = 0.0;
    for (int i = 0; i < 3; ++i) potential += 0.5 * gains.stiffness(i) * e(i) * e(i);
    // Rotational springs act on sin(theta/2); with isotropic gains the potential is
    // 2K(1 - cos(theta/2)). Anisotropic gains use their mean.
    const double k_rot = gains.stiffness.tail<3>().mean();
    potential += 2.0 * k_rot * (1.0 - qe.w);
    return 0.5 * state.twist.dot(inertia * state.twist) + potential;
}

PlantState step_plant(const PlantState& state, const TargetPose& target,
                      const ImpedanceGains& gains, const Matrix6& inertia, double dt) {
    const Vector6 accel = inertia.ldlt().solve(impedance_wrench(state, target, gains));
    PlantState next = state;
    next.twist += dt * accel;
    next.position += dt * next.twist.head<3>();
    const Eigen::Vector3d omega = next.twist.tail<3>();
    const double angle = omega.norm() * dt;
    if (angle > 0.0) {
        const Eigen::Vector3d axis = omega.normalized();
        const double s = std::sin(angle / 2);
        const Quaternion dq{std::cos(angle / 2), s * axis.x(), s * axis.y(), s * axis.z()};
        next.orientation = quaternion_multiply(dq, state.orientation);
    }
    next.t = state.t + dt;
    return next;
}

namespace {

TargetPose interpolate_target(const PoseTrajectory& traj, double t) {
    const std::size_t n = traj.size();
    if (t <= traj.t.front()) {
        return {{traj.position[0][0], traj.position[1][0], traj.position[2][0]},
                traj.orientation[0]};
    }
    if (t >= traj.t.back()) {
        return {{traj.position[0][n - 1], traj.position[1][n - 1], traj.position[2][n - 1]},
                traj.orientation[n - 1]};
    }
    const auto it = std::upper_bound(traj.t.begin(), traj.t.end(), t);
    const std::size_t b = static_cast<std::size_t>(it - traj.t.begin());
    const std::size_t a = b - 1;
    const double u = (t - traj.t[a]) / (traj.t[b] - traj.t[a]);
    TargetPose target;
    for (int k = 0; k < 3; ++k) {
        target.position(k) = traj.position[k][a] + u * (traj.position[k][b] - traj.position[k][a]);
    }
    Quaternion qa = traj.orientation[a];
    Quaternion qb = traj.orientation[b];
    if (qa.w * qb.w + qa.x * qb.x + qa.y * qb.y + qa.z * qb.z < 0.0) {
        qb = {-qb.w, -qb.x, -qb.y, -qb.z};
    }
    target.orientation = Quaternion{qa.w + u * (qb.w - qa.w), qa.x + u * (qb.x - qa.x),
                                    qa.y + u * (qb.y - qa.y), qa.z + u * (qb.z - qa.z)}
                             .normalized();
    return target;
}

void finish_metrics(SimulationLog& log) {
    const double n = double(log.states.size());
    std::array<double, 3> sq{};
    double sq_norm = 0.0;
    double sq_angle = 0.0;
    for (std::size_t i = 0; i < log.states.size(); ++i) {
        const Eigen::Vector3d& e = log.position_error[i];
        for (int k = 0; k < 3; ++k) sq[k] += e(k) * e(k);
        sq_norm += e.squaredNorm();
        log.max_position_error = std::max(log.max_position_error, e.norm());
        const Quaternion qe = orientation_error(log.states[i].orientation, log.targets[i].orientation);
        const double vec = std::sqrt(qe.x * qe.x + qe.y * qe.y + qe.z * qe.z);
        const double angle = 2.0 * std::asin(std::min(1.0, vec));
        sq_angle += angle * angle;
    }
    for (int k = 0; k < 3; ++k) log.rmse_axis[k] = std::sqrt(sq[k] / n);
    log.rmse_position = std::sqrt(sq_norm / n);
    log.rmse_orientation = std::sqrt(sq_angle / n);
}

void record(SimulationLog& log, const PlantState& state, const TargetPose& target) {
    log.states.push_back(state);
    log.targets.push_back(target);
    log.position_error.push_back(state.position - target.position);
}

void check_finite(const PlantState& s, std::size_t step) {
    if (!s.position.allFinite() || !s.twist.allFinite() || !std::isfinite(s.orientation.w)) {
        throw IntegrationFailure(step, "plant simulation");
    }
}

void check_inertia(const Matrix6& inertia) {
    if (!inertia.isApprox(inertia.transpose()) || inertia.llt().info() != Eigen::Success) {
        throw InvalidInput("plant inertia must be symmetric positive definite");
    }
}

}  // namespace

SimulationLog simulate_tracking(const PoseTrajectory& traj, const ImpedanceGains& gains,
                                const Matrix6& inertia, double dt) {
    traj.check_consistent();
    gains.validate();
    check_inertia(inertia);
    if (!(dt > 0.0) || dt > traj.dt() * (1.0 + 1e-9)) {
        throw InvalidInput("simulation dt must be positive and not exceed the trajectory step");
    }
    const auto steps = static_cast<std::size_t>(std::llround(traj.duration() / dt));
    SimulationLog log;
    log.states.reserve(steps + 1);
    PlantState state;
    state.t = traj.t.front();
    TargetPose target = interpolate_target(traj, state.t);
    state.position = target.position;
    state.orientation = target.orientation;
    record(log, state, target);
    for (std::size_t k = 1; k <= steps; ++k) {
        state = step_plant(state, target, gains, inertia, dt);
        state.t = traj.t.front() + double(k) * dt;
        check_finite(state, k);
        target = interpolate_target(traj, state.t);
        record(log, state, target);
    }
    finish_metrics(log);
    return log;
}

SimulationLog simulate_constant_target(const PlantState& initial, const TargetPose& target,
                                       const ImpedanceGains& gains, const Matrix6& inertia,
                                       double dt, std::size_t steps) {
    gains.validate();
    check_inertia(inertia);
    if (!(dt > 0.0)) throw InvalidInput("simulation dt must be positive");
    SimulationLog log;
    PlantState state = initial;
    record(log, state, target);
    for (std::size_t k = 1; k <= steps; ++k) {
        state = step_plant(state, target, gains, inertia, dt);
        check_finite(state, k);
        record(log, state, target);
    }
    finish_metrics(log);
    return log;
}

std::string summary_line(const SimulationLog& log) {
    return "# rmse_position=" + format_double(log.rmse_position) +
           " rmse_x=" + format_double(log.rmse_axis[0]) +
           " rmse_y=" + format_double(log.rmse_axis[1]) +
           " rmse_z=" + format_double(log.rmse_axis[2]) +
           " rmse_orientation=" + format_double(log.rmse_orientation) +
           " max_position_error=" + format_double(log.max_position_error);
}

void write_simulation_log(const SimulationLog& log, const std::filesystem::path& path) {
    std::ostringstream os;
    os << "t,x,y,z,qw,qx,qy,qz,ex,ey,ez\n";
    for (std::size_t i = 0; i < log.states.size(); ++i) {
        const PlantState& s = log.states[i];
        const Eigen::Vector3d& e = log.position_error[i];
        os << format_double(s.t) << ',' << format_double(s.position.x()) << ','
           << format_double(s.position.y()) << ',' << format_double(s.position.z()) << ','
           << format_double(s.orientation.w) << ',' << format_double(s.orientation.x) << ','
           << format_double(s.orientation.y) << ',' << format_double(s.orientation.z) << ','
           << format_double(e.x()) << ',' << format_double(e.y()) << ',' << format_double(e.z())
           << '\n';
    }
    os << summary_line(log) << '\n';
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    out << os.str();
}

}  // namespace handdmp::sim
