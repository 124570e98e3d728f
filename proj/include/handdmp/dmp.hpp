#pragma once

#include <cmath>
#include <cstddef>
#include <filesystem>
#include <numbers>
#include <span>
#include <string>
#include <vector>

namespace handdmp {

struct PoseTrajectory;

/// Original: delta*v' = K(g - x) - D v + (g - x0) f
/// Modified: delta*v' = K(g - x) - D v - K(g - x0) s + f
/// Both share delta*x' = v and the phase decay s' = -alpha_s s / delta.
enum class DmpVariant { Original, Modified };

std::string to_string(DmpVariant v);
DmpVariant parse_variant(const std::string& name);

/// Phase decays to 1% at the nominal duration.
inline const double kDefaultPhaseDecay = std::log(100.0);
inline constexpr int kDefaultBasisCount = 50;
inline constexpr double kDefaultStiffness = 150.0;
inline const double kDefaultDamping = 2.0 * std::sqrt(kDefaultStiffness);

/// Exact solution of s' = -alpha s / delta over one step.
double phase_step(double s, double alpha, double dt, double duration);

struct CanonicalSystem {
    double alpha = kDefaultPhaseDecay;
    double s = 1.0;

    void step(double dt, double duration) { s = phase_step(s, alpha, dt, duration); }
    /// Phase at time t after the start of a movement of length `duration`.
    double at(double t, double duration) const { return std::exp(-alpha * t / duration); }
};

/// Gaussian basis over the phase. `weights[axis][i]` multiplies basis i.
struct BasisSet {
    std::vector<double> centers;
    std::vector<double> widths;
    std::vector<std::vector<double>> weights;

    std::size_t size() const { return centers.size(); }

    /// Centers c_i = exp(-alpha i / (N - 1)), i.e. evenly spaced in time; widths
    /// h_i = 1 / (c_{i+1} - c_i)^2 with the last width copied. Weights start at zero.
    static BasisSet make(int count, double alpha, std::size_t axes);

    /// Psi_i(s) = exp(-h_i (s - c_i)^2).
    std::vector<double> activations(double s) const;

    /// f(s) = s * sum(w_i Psi_i) / sum(Psi_i) for one axis.
    double forcing(std::size_t axis, double s) const;
    std::vector<double> forcing(double s) const;

    void validate() const;
};

/// Per-axis samples of a demonstration on a uniform time grid.
struct Demonstration {
    std::vector<double> time;
    std::vector<std::vector<double>> position;
    std::vector<std::vector<double>> velocity;
    std::vector<std::vector<double>> acceleration;

    std::size_t axes() const { return position.size(); }
    std::size_t size() const { return time.size(); }
    double duration() const { return time.back() - time.front(); }

    /// Position axes of a differentiated trajectory.
    static Demonstration from_trajectory(const PoseTrajectory& traj);
};

struct ForcingTarget {
    std::vector<double> phase;
    std::vector<std::vector<double>> values;  // [axis][sample]
    std::vector<double> start;
    std::vector<double> goal;
};

inline constexpr double kMinimumSpan = 1e-6;

/// Solves the transformation system for f at every sample. Start and goal are the
/// first and last demonstrated positions. Throws DegenerateSpan for the original
/// variant when |g - x0| < 1e-6 on any axis.
ForcingTarget compute_f_target(const Demonstration& demo, double stiffness, double damping,
                               DmpVariant variant, double alpha = kDefaultPhaseDecay);

/// Locally weighted regression, one independent weighted least-squares problem per
/// basis function. For the original variant the regressor is s_j (g - x0) and the
/// response is the undivided forcing (g - x0) f_target; for the modified variant they
/// are s_j and f_target. Throws UnsupportedBasis when a basis has no support.
BasisSet fit_weights(const ForcingTarget& target, BasisSet basis, DmpVariant variant);

struct DmpParams {
    double stiffness = kDefaultStiffness;
    double damping = kDefaultDamping;
    double alpha = kDefaultPhaseDecay;
    int basis_count = kDefaultBasisCount;
    DmpVariant variant = DmpVariant::Modified;

    void validate() const;
};

struct DmpModel {
    double stiffness = kDefaultStiffness;
    double damping = kDefaultDamping;
    double duration = 1.0;
    double alpha = kDefaultPhaseDecay;
    double dt = 0.0;              // demonstration sample interval
    std::size_t samples = 0;      // demonstration sample count
    std::vector<double> start;
    std::vector<double> goal;
    BasisSet basis;
    DmpVariant variant = DmpVariant::Modified;

    std::size_t axes() const { return start.size(); }
    void validate() const;
};

DmpModel fit_dmp(const Demonstration& demo, const DmpParams& params);

struct RolloutResult {
    std::vector<double> time;
    std::vector<double> phase;
    std::vector<std::vector<double>> position;  // [axis][step]
    std::vector<std::vector<double>> velocity;
    /// Forcing term as it enters the transformation system: (g - x0) f for the
    /// original variant, f for the modified one.
    std::vector<std::vector<double>> forcing;

    std::size_t size() const { return time.size(); }
};

/// Explicit Euler integration of `n_steps` samples (the first is the start state).
/// Throws IntegrationFailure on a non-finite state.
RolloutResult rollout(const DmpModel& model, std::span<const double> start,
                      std::span<const double> goal, std::size_t n_steps, double dt);

/// Rollout on the demonstration grid followed by `settle_fraction * duration` of extra
/// samples so the system can settle on the goal.
RolloutResult rollout_with_settling(const DmpModel& model, std::span<const double> start,
                                    std::span<const double> goal,
                                    double settle_fraction = 0.5);

/// Attaches the demonstration's orientation, Euler, d_ti and grasp to rolled-out
/// positions by sample index. Samples beyond the demonstration hold its final values;
/// a rollout shorter than the demonstration is an error.
PoseTrajectory replay_attach(const RolloutResult& positions, const PoseTrajectory& demo);

/// Structured text (JSON). Doubles are written with full precision so a load after a
/// save reproduces every field exactly.
void save_model(const DmpModel& model, const std::filesystem::path& path);
DmpModel load_model(const std::filesystem::path& path);
std::string model_to_json(const DmpModel& model);
DmpModel model_from_json(const std::string& text);

}  // namespace handdmp
