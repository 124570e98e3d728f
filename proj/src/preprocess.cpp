#include "handdmp/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "handdmp/error.hpp"

namespace handdmp {

void PoseTrajectory::check_consistent() const {
    const std::size_t n = t.size();
    if (n < 2) throw InvalidInput("trajectory needs at least 2 samples");
    auto same = [n](const auto& v) { return v.size() == n; };
    bool ok = same(orientation) && same(thumb_index_distance) && same(grasp);
    for (int a = 0; a < 3; ++a) {
        ok = ok && same(position[a]) && same(euler[a]);
        ok = ok && (velocity[a].empty() || same(velocity[a]));
        ok = ok && (acceleration[a].empty() || same(acceleration[a]));
    }
    if (!ok) throw InvalidInput("trajectory channels have inconsistent lengths");
}

std::vector<double> mean_filter(std::span<const double> samples, int k) {
    const auto n = static_cast<long>(samples.size());
    if (k < 1) throw InvalidInput("mean filter window must be >= 1");
    if (k > n) {
        throw InvalidInput("mean filter window " + std::to_string(k) +
                           " exceeds signal length " + std::to_string(n));
    }
    const long left = (k - 1) / 2;
    const long right = k / 2;  // ceil((k-1)/2)
    std::vector<double> out(samples.size());
    for (long i = 0; i < n; ++i) {
        const long lo = std::max(0L, i - left);
        const long hi = std::min(n - 1, i + right);
        double sum = 0.0;
        for (long j = lo; j <= hi; ++j) sum += samples[j];
        out[i] = sum / double(hi - lo + 1);
    }
    return out;
}

SignalChannel mean_filter(const SignalChannel& channel, int k) {
    return {channel.name, mean_filter(channel.samples, k), channel.dt};
}

std::vector<double> unwrap_angles(std::span<const double> angles) {
    std::vector<double> out(angles.begin(), angles.end());
    constexpr double two_pi = 2 * std::numbers::pi;
    double offset = 0.0;
    for (std::size_t i = 1; i < angles.size(); ++i) {
        const double jump = angles[i] - angles[i - 1];
        offset -= two_pi * std::round(jump / two_pi);
        out[i] = angles[i] + offset;
    }
    return out;
}

namespace {

double median(std::vector<double> v) {
    const std::size_t mid = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + mid, v.end());
    if (v.size() % 2 == 1) return v[mid];
    const double upper = v[mid];
    const double lower = *std::max_element(v.begin(), v.begin() + mid);
    return 0.5 * (lower + upper);
}

void rebuild_orientation_and_grasp(PoseTrajectory& traj, const GraspParams& grasp) {
    const std::size_t n = traj.size();
    traj.orientation.resize(n);
    traj.grasp.assign(n, false);
    bool closed = false;
    for (std::size_t i = 0; i < n; ++i) {
        const EulerAngles e{traj.euler[0][i], traj.euler[1][i], traj.euler[2][i]};
        traj.orientation[i] = apply_end_effector_correction(euler_to_quaternion(e));
        closed = grasp_from_distance(traj.thumb_index_distance[i], grasp, closed);
        traj.grasp[i] = closed;
    }
}

}  // namespace

namespace {

std::vector<double> frame_intervals(std::span<const StampedPose> frames) {
    const std::size_t n = frames.size();
    if (n < 2) throw InvalidInput("resampling needs at least 2 frames");
    std::vector<double> intervals(n - 1);
    for (std::size_t i = 1; i < n; ++i) {
        intervals[i - 1] = frames[i].t - frames[i - 1].t;
        if (!(intervals[i - 1] > 0.0)) {
            throw InvalidInput("timestamps must be strictly increasing (frame " +
                               std::to_string(i) + ")");
        }
    }
    return intervals;
}

}  // namespace

PoseTrajectory resample_uniform(std::span<const StampedPose> frames, const GraspParams& grasp) {
    return resample_uniform(frames, median(frame_intervals(frames)), grasp);
}

PoseTrajectory resample_uniform(std::span<const StampedPose> frames, double target_step,
                                const GraspParams& grasp) {
    frame_intervals(frames);
    if (!(target_step > 0.0)) throw InvalidInput("resampling step must be positive");
    const std::size_t n = frames.size();
    const double t0 = frames.front().t;
    const double span = frames.back().t - t0;
    const auto steps = std::max<long>(1, std::lround(span / target_step));
    const double step = span / double(steps);

    // Source channels: x, y, z, yaw, pitch, roll (unwrapped), d_ti.
    std::array<std::vector<double>, 7> src;
    for (auto& c : src) c.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const HandPose& p = frames[i].pose;
        src[0][i] = p.position.x;
        src[1][i] = p.position.y;
        src[2][i] = p.position.z;
        src[3][i] = p.euler.yaw;
        src[4][i] = p.euler.pitch;
        src[5][i] = p.euler.roll;
        src[6][i] = p.thumb_index_distance;
    }
    for (int c = 3; c < 6; ++c) src[c] = unwrap_angles(src[c]);

    const std::size_t m = static_cast<std::size_t>(steps) + 1;
    std::array<std::vector<double>, 7> dst;
    for (auto& c : dst) c.resize(m);
    PoseTrajectory traj;
    traj.t.resize(m);
    // Source frame for grid points that land on a knot; their orientation is copied
    // verbatim instead of being rebuilt from Euler angles.
    std::vector<std::ptrdiff_t> knot(m, -1);
    std::size_t seg = 0;
    for (std::size_t j = 0; j < m; ++j) {
        const double tj = (j + 1 == m) ? frames.back().t : t0 + double(j) * step;
        traj.t[j] = tj;
        while (seg + 2 < n && frames[seg + 1].t <= tj) ++seg;
        const double ta = frames[seg].t;
        const double tb = frames[seg + 1].t;
        double u = std::clamp((tj - ta) / (tb - ta), 0.0, 1.0);
        if (u < 1e-9) knot[j] = std::ptrdiff_t(seg);
        if (u > 1.0 - 1e-9) knot[j] = std::ptrdiff_t(seg + 1);
        for (int c = 0; c < 7; ++c) {
            const double a = src[c][seg];
            const double b = src[c][seg + 1];
            // Snap onto knots so already-uniform input passes through unchanged.
            dst[c][j] = u < 1e-9 ? a : (u > 1.0 - 1e-9 ? b : a + (b - a) * u);
        }
    }
    for (int a = 0; a < 3; ++a) {
        traj.position[a] = std::move(dst[a]);
        traj.euler[a].resize(m);
        for (std::size_t j = 0; j < m; ++j) traj.euler[a][j] = wrap_angle(dst[3 + a][j]);
    }
    traj.thumb_index_distance = std::move(dst[6]);
    rebuild_orientation_and_grasp(traj, grasp);
    for (std::size_t j = 0; j < m; ++j) {
        if (knot[j] < 0) continue;
        const HandPose& p = frames[std::size_t(knot[j])].pose;
        traj.euler[0][j] = p.euler.yaw;
        traj.euler[1][j] = p.euler.pitch;
        traj.euler[2][j] = p.euler.roll;
        traj.orientation[j] = p.orientation;
    }
    return traj;
}

PoseTrajectory smooth(const PoseTrajectory& traj, int k, const GraspParams& grasp) {
    traj.check_consistent();
    PoseTrajectory out;
    out.t = traj.t;
    for (int a = 0; a < 3; ++a) {
        out.position[a] = mean_filter(traj.position[a], k);
        const auto filtered = mean_filter(unwrap_angles(traj.euler[a]), k);
        out.euler[a].resize(filtered.size());
        std::transform(filtered.begin(), filtered.end(), out.euler[a].begin(), wrap_angle);
    }
    out.thumb_index_distance = mean_filter(traj.thumb_index_distance, k);
    rebuild_orientation_and_grasp(out, grasp);
    return out;
}

Derivatives finite_differences(std::span<const double> x, double dt) {
    const std::size_t n = x.size();
    if (n < 2) throw InvalidInput("differentiation needs at least 2 samples");
    if (!(dt > 0.0)) throw InvalidInput("sample interval must be positive");
    Derivatives d{std::vector<double>(n), std::vector<double>(n, 0.0)};
    if (n == 2) {
        d.velocity[0] = d.velocity[1] = (x[1] - x[0]) / dt;
        return d;
    }
    const double dt2 = dt * dt;
    for (std::size_t i = 1; i + 1 < n; ++i) {
        d.velocity[i] = (x[i + 1] - x[i - 1]) / (2 * dt);
        d.acceleration[i] = (x[i + 1] - 2 * x[i] + x[i - 1]) / dt2;
    }
    d.velocity[0] = (-3 * x[0] + 4 * x[1] - x[2]) / (2 * dt);
    d.velocity[n - 1] = (3 * x[n - 1] - 4 * x[n - 2] + x[n - 3]) / (2 * dt);
    if (n == 3) {
        d.acceleration[0] = d.acceleration[2] = d.acceleration[1];
    } else {
        d.acceleration[0] = (2 * x[0] - 5 * x[1] + 4 * x[2] - x[3]) / dt2;
        d.acceleration[n - 1] = (2 * x[n - 1] - 5 * x[n - 2] + 4 * x[n - 3] - x[n - 4]) / dt2;
    }
    return d;
}

PoseTrajectory differentiate(const PoseTrajectory& traj) {
    traj.check_consistent();
    const double dt = traj.dt();
    for (std::size_t i = 1; i < traj.size(); ++i) {
        if (std::abs((traj.t[i] - traj.t[i - 1]) - dt) > 1e-6 * dt) {
            throw InvalidInput("differentiate requires a uniform time grid");
        }
    }
    PoseTrajectory out = traj;
    for (int a = 0; a < 3; ++a) {
        auto d = finite_differences(traj.position[a], dt);
        out.velocity[a] = std::move(d.velocity);
        out.acceleration[a] = std::move(d.acceleration);
    }
    return out;
}

}  // namespace handdmp
