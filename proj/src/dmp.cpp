#include "handdmp/dmp.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "handdmp/error.hpp"
#include "handdmp/preprocess.hpp"

namespace handdmp {

using nlohmann::json;

std::string to_string(DmpVariant v) { return v == DmpVariant::Original ? "original" : "modified"; }

DmpVariant parse_variant(const std::string& name) {
    if (name == "original") return DmpVariant::Original;
    if (name == "modified") return DmpVariant::Modified;
    throw InvalidInput("unknown DMP variant '" + name + "' (expected original or modified)");
}

double phase_step(double s, double alpha, double dt, double duration) {
    if (!(dt > 0.0) || !(duration > 0.0)) {
        throw InvalidInput("phase step needs dt > 0 and duration > 0");
    }
    return s * std::exp(-alpha * dt / duration);
}

BasisSet BasisSet::make(int count, double alpha, std::size_t axes) {
    if (count < 1) throw InvalidInput("basis count must be >= 1");
    if (!(alpha > 0.0)) throw InvalidInput("phase decay alpha_s must be positive");
    const auto n = static_cast<std::size_t>(count);
    BasisSet b;
    b.centers.resize(n);
    b.widths.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        b.centers[i] = n == 1 ? 1.0 : std::exp(-alpha * double(i) / double(n - 1));
    }
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double gap = b.centers[i + 1] - b.centers[i];
        b.widths[i] = 1.0 / (gap * gap);
    }
    // A single basis has no neighbour; any positive width works since it normalizes out.
    b.widths[n - 1] = n == 1 ? 1.0 : b.widths[n - 2];
    b.weights.assign(axes, std::vector<double>(n, 0.0));
    return b;
}

std::vector<double> BasisSet::activations(double s) const {
    std::vector<double> psi(size());
    for (std::size_t i = 0; i < size(); ++i) {
        const double d = s - centers[i];
        psi[i] = std::exp(-widths[i] * d * d);
    }
    return psi;
}

double BasisSet::forcing(std::size_t axis, double s) const {
    const auto psi = activations(s);
    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < psi.size(); ++i) {
        num += weights[axis][i] * psi[i];
        den += psi[i];
    }
    return den > 0.0 ? num / den * s : 0.0;
}

std::vector<double> BasisSet::forcing(double s) const {
    const auto psi = activations(s);
    double den = 0.0;
    for (double p : psi) den += p;
    std::vector<double> f(weights.size(), 0.0);
    if (!(den > 0.0)) return f;
    for (std::size_t a = 0; a < weights.size(); ++a) {
        double num = 0.0;
        for (std::size_t i = 0; i < psi.size(); ++i) num += weights[a][i] * psi[i];
        f[a] = num / den * s;
    }
    return f;
}

void BasisSet::validate() const {
    if (centers.empty()) throw InvalidInput("basis set is empty");
    if (widths.size() != centers.size()) throw InvalidInput("basis widths/centers mismatch");
    for (std::size_t i = 0; i < centers.size(); ++i) {
        if (!(centers[i] > 0.0 && centers[i] <= 1.0)) {
            throw InvalidInput("basis centers must lie in (0, 1]");
        }
        if (i > 0 && !(centers[i] < centers[i - 1])) {
            throw InvalidInput("basis centers must be strictly decreasing");
        }
        if (!(widths[i] > 0.0)) throw InvalidInput("basis widths must be positive");
    }
    for (const auto& w : weights) {
        if (w.size() != centers.size()) throw InvalidInput("basis weight vector has wrong size");
    }
}

Demonstration Demonstration::from_trajectory(const PoseTrajectory& traj) {
    if (!traj.has_derivatives()) {
        throw InvalidInput("trajectory must be differentiated before fitting");
    }
    Demonstration d;
    d.time = traj.t;
    for (int a = 0; a < 3; ++a) {
        d.position.push_back(traj.position[a]);
        d.velocity.push_back(traj.velocity[a]);
        d.acceleration.push_back(traj.acceleration[a]);
    }
    return d;
}

ForcingTarget compute_f_target(const Demonstration& demo, double stiffness, double damping,
                               DmpVariant variant, double alpha) {
    const std::size_t n = demo.size();
    const std::size_t axes = demo.axes();
    if (n < 2 || axes == 0) throw InvalidInput("demonstration needs >= 2 samples and >= 1 axis");
    if (demo.velocity.size() != axes || demo.acceleration.size() != axes) {
        throw InvalidInput("demonstration lacks velocity/acceleration");
    }
    const double delta = demo.duration();
    if (!(delta > 0.0)) throw InvalidInput("demonstration duration must be positive");

    ForcingTarget target;
    target.phase.resize(n);
    const CanonicalSystem cs{alpha};
    for (std::size_t j = 0; j < n; ++j) target.phase[j] = cs.at(demo.time[j] - demo.time[0], delta);

    for (std::size_t a = 0; a < axes; ++a) {
        const auto& x = demo.position[a];
        const auto& v = demo.velocity[a];
        const auto& acc = demo.acceleration[a];
        if (x.size() != n || v.size() != n || acc.size() != n) {
            throw InvalidInput("demonstration axis " + std::to_string(a) + " has wrong length");
        }
        const double x0 = x.front();
        const double g = x.back();
        const double span = g - x0;
        if (variant == DmpVariant::Original && std::abs(span) < kMinimumSpan) {
            throw DegenerateSpan(a, std::abs(span));
        }
        std::vector<double> f(n);
        for (std::size_t j = 0; j < n; ++j) {
            // delta*v' with v = delta*x' gives delta^2 x''.
            const double base = delta * delta * acc[j] - stiffness * (g - x[j]) + damping * delta * v[j];
            f[j] = variant == DmpVariant::Original ? base / span
                                                   : base + stiffness * span * target.phase[j];
        }
        target.values.push_back(std::move(f));
        target.start.push_back(x0);
        target.goal.push_back(g);
    }
    return target;
}

BasisSet fit_weights(const ForcingTarget& target, BasisSet basis, DmpVariant variant) {
    basis.validate();
    const std::size_t n = target.phase.size();
    const std::size_t axes = target.values.size();
    if (n < basis.size()) {
        throw InvalidInput("need at least as many samples (" + std::to_string(n) +
                           ") as basis functions (" + std::to_string(basis.size()) + ")");
    }
    if (target.start.size() != axes || target.goal.size() != axes) {
        throw InvalidInput("forcing target lacks start/goal for every axis");
    }
    std::vector<std::vector<double>> psi(n);
    for (std::size_t j = 0; j < n; ++j) psi[j] = basis.activations(target.phase[j]);

    basis.weights.assign(axes, std::vector<double>(basis.size(), 0.0));
    for (std::size_t a = 0; a < axes; ++a) {
        if (target.values[a].size() != n) throw InvalidInput("forcing target length mismatch");
        // The original variant's target was divided by (g - x0); multiplying it back
        // gives the undivided forcing, regressed on s (g - x0).
        const double scale =
            variant == DmpVariant::Original ? target.goal[a] - target.start[a] : 1.0;
        for (std::size_t i = 0; i < basis.size(); ++i) {
            double num = 0.0;
            double den = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                const double r = target.phase[j] * scale;
                num += r * psi[j][i] * (target.values[a][j] * scale);
                den += r * psi[j][i] * r;
            }
            if (!(den > 0.0) || !std::isfinite(den)) throw UnsupportedBasis(i);
            basis.weights[a][i] = num / den;
        }
    }
    return basis;
}

void DmpParams::validate() const {
    if (!(stiffness > 0.0)) throw InvalidInput("stiffness K must be positive");
    if (!(damping > 0.0)) throw InvalidInput("damping D must be positive");
    if (!(alpha > 0.0)) throw InvalidInput("alpha_s must be positive");
    if (basis_count < 1) throw InvalidInput("basis count must be >= 1");
}

void DmpModel::validate() const {
    if (!(stiffness > 0.0) || !(damping > 0.0) || !(duration > 0.0) || !(alpha > 0.0)) {
        throw InvalidInput("model requires K, D, delta and alpha_s > 0");
    }
    if (start.empty() || goal.size() != start.size() || basis.weights.size() != start.size()) {
        throw InvalidInput("model axis counts disagree");
    }
    basis.validate();
}

DmpModel fit_dmp(const Demonstration& demo, const DmpParams& params) {
    params.validate();
    const auto target =
        compute_f_target(demo, params.stiffness, params.damping, params.variant, params.alpha);
    DmpModel model;
    model.stiffness = params.stiffness;
    model.damping = params.damping;
    model.duration = demo.duration();
    model.alpha = params.alpha;
    model.samples = demo.size();
    model.dt = model.duration / double(demo.size() - 1);
    model.start = target.start;
    model.goal = target.goal;
    model.variant = params.variant;
    model.basis = fit_weights(
        target, BasisSet::make(params.basis_count, params.alpha, demo.axes()), params.variant);
    return model;
}

RolloutResult rollout(const DmpModel& model, std::span<const double> start,
                      std::span<const double> goal, std::size_t n_steps, double dt) {
    model.validate();
    const std::size_t axes = model.axes();
    if (start.size() != axes || goal.size() != axes) {
        throw InvalidInput("start/goal must have " + std::to_string(axes) + " components");
    }
    if (n_steps < 2) throw InvalidInput("rollout needs n_steps >= 2");
    if (!(dt > 0.0)) throw InvalidInput("rollout dt must be positive");

    const double delta = model.duration;
    const double k = model.stiffness;
    const double d = model.damping;

    RolloutResult out;
    out.time.resize(n_steps);
    out.phase.resize(n_steps);
    out.position.assign(axes, std::vector<double>(n_steps));
    out.velocity.assign(axes, std::vector<double>(n_steps));
    out.forcing.assign(axes, std::vector<double>(n_steps));

    std::vector<double> x(start.begin(), start.end());
    std::vector<double> v(axes, 0.0);
    CanonicalSystem cs{model.alpha, 1.0};
    for (std::size_t step = 0; step < n_steps; ++step) {
        out.time[step] = double(step) * dt;
        out.phase[step] = cs.s;
        const auto f = model.basis.forcing(cs.s);
        for (std::size_t a = 0; a < axes; ++a) {
            const double span = goal[a] - start[a];
            out.position[a][step] = x[a];
            out.velocity[a][step] = v[a] / delta;
            double drive = 0.0;
            if (model.variant == DmpVariant::Original) {
                out.forcing[a][step] = span * f[a];
                drive = out.forcing[a][step];
            } else {
                out.forcing[a][step] = f[a];
                drive = -k * span * cs.s + f[a];
            }
            const double accel = (k * (goal[a] - x[a]) - d * v[a] + drive) / delta;
            x[a] += dt * v[a] / delta;
            v[a] += dt * accel;
            if (!std::isfinite(x[a]) || !std::isfinite(v[a])) {
                throw IntegrationFailure(step + 1, "DMP rollout");
            }
        }
        cs.step(dt, delta);
    }
    return out;
}

RolloutResult rollout_with_settling(const DmpModel& model, std::span<const double> start,
                                    std::span<const double> goal, double settle_fraction) {
    if (model.samples < 2 || !(model.dt > 0.0)) {
        throw InvalidInput("model carries no demonstration grid");
    }
    if (!(settle_fraction >= 0.0)) throw InvalidInput("settle fraction must be >= 0");
    const auto extra =
        static_cast<std::size_t>(std::ceil(settle_fraction * double(model.samples - 1)));
    return rollout(model, start, goal, model.samples + extra, model.dt);
}

PoseTrajectory replay_attach(const RolloutResult& positions, const PoseTrajectory& demo) {
    demo.check_consistent();
    const std::size_t n = positions.size();
    if (positions.position.size() != 3) throw InvalidInput("replay needs 3 position axes");
    if (n < demo.size()) {
        throw InvalidInput("length mismatch: rollout has " + std::to_string(n) +
                           " samples, demonstration has " + std::to_string(demo.size()));
    }
    PoseTrajectory out;
    out.t.resize(n);
    for (std::size_t k = 0; k < n; ++k) out.t[k] = demo.t.front() + positions.time[k];
    for (int a = 0; a < 3; ++a) {
        out.position[a] = positions.position[a];
        out.velocity[a] = positions.velocity[a];
        out.euler[a].resize(n);
    }
    out.orientation.resize(n);
    out.thumb_index_distance.resize(n);
    out.grasp.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        const std::size_t src = std::min(k, demo.size() - 1);
        for (int a = 0; a < 3; ++a) out.euler[a][k] = demo.euler[a][src];
        out.orientation[k] = demo.orientation[src];
        out.thumb_index_distance[k] = demo.thumb_index_distance[src];
        out.grasp[k] = demo.grasp[src];
    }
    return out;
}

std::string model_to_json(const DmpModel& model) {
    json doc = {{"variant", to_string(model.variant)},
                {"K", model.stiffness},
                {"D", model.damping},
                {"delta", model.duration},
                {"alpha_s", model.alpha},
                {"dt", model.dt},
                {"samples", model.samples},
                {"N", model.basis.size()},
                {"x0", model.start},
                {"g", model.goal},
                {"centers", model.basis.centers},
                {"widths", model.basis.widths},
                {"weights", model.basis.weights}};
    return doc.dump(1);
}

DmpModel model_from_json(const std::string& text) {
    DmpModel m;
    try {
        const json doc = json::parse(text);
        m.variant = parse_variant(doc.at("variant").get<std::string>());
        m.stiffness = doc.at("K").get<double>();
        m.damping = doc.at("D").get<double>();
        m.duration = doc.at("delta").get<double>();
        m.alpha = doc.at("alpha_s").get<double>();
        m.dt = doc.at("dt").get<double>();
        m.samples = doc.at("samples").get<std::size_t>();
        m.start = doc.at("x0").get<std::vector<double>>();
        m.goal = doc.at("g").get<std::vector<double>>();
        m.basis.centers = doc.at("centers").get<std::vector<double>>();
        m.basis.widths = doc.at("widths").get<std::vector<double>>();
        m.basis.weights = doc.at("weights").get<std::vector<std::vector<double>>>();
        if (doc.at("N").get<std::size_t>() != m.basis.centers.size()) {
            throw InvalidInput("N does not match the number of centers");
        }
    } catch (const json::exception& e) {
        throw ParseError(0, std::string("model file: ") + e.what());
    } catch (const InvalidInput& e) {
        throw ParseError(0, std::string("model file: ") + e.what());
    }
    try {
        m.validate();
    } catch (const InvalidInput& e) {
        throw ParseError(0, std::string("model file: ") + e.what());
    }
    return m;
}

void save_model(const DmpModel& model, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    out << model_to_json(model) << '\n';
}

DmpModel load_model(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return model_from_json(ss.str());
}

}  // namespace handdmp
