#pragma once

// The two-qubit quantum neural network. Its weights are a piecewise-constant
// Hamiltonian schedule; the forward pass prepares rho(0) from the input
// state, evolves it to t_f and reads out <Z_A Z_B>^2. Training is full-batch
// gradient descent on the mean squared output error, with gradients taken by
// central finite differences over the 5 x slice_count control amplitudes.

#include <json.hpp>

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "errors.hpp"
#include "metrics.hpp"
#include "quantum_core.hpp"
#include "random.hpp"

namespace qnnbench {

struct QnnConfig {
    double learning_rate = 2.0;
    std::size_t max_epochs = 500;
    double rms_target = 0.01; ///< fraction; 0.01 is 1%
    double fd_step = 1e-5;
    std::uint64_t seed = 1;

    void validate() const {
        if (!(learning_rate > 0.0) || !std::isfinite(learning_rate))
            throw ValidationError("QNN learning rate must be positive");
        validate_stopping_rule(rms_target, max_epochs);
        if (!(fd_step > 0.0 && fd_step <= 1e-2)) throw ValidationError("fd_step must lie in (0, 1e-2]");
    }
};

struct QnnPair {
    PureState state;
    double target = 0.0;
};

/// Every parameter uniform in [-1, 1].
inline HamiltonianSchedule random_schedule(std::size_t slice_count, double total_time, SeedStream rng) {
    HamiltonianSchedule s = HamiltonianSchedule::zero(slice_count, total_time);
    for (std::size_t i = 0; i < s.parameter_count(); ++i) s.parameter(i) = rng.uniform(-1.0, 1.0);
    s.validate();
    return s;
}

inline double qnn_forward(const PureState& input, const HamiltonianSchedule& schedule) {
    return correlation_squared(propagate(pure_to_density(input), schedule));
}

namespace detail {

// Same map as qnn_forward with the propagator built once for the batch.
inline double qnn_output_with(const Matrix4c& u, const DensityMatrix& rho0) {
    return correlation_squared(DensityMatrix::trusted(u * rho0.matrix() * u.adjoint()));
}

struct PreparedBatch {
    std::vector<DensityMatrix> rho;
    std::vector<double> target;
};

inline PreparedBatch prepare(const std::vector<QnnPair>& batch) {
    if (batch.empty()) throw ValidationError("QNN batch is empty");
    PreparedBatch p;
    p.rho.reserve(batch.size());
    p.target.reserve(batch.size());
    for (const auto& b : batch) {
        p.rho.push_back(pure_to_density(b.state));
        p.target.push_back(b.target);
    }
    return p;
}

inline double batch_loss(const HamiltonianSchedule& schedule, const PreparedBatch& batch) {
    const Matrix4c u = schedule_propagator(schedule).matrix();
    double sum = 0.0;
    for (std::size_t i = 0; i < batch.rho.size(); ++i) {
        const double e = qnn_output_with(u, batch.rho[i]) - batch.target[i];
        sum += e * e;
    }
    return sum / static_cast<double>(batch.rho.size());
}

inline std::vector<double> batch_outputs(const HamiltonianSchedule& schedule, const PreparedBatch& batch) {
    const Matrix4c u = schedule_propagator(schedule).matrix();
    std::vector<double> out;
    out.reserve(batch.rho.size());
    for (const auto& r : batch.rho) out.push_back(qnn_output_with(u, r));
    return out;
}

inline std::vector<double> batch_gradient(const HamiltonianSchedule& schedule, const PreparedBatch& batch, double h) {
    HamiltonianSchedule probe = schedule;
    std::vector<double> g(schedule.parameter_count());
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double p0 = schedule.parameter(i);
        probe.parameter(i) = p0 + h;
        const double up = batch_loss(probe, batch);
        probe.parameter(i) = p0 - h;
        const double down = batch_loss(probe, batch);
        probe.parameter(i) = p0;
        g[i] = (up - down) / (2.0 * h);
    }
    return g;
}

} // namespace detail

inline std::vector<double> qnn_outputs(const HamiltonianSchedule& schedule, const std::vector<QnnPair>& batch) {
    return detail::batch_outputs(schedule, detail::prepare(batch));
}

/// Mean squared output error over the batch.
inline double qnn_loss(const HamiltonianSchedule& schedule, const std::vector<QnnPair>& batch) {
    return detail::batch_loss(schedule, detail::prepare(batch));
}

inline double qnn_rms(const HamiltonianSchedule& schedule, const std::vector<QnnPair>& batch) {
    return 100.0 * std::sqrt(qnn_loss(schedule, batch));
}

/// Central-difference gradient of qnn_loss, slice-major over
/// {K_A, K_B, eps_A, eps_B, zeta}.
inline std::vector<double> qnn_gradient(const HamiltonianSchedule& schedule, const std::vector<QnnPair>& batch,
                                        double fd_step = 1e-5) {
    if (!(fd_step > 0.0 && fd_step <= 1e-2)) throw ValidationError("fd_step must lie in (0, 1e-2]");
    schedule.validate();
    return detail::batch_gradient(schedule, detail::prepare(batch), fd_step);
}

struct QnnTrainResult : TrainResult {
    HamiltonianSchedule schedule;
};

/// One epoch is one full-batch gradient step.
inline QnnTrainResult qnn_train(const std::vector<QnnPair>& trainset, const QnnConfig& config,
                                const HamiltonianSchedule& initial) {
    config.validate();
    initial.validate();
    const auto batch = detail::prepare(trainset);
    const double target_pct = 100.0 * config.rms_target;

    QnnTrainResult r;
    r.schedule = initial;
    r.rms_history.push_back(100.0 * std::sqrt(detail::batch_loss(r.schedule, batch)));
    if (r.rms_history.back() <= target_pct) {
        r.converged = true;
        return r;
    }
    while (r.epochs_used < config.max_epochs) {
        const auto g = detail::batch_gradient(r.schedule, batch, config.fd_step);
        for (std::size_t i = 0; i < g.size(); ++i) r.schedule.parameter(i) -= config.learning_rate * g[i];
        ++r.epochs_used;
        r.rms_history.push_back(100.0 * std::sqrt(detail::batch_loss(r.schedule, batch)));
        if (r.rms_history.back() <= target_pct) {
            r.converged = true;
            break;
        }
    }
    return r;
}

/// Entanglement estimate from a schedule trained on the witness task.
inline double qnn_witness(const PureState& input, const HamiltonianSchedule& schedule) {
    return qnn_forward(input, schedule);
}

// JSON: {"total_time": t, "slices": [{"K_A", "K_B", "eps_A", "eps_B", "zeta"}]}

inline nlohmann::json schedule_to_json(const HamiltonianSchedule& s) {
    nlohmann::json slices = nlohmann::json::array();
    for (const auto& p : s.slices)
        slices.push_back({{"K_A", p.k_a}, {"K_B", p.k_b}, {"eps_A", p.eps_a}, {"eps_B", p.eps_b}, {"zeta", p.zeta}});
    return {{"total_time", s.total_time}, {"slices", std::move(slices)}};
}

inline HamiltonianSchedule schedule_from_json(const nlohmann::json& j) {
    try {
        HamiltonianSchedule s;
        s.total_time = j.at("total_time").get<double>();
        for (const auto& js : j.at("slices")) {
            s.slices.push_back({js.at("K_A").get<double>(), js.at("K_B").get<double>(), js.at("eps_A").get<double>(),
                                js.at("eps_B").get<double>(), js.at("zeta").get<double>()});
        }
        s.validate();
        return s;
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("malformed schedule JSON: ") + e.what());
    }
}

} // namespace qnnbench
