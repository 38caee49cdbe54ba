#pragma once

// Real-valued feed-forward network: sigmoid on every layer, per-pair
// gradient descent on one-half squared error.

#include <Eigen/Dense>
#include <json.hpp>

#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "errors.hpp"
#include "metrics.hpp"
#include "random.hpp"

namespace qnnbench {

struct RealPair {
    Eigen::VectorXd input;
    Eigen::VectorXd target;
};

struct RealLayer {
    Eigen::MatrixXd weights; ///< n_out x n_in
    Eigen::VectorXd biases;  ///< n_out

    Eigen::Index inputs() const { return weights.cols(); }
    Eigen::Index outputs() const { return weights.rows(); }
};

class RealLayerStack {
public:
    RealLayerStack() = default;
    RealLayerStack(std::vector<RealLayer> layers, double learning_rate)
        : layers_(std::move(layers)), learning_rate_(learning_rate) {
        validate();
    }

    /// Layer sizes {n_in, h1, ..., n_out}; weights and biases uniform in
    /// [-0.5, 0.5].
    static RealLayerStack random(const std::vector<std::size_t>& architecture, double learning_rate, SeedStream rng) {
        if (architecture.size() < 2) throw ValidationError("architecture needs at least input and output sizes");
        std::vector<RealLayer> layers;
        for (std::size_t k = 0; k + 1 < architecture.size(); ++k) {
            const auto n_in = static_cast<Eigen::Index>(architecture[k]);
            const auto n_out = static_cast<Eigen::Index>(architecture[k + 1]);
            if (n_in == 0 || n_out == 0) throw ValidationError("layer sizes must be positive");
            RealLayer layer{Eigen::MatrixXd(n_out, n_in), Eigen::VectorXd(n_out)};
            for (Eigen::Index i = 0; i < n_out; ++i) {
                for (Eigen::Index j = 0; j < n_in; ++j) layer.weights(i, j) = rng.uniform(-0.5, 0.5);
                layer.biases(i) = rng.uniform(-0.5, 0.5);
            }
            layers.push_back(std::move(layer));
        }
        return RealLayerStack(std::move(layers), learning_rate);
    }

    const std::vector<RealLayer>& layers() const noexcept { return layers_; }
    std::vector<RealLayer>& layers() noexcept { return layers_; }
    double learning_rate() const noexcept { return learning_rate_; }
    void set_learning_rate(double lr) {
        if (!(lr >= 0.0) || !std::isfinite(lr)) throw ValidationError("learning rate must be finite and >= 0");
        learning_rate_ = lr;
    }

    Eigen::Index input_size() const { return layers_.front().inputs(); }
    Eigen::Index output_size() const { return layers_.back().outputs(); }

    std::vector<std::size_t> architecture() const {
        std::vector<std::size_t> a{static_cast<std::size_t>(input_size())};
        for (const auto& l : layers_) a.push_back(static_cast<std::size_t>(l.outputs()));
        return a;
    }

    std::size_t parameter_count() const {
        std::size_t n = 0;
        for (const auto& l : layers_) n += static_cast<std::size_t>(l.weights.size() + l.biases.size());
        return n;
    }

    void validate() const {
        if (layers_.empty()) throw ValidationError("network has no layers");
        for (std::size_t k = 0; k < layers_.size(); ++k) {
            const auto& l = layers_[k];
            if (l.biases.size() != l.outputs()) throw ValidationError("bias length does not match layer outputs");
            if (k > 0 && l.inputs() != layers_[k - 1].outputs())
                throw ValidationError("layer " + std::to_string(k) + " does not chain with the previous layer");
            if (!l.weights.allFinite() || !l.biases.allFinite()) throw ValidationError("non-finite weight");
        }
        if (!(learning_rate_ >= 0.0) || !std::isfinite(learning_rate_)) throw ValidationError("bad learning rate");
    }

private:
    std::vector<RealLayer> layers_;
    double learning_rate_ = 0.1;
};

inline double sigmoid(double t) { return 1.0 / (1.0 + std::exp(-t)); }

namespace detail {

// Activations of every layer, activations[0] being the input.
inline std::vector<Eigen::VectorXd> rvnn_activations(const RealLayerStack& net, const Eigen::VectorXd& input) {
    if (input.size() != net.input_size())
        throw ValidationError("input length " + std::to_string(input.size()) + " does not match network input " +
                              std::to_string(net.input_size()));
    std::vector<Eigen::VectorXd> acts;
    acts.reserve(net.layers().size() + 1);
    acts.push_back(input);
    for (const auto& l : net.layers())
        acts.push_back((l.weights * acts.back() + l.biases).unaryExpr([](double t) { return sigmoid(t); }));
    return acts;
}

} // namespace detail

inline Eigen::VectorXd rvnn_forward(const RealLayerStack& net, const Eigen::VectorXd& input) {
    return detail::rvnn_activations(net, input).back();
}

/// d(loss)/d(parameters) per layer for loss = 0.5 * |y - t|^2.
struct RealGradient {
    std::vector<Eigen::MatrixXd> weights;
    std::vector<Eigen::VectorXd> biases;
};

inline double rvnn_pair_loss(const RealLayerStack& net, const RealPair& pair) {
    return 0.5 * (rvnn_forward(net, pair.input) - pair.target).squaredNorm();
}

inline RealGradient rvnn_gradient(const RealLayerStack& net, const RealPair& pair) {
    const auto acts = detail::rvnn_activations(net, pair.input);
    if (pair.target.size() != net.output_size()) throw ValidationError("target length does not match network output");
    const std::size_t n = net.layers().size();
    RealGradient g{std::vector<Eigen::MatrixXd>(n), std::vector<Eigen::VectorXd>(n)};

    const Eigen::VectorXd& y = acts.back();
    Eigen::VectorXd delta = (y - pair.target).cwiseProduct(y.cwiseProduct(Eigen::VectorXd::Ones(y.size()) - y));
    for (std::size_t k = n; k-- > 0;) {
        g.weights[k] = delta * acts[k].transpose();
        g.biases[k] = delta;
        if (k > 0) {
            const Eigen::VectorXd& h = acts[k];
            delta = (net.layers()[k].weights.transpose() * delta)
                        .cwiseProduct(h.cwiseProduct(Eigen::VectorXd::Ones(h.size()) - h));
        }
    }
    return g;
}

inline double rvnn_rms(const RealLayerStack& net, const std::vector<RealPair>& pairs) {
    std::vector<Eigen::VectorXd> outs, targets;
    outs.reserve(pairs.size());
    targets.reserve(pairs.size());
    for (const auto& p : pairs) {
        outs.push_back(rvnn_forward(net, p.input));
        targets.push_back(p.target);
    }
    return rms_percent(outs, targets);
}

/// One in-order pass of per-pair updates; returns the RMS of the updated
/// network over all pairs.
inline double rvnn_train_epoch(RealLayerStack& net, const std::vector<RealPair>& pairs) {
    if (pairs.empty()) throw ValidationError("training set is empty");
    const double lr = net.learning_rate();
    for (const auto& p : pairs) {
        const RealGradient g = rvnn_gradient(net, p);
        for (std::size_t k = 0; k < net.layers().size(); ++k) {
            net.layers()[k].weights -= lr * g.weights[k];
            net.layers()[k].biases -= lr * g.biases[k];
        }
    }
    return rvnn_rms(net, pairs);
}

/// Trains until RMS <= rms_target or max_epochs. rms_target is a fraction
/// (0.01 means 1%); rms_history is in percent. An already converged network
/// reports zero epochs.
inline TrainResult rvnn_train_to_threshold(RealLayerStack& net, const std::vector<RealPair>& pairs, double rms_target,
                                           std::size_t max_epochs) {
    if (pairs.empty()) throw ValidationError("training set is empty");
    validate_stopping_rule(rms_target, max_epochs);
    const double target_pct = 100.0 * rms_target;
    TrainResult r;
    r.rms_history.push_back(rvnn_rms(net, pairs));
    if (r.rms_history.back() <= target_pct) {
        r.converged = true;
        return r;
    }
    while (r.epochs_used < max_epochs) {
        r.rms_history.push_back(rvnn_train_epoch(net, pairs));
        ++r.epochs_used;
        if (r.rms_history.back() <= target_pct) {
            r.converged = true;
            break;
        }
    }
    return r;
}

struct LearningRateSweep {
    double best_rate = 0.0;
    std::size_t best_epochs = 0;
    bool any_converged = false;
};

/// Tries each rate on a fresh copy of `initial` and keeps the one that
/// converges in the fewest epochs (ties go to the earlier grid entry).
inline LearningRateSweep rvnn_sweep_learning_rate(const RealLayerStack& initial, const std::vector<RealPair>& pairs,
                                                  const std::vector<double>& grid, double rms_target,
                                                  std::size_t max_epochs) {
    LearningRateSweep best;
    best.best_epochs = std::numeric_limits<std::size_t>::max();
    for (double lr : grid) {
        RealLayerStack net = initial;
        net.set_learning_rate(lr);
        const auto r = rvnn_train_to_threshold(net, pairs, rms_target, max_epochs);
        if (r.converged && r.epochs_used < best.best_epochs) {
            best = {lr, r.epochs_used, true};
        }
    }
    if (!best.any_converged) best.best_epochs = max_epochs;
    return best;
}

/// Geometric grid lo * ratio^k up to hi.
inline std::vector<double> geometric_grid(double lo, double hi, double ratio) {
    if (!(lo > 0.0 && hi >= lo && ratio > 1.0)) throw ValidationError("bad geometric grid");
    std::vector<double> g;
    for (double v = lo; v <= hi * (1.0 + 1e-12); v *= ratio) g.push_back(v);
    return g;
}

// JSON: {"layers": [{"w": [[...]], "b": [...]}], "lr": ...}

inline nlohmann::json rvnn_to_json(const RealLayerStack& net) {
    nlohmann::json layers = nlohmann::json::array();
    for (const auto& l : net.layers()) {
        nlohmann::json w = nlohmann::json::array();
        for (Eigen::Index i = 0; i < l.weights.rows(); ++i) {
            nlohmann::json row = nlohmann::json::array();
            for (Eigen::Index j = 0; j < l.weights.cols(); ++j) row.push_back(l.weights(i, j));
            w.push_back(std::move(row));
        }
        nlohmann::json b = nlohmann::json::array();
        for (Eigen::Index i = 0; i < l.biases.size(); ++i) b.push_back(l.biases(i));
        layers.push_back({{"w", std::move(w)}, {"b", std::move(b)}});
    }
    return {{"layers", std::move(layers)}, {"lr", net.learning_rate()}};
}

inline RealLayerStack rvnn_from_json(const nlohmann::json& j) {
    try {
        std::vector<RealLayer> layers;
        for (const auto& jl : j.at("layers")) {
            const auto& w = jl.at("w");
            const auto& b = jl.at("b");
            const auto rows = static_cast<Eigen::Index>(w.size());
            const auto cols = rows > 0 ? static_cast<Eigen::Index>(w.at(0).size()) : 0;
            RealLayer l{Eigen::MatrixXd(rows, cols), Eigen::VectorXd(static_cast<Eigen::Index>(b.size()))};
            for (Eigen::Index i = 0; i < rows; ++i) {
                if (static_cast<Eigen::Index>(w.at(i).size()) != cols) throw ValidationError("ragged weight matrix");
                for (Eigen::Index jj = 0; jj < cols; ++jj) l.weights(i, jj) = w.at(i).at(jj).get<double>();
            }
            for (Eigen::Index i = 0; i < l.biases.size(); ++i) l.biases(i) = b.at(i).get<double>();
            layers.push_back(std::move(l));
        }
        return RealLayerStack(std::move(layers), j.at("lr").get<double>());
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("malformed network JSON: ") + e.what());
    }
}

} // namespace qnnbench
