#pragma once

// Complex-valued network with the unit-circle activation P(z) = e^{i arg z}
// and the derivative-free error-division learning rule.
//
// Scalars in [0, 1] enter and leave the network through M(r) = e^{i pi r}.
// Each neuron's weighted sum may include a bias weight on a constant 1+0i
// input; the bias then counts as one of the N incoming weights.
//
// Per training pair:
//   1. forward pass; output error e = t - z uses the pre-activation sum z,
//   2. errors flow backwards with e_h = sum_j (e_j / N_j) * w_jh^{-1},
//   3. hidden layers are corrected front to back with dw_n = (e / N) x_n^{-1},
//      each layer seeing the refreshed outputs of the layer before it,
//   4. the output layer is corrected last against its refreshed inputs, so
//      its weighted sum lands exactly on the target.

#include <Eigen/Dense>
#include <json.hpp>

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <numeric>
#include <vector>

#include "errors.hpp"
#include "metrics.hpp"
#include "quantum_core.hpp"
#include "random.hpp"

namespace qnnbench {

/// M(r) = e^{i pi r}, r in [0, 1].
inline Complex cvnn_map_scalar(double r) {
    if (!(r >= 0.0 && r <= 1.0)) throw ValidationError("cvnn_map_scalar: input must lie in [0, 1]");
    return std::polar(1.0, std::numbers::pi * r);
}

/// Inverse of M: |arg z| / pi, i.e. arguments above pi are reflected.
inline double cvnn_unmap(Complex z) {
    if (z == Complex(0.0, 0.0)) throw ValidationError("cvnn_unmap: zero has no argument");
    return std::clamp(std::abs(std::arg(z)) / std::numbers::pi, 0.0, 1.0);
}

/// P(z) = e^{i arg z}.
inline Complex cvnn_activation(Complex z) {
    if (z == Complex(0.0, 0.0)) throw DegenerateActivation("unit-circle activation of an exactly zero sum");
    return z / std::abs(z);
}

struct ComplexPair {
    Eigen::VectorXcd input; ///< already on the unit circle
    Eigen::VectorXd target; ///< in [0, 1]; mapped with M for learning
};

struct ComplexLayer {
    Eigen::MatrixXcd weights; ///< n_out x n_in
    Eigen::VectorXcd biases;  ///< n_out, or empty when the layer has no bias

    bool has_bias() const { return biases.size() > 0; }
    Eigen::Index inputs() const { return weights.cols(); }
    Eigen::Index outputs() const { return weights.rows(); }
    /// Incoming weights per neuron, the N of the division rule.
    Eigen::Index fan_in() const { return inputs() + (has_bias() ? 1 : 0); }

    Eigen::VectorXcd weighted_sums(const Eigen::VectorXcd& x) const {
        Eigen::VectorXcd z = weights * x;
        if (has_bias()) z += biases;
        return z;
    }
};

class ComplexLayerStack {
public:
    ComplexLayerStack() = default;
    explicit ComplexLayerStack(std::vector<ComplexLayer> layers) : layers_(std::move(layers)) { validate(); }

    /// Weights with modulus uniform in [0.1, 0.5] and phase uniform in
    /// [0, 2 pi); never zero.
    static ComplexLayerStack random(const std::vector<std::size_t>& architecture, bool bias, SeedStream rng) {
        if (architecture.size() < 2) throw ValidationError("architecture needs at least input and output sizes");
        auto draw = [&rng] { return std::polar(rng.uniform(0.1, 0.5), rng.uniform(0.0, 2.0 * std::numbers::pi)); };
        std::vector<ComplexLayer> layers;
        for (std::size_t k = 0; k + 1 < architecture.size(); ++k) {
            const auto n_in = static_cast<Eigen::Index>(architecture[k]);
            const auto n_out = static_cast<Eigen::Index>(architecture[k + 1]);
            if (n_in == 0 || n_out == 0) throw ValidationError("layer sizes must be positive");
            ComplexLayer layer{Eigen::MatrixXcd(n_out, n_in), Eigen::VectorXcd(bias ? n_out : 0)};
            for (Eigen::Index i = 0; i < n_out; ++i) {
                for (Eigen::Index j = 0; j < n_in; ++j) layer.weights(i, j) = draw();
                if (bias) layer.biases(i) = draw();
            }
            layers.push_back(std::move(layer));
        }
        return ComplexLayerStack(std::move(layers));
    }

    const std::vector<ComplexLayer>& layers() const noexcept { return layers_; }
    std::vector<ComplexLayer>& layers() noexcept { return layers_; }
    Eigen::Index input_size() const { return layers_.front().inputs(); }
    Eigen::Index output_size() const { return layers_.back().outputs(); }

    std::vector<std::size_t> architecture() const {
        std::vector<std::size_t> a{static_cast<std::size_t>(input_size())};
        for (const auto& l : layers_) a.push_back(static_cast<std::size_t>(l.outputs()));
        return a;
    }

    void validate() const {
        if (layers_.empty()) throw ValidationError("network has no layers");
        for (std::size_t k = 0; k < layers_.size(); ++k) {
            const auto& l = layers_[k];
            if (l.has_bias() && l.biases.size() != l.outputs())
                throw ValidationError("bias length does not match layer outputs");
            if (k > 0 && l.inputs() != layers_[k - 1].outputs())
                throw ValidationError("layer " + std::to_string(k) + " does not chain with the previous layer");
            if (!l.weights.allFinite() || !l.biases.allFinite()) throw ValidationError("non-finite weight");
        }
    }

private:
    std::vector<ComplexLayer> layers_;
};

inline Eigen::VectorXcd cvnn_activate(const Eigen::VectorXcd& z) {
    Eigen::VectorXcd y(z.size());
    for (Eigen::Index i = 0; i < z.size(); ++i) y(i) = cvnn_activation(z(i));
    return y;
}

/// Unit-circle signals out of the last layer.
inline Eigen::VectorXcd cvnn_forward(const ComplexLayerStack& net, const Eigen::VectorXcd& input) {
    if (input.size() != net.input_size()) throw ValidationError("input length does not match network input");
    Eigen::VectorXcd x = input;
    for (const auto& l : net.layers()) x = cvnn_activate(l.weighted_sums(x));
    return x;
}

/// Forward pass read back into [0, 1].
inline Eigen::VectorXd cvnn_predict(const ComplexLayerStack& net, const Eigen::VectorXcd& input) {
    const Eigen::VectorXcd y = cvnn_forward(net, input);
    Eigen::VectorXd r(y.size());
    for (Eigen::Index i = 0; i < y.size(); ++i) r(i) = cvnn_unmap(y(i));
    return r;
}

/// Single-neuron correction: with e = t - sum_n w_n x_n, every weight moves
/// by (e / N) x_n^{-1}, after which the weighted sum equals t.
inline Eigen::VectorXcd cvnn_update_output_neuron(Eigen::VectorXcd weights, const Eigen::VectorXcd& inputs,
                                                  Complex target) {
    if (weights.size() != inputs.size() || weights.size() == 0)
        throw ValidationError("weights and inputs must have the same nonzero length");
    for (Eigen::Index n = 0; n < inputs.size(); ++n)
        if (inputs(n) == Complex(0.0, 0.0)) throw ValidationError("zero input signal has no inverse");
    const Complex z = (weights.array() * inputs.array()).sum();
    const Complex share = (target - z) / static_cast<double>(inputs.size());
    for (Eigen::Index n = 0; n < inputs.size(); ++n) weights(n) += share / inputs(n);
    return weights;
}

namespace detail {

// Moves every neuron of `layer` by its error share against inputs x.
inline void cvnn_correct_layer(ComplexLayer& layer, const Eigen::VectorXcd& x, const Eigen::VectorXcd& errors) {
    const double n = static_cast<double>(layer.fan_in());
    Eigen::VectorXcd x_inv(x.size());
    for (Eigen::Index j = 0; j < x.size(); ++j) {
        if (x(j) == Complex(0.0, 0.0)) throw DegenerateActivation("zero signal into a corrected layer");
        x_inv(j) = 1.0 / x(j);
    }
    for (Eigen::Index i = 0; i < layer.outputs(); ++i) {
        const Complex share = errors(i) / n;
        layer.weights.row(i) += share * x_inv.transpose();
        if (layer.has_bias()) layer.biases(i) += share; // bias input is 1
    }
}

} // namespace detail

/// Applies the learning rule for one pair. Throws DegenerateActivation if a
/// weighted sum is exactly zero; the network is then left unchanged.
inline void cvnn_learn_pair(ComplexLayerStack& net, const ComplexPair& pair) {
    const std::size_t depth = net.layers().size();
    if (pair.target.size() != net.output_size()) throw ValidationError("target length does not match network output");
    Eigen::VectorXcd t(pair.target.size());
    for (Eigen::Index i = 0; i < t.size(); ++i) t(i) = cvnn_map_scalar(pair.target(i));

    // Forward, keeping each layer's input.
    std::vector<Eigen::VectorXcd> inputs;
    inputs.reserve(depth);
    Eigen::VectorXcd x = pair.input;
    Eigen::VectorXcd z;
    for (const auto& l : net.layers()) {
        inputs.push_back(x);
        z = l.weighted_sums(x);
        x = cvnn_activate(z);
    }

    // Backward error division with the current weights.
    std::vector<Eigen::VectorXcd> errors(depth);
    errors[depth - 1] = t - z;
    for (std::size_t k = depth - 1; k > 0; --k) {
        const auto& next = net.layers()[k];
        const double n = static_cast<double>(next.fan_in());
        Eigen::VectorXcd e = Eigen::VectorXcd::Zero(next.inputs());
        for (Eigen::Index j = 0; j < next.outputs(); ++j) {
            const Complex share = errors[k](j) / n;
            for (Eigen::Index h = 0; h < next.inputs(); ++h) {
                const Complex w = next.weights(j, h);
                if (w != Complex(0.0, 0.0)) e(h) += share / w;
            }
        }
        errors[k - 1] = std::move(e);
    }

    ComplexLayerStack updated = net;
    Eigen::VectorXcd signal = pair.input;
    for (std::size_t k = 0; k + 1 < depth; ++k) {
        detail::cvnn_correct_layer(updated.layers()[k], signal, errors[k]);
        signal = cvnn_activate(updated.layers()[k].weighted_sums(signal));
    }
    auto& out = updated.layers()[depth - 1];
    detail::cvnn_correct_layer(out, signal, t - out.weighted_sums(signal));
    net = std::move(updated);
}

/// A pair whose forward pass hits a zero sum has no output phase; it scores
/// as maximally wrong on every component.
inline double cvnn_rms(const ComplexLayerStack& net, const std::vector<ComplexPair>& pairs) {
    std::vector<Eigen::VectorXd> outs, targets;
    outs.reserve(pairs.size());
    targets.reserve(pairs.size());
    for (const auto& p : pairs) {
        try {
            outs.push_back(cvnn_predict(net, p.input));
        } catch (const DegenerateActivation&) {
            outs.push_back((p.target.array() < 0.5).cast<double>().matrix());
        }
        targets.push_back(p.target);
    }
    return rms_percent(outs, targets);
}

struct CvnnEpoch {
    double rms = 0.0;              ///< percent, on unmapped outputs
    std::size_t skipped_pairs = 0; ///< pairs hitting a degenerate activation
};

/// Pairs are visited in stored order, or in a fresh permutation drawn from
/// `order` when one is given.
inline CvnnEpoch cvnn_train_epoch(ComplexLayerStack& net, const std::vector<ComplexPair>& pairs,
                                  SeedStream* order = nullptr) {
    if (pairs.empty()) throw ValidationError("training set is empty");
    std::vector<std::size_t> idx(pairs.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    if (order != nullptr) order->shuffle(idx);
    CvnnEpoch ep;
    for (auto i : idx) {
        try {
            cvnn_learn_pair(net, pairs[i]);
        } catch (const DegenerateActivation&) {
            ++ep.skipped_pairs;
        }
    }
    ep.rms = cvnn_rms(net, pairs);
    return ep;
}

struct CvnnTrainResult : TrainResult {
    std::size_t skipped_pairs = 0;
};

/// Same stopping rule as rvnn_train_to_threshold.
inline CvnnTrainResult cvnn_train_to_threshold(ComplexLayerStack& net, const std::vector<ComplexPair>& pairs,
                                               double rms_target, std::size_t max_epochs,
                                               SeedStream* order = nullptr) {
    if (pairs.empty()) throw ValidationError("training set is empty");
    validate_stopping_rule(rms_target, max_epochs);
    const double target_pct = 100.0 * rms_target;
    CvnnTrainResult r;
    r.rms_history.push_back(cvnn_rms(net, pairs));
    if (r.rms_history.back() <= target_pct) {
        r.converged = true;
        return r;
    }
    while (r.epochs_used < max_epochs) {
        const CvnnEpoch ep = cvnn_train_epoch(net, pairs, order);
        r.rms_history.push_back(ep.rms);
        r.skipped_pairs += ep.skipped_pairs;
        ++r.epochs_used;
        if (ep.rms <= target_pct) {
            r.converged = true;
            break;
        }
    }
    return r;
}

// JSON: {"layers": [{"w": [[[re, im], ...]], "b": [[re, im], ...]}], "lr": null}

inline nlohmann::json complex_to_json(Complex z) { return nlohmann::json::array({z.real(), z.imag()}); }

inline Complex complex_from_json(const nlohmann::json& j) {
    if (!j.is_array() || j.size() != 2) throw ValidationError("complex number must be [re, im]");
    return {j.at(0).get<double>(), j.at(1).get<double>()};
}

inline nlohmann::json cvnn_to_json(const ComplexLayerStack& net) {
    nlohmann::json layers = nlohmann::json::array();
    for (const auto& l : net.layers()) {
        nlohmann::json w = nlohmann::json::array();
        for (Eigen::Index i = 0; i < l.weights.rows(); ++i) {
            nlohmann::json row = nlohmann::json::array();
            for (Eigen::Index j = 0; j < l.weights.cols(); ++j) row.push_back(complex_to_json(l.weights(i, j)));
            w.push_back(std::move(row));
        }
        nlohmann::json jl = {{"w", std::move(w)}};
        if (l.has_bias()) {
            nlohmann::json b = nlohmann::json::array();
            for (Eigen::Index i = 0; i < l.biases.size(); ++i) b.push_back(complex_to_json(l.biases(i)));
            jl["b"] = std::move(b);
        }
        layers.push_back(std::move(jl));
    }
    return {{"layers", std::move(layers)}, {"lr", nullptr}};
}

inline ComplexLayerStack cvnn_from_json(const nlohmann::json& j) {
    try {
        std::vector<ComplexLayer> layers;
        for (const auto& jl : j.at("layers")) {
            const auto& w = jl.at("w");
            const auto rows = static_cast<Eigen::Index>(w.size());
            const auto cols = rows > 0 ? static_cast<Eigen::Index>(w.at(0).size()) : 0;
            ComplexLayer l{Eigen::MatrixXcd(rows, cols), Eigen::VectorXcd(0)};
            for (Eigen::Index i = 0; i < rows; ++i) {
                if (static_cast<Eigen::Index>(w.at(i).size()) != cols) throw ValidationError("ragged weight matrix");
                for (Eigen::Index c = 0; c < cols; ++c) l.weights(i, c) = complex_from_json(w.at(i).at(c));
            }
            if (jl.contains("b")) {
                const auto& b = jl.at("b");
                l.biases.resize(static_cast<Eigen::Index>(b.size()));
                for (Eigen::Index i = 0; i < l.biases.size(); ++i) l.biases(i) = complex_from_json(b.at(i));
            }
            layers.push_back(std::move(l));
        }
        return ComplexLayerStack(std::move(layers));
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("malformed network JSON: ") + e.what());
    }
}

} // namespace qnnbench
