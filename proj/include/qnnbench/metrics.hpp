#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <vector>

#include "errors.hpp"

namespace qnnbench {

/// 100 * sqrt(mean over pairs and components of (out - target)^2).
inline double rms_percent(const std::vector<Eigen::VectorXd>& outputs, const std::vector<Eigen::VectorXd>& targets) {
    if (outputs.size() != targets.size()) throw ValidationError("rms_percent: pair count mismatch");
    if (outputs.empty()) throw ValidationError("rms_percent: no pairs");
    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t p = 0; p < outputs.size(); ++p) {
        if (outputs[p].size() != targets[p].size()) throw ValidationError("rms_percent: component count mismatch");
        sum += (outputs[p] - targets[p]).squaredNorm();
        count += static_cast<std::size_t>(outputs[p].size());
    }
    if (count == 0) throw ValidationError("rms_percent: empty vectors");
    return 100.0 * std::sqrt(sum / static_cast<double>(count));
}

/// Scalar-output overload.
inline double rms_percent(const std::vector<double>& outputs, const std::vector<double>& targets) {
    if (outputs.size() != targets.size()) throw ValidationError("rms_percent: pair count mismatch");
    if (outputs.empty()) throw ValidationError("rms_percent: no pairs");
    double sum = 0.0;
    for (std::size_t p = 0; p < outputs.size(); ++p) sum += (outputs[p] - targets[p]) * (outputs[p] - targets[p]);
    return 100.0 * std::sqrt(sum / static_cast<double>(outputs.size()));
}

/// A classical-net output counts as correct when the component of the true
/// class, the hot entry of the one-hot label, is above 0.5.
inline bool onehot_decision_correct(const Eigen::VectorXd& output, const Eigen::VectorXd& label) {
    if (output.size() != label.size() || label.size() == 0) throw ValidationError("onehot decision: size mismatch");
    Eigen::Index hot = 0;
    label.maxCoeff(&hot);
    return output(hot) > 0.5;
}

/// Percentage of records classified correctly under the above-0.5 rule.
inline double accuracy_percent(const std::vector<Eigen::VectorXd>& outputs, const std::vector<Eigen::VectorXd>& labels) {
    if (outputs.size() != labels.size()) throw ValidationError("accuracy_percent: size mismatch");
    if (outputs.empty()) return 0.0;
    std::size_t hits = 0;
    for (std::size_t i = 0; i < outputs.size(); ++i) hits += onehot_decision_correct(outputs[i], labels[i]) ? 1 : 0;
    return 100.0 * static_cast<double>(hits) / static_cast<double>(outputs.size());
}

/// Percentage of matching integer class decisions.
inline double accuracy_percent(const std::vector<int>& decided, const std::vector<int>& labels) {
    if (decided.size() != labels.size()) throw ValidationError("accuracy_percent: size mismatch");
    if (decided.empty()) return 0.0;
    std::size_t hits = 0;
    for (std::size_t i = 0; i < decided.size(); ++i) hits += decided[i] == labels[i] ? 1 : 0;
    return 100.0 * static_cast<double>(hits) / static_cast<double>(decided.size());
}

/// Outcome of a train-until-threshold loop. rms_history[k] is the RMS after
/// k epochs, so rms_history.front() is the untrained network.
struct TrainResult {
    std::size_t epochs_used = 0;
    bool converged = false;
    std::vector<double> rms_history;

    double final_rms() const { return rms_history.empty() ? 0.0 : rms_history.back(); }
};

/// rms_target is a fraction in (0, 1]; max_epochs at least one.
inline void validate_stopping_rule(double rms_target, std::size_t max_epochs) {
    if (!(rms_target > 0.0 && rms_target <= 1.0)) throw ValidationError("rms_target must be in (0, 1]");
    if (max_epochs < 1) throw ValidationError("max_epochs must be >= 1");
}

} // namespace qnnbench
