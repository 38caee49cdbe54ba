#pragma once

// Experiment runners and report emission for the three benchmark families.
// Every stochastic choice of a trial derives from SeedStream(seed) through
// tagged child streams, so a config plus its seed list fixes every row.

#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "cvnn.hpp"
#include "errors.hpp"
#include "metrics.hpp"
#include "qnn.hpp"
#include "random.hpp"
#include "rvnn.hpp"
#include "tasks.hpp"

namespace qnnbench {

enum class ExperimentKind { gates, iris, entanglement };
enum class NetKind { rvnn, cvnn, qnn };
enum class ReportFormat { csv, markdown };

inline std::string to_string(ExperimentKind k) {
    switch (k) {
    case ExperimentKind::gates: return "gates";
    case ExperimentKind::iris: return "iris";
    case ExperimentKind::entanglement: return "entanglement";
    }
    return "?";
}

inline std::string to_string(NetKind k) {
    switch (k) {
    case NetKind::rvnn: return "rvnn";
    case NetKind::cvnn: return "cvnn";
    case NetKind::qnn: return "qnn";
    }
    return "?";
}

inline ExperimentKind parse_experiment(const std::string& s) {
    if (s == "gates") return ExperimentKind::gates;
    if (s == "iris") return ExperimentKind::iris;
    if (s == "entanglement") return ExperimentKind::entanglement;
    throw ValidationError("unknown experiment: " + s);
}

inline NetKind parse_net(const std::string& s) {
    if (s == "rvnn") return NetKind::rvnn;
    if (s == "cvnn") return NetKind::cvnn;
    if (s == "qnn") return NetKind::qnn;
    throw ValidationError("unknown net: " + s);
}

inline ReportFormat parse_format(const std::string& s) {
    if (s == "csv") return ReportFormat::csv;
    if (s == "markdown") return ReportFormat::markdown;
    throw ValidationError("unknown format: " + s);
}

struct RvnnSettings {
    std::vector<std::size_t> hidden;
    double learning_rate = 1.0;
    std::size_t max_epochs = 1000;
    double rms_target = 0.01;
};

struct CvnnSettings {
    std::vector<std::size_t> hidden;
    std::size_t max_epochs = 1000;
    double rms_target = 0.01;
    bool bias = true;
    bool shuffle = true; ///< fresh pair order every epoch
};

struct QnnSettings {
    double learning_rate = 2.0;
    std::size_t max_epochs = 100;
    double rms_target = 0.01;
    std::size_t slices = 4;
    double total_time = 1.0;
    double fd_step = 1e-5;
};

struct ExperimentConfig {
    ExperimentKind experiment = ExperimentKind::gates;
    std::vector<NetKind> nets{NetKind::rvnn, NetKind::cvnn, NetKind::qnn};
    std::vector<std::uint64_t> seeds{1};
    std::vector<std::string> gates;       ///< gates only
    std::vector<std::size_t> train_sizes; ///< iris and entanglement
    std::size_t test_size = 25;           ///< entanglement only
    std::string iris_csv = "data/iris.csv";
    bool timing = false;
    RvnnSettings rvnn;
    CvnnSettings cvnn;
    QnnSettings qnn;

    static ExperimentConfig defaults(ExperimentKind kind) {
        ExperimentConfig c;
        c.experiment = kind;
        switch (kind) {
        case ExperimentKind::gates:
            for (auto g : gate_names()) c.gates.emplace_back(g);
            c.rvnn = {{}, 2.0, 1'000'000, 0.01};
            c.cvnn = {{}, 5000, 0.01, true, true};
            c.qnn = {0.2, 500, 0.01, 8, 8.0, 1e-5};
            break;
        case ExperimentKind::iris:
            c.train_sizes = {75, 30, 12};
            c.rvnn = {{8}, 0.5, 50'000, 0.01};
            c.cvnn = {{100}, 1000, 0.01, true, true};
            c.qnn = {2.0, 100, 0.01, 4, 2.0, 1e-5};
            break;
        case ExperimentKind::entanglement:
            c.train_sizes = {100, 50, 20, 4};
            c.rvnn = {{8}, 0.5, 10'000, 0.01};
            c.cvnn = {{8}, 1000, 0.01, true, true};
            c.qnn = {8.0, 2000, 0.001, 4, 0.5, 1e-5};
            break;
        }
        return c;
    }

    void validate() const {
        if (nets.empty()) throw ValidationError("no nets selected");
        if (seeds.empty()) throw ValidationError("no seeds given");
        if (std::set<NetKind>(nets.begin(), nets.end()).size() != nets.size())
            throw ValidationError("duplicate net in selection");
        validate_stopping_rule(rvnn.rms_target, rvnn.max_epochs);
        validate_stopping_rule(cvnn.rms_target, cvnn.max_epochs);
        if (!(rvnn.learning_rate > 0.0) || !std::isfinite(rvnn.learning_rate))
            throw ValidationError("RVNN learning rate must be positive");
        QnnConfig{qnn.learning_rate, qnn.max_epochs, qnn.rms_target, qnn.fd_step, 0}.validate();
        if (qnn.slices == 0) throw ValidationError("slice count must be at least 1");
        if (!(qnn.total_time > 0.0) || !std::isfinite(qnn.total_time))
            throw ValidationError("total time must be positive");
        for (auto h : rvnn.hidden)
            if (h == 0) throw ValidationError("hidden layer width must be positive");
        for (auto h : cvnn.hidden)
            if (h == 0) throw ValidationError("hidden layer width must be positive");
        switch (experiment) {
        case ExperimentKind::gates:
            if (gates.empty()) throw ValidationError("no gates selected");
            for (const auto& g : gates) gate_dataset(g);
            break;
        case ExperimentKind::iris:
            if (train_sizes.empty()) throw ValidationError("no train sizes given");
            for (auto n : train_sizes)
                if (n == 0 || n % 3 != 0 || n > 147) throw ValidationError("iris train size must be a multiple of 3 in [3, 147]");
            break;
        case ExperimentKind::entanglement:
            if (train_sizes.empty()) throw ValidationError("no train sizes given");
            for (auto n : train_sizes)
                if (n == 0) throw ValidationError("entanglement train size must be positive");
            if (test_size == 0) throw ValidationError("test size must be positive");
            break;
        }
    }
};

// ------------------------------------------------------------------ JSON

namespace detail {

template <class T>
void read_if(const nlohmann::json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

} // namespace detail

/// Missing keys keep the experiment defaults. Unknown keys are rejected.
inline ExperimentConfig config_from_json(const nlohmann::json& j, std::optional<ExperimentKind> kind = std::nullopt) {
    static const std::set<std::string> top{"experiment", "nets", "seeds", "gates", "train_sizes", "test_size",
                                           "iris_csv", "timing", "rvnn", "cvnn", "qnn"};
    static const std::set<std::string> rkeys{"hidden", "learning_rate", "max_epochs", "rms_target"};
    static const std::set<std::string> ckeys{"hidden", "max_epochs", "rms_target", "bias", "shuffle"};
    static const std::set<std::string> qkeys{"learning_rate", "max_epochs", "rms_target", "slices", "total_time",
                                             "fd_step"};
    auto check_keys = [](const nlohmann::json& obj, const std::set<std::string>& allowed, const std::string& where) {
        if (!obj.is_object()) throw ValidationError(where + " must be an object");
        for (const auto& [k, v] : obj.items())
            if (!allowed.count(k)) throw ValidationError("unknown key '" + k + "' in " + where);
    };
    try {
        check_keys(j, top, "config");
        ExperimentKind k = kind.value_or(ExperimentKind::gates);
        if (j.contains("experiment")) {
            const auto named = parse_experiment(j.at("experiment").get<std::string>());
            if (kind && named != *kind) throw ValidationError("config experiment does not match subcommand");
            k = named;
        } else if (!kind) {
            throw ValidationError("config needs an 'experiment' key");
        }
        ExperimentConfig c = ExperimentConfig::defaults(k);
        if (j.contains("nets")) {
            c.nets.clear();
            for (const auto& n : j.at("nets")) c.nets.push_back(parse_net(n.get<std::string>()));
        }
        detail::read_if(j, "seeds", c.seeds);
        detail::read_if(j, "gates", c.gates);
        detail::read_if(j, "train_sizes", c.train_sizes);
        detail::read_if(j, "test_size", c.test_size);
        detail::read_if(j, "iris_csv", c.iris_csv);
        detail::read_if(j, "timing", c.timing);
        if (j.contains("rvnn")) {
            const auto& r = j.at("rvnn");
            check_keys(r, rkeys, "rvnn");
            detail::read_if(r, "hidden", c.rvnn.hidden);
            detail::read_if(r, "learning_rate", c.rvnn.learning_rate);
            detail::read_if(r, "max_epochs", c.rvnn.max_epochs);
            detail::read_if(r, "rms_target", c.rvnn.rms_target);
        }
        if (j.contains("cvnn")) {
            const auto& r = j.at("cvnn");
            check_keys(r, ckeys, "cvnn");
            detail::read_if(r, "hidden", c.cvnn.hidden);
            detail::read_if(r, "max_epochs", c.cvnn.max_epochs);
            detail::read_if(r, "rms_target", c.cvnn.rms_target);
            detail::read_if(r, "bias", c.cvnn.bias);
            detail::read_if(r, "shuffle", c.cvnn.shuffle);
        }
        if (j.contains("qnn")) {
            const auto& r = j.at("qnn");
            check_keys(r, qkeys, "qnn");
            detail::read_if(r, "learning_rate", c.qnn.learning_rate);
            detail::read_if(r, "max_epochs", c.qnn.max_epochs);
            detail::read_if(r, "rms_target", c.qnn.rms_target);
            detail::read_if(r, "slices", c.qnn.slices);
            detail::read_if(r, "total_time", c.qnn.total_time);
            detail::read_if(r, "fd_step", c.qnn.fd_step);
        }
        c.validate();
        return c;
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("config: ") + e.what());
    }
}

inline nlohmann::json config_to_json(const ExperimentConfig& c) {
    nlohmann::json nets = nlohmann::json::array();
    for (auto n : c.nets) nets.push_back(to_string(n));
    nlohmann::json j = {
        {"experiment", to_string(c.experiment)},
        {"nets", nets},
        {"seeds", c.seeds},
        {"timing", c.timing},
        {"rvnn",
         {{"hidden", c.rvnn.hidden},
          {"learning_rate", c.rvnn.learning_rate},
          {"max_epochs", c.rvnn.max_epochs},
          {"rms_target", c.rvnn.rms_target}}},
        {"cvnn",
         {{"hidden", c.cvnn.hidden},
          {"max_epochs", c.cvnn.max_epochs},
          {"rms_target", c.cvnn.rms_target},
          {"bias", c.cvnn.bias},
          {"shuffle", c.cvnn.shuffle}}},
        {"qnn",
         {{"learning_rate", c.qnn.learning_rate},
          {"max_epochs", c.qnn.max_epochs},
          {"rms_target", c.qnn.rms_target},
          {"slices", c.qnn.slices},
          {"total_time", c.qnn.total_time},
          {"fd_step", c.qnn.fd_step}}},
    };
    if (c.experiment == ExperimentKind::gates) j["gates"] = c.gates;
    if (c.experiment != ExperimentKind::gates) j["train_sizes"] = c.train_sizes;
    if (c.experiment == ExperimentKind::iris) j["iris_csv"] = c.iris_csv;
    if (c.experiment == ExperimentKind::entanglement) j["test_size"] = c.test_size;
    return j;
}

// --------------------------------------------------------------- reports

/// One trained network. `experiment` is "<family>/<task>", e.g. "gates/XOR",
/// "iris/75" or "entanglement/4".
struct RunReport {
    std::string experiment;
    NetKind net = NetKind::rvnn;
    std::uint64_t seed = 0;
    std::size_t epochs_used = 0;
    bool converged = false;
    double train_rms_pct = 0.0;
    std::optional<double> test_rms_pct;
    std::optional<double> accuracy_pct;
    double wall_time_ms = 0.0;
    nlohmann::json hyperparameters;

    std::string family() const { return experiment.substr(0, experiment.find('/')); }
    std::string task() const {
        const auto p = experiment.find('/');
        return p == std::string::npos ? std::string() : experiment.substr(p + 1);
    }
};

namespace detail {

class Stopwatch {
public:
    Stopwatch() : start_(std::chrono::steady_clock::now()) {}
    double elapsed_ms() const {
        return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_;
};

inline std::vector<std::size_t> architecture(std::size_t in, const std::vector<std::size_t>& hidden, std::size_t out) {
    std::vector<std::size_t> a{in};
    a.insert(a.end(), hidden.begin(), hidden.end());
    a.push_back(out);
    return a;
}

inline nlohmann::json hyper_rvnn(const RvnnSettings& s, const std::vector<std::size_t>& arch) {
    return {{"architecture", arch}, {"learning_rate", s.learning_rate}, {"max_epochs", s.max_epochs},
            {"rms_target", s.rms_target}};
}

inline nlohmann::json hyper_cvnn(const CvnnSettings& s, const std::vector<std::size_t>& arch) {
    return {{"architecture", arch}, {"bias", s.bias}, {"shuffle", s.shuffle}, {"max_epochs", s.max_epochs},
            {"rms_target", s.rms_target}};
}

inline nlohmann::json hyper_qnn(const QnnSettings& s) {
    return {{"learning_rate", s.learning_rate}, {"max_epochs", s.max_epochs}, {"rms_target", s.rms_target},
            {"slices", s.slices},          {"total_time", s.total_time},  {"fd_step", s.fd_step}};
}

inline QnnConfig qnn_config(const QnnSettings& s, std::uint64_t seed) {
    return {s.learning_rate, s.max_epochs, s.rms_target, s.fd_step, seed};
}

struct RvnnRun {
    RealLayerStack net;
    TrainResult result;
};

inline RvnnRun train_rvnn(const RvnnSettings& s, std::size_t in, std::size_t out, const std::vector<RealPair>& pairs,
                          const SeedStream& trial) {
    auto net = RealLayerStack::random(architecture(in, s.hidden, out), s.learning_rate, trial.child("init/rvnn"));
    auto result = rvnn_train_to_threshold(net, pairs, s.rms_target, s.max_epochs);
    return {std::move(net), std::move(result)};
}

struct CvnnRun {
    ComplexLayerStack net;
    CvnnTrainResult result;
};

inline CvnnRun train_cvnn(const CvnnSettings& s, std::size_t in, std::size_t out,
                          const std::vector<ComplexPair>& pairs, const SeedStream& trial) {
    auto net = ComplexLayerStack::random(architecture(in, s.hidden, out), s.bias, trial.child("init/cvnn"));
    SeedStream order = trial.child("order/cvnn");
    auto result = cvnn_train_to_threshold(net, pairs, s.rms_target, s.max_epochs, s.shuffle ? &order : nullptr);
    return {std::move(net), std::move(result)};
}

inline QnnTrainResult train_qnn(const QnnSettings& s, const std::vector<QnnPair>& pairs, const SeedStream& trial,
                                std::uint64_t seed) {
    const auto initial = random_schedule(s.slices, s.total_time, trial.child("init/qnn"));
    return qnn_train(pairs, qnn_config(s, seed), initial);
}

inline RunReport blank_report(const std::string& experiment, NetKind net, std::uint64_t seed) {
    RunReport r;
    r.experiment = experiment;
    r.net = net;
    r.seed = seed;
    return r;
}

inline void fill(RunReport& r, const TrainResult& t) {
    r.epochs_used = t.epochs_used;
    r.converged = t.converged;
    r.train_rms_pct = t.final_rms();
}

} // namespace detail

/// Single-layer perceptrons and the two-qubit QNN on the six truth tables.
/// Gates have no held-out data, so test RMS and accuracy stay empty.
inline std::vector<RunReport> run_gates(const ExperimentConfig& cfg) {
    cfg.validate();
    std::vector<RunReport> out;
    for (const auto& name : cfg.gates) {
        const GateTask task = gate_dataset(name);
        const std::string label = "gates/" + task.name;
        for (auto net : cfg.nets) {
            for (auto seed : cfg.seeds) {
                const SeedStream trial = SeedStream(seed).child(label);
                RunReport r = detail::blank_report(label, net, seed);
                detail::Stopwatch sw;
                switch (net) {
                case NetKind::rvnn: {
                    const auto run = detail::train_rvnn(cfg.rvnn, 2, 1, gate_encode_real(task), trial);
                    detail::fill(r, run.result);
                    r.hyperparameters = detail::hyper_rvnn(cfg.rvnn, run.net.architecture());
                    break;
                }
                case NetKind::cvnn: {
                    const auto run = detail::train_cvnn(cfg.cvnn, 2, 1, gate_encode_complex(task), trial);
                    detail::fill(r, run.result);
                    r.hyperparameters = detail::hyper_cvnn(cfg.cvnn, run.net.architecture());
                    r.hyperparameters["skipped_pairs"] = run.result.skipped_pairs;
                    break;
                }
                case NetKind::qnn: {
                    const auto res = detail::train_qnn(cfg.qnn, gate_encode_qnn(task), trial, seed);
                    detail::fill(r, res);
                    r.hyperparameters = detail::hyper_qnn(cfg.qnn);
                    break;
                }
                }
                r.wall_time_ms = sw.elapsed_ms();
                out.push_back(std::move(r));
            }
        }
    }
    return out;
}

/// Iris with a stratified split per (train size, seed), shared by all nets.
/// Classical nets see min-max scaled features and one-hot targets; the QNN
/// sees the raw features as amplitudes and the polynomial target.
inline std::vector<RunReport> run_iris(const ExperimentConfig& cfg, const std::vector<IrisRecord>& records) {
    cfg.validate();
    const IrisScaler scaler = IrisScaler::fit(records);
    std::vector<RunReport> out;
    for (auto n : cfg.train_sizes) {
        const std::string label = "iris/" + std::to_string(n);
        for (auto net : cfg.nets) {
            for (auto seed : cfg.seeds) {
                const IrisSplit split = split_stratified(records, n, seed);
                {
                    const std::set<std::size_t> tr(split.train_index.begin(), split.train_index.end());
                    for (auto i : split.test_index)
                        if (tr.count(i)) throw DatasetIntegrityError("iris split: record in both train and test");
                }
                const SeedStream trial = SeedStream(seed).child(label);
                RunReport r = detail::blank_report(label, net, seed);
                detail::Stopwatch sw;
                switch (net) {
                case NetKind::rvnn: {
                    std::vector<RealPair> train, test;
                    for (const auto& rec : split.train) train.push_back(iris_encode_onehot(rec, scaler));
                    for (const auto& rec : split.test) test.push_back(iris_encode_onehot(rec, scaler));
                    const auto run = detail::train_rvnn(cfg.rvnn, 4, 3, train, trial);
                    detail::fill(r, run.result);
                    std::vector<Eigen::VectorXd> o, t;
                    for (const auto& p : test) {
                        o.push_back(rvnn_forward(run.net, p.input));
                        t.push_back(p.target);
                    }
                    r.test_rms_pct = rms_percent(o, t);
                    r.accuracy_pct = accuracy_percent(o, t);
                    r.hyperparameters = detail::hyper_rvnn(cfg.rvnn, run.net.architecture());
                    break;
                }
                case NetKind::cvnn: {
                    std::vector<ComplexPair> train, test;
                    for (const auto& rec : split.train) train.push_back(iris_encode_complex(rec, scaler));
                    for (const auto& rec : split.test) test.push_back(iris_encode_complex(rec, scaler));
                    const auto run = detail::train_cvnn(cfg.cvnn, 4, 3, train, trial);
                    detail::fill(r, run.result);
                    std::vector<Eigen::VectorXd> o, t;
                    for (const auto& p : test) {
                        o.push_back(cvnn_predict(run.net, p.input));
                        t.push_back(p.target);
                    }
                    r.test_rms_pct = rms_percent(o, t);
                    r.accuracy_pct = accuracy_percent(o, t);
                    r.hyperparameters = detail::hyper_cvnn(cfg.cvnn, run.net.architecture());
                    r.hyperparameters["skipped_pairs"] = run.result.skipped_pairs;
                    break;
                }
                case NetKind::qnn: {
                    std::vector<QnnPair> train, test;
                    std::vector<int> train_labels, test_labels;
                    for (const auto& rec : split.train) {
                        train.push_back(iris_encode_qnn(rec));
                        train_labels.push_back(rec.label());
                    }
                    for (const auto& rec : split.test) {
                        test.push_back(iris_encode_qnn(rec));
                        test_labels.push_back(rec.label());
                    }
                    const auto res = detail::train_qnn(cfg.qnn, train, trial, seed);
                    detail::fill(r, res);
                    const auto decision = QnnIrisDecision::fit(qnn_outputs(res.schedule, train), train_labels);
                    const auto test_out = qnn_outputs(res.schedule, test);
                    std::vector<double> targets;
                    std::vector<int> decided;
                    for (std::size_t i = 0; i < test.size(); ++i) {
                        targets.push_back(test[i].target);
                        decided.push_back(decision.classify(test_out[i]));
                    }
                    r.test_rms_pct = rms_percent(test_out, targets);
                    r.accuracy_pct = accuracy_percent(decided, test_labels);
                    r.hyperparameters = detail::hyper_qnn(cfg.qnn);
                    r.hyperparameters["cuts"] = {decision.cut_low, decision.cut_high};
                    break;
                }
                }
                r.wall_time_ms = sw.elapsed_ms();
                out.push_back(std::move(r));
            }
        }
    }
    return out;
}

inline std::vector<RunReport> run_iris(const ExperimentConfig& cfg) { return run_iris(cfg, load_iris(cfg.iris_csv)); }

/// Entanglement witness: every net of a (train size, seed) trial gets the
/// same training pairs and the same zero-phase test states.
inline std::vector<RunReport> run_entanglement(const ExperimentConfig& cfg) {
    cfg.validate();
    std::vector<RunReport> out;
    for (auto n : cfg.train_sizes) {
        const std::string label = "entanglement/" + std::to_string(n);
        for (auto net : cfg.nets) {
            for (auto seed : cfg.seeds) {
                const auto train = witness_dataset(n, seed);
                const auto test = witness_testset(cfg.test_size, seed);
                for (const auto& t : test)
                    for (const auto& p : train)
                        if (t.state.vector() == p.state.vector())
                            throw DatasetIntegrityError("entanglement: test state also in training set");
                const SeedStream trial = SeedStream(seed).child(label);
                RunReport r = detail::blank_report(label, net, seed);
                detail::Stopwatch sw;
                switch (net) {
                case NetKind::rvnn: {
                    const auto te = witness_encode_real(test);
                    const auto run = detail::train_rvnn(cfg.rvnn, 16, 1, witness_encode_real(train), trial);
                    detail::fill(r, run.result);
                    r.test_rms_pct = rvnn_rms(run.net, te);
                    r.hyperparameters = detail::hyper_rvnn(cfg.rvnn, run.net.architecture());
                    break;
                }
                case NetKind::cvnn: {
                    const auto te = witness_encode_complex(test);
                    const auto run = detail::train_cvnn(cfg.cvnn, 16, 1, witness_encode_complex(train), trial);
                    detail::fill(r, run.result);
                    r.test_rms_pct = cvnn_rms(run.net, te);
                    r.hyperparameters = detail::hyper_cvnn(cfg.cvnn, run.net.architecture());
                    r.hyperparameters["skipped_pairs"] = run.result.skipped_pairs;
                    break;
                }
                case NetKind::qnn: {
                    const auto res = detail::train_qnn(cfg.qnn, witness_encode_qnn(train), trial, seed);
                    detail::fill(r, res);
                    r.test_rms_pct = qnn_rms(res.schedule, witness_encode_qnn(test));
                    r.hyperparameters = detail::hyper_qnn(cfg.qnn);
                    break;
                }
                }
                r.wall_time_ms = sw.elapsed_ms();
                out.push_back(std::move(r));
            }
        }
    }
    return out;
}

inline std::vector<RunReport> run_experiment(const ExperimentConfig& cfg) {
    switch (cfg.experiment) {
    case ExperimentKind::gates: return run_gates(cfg);
    case ExperimentKind::iris: return run_iris(cfg);
    case ExperimentKind::entanglement: return run_entanglement(cfg);
    }
    throw ValidationError("unknown experiment");
}

// --------------------------------------------------------------- emitting

namespace detail {

inline std::string fixed(double v, int digits = 4) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

inline double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t m = v.size() / 2;
    return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

inline double mean(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

// Tasks in first-seen order, nets in canonical order.
struct Grid {
    std::vector<std::string> tasks;
    std::vector<NetKind> nets;
    std::map<std::pair<std::string, NetKind>, std::vector<const RunReport*>> cells;
};

inline Grid grid_of(const std::vector<const RunReport*>& rows) {
    Grid g;
    std::set<NetKind> nets;
    for (const auto* r : rows) {
        const auto t = r->task();
        if (std::find(g.tasks.begin(), g.tasks.end(), t) == g.tasks.end()) g.tasks.push_back(t);
        nets.insert(r->net);
        g.cells[{t, r->net}].push_back(r);
    }
    g.nets.assign(nets.begin(), nets.end());
    return g;
}

inline std::string upper(NetKind n) {
    auto s = to_string(n);
    for (auto& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return s;
}

template <class F>
std::string mean_cell(const std::vector<const RunReport*>& cell, F field) {
    std::vector<double> v;
    for (const auto* r : cell)
        if (auto x = field(*r)) v.push_back(*x);
    return v.empty() ? std::string("n/a") : fixed(mean(v), 2);
}

inline void markdown_gates(std::ostream& os, const Grid& g) {
    os << "### Epochs to RMS error <= 1%\n\n| Gate |";
    for (auto n : g.nets) os << ' ' << upper(n) << " |";
    os << "\n|---|";
    for (std::size_t i = 0; i < g.nets.size(); ++i) os << "---|";
    os << '\n';
    for (const auto& t : g.tasks) {
        os << "| " << t << " |";
        for (auto n : g.nets) {
            const auto it = g.cells.find({t, n});
            if (it == g.cells.end()) {
                os << " |";
                continue;
            }
            std::vector<double> epochs, final_rms;
            for (const auto* r : it->second) {
                if (r->converged) epochs.push_back(static_cast<double>(r->epochs_used));
                final_rms.push_back(r->train_rms_pct);
            }
            const std::size_t total = it->second.size();
            if (epochs.size() == total) {
                os << ' ' << fixed(median(epochs), 1) << " |";
            } else if (epochs.empty()) {
                os << " not converged (RMS " << fixed(median(final_rms), 2) << "%) |";
            } else {
                os << ' ' << fixed(median(epochs), 1) << " (" << epochs.size() << '/' << total << " converged) |";
            }
        }
        os << '\n';
    }
    os << "\nCells: median epochs over seeds; median final RMS when no seed converged.\n";
}

inline void markdown_iris(std::ostream& os, const Grid& g) {
    os << "### Iris: training RMS, testing RMS and accuracy (%)\n\n| Training Pairs |";
    for (const char* block : {"Train RMS", "Test RMS", "Accuracy"})
        for (auto n : g.nets) os << ' ' << block << ' ' << upper(n) << " |";
    os << "\n|---|";
    for (std::size_t i = 0; i < 3 * g.nets.size(); ++i) os << "---|";
    os << '\n';
    for (const auto& t : g.tasks) {
        os << "| " << t << " |";
        auto emit = [&](auto field) {
            for (auto n : g.nets) {
                const auto it = g.cells.find({t, n});
                os << ' ' << (it == g.cells.end() ? std::string() : mean_cell(it->second, field)) << " |";
            }
        };
        emit([](const RunReport& r) { return std::optional<double>(r.train_rms_pct); });
        emit([](const RunReport& r) { return r.test_rms_pct; });
        emit([](const RunReport& r) { return r.accuracy_pct; });
        os << '\n';
    }
    os << "\nCells: mean over seeds.\n";
}

inline void markdown_entanglement(std::ostream& os, const Grid& g) {
    auto table = [&](const char* title, auto field) {
        os << "### " << title << "\n\n| Training Pairs |";
        for (auto n : g.nets) os << ' ' << upper(n) << " |";
        os << "\n|---|";
        for (std::size_t i = 0; i < g.nets.size(); ++i) os << "---|";
        os << '\n';
        for (const auto& t : g.tasks) {
            os << "| " << t << " |";
            for (auto n : g.nets) {
                const auto it = g.cells.find({t, n});
                os << ' ' << (it == g.cells.end() ? std::string() : mean_cell(it->second, field)) << " |";
            }
            os << '\n';
        }
        os << '\n';
    };
    table("Entanglement: training RMS error (%)", [](const RunReport& r) { return std::optional<double>(r.train_rms_pct); });
    table("Entanglement: testing RMS error (%)", [](const RunReport& r) { return r.test_rms_pct; });
    os << "Cells: mean over seeds.\n";
}

} // namespace detail

inline const char* csv_header() {
    return "experiment,net,seed,epochs_used,converged,train_rms_pct,test_rms_pct,accuracy_pct,wall_time_ms";
}

/// Rows keep run order: task, then net, then seed. Wall time is written only
/// when `timing` is set so that untimed output is reproducible byte for byte.
inline void emit_report(const std::vector<RunReport>& reports, ReportFormat format, std::ostream& os,
                        bool timing = false) {
    if (reports.empty()) throw ValidationError("no reports to emit");
    if (format == ReportFormat::csv) {
        os << csv_header() << '\n';
        for (const auto& r : reports) {
            os << r.experiment << ',' << to_string(r.net) << ',' << r.seed << ',' << r.epochs_used << ','
               << (r.converged ? "true" : "false") << ',' << detail::fixed(r.train_rms_pct) << ','
               << (r.test_rms_pct ? detail::fixed(*r.test_rms_pct) : "") << ','
               << (r.accuracy_pct ? detail::fixed(*r.accuracy_pct) : "") << ','
               << (timing ? detail::fixed(r.wall_time_ms, 1) : "") << '\n';
        }
        return;
    }
    std::vector<std::string> families;
    for (const auto& r : reports)
        if (std::find(families.begin(), families.end(), r.family()) == families.end()) families.push_back(r.family());
    bool first = true;
    for (const auto& fam : families) {
        std::vector<const RunReport*> rows;
        for (const auto& r : reports)
            if (r.family() == fam) rows.push_back(&r);
        if (!first) os << '\n';
        first = false;
        const auto g = detail::grid_of(rows);
        if (fam == "gates") detail::markdown_gates(os, g);
        else if (fam == "iris") detail::markdown_iris(os, g);
        else detail::markdown_entanglement(os, g);
    }
}

/// Writes to a file, or to `fallback` when `path` is empty.
inline void emit_report(const std::vector<RunReport>& reports, ReportFormat format, const std::string& path,
                        std::ostream& fallback, bool timing = false) {
    if (path.empty()) {
        emit_report(reports, format, fallback, timing);
        return;
    }
    std::ostringstream buf;
    emit_report(reports, format, buf, timing);
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + path + " for writing");
    f << buf.str();
    if (!f) throw std::runtime_error("write failed: " + path);
}

} // namespace qnnbench
