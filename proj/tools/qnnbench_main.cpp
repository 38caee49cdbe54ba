// qnnbench: run the gate, iris and entanglement comparisons and write a report.
//
//   qnnbench gates --nets rvnn,cvnn --seeds 1,2,3 --format markdown
//   qnnbench iris --train-size 75,30 --iris-csv data/iris.csv --out iris.csv
//   qnnbench entanglement --config ent.json --epochs 500
//
// Flags override values read from --config. Exit status is 0 whenever the
// runs complete, converged or not; config and IO problems exit with 2.

#include <qnnbench/bench.hpp>

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

using namespace qnnbench;

struct Overrides {
    std::string config_path;
    std::vector<std::string> nets;
    std::vector<std::uint64_t> seeds;
    std::vector<std::size_t> train_sizes;
    std::vector<std::string> gates;
    std::optional<std::size_t> epochs;
    std::optional<double> lr;
    std::optional<std::size_t> slices;
    std::optional<double> tf;
    std::optional<std::string> iris_csv;
    std::string format = "csv";
    std::string out;
    bool timing = false;
};

void add_common(CLI::App* cmd, Overrides& o) {
    cmd->add_option("--config", o.config_path, "JSON experiment config; flags override it")->check(CLI::ExistingFile);
    cmd->add_option("--nets", o.nets, "subset of rvnn,cvnn,qnn")->delimiter(',');
    cmd->add_option("--seeds", o.seeds, "root seeds, one trial each")->delimiter(',');
    cmd->add_option("--epochs", o.epochs, "max epochs for every selected net");
    cmd->add_option("--lr", o.lr, "learning rate for RVNN and QNN (the CVNN rule has none)");
    cmd->add_option("--slices", o.slices, "QNN time slices");
    cmd->add_option("--tf", o.tf, "QNN total evolution time");
    cmd->add_option("--format", o.format, "csv or markdown")->check(CLI::IsMember({"csv", "markdown"}));
    cmd->add_option("--out", o.out, "output file (default stdout)");
    cmd->add_flag("--timing", o.timing, "fill the wall_time_ms column");
}

ExperimentConfig build_config(ExperimentKind kind, const Overrides& o) {
    ExperimentConfig c = ExperimentConfig::defaults(kind);
    if (!o.config_path.empty()) {
        std::ifstream f(o.config_path);
        if (!f) throw std::runtime_error("cannot read " + o.config_path);
        nlohmann::json j;
        try {
            f >> j;
        } catch (const nlohmann::json::exception& e) {
            throw ValidationError(o.config_path + ": " + e.what());
        }
        c = config_from_json(j, kind);
    }
    if (!o.nets.empty()) {
        c.nets.clear();
        for (const auto& n : o.nets) c.nets.push_back(parse_net(n));
    }
    if (!o.seeds.empty()) c.seeds = o.seeds;
    if (!o.train_sizes.empty()) c.train_sizes = o.train_sizes;
    if (!o.gates.empty()) {
        c.gates.clear();
        for (const auto& g : o.gates) c.gates.push_back(gate_dataset(g).name);
    }
    if (o.epochs) c.rvnn.max_epochs = c.cvnn.max_epochs = c.qnn.max_epochs = *o.epochs;
    if (o.lr) c.rvnn.learning_rate = c.qnn.learning_rate = *o.lr;
    if (o.slices) c.qnn.slices = *o.slices;
    if (o.tf) c.qnn.total_time = *o.tf;
    if (o.iris_csv) c.iris_csv = *o.iris_csv;
    if (o.timing) c.timing = true;
    c.validate();
    return c;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Benchmark real, complex and quantum neural networks"};
    app.require_subcommand(1);

    Overrides o;
    auto* gates = app.add_subcommand("gates", "single-layer training on the six logic gates");
    add_common(gates, o);
    gates->add_option("--gate", o.gates, "subset of AND,NAND,OR,NOR,XOR,XNOR")->delimiter(',');

    auto* iris = app.add_subcommand("iris", "iris classification");
    add_common(iris, o);
    iris->add_option("--train-size", o.train_sizes, "training pairs (multiples of 3)")->delimiter(',');
    iris->add_option("--iris-csv", o.iris_csv, "iris data file");

    auto* ent = app.add_subcommand("entanglement", "pure-state entanglement witness");
    add_common(ent, o);
    ent->add_option("--train-size", o.train_sizes, "training states")->delimiter(',');

    CLI11_PARSE(app, argc, argv);

    const ExperimentKind kind = gates->parsed() ? ExperimentKind::gates
                                : iris->parsed() ? ExperimentKind::iris
                                                 : ExperimentKind::entanglement;
    try {
        const ExperimentConfig cfg = build_config(kind, o);
        const auto reports = run_experiment(cfg);
        emit_report(reports, parse_format(o.format), o.out, std::cout, cfg.timing);
    } catch (const std::exception& e) {
        std::cerr << "qnnbench: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
