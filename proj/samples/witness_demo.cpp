// Trains the two-qubit QNN as an entanglement witness on four states, then
// compares its output with the exact pure-state entanglement on fresh
// random states and prints the learned schedule as JSON.

#include <qnnbench/qnn.hpp>
#include <qnnbench/tasks.hpp>

#include <cstdio>
#include <iostream>

using namespace qnnbench;

int main() {
    const auto train = witness_encode_qnn(witness_quartet());

    QnnConfig cfg;
    cfg.learning_rate = 8.0;
    cfg.max_epochs = 2000;
    cfg.rms_target = 0.001;
    const auto init = random_schedule(4, 0.5, SeedStream(7).child("init/qnn"));
    const auto fit = qnn_train(train, cfg, init);
    std::printf("trained %zu epochs, train RMS %.3f%%\n\n", fit.epochs_used, fit.final_rms());

    std::printf("%8s %8s %8s %8s   %8s %8s\n", "a", "b", "c", "d", "exact", "qnn");
    SeedStream rng = SeedStream(7).child("demo-states");
    for (int i = 0; i < 8; ++i) {
        const PureState s = sample_pure_state(rng, true);
        std::printf("%8.4f %8.4f %8.4f %8.4f   %8.4f %8.4f\n", s.a, s.b, s.c, s.d, eof_pure(s),
                    qnn_witness(s, fit.schedule));
    }
    std::cout << '\n' << schedule_to_json(fit.schedule).dump(2) << '\n';
}
