#include <qnnbench/cvnn.hpp>
#include <qnnbench/tasks.hpp>

#include <gtest/gtest.h>

#include <numbers>

using namespace qnnbench;

namespace {

constexpr double pi = std::numbers::pi;

Eigen::VectorXcd cvec(std::initializer_list<Complex> v) {
    Eigen::VectorXcd out(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (auto x : v) out(i++) = x;
    return out;
}

ComplexLayerStack neuron(Eigen::VectorXcd w) {
    ComplexLayer l{w.transpose(), Eigen::VectorXcd(0)};
    return ComplexLayerStack({l});
}

bool near(Complex a, Complex b, double tol) { return std::abs(a - b) < tol; }

} // namespace

TEST(CvnnMap, Examples) {
    EXPECT_TRUE(near(cvnn_map_scalar(0.0), {1, 0}, 1e-15));
    EXPECT_TRUE(near(cvnn_map_scalar(1.0), {-1, 0}, 1e-15));
    EXPECT_TRUE(near(cvnn_map_scalar(0.5), {0, 1}, 1e-15));
    EXPECT_THROW(cvnn_map_scalar(-0.01), ValidationError);
    EXPECT_THROW(cvnn_map_scalar(1.01), ValidationError);
    EXPECT_THROW(cvnn_map_scalar(NAN), ValidationError);
}

TEST(CvnnUnmap, Examples) {
    EXPECT_DOUBLE_EQ(cvnn_unmap({1, 0}), 0.0);
    EXPECT_DOUBLE_EQ(cvnn_unmap({0, 1}), 0.5);
    EXPECT_DOUBLE_EQ(cvnn_unmap({-1, 0}), 1.0);
    EXPECT_NEAR(cvnn_unmap(std::polar(1.0, 1.5 * pi)), 0.5, 1e-15); // reflected
    EXPECT_THROW(cvnn_unmap({0, 0}), ValidationError);
}

TEST(CvnnUnmap, InvertsMap) {
    for (int k = 0; k <= 1000; ++k) {
        const double r = k / 1000.0;
        EXPECT_NEAR(cvnn_unmap(cvnn_map_scalar(r)), r, 1e-12);
    }
}

TEST(CvnnActivation, Examples) {
    EXPECT_TRUE(near(cvnn_activation({1, 1}), std::sqrt(0.5) * Complex(1, 1), 1e-15));
    EXPECT_TRUE(near(cvnn_activation({-3, 0}), {-1, 0}, 1e-15));
    EXPECT_TRUE(near(cvnn_activation({0, 5}), {0, 1}, 1e-15));
    EXPECT_THROW(cvnn_activation({0, 0}), DegenerateActivation);
}

TEST(CvnnForward, Examples) {
    EXPECT_TRUE(near(cvnn_forward(neuron(cvec({1, 1})), cvec({1, {0, 1}}))(0), std::polar(1.0, pi / 4), 1e-15));
    const Complex w = std::polar(2.0, 0.3), x = std::polar(1.0, -0.3);
    EXPECT_TRUE(near(cvnn_forward(neuron(cvec({w})), cvec({x}))(0), {1, 0}, 1e-15));
    ComplexLayer one{Eigen::MatrixXcd::Ones(1, 1), Eigen::VectorXcd(0)};
    EXPECT_TRUE(near(cvnn_forward(ComplexLayerStack({one, one}), cvec({1}))(0), {1, 0}, 1e-15));
}

TEST(CvnnForward, ZeroSumIsDegenerate) {
    EXPECT_THROW(cvnn_forward(neuron(cvec({1, 1})), cvec({1, -1})), DegenerateActivation);
    EXPECT_THROW(cvnn_forward(neuron(cvec({1, 1})), cvec({1})), ValidationError);
}

TEST(CvnnForward, SignalsStayOnUnitCircle) {
    SeedStream rng(1);
    const auto net = ComplexLayerStack::random({4, 10, 3}, true, SeedStream(2));
    for (int k = 0; k < 200; ++k) {
        Eigen::VectorXcd x(4);
        for (int i = 0; i < 4; ++i) x(i) = cvnn_map_scalar(rng.uniform());
        const auto y = cvnn_forward(net, x);
        for (Eigen::Index i = 0; i < y.size(); ++i) EXPECT_NEAR(std::abs(y(i)), 1.0, 1e-12);
    }
}

TEST(ComplexLayerStack, InitModulusAndBias) {
    const auto net = ComplexLayerStack::random({4, 6, 2}, true, SeedStream(3));
    for (const auto& l : net.layers()) {
        EXPECT_GE(l.weights.cwiseAbs().minCoeff(), 0.1);
        EXPECT_LE(l.weights.cwiseAbs().maxCoeff(), 0.5);
        EXPECT_EQ(l.biases.size(), l.outputs());
        EXPECT_EQ(l.fan_in(), l.inputs() + 1);
    }
    EXPECT_FALSE(ComplexLayerStack::random({2, 1}, false, SeedStream(3)).layers()[0].has_bias());
}

TEST(CvnnUpdate, ZeroErrorLeavesWeights) {
    const auto w = cvec({{0.3, 0.1}, {-0.2, 0.4}});
    const auto x = cvec({{1, 0}, {0, 1}});
    const Complex z = (w.array() * x.array()).sum();
    EXPECT_LT((cvnn_update_output_neuron(w, x, z) - w).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(CvnnUpdate, SingleWeightExample) {
    const auto w = cvnn_update_output_neuron(cvec({1}), cvec({1}), {0, 1});
    EXPECT_TRUE(near(w(0), {0, 1}, 1e-15));
}

TEST(CvnnUpdate, HalfTargetExample) {
    const auto w0 = cvec({1, 1});
    const auto x = cvec({1, {0, 1}});
    const Complex z = (w0.array() * x.array()).sum();
    const auto w = cvnn_update_output_neuron(w0, x, 0.5 * z);
    EXPECT_TRUE(near((w.array() * x.array()).sum(), 0.5 * z, 1e-12));
}

TEST(CvnnUpdate, ExactCorrectionOnRandomCases) {
    SeedStream rng(4);
    double worst = 0.0;
    for (int k = 0; k < 1000; ++k) {
        const auto n = static_cast<Eigen::Index>(1 + rng.below(12));
        Eigen::VectorXcd w(n), x(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            w(i) = {rng.uniform(-2, 2), rng.uniform(-2, 2)};
            x(i) = std::polar(rng.uniform(0.2, 3.0), rng.uniform(0, 2 * pi));
        }
        const Complex t{rng.uniform(-3, 3), rng.uniform(-3, 3)};
        const auto updated = cvnn_update_output_neuron(w, x, t);
        worst = std::max(worst, std::abs((updated.array() * x.array()).sum() - t));
    }
    EXPECT_LT(worst, 1e-10);
}

TEST(CvnnUpdate, ZeroInputRejected) {
    EXPECT_THROW(cvnn_update_output_neuron(cvec({1, 1}), cvec({1, 0}), {1, 0}), ValidationError);
}

TEST(CvnnLearnPair, OutputSumLandsOnTarget) {
    SeedStream rng(5);
    for (int k = 0; k < 100; ++k) {
        auto net = ComplexLayerStack::random({3, 5, 2}, true, rng.child("n", static_cast<std::uint64_t>(k)));
        ComplexPair p{cvec({cvnn_map_scalar(rng.uniform()), cvnn_map_scalar(rng.uniform()),
                            cvnn_map_scalar(rng.uniform())}),
                      Eigen::Vector2d(rng.uniform(), rng.uniform())};
        cvnn_learn_pair(net, p);
        // forward again and compare the output pre-activation sums with M(target)
        Eigen::VectorXcd x = p.input;
        for (std::size_t l = 0; l + 1 < net.layers().size(); ++l) x = cvnn_activate(net.layers()[l].weighted_sums(x));
        const auto z = net.layers().back().weighted_sums(x);
        for (Eigen::Index i = 0; i < 2; ++i) EXPECT_TRUE(near(z(i), cvnn_map_scalar(p.target(i)), 1e-10));
        const auto out = cvnn_predict(net, p.input);
        for (Eigen::Index i = 0; i < 2; ++i) EXPECT_NEAR(out(i), p.target(i), 1e-9);
    }
}

TEST(CvnnTrainEpoch, ZeroErrorPairsLeaveNetUnchanged) {
    auto net = ComplexLayerStack::random({2, 1}, true, SeedStream(6));
    ComplexPair p{cvec({cvnn_map_scalar(0.2), cvnn_map_scalar(0.7)}), Eigen::VectorXd(1)};
    // choose the target so that the current sum already equals M(target)
    const Complex z = net.layers()[0].weighted_sums(p.input)(0);
    auto& l = net.layers()[0];
    const Complex scale = z / cvnn_map_scalar(0.4);
    l.weights /= scale;
    l.biases /= scale;
    p.target(0) = 0.4;
    ASSERT_TRUE(near(net.layers()[0].weighted_sums(p.input)(0), cvnn_map_scalar(0.4), 1e-12));
    const auto before = net.layers()[0].weights;
    const auto ep = cvnn_train_epoch(net, {p});
    EXPECT_LT((net.layers()[0].weights - before).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LT(ep.rms, 1e-9);
}

TEST(CvnnTrainEpoch, DegeneratePairIsSkippedAndCounted) {
    auto net = neuron(cvec({1, 1}));
    const ComplexPair bad{cvec({1, -1}), Eigen::VectorXd::Constant(1, 0.0)};
    const ComplexPair good{cvec({1, {0, 1}}), Eigen::VectorXd::Constant(1, 0.25)};
    const auto before = net.layers()[0].weights;
    const auto ep = cvnn_train_epoch(net, {bad});
    EXPECT_EQ(ep.skipped_pairs, 1u);
    EXPECT_EQ(ep.rms, 100.0);
    EXPECT_EQ(net.layers()[0].weights, before);
    const auto ep2 = cvnn_train_epoch(net, {good});
    EXPECT_EQ(ep2.skipped_pairs, 0u);
}

TEST(CvnnTrainToThreshold, AlreadyCorrectUsesNoEpochs) {
    auto net = neuron(cvec({1}));
    const ComplexPair p{cvec({1}), Eigen::VectorXd::Constant(1, 0.0)};
    const auto r = cvnn_train_to_threshold(net, {p}, 0.01, 10);
    EXPECT_TRUE(r.converged);
    EXPECT_LE(r.epochs_used, 1u);
}

TEST(CvnnTrainToThreshold, LinearGatesConvergeQuickly) {
    for (const char* g : {"AND", "NAND", "OR", "NOR"}) {
        auto net = ComplexLayerStack::random({2, 1}, true, SeedStream(1).child("init/cvnn"));
        SeedStream order = SeedStream(1).child("order/cvnn");
        const auto r = cvnn_train_to_threshold(net, gate_encode_complex(gate_dataset(g)), 0.01, 5000, &order);
        EXPECT_TRUE(r.converged) << g;
        EXPECT_LT(r.epochs_used, 50u) << g;
    }
}

TEST(CvnnTrainToThreshold, ShuffleIsReproducible) {
    const auto pairs = gate_encode_complex(gate_dataset("OR"));
    auto a = ComplexLayerStack::random({2, 1}, true, SeedStream(2));
    auto b = a;
    SeedStream oa(3), ob(3);
    const auto ra = cvnn_train_to_threshold(a, pairs, 0.01, 100, &oa);
    const auto rb = cvnn_train_to_threshold(b, pairs, 0.01, 100, &ob);
    EXPECT_EQ(ra.rms_history, rb.rms_history);
}

// With inputs M(p), M(q) = +-1 every affine sum obeys z00 + z11 = z01 + z10,
// so the two XOR classes cannot sit near opposite ends of the real axis.
TEST(CvnnSingleLayer, XorParallelogramObstruction) {
    SeedStream rng(7);
    for (int k = 0; k < 1000; ++k) {
        const Complex w0{rng.uniform(-1, 1), rng.uniform(-1, 1)}, w1{rng.uniform(-1, 1), rng.uniform(-1, 1)},
            w2{rng.uniform(-1, 1), rng.uniform(-1, 1)};
        auto z = [&](int p, int q) { return w0 + w1 * cvnn_map_scalar(p) + w2 * cvnn_map_scalar(q); };
        EXPECT_LT(std::abs(z(0, 0) + z(1, 1) - z(0, 1) - z(1, 0)), 1e-14);
    }
    auto net = ComplexLayerStack::random({2, 1}, true, SeedStream(1).child("init/cvnn"));
    SeedStream order(4);
    const auto r = cvnn_train_to_threshold(net, gate_encode_complex(gate_dataset("XOR")), 0.01, 2000, &order);
    EXPECT_FALSE(r.converged);
    EXPECT_GT(r.final_rms(), 50.0);
}

TEST(CvnnJson, RoundTripWithAndWithoutBias) {
    for (bool bias : {true, false}) {
        const auto net = ComplexLayerStack::random({3, 4, 2}, bias, SeedStream(8));
        const auto j = cvnn_to_json(net);
        EXPECT_TRUE(j.at("lr").is_null());
        const auto back = cvnn_from_json(nlohmann::json::parse(j.dump()));
        ASSERT_EQ(back.layers().size(), net.layers().size());
        for (std::size_t i = 0; i < net.layers().size(); ++i) {
            EXPECT_EQ(back.layers()[i].weights, net.layers()[i].weights);
            EXPECT_EQ(back.layers()[i].biases, net.layers()[i].biases);
        }
    }
    EXPECT_THROW(cvnn_from_json(nlohmann::json::parse(R"({"layers": [{"w": [[[1]]]}]})")), ValidationError);
}
