#include <qnnbench/qnn.hpp>
#include <qnnbench/tasks.hpp>

#include <gtest/gtest.h>

#include <numbers>

#include "oracles.hpp"

using namespace qnnbench;

namespace {

constexpr double pi = std::numbers::pi;

PureState random_state(SeedStream& rng) {
    return PureState::from_amplitudes(rng.uniform(), rng.uniform(), rng.uniform(), rng.uniform(),
                                      rng.uniform(0, 2 * pi), rng.uniform(0, 2 * pi), rng.uniform(0, 2 * pi));
}

// Amplitude signs carried by phases 0 or pi, so rho is real.
PureState random_real_state(SeedStream& rng) {
    auto sign = [&rng] { return rng.uniform() < 0.5 ? 0.0 : pi; };
    return PureState::from_amplitudes(std::abs(rng.normal()), std::abs(rng.normal()), std::abs(rng.normal()),
                                      std::abs(rng.normal()), sign(), sign(), sign());
}

std::vector<QnnPair> random_batch(SeedStream& rng, int n) {
    std::vector<QnnPair> b;
    for (int i = 0; i < n; ++i) b.push_back({random_state(rng), rng.uniform()});
    return b;
}

} // namespace

TEST(QnnForward, ZeroScheduleExamples) {
    const auto zero = HamiltonianSchedule::zero(4, 1.0);
    const double r = std::sqrt(0.5);
    EXPECT_NEAR(qnn_forward(PureState::basis(0), zero), 1.0, 1e-15);
    EXPECT_NEAR(qnn_forward({r, r, 0, 0}, zero), 0.0, 1e-15);
}

// Under H = K_A X(x)I the readout of |00> is cos^2(2 t_f).
TEST(QnnForward, SingleQubitRotationMatchesOracle) {
    for (double tf : {pi / 8, pi / 4, pi / 2, 1.0}) {
        auto s = HamiltonianSchedule::zero(1, tf);
        s.slices[0].k_a = 1.0;
        const Matrix4c rho = oracle::rk4_evolve(pure_to_density(PureState::basis(0)).matrix(), s);
        const double zz = (rho(0, 0) - rho(1, 1) - rho(2, 2) + rho(3, 3)).real();
        EXPECT_NEAR(qnn_forward(PureState::basis(0), s), zz * zz, 1e-9);
        EXPECT_NEAR(qnn_forward(PureState::basis(0), s), std::pow(std::cos(2 * tf), 2), 1e-12);
    }
    auto quarter = HamiltonianSchedule::zero(1, pi / 4);
    quarter.slices[0].k_a = 1.0;
    EXPECT_NEAR(qnn_forward(PureState::basis(0), quarter), 0.0, 1e-12);
    auto half = HamiltonianSchedule::zero(1, pi / 2);
    half.slices[0].k_a = 1.0;
    EXPECT_NEAR(qnn_forward(PureState::basis(0), half), 1.0, 1e-12);
}

TEST(QnnForward, AlwaysInUnitInterval) {
    SeedStream rng(1);
    for (int k = 0; k < 500; ++k) {
        const auto s = random_schedule(1 + rng.below(6), rng.uniform(0.1, 5.0), rng.child("s", k));
        const double y = qnn_forward(random_state(rng), s);
        ASSERT_GE(y, 0.0);
        ASSERT_LE(y, 1.0);
    }
}

TEST(QnnForward, QuadraticInDensityEntries) {
    SeedStream rng(2);
    for (int trial = 0; trial < 5; ++trial) {
        const auto s = random_schedule(4, 1.5, rng.child("sched", trial));
        auto sample = [&](int n, Eigen::MatrixXd& f, Eigen::VectorXd& y) {
            f.resize(n, 66);
            y.resize(n);
            for (int i = 0; i < n; ++i) {
                const auto st = random_real_state(rng);
                f.row(i) = oracle::quadratic_features(pure_to_density(st).matrix()).transpose();
                y(i) = qnn_forward(st, s);
            }
        };
        Eigen::MatrixXd ftrain, ftest;
        Eigen::VectorXd ytrain, ytest;
        sample(60, ftrain, ytrain);
        sample(60, ftest, ytest);
        const Eigen::VectorXd coef = ftrain.completeOrthogonalDecomposition().solve(ytrain);
        EXPECT_LT((ftest * coef - ytest).cwiseAbs().maxCoeff(), 1e-8);
    }
}

TEST(QnnGradient, VanishesAtExactFit) {
    SeedStream rng(3);
    const auto s = random_schedule(3, 1.0, rng.child("s"));
    std::vector<QnnPair> batch;
    for (int i = 0; i < 5; ++i) {
        const auto st = random_state(rng);
        batch.push_back({st, qnn_forward(st, s)});
    }
    for (double g : qnn_gradient(s, batch)) EXPECT_LT(std::abs(g), 1e-8);
}

TEST(QnnGradient, DuplicatedBatchGivesSameGradient) {
    SeedStream rng(4);
    const auto s = random_schedule(2, 1.0, rng.child("s"));
    const auto batch = random_batch(rng, 3);
    auto doubled = batch;
    doubled.insert(doubled.end(), batch.begin(), batch.end());
    const auto g1 = qnn_gradient(s, batch), g2 = qnn_gradient(s, doubled);
    ASSERT_EQ(g1.size(), 10u);
    for (std::size_t i = 0; i < g1.size(); ++i) EXPECT_NEAR(g1[i], g2[i], 1e-9);
}

TEST(QnnGradient, MatchesDirectCentralDifference) {
    SeedStream rng(5);
    const auto s = random_schedule(2, 1.0, rng.child("s"));
    const auto batch = random_batch(rng, 4);
    const double h = 1e-5;
    const auto g = qnn_gradient(s, batch, h);
    for (std::size_t i = 0; i < g.size(); ++i) {
        auto up = s, down = s;
        up.parameter(i) += h;
        down.parameter(i) -= h;
        EXPECT_DOUBLE_EQ(g[i], (qnn_loss(up, batch) - qnn_loss(down, batch)) / (2 * h));
    }
}

// Successive differences of a second-order stencil shrink by 4 per halving.
TEST(QnnGradient, RichardsonOrderTwo) {
    SeedStream rng(6);
    int checked = 0;
    for (int trial = 0; trial < 10; ++trial) {
        const auto s = random_schedule(3, 1.0, rng.child("s", trial));
        const auto batch = random_batch(rng, 3);
        const auto g1 = qnn_gradient(s, batch, 1e-2);
        const auto g2 = qnn_gradient(s, batch, 5e-3);
        const auto g3 = qnn_gradient(s, batch, 2.5e-3);
        for (std::size_t i = 0; i < g1.size(); ++i) {
            const double d1 = g1[i] - g2[i], d2 = g2[i] - g3[i];
            if (std::abs(d1) < 1e-7) continue;
            EXPECT_NEAR(d1 / d2, 4.0, 1.0) << "trial " << trial << " component " << i;
            ++checked;
        }
    }
    EXPECT_GT(checked, 50);
}

TEST(QnnGradient, StepAgainstGradientDescends) {
    SeedStream rng(7);
    for (int trial = 0; trial < 20; ++trial) {
        const auto s = random_schedule(3, 1.0, rng.child("s", trial));
        const std::vector<QnnPair> one{{random_state(rng), rng.uniform()}};
        const auto g = qnn_gradient(s, one);
        auto stepped = s;
        for (std::size_t i = 0; i < g.size(); ++i) stepped.parameter(i) -= 1e-4 * g[i];
        EXPECT_LT(qnn_loss(stepped, one), qnn_loss(s, one));
    }
}

TEST(QnnGradient, RejectsBadStep) {
    const auto s = HamiltonianSchedule::zero(1, 1.0);
    const std::vector<QnnPair> b{{PureState::basis(0), 0.0}};
    EXPECT_THROW(qnn_gradient(s, b, 0.0), ValidationError);
    EXPECT_THROW(qnn_gradient(s, b, 0.1), ValidationError);
    EXPECT_THROW(qnn_gradient(s, {}, 1e-5), ValidationError);
}

TEST(QnnTrain, LooseTargetConvergesImmediately) {
    SeedStream rng(8);
    QnnConfig cfg;
    cfg.rms_target = 1.0;
    const auto r = qnn_train(random_batch(rng, 5), cfg, random_schedule(2, 1.0, rng.child("s")));
    EXPECT_TRUE(r.converged);
    EXPECT_LE(r.epochs_used, 1u);
}

TEST(QnnTrain, XnorConverges) {
    QnnConfig cfg;
    cfg.learning_rate = 0.2;
    cfg.max_epochs = 500;
    const auto init = random_schedule(8, 8.0, SeedStream(2).child("gates/XNOR").child("init/qnn"));
    const auto r = qnn_train(gate_encode_qnn(gate_dataset("XNOR")), cfg, init);
    EXPECT_TRUE(r.converged);
    EXPECT_LE(r.final_rms(), 1.0);
}

TEST(QnnTrain, DeterministicHistory) {
    QnnConfig cfg;
    cfg.max_epochs = 30;
    const auto pairs = gate_encode_qnn(gate_dataset("XOR"));
    const auto a = qnn_train(pairs, cfg, random_schedule(4, 1.0, SeedStream(5)));
    const auto b = qnn_train(pairs, cfg, random_schedule(4, 1.0, SeedStream(5)));
    EXPECT_EQ(a.rms_history, b.rms_history);
    EXPECT_EQ(a.schedule, b.schedule);
}

TEST(QnnTrain, RejectsBadConfig) {
    QnnConfig cfg;
    cfg.rms_target = 0.0;
    const std::vector<QnnPair> b{{PureState::basis(0), 0.0}};
    EXPECT_THROW(qnn_train(b, cfg, HamiltonianSchedule::zero(1, 1.0)), ValidationError);
    cfg = QnnConfig{};
    cfg.learning_rate = -1.0;
    EXPECT_THROW(qnn_train(b, cfg, HamiltonianSchedule::zero(1, 1.0)), ValidationError);
    EXPECT_THROW(qnn_train({}, QnnConfig{}, HamiltonianSchedule::zero(1, 1.0)), ValidationError);
}

// Basis inputs read out d_i = <i|U^dag ZZ U|i> with sum_i d_i = Tr(ZZ) = 0.
// For the AND targets (0,0,0,1) the best reachable mean squared error of the
// squared readouts d_i^2 is 1/112, i.e. RMS 9.449%.
TEST(QnnLinearGates, TraceZeroBound) {
    SeedStream rng(9);
    for (int k = 0; k < 200; ++k) {
        const auto s = random_schedule(1 + rng.below(8), rng.uniform(0.1, 10.0), rng.child("s", k));
        const Matrix4c u = schedule_propagator(s).matrix();
        double sum = 0.0;
        for (int i = 0; i < 4; ++i) sum += zz_expectation(DensityMatrix::trusted(u * pure_to_density(PureState::basis(i)).matrix() * u.adjoint()));
        ASSERT_NEAR(sum, 0.0, 1e-12);
    }
    const double floor_pct = 100.0 / std::sqrt(112.0);
    QnnConfig cfg;
    cfg.learning_rate = 0.2;
    cfg.max_epochs = 300;
    const auto r = qnn_train(gate_encode_qnn(gate_dataset("AND")), cfg, random_schedule(8, 8.0, SeedStream(3)));
    EXPECT_FALSE(r.converged);
    EXPECT_GE(r.final_rms(), floor_pct - 1e-9);
}

TEST(QnnWitness, UntrainedZeroScheduleIsNotAWitness) {
    EXPECT_NEAR(qnn_witness(PureState::basis(0), HamiltonianSchedule::zero(4, 0.5)), 1.0, 1e-15);
}

TEST(QnnWitness, TrainedOnQuartetSeparatesBellFromProduct) {
    QnnConfig cfg;
    cfg.learning_rate = 8.0;
    cfg.max_epochs = 2000;
    cfg.rms_target = 0.001;
    const auto r =
        qnn_train(witness_encode_qnn(witness_quartet()), cfg, random_schedule(4, 0.5, SeedStream(1).child("w")));
    const double s = std::sqrt(0.5);
    EXPECT_NEAR(qnn_witness({s, 0, 0, s}, r.schedule), 1.0, 0.05);
    EXPECT_NEAR(qnn_witness(PureState::basis(0), r.schedule), 0.0, 0.05);
}

TEST(ScheduleJson, RoundTrip) {
    const auto s = random_schedule(5, 2.5, SeedStream(10));
    const auto j = schedule_to_json(s);
    EXPECT_TRUE(j.at("slices").at(0).contains("eps_A"));
    EXPECT_EQ(schedule_from_json(nlohmann::json::parse(j.dump())), s);
    EXPECT_THROW(schedule_from_json(nlohmann::json::parse(R"({"total_time": 1, "slices": []})")), ValidationError);
    EXPECT_THROW(schedule_from_json(nlohmann::json::parse(R"({"slices": [{"K_A": 1}]})")), ValidationError);
}
