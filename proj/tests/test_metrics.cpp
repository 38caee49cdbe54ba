#include <qnnbench/metrics.hpp>

#include <gtest/gtest.h>

using namespace qnnbench;

namespace {
Eigen::VectorXd vec(std::initializer_list<double> v) {
    Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (double x : v) out(i++) = x;
    return out;
}
} // namespace

TEST(RmsPercent, ZeroWhenEqual) {
    std::vector<Eigen::VectorXd> a{vec({0.1, 0.9}), vec({0.4, 0.2})};
    EXPECT_EQ(rms_percent(a, a), 0.0);
}

TEST(RmsPercent, SingleMiss) { EXPECT_DOUBLE_EQ(rms_percent(std::vector<double>{1.0}, std::vector<double>{0.0}), 100.0); }

TEST(RmsPercent, TwoScalarPairs) {
    EXPECT_NEAR(rms_percent(std::vector<double>{0.3, 0.4}, std::vector<double>{0.0, 0.0}), 35.35533905932738, 1e-12);
}

TEST(RmsPercent, AveragesOverComponents) {
    // errors 0.3 and 0.4 inside one two-component pair
    EXPECT_NEAR(rms_percent({vec({0.3, 0.4})}, {vec({0.0, 0.0})}), 35.35533905932738, 1e-12);
}

TEST(RmsPercent, SymmetricInPairOrder) {
    std::vector<Eigen::VectorXd> o{vec({0.1}), vec({0.7}), vec({0.2})}, t{vec({0.0}), vec({1.0}), vec({0.5})};
    const double r = rms_percent(o, t);
    std::swap(o[0], o[2]);
    std::swap(t[0], t[2]);
    EXPECT_DOUBLE_EQ(rms_percent(o, t), r);
}

TEST(RmsPercent, ShapeMismatchThrows) {
    EXPECT_THROW(rms_percent({vec({0.1})}, {vec({0.1, 0.2})}), ValidationError);
    EXPECT_THROW(rms_percent(std::vector<double>{0.1}, std::vector<double>{}), ValidationError);
    EXPECT_THROW(rms_percent(std::vector<double>{}, std::vector<double>{}), ValidationError);
}

TEST(Accuracy, ExactLabelsGiveHundred) {
    std::vector<Eigen::VectorXd> l{vec({1, 0, 0}), vec({0, 1, 0}), vec({0, 0, 1})};
    EXPECT_DOUBLE_EQ(accuracy_percent(l, l), 100.0);
}

TEST(Accuracy, UniformOutputsGiveZero) {
    std::vector<Eigen::VectorXd> l{vec({1, 0, 0}), vec({0, 1, 0}), vec({0, 0, 1})};
    std::vector<Eigen::VectorXd> o(3, vec({1.0 / 3, 1.0 / 3, 1.0 / 3}));
    EXPECT_DOUBLE_EQ(accuracy_percent(o, l), 0.0);
}

TEST(Accuracy, TrueClassComponentMustExceedHalf) {
    EXPECT_TRUE(onehot_decision_correct(vec({0.51, 0.2, 0.1}), vec({1, 0, 0})));
    EXPECT_FALSE(onehot_decision_correct(vec({0.5, 0.2, 0.1}), vec({1, 0, 0})));
    EXPECT_FALSE(onehot_decision_correct(vec({0.9, 0.2, 0.1}), vec({0, 1, 0})));
}

TEST(Accuracy, SeventyOneOfSeventyFive) {
    std::vector<int> labels(75, 1), decided(75, 1);
    for (int i = 0; i < 4; ++i) decided[static_cast<std::size_t>(i)] = 2;
    EXPECT_NEAR(accuracy_percent(decided, labels), 94.66666666666667, 1e-12);
}

TEST(StoppingRule, Validation) {
    EXPECT_NO_THROW(validate_stopping_rule(0.01, 1));
    EXPECT_NO_THROW(validate_stopping_rule(1.0, 10));
    EXPECT_THROW(validate_stopping_rule(0.0, 10), ValidationError);
    EXPECT_THROW(validate_stopping_rule(1.5, 10), ValidationError);
    EXPECT_THROW(validate_stopping_rule(0.01, 0), ValidationError);
}
