#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "tsdiff/error.hpp"
#include "tsdiff/signals.hpp"

namespace tsdiff {
namespace {

SignalSpec unit_sine(double delay = 0.0) { return SignalSpec{Sine{1.0, 1.0, 0.0}, delay, std::nullopt}; }

TEST(Truth, SineDerivativeIdentities) {
    EXPECT_EQ(truth(unit_sine(), 0.0, 1), 1.0);
    EXPECT_EQ(truth(unit_sine(), std::numbers::pi / 2, 2), -1.0);
    EXPECT_DOUBLE_EQ(truth(unit_sine(), 0.3, 3), -std::cos(0.3));
    EXPECT_DOUBLE_EQ(truth(unit_sine(), 0.3, 4), std::sin(0.3));
}

TEST(Truth, ScaledSineAgainstFiniteDifferences) {
    const SignalSpec s{Sine{2.5, 3.0, 0.4}, 0.0, std::nullopt};
    const double h = 1e-5;
    for (unsigned order = 0; order < 3; ++order)
        for (double t : {-1.0, 0.0, 0.7, 4.2}) {
            const double fd = (truth(s, t + h, order) - truth(s, t - h, order)) / (2 * h);
            EXPECT_NEAR(truth(s, t, order + 1), fd, 1e-5 * std::pow(3.0, order + 1));
        }
}

TEST(Truth, PolynomialDerivatives) {
    const SignalSpec square{Polynomial{{0, 0, 1}}, 0.0, std::nullopt};
    EXPECT_EQ(truth(square, 3.0, 1), 6.0);
    EXPECT_EQ(truth(square, 3.0, 2), 2.0);
    EXPECT_EQ(truth(square, 3.0, 3), 0.0);

    const SignalSpec cubic{Polynomial{{1, -2, 0.5, 4}}, 0.0, std::nullopt};
    EXPECT_DOUBLE_EQ(truth(cubic, 2.0, 0), 1 - 4 + 2 + 32);
    EXPECT_DOUBLE_EQ(truth(cubic, 2.0, 1), -2 + 2 + 48);
    EXPECT_DOUBLE_EQ(truth(cubic, 2.0, 2), 1 + 48);
    EXPECT_DOUBLE_EQ(truth(cubic, 2.0, 3), 24);
}

TEST(Truth, SumOfSinesIsLinear) {
    const Sine a{1.0, 1.0, 0.0}, b{0.3, 5.0, 1.0};
    const SignalSpec sum{SumOfSines{{a, b}}, 0.0, std::nullopt};
    for (unsigned order = 0; order < 4; ++order) {
        const double expected = truth(SignalSpec{a, 0.0, {}}, 1.3, order) + truth(SignalSpec{b, 0.0, {}}, 1.3, order);
        EXPECT_DOUBLE_EQ(truth(sum, 1.3, order), expected);
    }
}

TEST(Truth, RecordedSignalsHaveNoDerivatives) {
    Recorded rec;
    rec.samples.push(0.0, 0.0);
    rec.samples.push(1.0, 2.0);
    const SignalSpec s{rec, 0.0, std::nullopt};
    EXPECT_DOUBLE_EQ(truth(s, 0.25, 0), 0.5);
    try {
        truth(s, 0.5, 1);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::invalid_input);
    }
}

TEST(Measure, DelayedArgument) {
    EXPECT_EQ(measure(unit_sine(0.5), 0.5), 0.0);
    EXPECT_NEAR(measure(unit_sine(0.5), 2.0), 0.997495, 1e-6);
    EXPECT_EQ(measure(unit_sine(0.5), 2.0), std::sin(1.5));
}

TEST(Measure, PreHistoryIsAnalytic) {
    EXPECT_EQ(measure(unit_sine(0.5), 0.0), std::sin(-0.5));
    EXPECT_NEAR(measure(unit_sine(0.5), 0.0), -0.479426, 1e-6);
}

TEST(Measure, ZeroDelayEqualsTruthExactly) {
    const SignalSpec s{SumOfSines{{{1.0, 1.0, 0.0}, {0.2, 7.0, 0.3}}}, 0.0, std::nullopt};
    for (double t = 0.0; t < 10.0; t += 0.37) EXPECT_EQ(measure(s, t), truth(s, t, 0));
}

TEST(Measure, ShiftProperty) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 20.0), d(0.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        const double delay = d(rng), t = u(rng);
        EXPECT_EQ(measure(unit_sine(delay), t), truth(unit_sine(delay), t - delay, 0));
    }
}

TEST(Measure, NoiseIsDeterministicAndBounded) {
    SignalSpec s = unit_sine(0.5);
    s.noise = NoiseSpec{NoiseSpec::Kind::uniform, 0.01, 42};
    NoiseStream a(*s.noise), b(*s.noise);
    for (std::uint64_t k = 0; k < 1000; ++k) {
        const double t = 1e-3 * static_cast<double>(k);
        const double first = measure(s, t, a, k);
        EXPECT_EQ(first, measure(s, t, a, k));
        EXPECT_EQ(first, measure(s, t, b, k));
        EXPECT_LE(std::abs(first - measure(s, t)), 0.01);
    }
}

TEST(Measure, SeedsChangeTheSequence) {
    NoiseStream a(NoiseSpec{NoiseSpec::Kind::gaussian, 1.0, 1}), b(NoiseSpec{NoiseSpec::Kind::gaussian, 1.0, 2});
    int equal = 0;
    for (std::uint64_t k = 0; k < 100; ++k) equal += a.at(k) == b.at(k);
    EXPECT_EQ(equal, 0);
}

TEST(Measure, RandomAccessMatchesSequentialDraws) {
    NoiseStream forward(NoiseSpec{NoiseSpec::Kind::uniform, 0.5, 9});
    NoiseStream jump(NoiseSpec{NoiseSpec::Kind::uniform, 0.5, 9});
    const double later = jump.at(50);
    for (std::uint64_t k = 0; k < 50; ++k) forward.at(k);
    EXPECT_EQ(forward.at(50), later);
}

TEST(DelayBuffer, MidpointInterpolation) {
    DelayBuffer buf;
    buf.push(0.0, 0.0);
    buf.push(1.0, 2.0);
    EXPECT_DOUBLE_EQ(buf.sample(1.0, 0.5), 1.0);
}

TEST(DelayBuffer, ExactGridHit) {
    DelayBuffer buf;
    buf.push(0.0, 5.0);
    EXPECT_EQ(buf.sample(0.0, 0.0), 5.0);
}

TEST(DelayBuffer, QueryBeforeHistoryUnderflows) {
    DelayBuffer buf;
    buf.push(0.0, 0.0);
    buf.push(1.0, 2.0);
    try {
        buf.sample(0.5, 1.0);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::underflow);
    }
}

TEST(DelayBuffer, ExactAtEveryGridPointAndLinearBetween) {
    DelayBuffer buf;
    for (int k = 0; k <= 100; ++k) buf.push(0.01 * k, std::sin(0.01 * k));
    for (int k = 10; k <= 100; ++k) EXPECT_EQ(buf.sample(0.01 * k, 0.0), std::sin(0.01 * k));
    // Linear interpolation of a smooth signal: error bounded by h^2/8 max|v''|.
    for (double t = 0.3; t < 0.99; t += 0.0037) EXPECT_NEAR(buf.sample(t, 0.1), std::sin(t - 0.1), 0.01 * 0.01 / 8 + 1e-15);
}

TEST(DelayBuffer, RejectsOutOfOrderSamples) {
    DelayBuffer buf;
    buf.push(1.0, 0.0);
    EXPECT_THROW(buf.push(1.0, 1.0), Error);
    EXPECT_THROW(buf.push(0.5, 1.0), Error);
}

TEST(DelayBuffer, DiscardKeepsInterpolationSupport) {
    DelayBuffer buf;
    for (int k = 0; k < 10; ++k) buf.push(k, 2.0 * k);
    buf.discard_before(4.5);
    EXPECT_EQ(buf.front().t, 4.0);
    EXPECT_DOUBLE_EQ(buf.sample(4.5, 0.0), 9.0);
    EXPECT_THROW(buf.sample(3.9, 0.0), Error);
}

TEST(RecordedCsv, LoadsTwoColumnFileWithHeader) {
    const auto path = std::filesystem::temp_directory_path() / "tsdiff_recorded_test.csv";
    {
        std::ofstream out(path);
        out << "time,value\n0,1\n0.5,2\n1.0,0\n";
    }
    const auto rec = load_recorded_csv(path);
    ASSERT_EQ(rec.samples.size(), 3u);
    const SignalSpec s{rec, 0.25, std::nullopt};
    EXPECT_DOUBLE_EQ(measure(s, 0.5), 1.5);
    EXPECT_DOUBLE_EQ(measure(s, 0.0), 1.0);  // pre-history holds the first sample
    std::filesystem::remove(path);
}

TEST(RecordedCsv, MissingFileIsIoError) {
    try {
        load_recorded_csv("/nonexistent/dir/signal.csv");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::io);
    }
}

}  // namespace
}  // namespace tsdiff
