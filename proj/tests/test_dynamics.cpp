#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "tsdiff/dynamics.hpp"
#include "tsdiff/error.hpp"
#include "tsdiff/integrator.hpp"

namespace tsdiff {
namespace {

DifferentiatorSpec unit_spec(double delta, double eps = 1.0) {
    DifferentiatorSpec spec;
    spec.k = GainVector({4, 6, 4, 1});
    spec.delta = delta;
    spec.epsilon = ConstantEpsilon{eps};
    return spec;
}

TEST(BaselineRhs, EquilibriumWhenStateMatchesConstantMeasurement) {
    const GainVector k({4, 6, 4, 1});
    const std::vector<double> x{2.5, 0, 0, 0};
    EXPECT_EQ(baseline_rhs(x, 2.5, k, 0.01), (std::vector<double>{0, 0, 0, 0}));
}

TEST(BaselineRhs, SecondOrderHandExample) {
    const GainVector k({2, 1});
    EXPECT_EQ(baseline_rhs(std::vector<double>{0, 0}, 1.0, k, 1.0), (std::vector<double>{2, 1}));
    // Chain term plus injection scaled by eps^-i.
    EXPECT_EQ(baseline_rhs(std::vector<double>{0, 3}, 1.0, k, 0.5), (std::vector<double>{3 + 4, 4}));
}

TEST(BaselineRhs, LinearInStateAndMeasurement) {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    const GainVector k({4, 6, 4, 1});
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<double> xa(4), xb(4), xs(4);
        for (std::size_t i = 0; i < 4; ++i) {
            xa[i] = u(rng);
            xb[i] = u(rng);
            xs[i] = xa[i] + xb[i];
        }
        const double ma = u(rng), mb = u(rng);
        const auto a = baseline_rhs(xa, ma, k, 0.3);
        const auto b = baseline_rhs(xb, mb, k, 0.3);
        const auto s = baseline_rhs(xs, ma + mb, k, 0.3);
        for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(s[i], a[i] + b[i], 1e-12 * (1 + std::abs(s[i])));
    }
}

TEST(BaselineRhs, NonFiniteStateIsDivergenceAndNonFiniteMeasurementIsInvalid) {
    const GainVector k({2, 1});
    EXPECT_THROW(baseline_rhs(std::vector<double>{std::numeric_limits<double>::infinity(), 0}, 0.0, k, 1.0, 3.0),
                 DivergenceError);
    try {
        baseline_rhs(std::vector<double>{0, 0}, std::numeric_limits<double>::quiet_NaN(), k, 1.0, 3.0);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::invalid_input);
    }
}

TEST(TwoStepRhs, SecondStageUsesPredictionGains) {
    const auto spec = unit_spec(0.5);
    const auto state = initial_state(spec, 0.0);
    const auto d = two_step_rhs(state, 1.0, spec, 1.0);
    EXPECT_EQ(d.x1, (std::vector<double>{4, 6, 4, 1}));
    ASSERT_EQ(d.x2.size(), 4u);
    EXPECT_NEAR(d.x2[0], 7.520833333333333, 1e-14);
    EXPECT_NEAR(d.x2[1], 8.125, 1e-14);
    EXPECT_NEAR(d.x2[2], 4.5, 1e-14);
    EXPECT_EQ(d.x2[3], 1.0);
}

TEST(TwoStepRhs, FirstStageIsTheBaselineObserver) {
    std::mt19937_64 rng(19);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    auto spec = unit_spec(0.4, 0.05);
    for (int trial = 0; trial < 100; ++trial) {
        ObserverState s{{u(rng), u(rng), u(rng), u(rng)}, {u(rng), u(rng), u(rng), u(rng)}};
        const double m = u(rng);
        EXPECT_EQ(two_step_rhs(s, m, spec, 0.05).x1, baseline_rhs(s.x1, m, spec.k, 0.05));
    }
}

TEST(TwoStepRhs, ZeroInnovationLeavesPureIntegratorChains) {
    const auto spec = unit_spec(0.5, 0.01);
    const ObserverState s{{0.7, 1, 2, 3}, {-1, 4, 5, 6}};
    const auto d = two_step_rhs(s, 0.7, spec, 0.01);
    EXPECT_EQ(d.x1, (std::vector<double>{1, 2, 3, 0}));
    EXPECT_EQ(d.x2, (std::vector<double>{4, 5, 6, 0}));
}

TEST(TwoStepRhs, DelayGainAddsToEffectiveDelay) {
    auto a = unit_spec(0.3);
    a.delta_g = 0.2;
    const auto b = unit_spec(0.5);
    const auto s = initial_state(a, 0.0);
    const auto da = two_step_rhs(s, 1.0, a, 1.0), db = two_step_rhs(s, 1.0, b, 1.0);
    for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(da.x2[i], db.x2[i], 1e-14);
}

TEST(InitialState, Policies) {
    auto spec = unit_spec(0.5);
    const double m0 = std::sin(-0.5);
    EXPECT_NEAR(m0, -0.479426, 1e-6);

    const auto zero = initial_state(spec, m0);
    EXPECT_EQ(zero.x1, (std::vector<double>(4, 0.0)));
    EXPECT_EQ(zero.x2, (std::vector<double>(4, 0.0)));

    spec.init = InitPolicy::measurement;
    const auto seeded = initial_state(spec, m0);
    EXPECT_EQ(seeded.x1, (std::vector<double>{m0, 0, 0, 0}));
    EXPECT_EQ(seeded.x2, (std::vector<double>{m0, 0, 0, 0}));
}

TEST(Spec, ValidateRejectsBadConfigurations) {
    auto spec = unit_spec(0.5, 0.01);
    EXPECT_NO_THROW(spec.validate());
    spec.k = GainVector({0, 1});
    EXPECT_THROW(spec.validate(), Error);
    spec = unit_spec(-0.1, 0.01);
    EXPECT_THROW(spec.validate(), Error);
    spec = unit_spec(0.5, 0.0);
    EXPECT_THROW(spec.validate(), Error);
}

TEST(Spec, EpsilonPolicies) {
    auto spec = unit_spec(0.5, 0.02);
    EXPECT_EQ(spec.eps_at(3.0), 0.02);
    EXPECT_EQ(spec.r_max(), 50.0);
    spec.epsilon = GainSchedule{100.0, 7.0, 1.0, 1e-3};
    EXPECT_DOUBLE_EQ(spec.eps_at(2.0), 0.01);
    EXPECT_DOUBLE_EQ(spec.eps_at(0.0), 1000.0);
    EXPECT_DOUBLE_EQ(spec.r_max(), 100.0);
}

TEST(RequireFinite, ReportsTime) {
    try {
        require_finite(std::vector<double>{1.0, std::numeric_limits<double>::quiet_NaN()}, 2.5);
        FAIL();
    } catch (const DivergenceError& e) {
        EXPECT_EQ(e.time(), 2.5);
    }
    EXPECT_NO_THROW(require_finite(std::vector<double>{1.0, -1e300}, 0.0));
}

// The second stage is the Taylor extrapolation of the first, x_{i,2} =
// sum_l delta^l / l! x_{i+l,1}, for any input once both start consistent.
// The residual obeys a pure shift dynamics, so RK4 preserves it to rounding.
TEST(Trajectory, SecondStageIsTaylorExtrapolationOfFirst) {
    struct Case {
        EpsilonPolicy eps;
        InitPolicy init;
        double delta;
    };
    const std::vector<Case> cases{
        {ConstantEpsilon{0.05}, InitPolicy::zero, 0.5},
        {ConstantEpsilon{0.02}, InitPolicy::measurement, 0.3},
        {GainSchedule{50.0, 3.0, 1.0, 1e-3}, InitPolicy::zero, 0.2},
    };
    for (const auto& c : cases) {
        DifferentiatorSpec spec;
        spec.epsilon = c.eps;
        spec.init = c.init;
        spec.delta = c.delta;
        const SignalSpec signal{SumOfSines{{{1.0, 1.0, 0.3}, {0.2, 3.0, 0.0}}}, c.delta, NoiseSpec{}};
        const auto trace = integrate(spec, signal, IntegratorConfig{1e-3, 5.0, StepMethod::rk4});
        const std::size_t n = spec.order();
        for (std::size_t row = 0; row < trace.rows(); row += 97) {
            for (std::size_t i = 1; i <= n; ++i) {
                double predicted = 0.0, scale = 1.0;
                for (std::size_t l = 0; i + l <= n; ++l)
                    predicted += std::pow(c.delta, static_cast<double>(l)) / oracle::factorial(l) *
                                 trace.column(Trace::state_name(i + l, 1))[row];
                for (std::size_t j = 1; j <= n; ++j)
                    scale = std::max(scale, std::abs(trace.column(Trace::state_name(j, 1))[row]));
                EXPECT_NEAR(trace.column(Trace::state_name(i, 2))[row], predicted, 1e-10 * scale)
                    << "row " << row << " i " << i;
            }
        }
    }
}

}  // namespace
}  // namespace tsdiff
