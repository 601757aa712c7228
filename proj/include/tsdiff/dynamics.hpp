#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <variant>
#include <vector>

#include "tsdiff/gains.hpp"

namespace tsdiff {

struct ConstantEpsilon {
    double eps = 0.01;

    friend bool operator==(const ConstantEpsilon&, const ConstantEpsilon&) = default;
};

using EpsilonPolicy = std::variant<ConstantEpsilon, GainSchedule>;

/// Which observer a run integrates: the plain high-gain chain, or the
/// two-stage cascade whose second stage predicts the undelayed derivatives.
enum class Method { baseline, two_step };

/// Initial observer state. `measurement` seeds x_{1,1} and x_{1,2} with m(0).
enum class InitPolicy { zero, measurement };

struct DifferentiatorSpec {
    GainVector k{{4.0, 6.0, 4.0, 1.0}};
    double delta = 0.0;    ///< known measurement delay [s]
    double delta_g = 0.0;  ///< extra lag of the integrator chain, user supplied [s]
    EpsilonPolicy epsilon = ConstantEpsilon{};
    Method method = Method::two_step;
    InitPolicy init = InitPolicy::zero;

    std::size_t order() const noexcept { return k.order(); }
    double delta_eff() const noexcept { return delta + delta_g; }

    /// eps = 1/R(t) under a schedule, or the constant.
    double eps_at(double t) const;

    /// Largest R = 1/eps the run will see.
    double r_max() const;

    /// Throws invalid-input (non-Hurwitz k, bad delays, bad eps).
    void validate() const;

    friend bool operator==(const DifferentiatorSpec&, const DifferentiatorSpec&) = default;
};

struct ObserverState {
    std::vector<double> x1;  ///< first stage x_{i,1}
    std::vector<double> x2;  ///< second stage x_{i,2}

    friend bool operator==(const ObserverState&, const ObserverState&) = default;
};

/// dx_i = x_{i+1} + gains_i * innovation, dx_n = gains_n * innovation.
/// The shared kernel of every observer stage.
void chain_rhs(std::span<const double> x, double innovation, std::span<const double> gains,
               std::span<double> dx);

/// High-gain differentiator driven by measurement m. `t` only labels errors.
std::vector<double> baseline_rhs(std::span<const double> x, double m, const GainVector& k, double eps,
                                 double t = std::numeric_limits<double>::quiet_NaN());

/// Both stages, sharing the first stage's innovation m - x_{1,1}.
ObserverState two_step_rhs(const ObserverState& state, double m, const DifferentiatorSpec& spec, double eps,
                           double t = std::numeric_limits<double>::quiet_NaN());

ObserverState initial_state(const DifferentiatorSpec& spec, double m0);

/// Throws DivergenceError(t) on the first non-finite entry.
void require_finite(std::span<const double> x, double t);

}  // namespace tsdiff
