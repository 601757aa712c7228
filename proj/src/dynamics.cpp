#include "tsdiff/dynamics.hpp"

#include <cmath>
#include <string>

#include "tsdiff/error.hpp"

namespace tsdiff {

double DifferentiatorSpec::eps_at(double t) const {
    if (const auto* c = std::get_if<ConstantEpsilon>(&epsilon)) return c->eps;
    return 1.0 / eval_schedule(std::get<GainSchedule>(epsilon), t);
}

double DifferentiatorSpec::r_max() const {
    if (const auto* c = std::get_if<ConstantEpsilon>(&epsilon)) return 1.0 / c->eps;
    return std::get<GainSchedule>(epsilon).r_max();
}

void DifferentiatorSpec::validate() const {
    if (!verify_hurwitz(k).stable)
        throw Error(ErrorKind::invalid_input, "gain polynomial is not Hurwitz");
    if (!(delta >= 0.0) || !std::isfinite(delta))
        throw Error(ErrorKind::invalid_input, "delta must be non-negative and finite");
    if (!std::isfinite(delta_g) || !(delta + delta_g >= 0.0))
        throw Error(ErrorKind::invalid_input, "delta + delta_g must be non-negative");
    if (const auto* c = std::get_if<ConstantEpsilon>(&epsilon)) {
        if (!(c->eps > 0.0) || !std::isfinite(c->eps))
            throw Error(ErrorKind::invalid_input, "eps must be positive and finite");
    } else {
        std::get<GainSchedule>(epsilon).validate();
    }
}

void require_finite(std::span<const double> x, double t) {
    for (std::size_t i = 0; i < x.size(); ++i)
        if (!std::isfinite(x[i]))
            throw DivergenceError(t, "observer state entry " + std::to_string(i + 1) +
                                         " is not finite at t=" + std::to_string(t));
}

void chain_rhs(std::span<const double> x, double innovation, std::span<const double> gains,
               std::span<double> dx) {
    const std::size_t n = x.size();
    for (std::size_t i = 0; i + 1 < n; ++i) dx[i] = x[i + 1] + gains[i] * innovation;
    dx[n - 1] = gains[n - 1] * innovation;
}

std::vector<double> baseline_rhs(std::span<const double> x, double m, const GainVector& k, double eps,
                                 double t) {
    if (x.size() != k.order())
        throw Error(ErrorKind::invalid_input, "state length does not match gain order");
    require_finite(x, t);
    if (!std::isfinite(m)) throw Error(ErrorKind::invalid_input, "measurement is not finite");
    const auto gains = injection_gains(k, eps);
    std::vector<double> dx(x.size());
    chain_rhs(x, m - x[0], gains, dx);
    return dx;
}

ObserverState two_step_rhs(const ObserverState& state, double m, const DifferentiatorSpec& spec, double eps,
                           double t) {
    const std::size_t n = spec.order();
    if (state.x1.size() != n || state.x2.size() != n)
        throw Error(ErrorKind::invalid_input, "state length does not match gain order");
    require_finite(state.x1, t);
    require_finite(state.x2, t);
    if (!std::isfinite(m)) throw Error(ErrorKind::invalid_input, "measurement is not finite");

    const auto g1 = injection_gains(spec.k, eps);
    const auto g2 = second_step_gains(spec.k, eps, spec.delta_eff());
    const double innovation = m - state.x1[0];

    ObserverState d{std::vector<double>(n), std::vector<double>(n)};
    chain_rhs(state.x1, innovation, g1, d.x1);
    chain_rhs(state.x2, innovation, g2, d.x2);
    return d;
}

ObserverState initial_state(const DifferentiatorSpec& spec, double m0) {
    const std::size_t n = spec.order();
    ObserverState s{std::vector<double>(n, 0.0), std::vector<double>(n, 0.0)};
    if (spec.init == InitPolicy::measurement) {
        s.x1[0] = m0;
        s.x2[0] = m0;
    }
    return s;
}

}  // namespace tsdiff
