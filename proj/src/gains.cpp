#include "tsdiff/gains.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "tsdiff/error.hpp"

namespace tsdiff {

namespace {

double factorial(std::size_t m) {
    double f = 1.0;
    for (std::size_t q = 2; q <= m; ++q) f *= static_cast<double>(q);
    return f;
}

void require_positive_eps(double eps) {
    if (!(eps > 0.0) || !std::isfinite(eps))
        throw Error(ErrorKind::invalid_input, "eps must be positive and finite, got " + std::to_string(eps));
}

}  // namespace

GainVector::GainVector(std::vector<double> k) : k_(std::move(k)) {
    if (k_.size() < 2)
        throw Error(ErrorKind::invalid_input,
                    "gain vector needs order n >= 2, got " + std::to_string(k_.size()));
    for (std::size_t i = 0; i < k_.size(); ++i)
        if (!std::isfinite(k_[i]))
            throw Error(ErrorKind::invalid_input, "gain k_" + std::to_string(i + 1) + " is not finite");
}

HurwitzReport verify_hurwitz(const GainVector& k, double tolerance) {
    const auto n = static_cast<Eigen::Index>(k.order());
    // Companion matrix of s^n + k_1 s^{n-1} + ... + k_n.
    Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index r = 0; r + 1 < n; ++r) companion(r, r + 1) = 1.0;
    for (Eigen::Index c = 0; c < n; ++c)
        companion(n - 1, c) = -k(static_cast<std::size_t>(n - c));

    Eigen::EigenSolver<Eigen::MatrixXd> solver(companion, false);
    if (solver.info() != Eigen::Success)
        throw Error(ErrorKind::analysis, "companion eigenvalue solve did not converge");

    HurwitzReport report;
    report.roots.reserve(static_cast<std::size_t>(n));
    for (Eigen::Index r = 0; r < n; ++r) report.roots.push_back(solver.eigenvalues()(r));
    std::sort(report.roots.begin(), report.roots.end(), [](const auto& a, const auto& b) {
        return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
    });
    report.stable = std::all_of(report.roots.begin(), report.roots.end(),
                                [&](const auto& root) { return root.real() < -tolerance; });
    return report;
}

std::vector<double> injection_gains(const GainVector& k, double eps) {
    require_positive_eps(eps);
    const std::size_t n = k.order();
    std::vector<double> gains(n);
    for (std::size_t i = 1; i <= n; ++i) {
        gains[i - 1] = k(i) / std::pow(eps, static_cast<double>(i));
        if (!std::isfinite(gains[i - 1]))
            throw RangeError(i, "injection gain " + std::to_string(i) + " overflows");
    }
    return gains;
}

std::vector<double> second_step_gains(const GainVector& k, double eps, double delta_eff) {
    require_positive_eps(eps);
    if (!(delta_eff >= 0.0) || !std::isfinite(delta_eff))
        throw Error(ErrorKind::invalid_input, "delta_eff must be non-negative and finite");

    const std::size_t n = k.order();
    std::vector<double> gains(n);
    for (std::size_t i = 1; i <= n; ++i) {
        double sum = 0.0;
        for (std::size_t j = i; j <= n; ++j) {
            const double lag = static_cast<double>(j - i);
            const double term = std::pow(delta_eff, lag) * k(j) /
                                (factorial(j - i) * std::pow(eps, static_cast<double>(j)));
            if (!std::isfinite(term))
                throw RangeError(i, "second-step gain " + std::to_string(i) + " overflows at term j=" +
                                        std::to_string(j));
            sum = (j == i) ? term : sum + term;
        }
        if (!std::isfinite(sum))
            throw RangeError(i, "second-step gain " + std::to_string(i) + " overflows");
        gains[i - 1] = sum;
    }
    return gains;
}

void GainSchedule::validate() const {
    if (!(r0 > 0.0) || !std::isfinite(r0)) throw Error(ErrorKind::invalid_input, "schedule R0 must be positive");
    if (!(p >= 1.0) || !std::isfinite(p)) throw Error(ErrorKind::invalid_input, "schedule p must be >= 1");
    if (!(t_max > 0.0) || !std::isfinite(t_max))
        throw Error(ErrorKind::invalid_input, "schedule t_max must be positive");
    if (!(r_min > 0.0) || !std::isfinite(r_min))
        throw Error(ErrorKind::invalid_input, "schedule R_min must be positive");
}

double GainSchedule::r_max() const { return std::max(r_min, r0 * std::pow(t_max, p)); }

double eval_schedule(const GainSchedule& sched, double t) {
    if (!(t >= 0.0)) throw Error(ErrorKind::invalid_input, "schedule time must be non-negative");
    if (t > sched.t_max) return sched.r_max();
    return std::max(sched.r_min, sched.r0 * std::pow(t, sched.p));
}

GainCache::GainCache(GainVector k, double delta_eff) : k_(std::move(k)), delta_eff_(delta_eff) {}

const GainSet& GainCache::at(double eps) {
    if (!valid_ || eps != current_.eps) {
        current_.eps = eps;
        current_.stage1 = injection_gains(k_, eps);
        current_.stage2 = second_step_gains(k_, eps, delta_eff_);
        valid_ = true;
        ++recomputations_;
    }
    return current_;
}

}  // namespace tsdiff
