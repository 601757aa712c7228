#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tsdiff/dynamics.hpp"
#include "tsdiff/signals.hpp"

namespace tsdiff {

enum class StepMethod { rk4, euler };

struct IntegratorConfig {
    double dt = 1e-4;
    double t_end = 20.0;
    StepMethod method = StepMethod::rk4;

    void validate() const;

    /// round(t_end / dt); sample k sits at exactly k * dt.
    std::size_t steps() const;

    friend bool operator==(const IntegratorConfig&, const IntegratorConfig&) = default;
};

/// dt * rate below 1 is fine, up to 2.5 is warned about, beyond is refused.
enum class StabilityVerdict { ok, warn, reject };

inline constexpr double kStabilityWarnThreshold = 1.0;
inline constexpr double kStabilityRejectThreshold = 2.5;

StabilityVerdict check_step_stability(double dt, double rate);

/// RK4 amplification factor 1 + z + z^2/2 + z^3/6 + z^4/24 for dx/dt = lambda x, z = lambda dt.
double rk4_amplification(double z);

/**
 * Explicit fixed-step stepper with reusable stage buffers.
 *
 * The right-hand side is called as rhs(t, x, dx) at t, t + dt/2 (twice) and
 * t + dt for RK4, or once at t for Euler.
 */
class FixedStepper {
public:
    FixedStepper(StepMethod method, std::size_t dim)
        : method_(method), k1_(dim), k2_(dim), k3_(dim), k4_(dim), work_(dim) {}

    template <class Rhs>
    void step(std::span<double> x, double t, double dt, Rhs&& rhs) {
        const std::size_t n = x.size();
        rhs(t, std::span<const double>(x), std::span<double>(k1_));
        if (method_ == StepMethod::euler) {
            for (std::size_t i = 0; i < n; ++i) x[i] += dt * k1_[i];
            return;
        }
        const double half = 0.5 * dt;
        for (std::size_t i = 0; i < n; ++i) work_[i] = x[i] + half * k1_[i];
        rhs(t + half, std::span<const double>(work_), std::span<double>(k2_));
        for (std::size_t i = 0; i < n; ++i) work_[i] = x[i] + half * k2_[i];
        rhs(t + half, std::span<const double>(work_), std::span<double>(k3_));
        for (std::size_t i = 0; i < n; ++i) work_[i] = x[i] + dt * k3_[i];
        rhs(t + dt, std::span<const double>(work_), std::span<double>(k4_));
        const double sixth = dt / 6.0;
        for (std::size_t i = 0; i < n; ++i) x[i] += sixth * (k1_[i] + 2.0 * k2_[i] + 2.0 * k3_[i] + k4_[i]);
    }

private:
    StepMethod method_;
    std::vector<double> k1_, k2_, k3_, k4_, work_;
};

/// One-off step that allocates its own buffers.
template <class Rhs>
void step_once(std::span<double> x, double t, double dt, Rhs&& rhs, StepMethod method = StepMethod::rk4) {
    FixedStepper stepper(method, x.size());
    stepper.step(x, t, dt, std::forward<Rhs>(rhs));
}

/**
 * Time-indexed record of a run, stored column-major.
 *
 * Columns: t, v, v_delayed, m, x{i}_1 (i = 1..n), x{i}_2 (two-step only),
 * truth_{j} = v^{(j)}(t) for j = 0..n-1. Truth columns hold NaN when the
 * signal has no analytic derivatives.
 */
struct Trace {
    std::size_t order = 0;
    Method method = Method::two_step;
    std::vector<std::string> names;
    std::vector<std::vector<double>> columns;
    std::vector<std::string> warnings;

    std::size_t rows() const noexcept { return columns.empty() ? 0 : columns.front().size(); }
    bool has_column(std::string_view name) const;
    const std::vector<double>& column(std::string_view name) const;

    static std::string state_name(std::size_t i, int stage);
    static std::string truth_name(std::size_t derivative);
};

/// Integrates the observer selected by spec.method against `signal`.
Trace integrate(const DifferentiatorSpec& spec, const SignalSpec& signal, const IntegratorConfig& cfg);

std::string trace_to_csv(const Trace& trace);

/// Header + 17-significant-digit rows. Throws io on unwritable path.
void write_trace_csv(const Trace& trace, const std::filesystem::path& path);

/// Reads back names and columns; order/method are inferred from the header.
Trace read_trace_csv(const std::filesystem::path& path);

}  // namespace tsdiff
