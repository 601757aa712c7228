#include "tsdiff/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>

#include "tsdiff/csv.hpp"
#include "tsdiff/error.hpp"

namespace tsdiff {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::optional<double> truth_if_available(const SignalSpec& signal, double t, unsigned order) {
    if (has_analytic_derivatives(signal)) return truth(signal, t, order);
    if (order != 0) return std::nullopt;
    const auto& samples = std::get<Recorded>(signal.form).samples;
    if (t < samples.front().t || t > samples.back().t) return std::nullopt;
    return samples.sample(t, 0.0);
}

}  // namespace

void IntegratorConfig::validate() const {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw Error(ErrorKind::invalid_input, "dt must be positive");
    if (!(t_end >= dt) || !std::isfinite(t_end)) throw Error(ErrorKind::invalid_input, "t_end must be >= dt");
}

std::size_t IntegratorConfig::steps() const { return static_cast<std::size_t>(std::llround(t_end / dt)); }

StabilityVerdict check_step_stability(double dt, double rate) {
    const double product = dt * std::abs(rate);
    if (product > kStabilityRejectThreshold) return StabilityVerdict::reject;
    if (product >= kStabilityWarnThreshold) return StabilityVerdict::warn;
    return StabilityVerdict::ok;
}

double rk4_amplification(double z) { return 1.0 + z + z * z / 2.0 + z * z * z / 6.0 + z * z * z * z / 24.0; }

bool Trace::has_column(std::string_view name) const {
    return std::find(names.begin(), names.end(), name) != names.end();
}

const std::vector<double>& Trace::column(std::string_view name) const {
    const auto it = std::find(names.begin(), names.end(), name);
    if (it == names.end()) throw Error(ErrorKind::invalid_input, "trace has no column '" + std::string(name) + "'");
    return columns[static_cast<std::size_t>(it - names.begin())];
}

std::string Trace::state_name(std::size_t i, int stage) {
    return "x" + std::to_string(i) + "_" + std::to_string(stage);
}

std::string Trace::truth_name(std::size_t derivative) { return "truth_" + std::to_string(derivative); }

Trace integrate(const DifferentiatorSpec& spec, const SignalSpec& signal, const IntegratorConfig& cfg) {
    spec.validate();
    signal.validate();
    cfg.validate();

    Trace trace;
    trace.order = spec.order();
    trace.method = spec.method;

    const double r_max = spec.r_max();
    switch (check_step_stability(cfg.dt, r_max)) {
        case StabilityVerdict::reject:
            throw Error(ErrorKind::stability, "dt * R_max = " + std::to_string(cfg.dt * r_max) + " exceeds " +
                                                  std::to_string(kStabilityRejectThreshold));
        case StabilityVerdict::warn:
            trace.warnings.push_back("dt * R_max = " + std::to_string(cfg.dt * r_max) +
                                     " is at or above 1; the run may be inaccurate");
            break;
        case StabilityVerdict::ok: break;
    }

    const std::size_t n = spec.order();
    const bool two_step = spec.method == Method::two_step;
    const std::size_t steps = cfg.steps();
    const std::size_t rows = steps + 1;

    trace.names = {"t", "v", "v_delayed", "m"};
    for (std::size_t i = 1; i <= n; ++i) trace.names.push_back(Trace::state_name(i, 1));
    if (two_step)
        for (std::size_t i = 1; i <= n; ++i) trace.names.push_back(Trace::state_name(i, 2));
    for (std::size_t j = 0; j < n; ++j) trace.names.push_back(Trace::truth_name(j));
    trace.columns.assign(trace.names.size(), std::vector<double>(rows));

    std::optional<NoiseStream> noise;
    if (signal.noise) noise.emplace(*signal.noise);
    auto noise_at = [&](std::size_t k) { return noise ? noise->at(k) : 0.0; };

    const auto init = initial_state(spec, measure(signal, 0.0) + noise_at(0));
    std::vector<double> x(init.x1);
    if (two_step) x.insert(x.end(), init.x2.begin(), init.x2.end());

    GainCache gains(spec.k, two_step ? spec.delta_eff() : 0.0);
    double held_noise = 0.0;
    auto rhs = [&](double tau, std::span<const double> state, std::span<double> dx) {
        const GainSet& g = gains.at(spec.eps_at(tau));
        const double innovation = measure(signal, tau) + held_noise - state[0];
        chain_rhs(state.first(n), innovation, g.stage1, dx.first(n));
        if (two_step) chain_rhs(state.subspan(n, n), innovation, g.stage2, dx.subspan(n, n));
    };

    FixedStepper stepper(cfg.method, x.size());
    const std::size_t state_col = 4;
    const std::size_t truth_col = state_col + x.size();
    for (std::size_t k = 0; k < rows; ++k) {
        const double t = static_cast<double>(k) * cfg.dt;
        held_noise = noise_at(k);

        trace.columns[0][k] = t;
        trace.columns[1][k] = truth_if_available(signal, t, 0).value_or(kNaN);
        trace.columns[2][k] = measure(signal, t);
        trace.columns[3][k] = trace.columns[2][k] + held_noise;
        for (std::size_t c = 0; c < x.size(); ++c) trace.columns[state_col + c][k] = x[c];
        for (std::size_t j = 0; j < n; ++j)
            trace.columns[truth_col + j][k] =
                truth_if_available(signal, t, static_cast<unsigned>(j)).value_or(kNaN);

        if (k + 1 == rows) break;
        stepper.step(x, t, cfg.dt, rhs);
        require_finite(x, static_cast<double>(k + 1) * cfg.dt);
    }
    return trace;
}

std::string trace_to_csv(const Trace& trace) {
    csv::Table table{trace.names, trace.columns};
    return csv::to_string(table);
}

void write_trace_csv(const Trace& trace, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorKind::io, "cannot write " + path.string());
    out << trace_to_csv(trace);
    if (!out) throw Error(ErrorKind::io, "write failed for " + path.string());
}

Trace read_trace_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::io, "cannot open " + path.string());
    std::ostringstream text;
    text << in.rdbuf();
    auto table = csv::parse(text.str());

    Trace trace;
    trace.names = std::move(table.header);
    trace.columns = std::move(table.columns);
    while (trace.has_column(Trace::state_name(trace.order + 1, 1))) ++trace.order;
    trace.method = trace.has_column(Trace::state_name(1, 2)) ? Method::two_step : Method::baseline;
    return trace;
}

}  // namespace tsdiff
