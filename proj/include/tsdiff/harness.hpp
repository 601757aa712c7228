#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tsdiff/csv.hpp"
#include "tsdiff/dynamics.hpp"
#include "tsdiff/integrator.hpp"
#include "tsdiff/signals.hpp"

namespace tsdiff {

struct MetricsWindow {
    double start = 10.0;
    double end = 20.0;

    friend bool operator==(const MetricsWindow&, const MetricsWindow&) = default;
};

struct Scenario {
    std::string name;
    std::string description;
    DifferentiatorSpec differentiator;
    SignalSpec signal;
    IntegratorConfig integrator;
    MetricsWindow window;
    std::vector<int> figures;  ///< figure tables `run` should extract, 1..10

    /// Throws ConfigError naming the offending field.
    void validate() const;
};

enum class Reference { delayed, undelayed };

std::string_view reference_name(Reference ref) noexcept;

struct ErrorEntry {
    std::size_t index = 0;  ///< i: compares x_{i,stage} with v^{(i-1)}
    int stage = 1;
    Reference reference = Reference::undelayed;
    double sup = 0.0;
    double rms = 0.0;

    friend bool operator==(const ErrorEntry&, const ErrorEntry&) = default;
};

struct ErrorReport {
    std::string scenario;
    MetricsWindow window;
    std::size_t samples = 0;
    std::vector<ErrorEntry> entries;

    /// Throws invalid-input when absent.
    const ErrorEntry& get(std::size_t index, int stage, Reference ref) const;

    friend bool operator==(const ErrorReport&, const ErrorReport&) = default;
};

/// Sup and rms errors over grid samples with window.start <= t <= window.end.
/// Stage one is scored against both the delayed and undelayed derivatives,
/// stage two against the undelayed ones. Empty when truth is unavailable.
ErrorReport evaluate_errors(const Trace& trace, const SignalSpec& signal, const MetricsWindow& window);

struct RunResult {
    Trace trace;
    ErrorReport report;
};

RunResult run(const Scenario& scenario);

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
};

/// Least squares of log(y) on log(x). Throws analysis on zero regressor
/// variance, non-positive data or mismatched lengths.
LinearFit log_log_fit(std::span<const double> x, std::span<const double> y);

struct OrderEstimate {
    std::size_t index = 0;
    LinearFit fit;
};

struct SweepResult {
    std::vector<double> deltas;                  ///< ascending
    std::vector<std::vector<double>> sup_errors;  ///< [i-1][delta], stage-two vs undelayed
    std::vector<OrderEstimate> orders;           ///< i = 1..n-1
};

/// Worker count for sweeps: TSDIFF_WORKERS if set and positive, otherwise
/// the hardware concurrency (at least 1).
std::size_t default_worker_count();

/**
 * Runs `base` once per delay (setting both the measurement delay and the
 * differentiator's delta) and fits the empirical order of the stage-two
 * sup error in delta for each output i = 1..n-1.
 */
SweepResult sweep_delta(const Scenario& base, std::span<const double> deltas, std::size_t workers = 0);

struct ComparisonRow {
    std::size_t index = 0;
    double baseline_sup = 0.0;
    double baseline_rms = 0.0;
    double two_step_sup = 0.0;
    double two_step_rms = 0.0;
    double sup_ratio = 0.0;  ///< two_step_sup / baseline_sup
    double rms_ratio = 0.0;
    /// Peak of |v^{(i-1)}(t) - v^{(i-1)}(t - delay)| for a single sine; NaN otherwise.
    double delayed_tracking_amplitude = 0.0;
};

struct Comparison {
    std::vector<ComparisonRow> rows;  ///< i = 1..n-1
};

/// Both runs must share signal, horizon and window.
Comparison compare(const Scenario& baseline, const Scenario& two_step);
Comparison compare_results(const Scenario& baseline, const RunResult& baseline_run, const Scenario& two_step,
                           const RunResult& two_step_run);

/// Column subset reproducing figure 1..10 from a trace.
csv::Table figure_table(const Trace& trace, int figure);

enum class EmitFormat { trace_csv, figure_csv, report_json };

void emit_trace(const Trace& trace, const std::filesystem::path& path);
void emit_figure(const Trace& trace, int figure, const std::filesystem::path& path);
void emit_report(const ErrorReport& report, const std::filesystem::path& path);
void emit_table(const csv::Table& table, const std::filesystem::path& path);

std::string report_to_json(const ErrorReport& report);
ErrorReport report_from_json(std::string_view text);
csv::Table read_table(const std::filesystem::path& path);

csv::Table sweep_table(const SweepResult& sweep);
csv::Table comparison_table(const Comparison& comparison);

/// Scenario documents (JSON, schema_version 1).
Scenario load_scenario(const std::filesystem::path& path);
Scenario parse_scenario(std::string_view json_text, const std::filesystem::path& base_dir = {});
std::string scenario_to_json(const Scenario& scenario);

inline constexpr int kScenarioSchemaVersion = 1;

}  // namespace tsdiff
