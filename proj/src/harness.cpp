#include "tsdiff/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <limits>
#include <mutex>
#include <numeric>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "tsdiff/error.hpp"

namespace tsdiff {

namespace {

using json = nlohmann::json;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorKind::io, "cannot write " + path.string());
    out << text;
    if (!out) throw Error(ErrorKind::io, "write failed for " + path.string());
}

std::string read_text(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::io, "cannot open " + path.string());
    std::ostringstream text;
    text << in.rdbuf();
    return text.str();
}

struct Accumulator {
    double sup = 0.0;
    double sum_sq = 0.0;
    std::size_t count = 0;

    void add(double err) {
        sup = std::max(sup, std::abs(err));
        sum_sq += err * err;
        ++count;
    }
    double rms() const { return count ? std::sqrt(sum_sq / static_cast<double>(count)) : 0.0; }
};

// Runs fn(0..count-1) on up to `workers` threads; rethrows the first failure.
template <class Fn>
void parallel_for(std::size_t count, std::size_t workers, Fn&& fn) {
    workers = std::max<std::size_t>(1, std::min(workers, count));
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (std::size_t idx = next++; idx < count; idx = next++) {
            try {
                fn(idx);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        }
    };
    if (workers == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
    }
    if (failure) std::rethrow_exception(failure);
}

}  // namespace

void Scenario::validate() const {
    if (name.empty()) throw ConfigError("name", "must not be empty");

    const auto& d = differentiator;
    if (!verify_hurwitz(d.k).stable) throw ConfigError("differentiator.k", "characteristic polynomial is not Hurwitz");
    if (!(d.delta >= 0.0) || !std::isfinite(d.delta))
        throw ConfigError("differentiator.delta", "must be non-negative and finite");
    if (!std::isfinite(d.delta_g) || !(d.delta + d.delta_g >= 0.0))
        throw ConfigError("differentiator.delta_g", "delta + delta_g must be non-negative");
    if (const auto* c = std::get_if<ConstantEpsilon>(&d.epsilon)) {
        if (!(c->eps > 0.0) || !std::isfinite(c->eps))
            throw ConfigError("differentiator.epsilon.constant", "must be positive and finite");
    } else {
        try {
            std::get<GainSchedule>(d.epsilon).validate();
        } catch (const Error& e) {
            throw ConfigError("differentiator.epsilon.schedule", e.what());
        }
    }

    try {
        signal.validate();
    } catch (const Error& e) {
        throw ConfigError("signal", e.what());
    }

    if (!(integrator.dt > 0.0) || !std::isfinite(integrator.dt)) throw ConfigError("integrator.dt", "must be positive");
    if (!(integrator.t_end >= integrator.dt) || !std::isfinite(integrator.t_end))
        throw ConfigError("integrator.t_end", "must be at least dt");

    if (!(window.start >= 0.0) || !(window.end <= integrator.t_end) || !(window.start < window.end))
        throw ConfigError("metrics_window", "must satisfy 0 <= start < end <= integrator.t_end");
    if (const auto* s = std::get_if<GainSchedule>(&d.epsilon); s && window.start < s->t_max)
        throw ConfigError("metrics_window", "start must not precede the schedule's t_max");

    for (int f : figures)
        if (f < 1 || f > 10) throw ConfigError("figures", "figure numbers must be in 1..10");
}

std::string_view reference_name(Reference ref) noexcept {
    return ref == Reference::delayed ? "delayed" : "undelayed";
}

const ErrorEntry& ErrorReport::get(std::size_t index, int stage, Reference ref) const {
    for (const auto& e : entries)
        if (e.index == index && e.stage == stage && e.reference == ref) return e;
    throw Error(ErrorKind::invalid_input, "report has no entry for x_" + std::to_string(index) + "," +
                                              std::to_string(stage) + " vs " + std::string(reference_name(ref)));
}

ErrorReport evaluate_errors(const Trace& trace, const SignalSpec& signal, const MetricsWindow& window) {
    ErrorReport report;
    report.window = window;
    if (!has_analytic_derivatives(signal)) return report;

    const auto& t = trace.column("t");
    std::vector<std::size_t> rows;
    for (std::size_t r = 0; r < t.size(); ++r)
        if (t[r] >= window.start && t[r] <= window.end) rows.push_back(r);
    if (rows.empty()) throw Error(ErrorKind::analysis, "metrics window contains no samples");
    report.samples = rows.size();

    const bool two_step = trace.method == Method::two_step;
    for (std::size_t i = 1; i <= trace.order; ++i) {
        const auto& x1 = trace.column(Trace::state_name(i, 1));
        const auto& undelayed = trace.column(Trace::truth_name(i - 1));
        Accumulator vs_delayed, vs_undelayed, stage2;
        const std::vector<double>* x2 = two_step ? &trace.column(Trace::state_name(i, 2)) : nullptr;
        for (auto r : rows) {
            const double delayed = truth(signal, t[r] - signal.delay, static_cast<unsigned>(i - 1));
            vs_delayed.add(x1[r] - delayed);
            vs_undelayed.add(x1[r] - undelayed[r]);
            if (x2) stage2.add((*x2)[r] - undelayed[r]);
        }
        report.entries.push_back({i, 1, Reference::delayed, vs_delayed.sup, vs_delayed.rms()});
        report.entries.push_back({i, 1, Reference::undelayed, vs_undelayed.sup, vs_undelayed.rms()});
        if (x2) report.entries.push_back({i, 2, Reference::undelayed, stage2.sup, stage2.rms()});
    }
    return report;
}

RunResult run(const Scenario& scenario) {
    scenario.validate();
    RunResult result;
    result.trace = integrate(scenario.differentiator, scenario.signal, scenario.integrator);
    result.report = evaluate_errors(result.trace, scenario.signal, scenario.window);
    result.report.scenario = scenario.name;
    return result;
}

LinearFit log_log_fit(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) throw Error(ErrorKind::analysis, "regression needs matched samples");
    const std::size_t n = x.size();
    std::vector<double> lx(n), ly(n);
    for (std::size_t q = 0; q < n; ++q) {
        if (!(x[q] > 0.0) || !(y[q] > 0.0))
            throw Error(ErrorKind::analysis, "log-log regression needs strictly positive data");
        lx[q] = std::log(x[q]);
        ly[q] = std::log(y[q]);
    }
    const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / static_cast<double>(n);
    const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / static_cast<double>(n);
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t q = 0; q < n; ++q) {
        sxx += (lx[q] - mx) * (lx[q] - mx);
        sxy += (lx[q] - mx) * (ly[q] - my);
        syy += (ly[q] - my) * (ly[q] - my);
    }
    if (!(sxx > 0.0)) throw Error(ErrorKind::analysis, "regressor has zero variance");
    LinearFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    fit.r_squared = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
    return fit;
}

std::size_t default_worker_count() {
    if (const char* env = std::getenv("TSDIFF_WORKERS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

SweepResult sweep_delta(const Scenario& base, std::span<const double> deltas, std::size_t workers) {
    if (deltas.size() < 3) throw Error(ErrorKind::invalid_input, "a delta sweep needs at least 3 values");
    for (double d : deltas)
        if (!(d > 0.0 && d < 1.0)) throw Error(ErrorKind::invalid_input, "sweep deltas must lie in (0, 1)");
    if (base.differentiator.method != Method::two_step)
        throw ConfigError("differentiator.method", "delta sweeps need the two-step differentiator");
    if (base.differentiator.order() < 2) throw ConfigError("differentiator.k", "order too small");
    // Degenerate designs are rejected before any integration time is spent.
    if (std::all_of(deltas.begin(), deltas.end(), [&](double d) { return d == deltas.front(); }))
        throw Error(ErrorKind::analysis, "regressor has zero variance");
    base.validate();

    SweepResult result;
    result.deltas.assign(deltas.begin(), deltas.end());
    std::sort(result.deltas.begin(), result.deltas.end());

    const std::size_t n = base.differentiator.order();
    std::vector<ErrorReport> reports(result.deltas.size());
    parallel_for(result.deltas.size(), workers ? workers : default_worker_count(), [&](std::size_t q) {
        Scenario s = base;
        s.signal.delay = result.deltas[q];
        s.differentiator.delta = result.deltas[q];
        s.name = base.name + "@delta=" + csv::format_double(result.deltas[q]);
        reports[q] = run(s).report;
    });

    result.sup_errors.assign(n, std::vector<double>(result.deltas.size()));
    for (std::size_t q = 0; q < reports.size(); ++q)
        for (std::size_t i = 1; i <= n; ++i)
            result.sup_errors[i - 1][q] = reports[q].get(i, 2, Reference::undelayed).sup;
    for (std::size_t i = 1; i < n; ++i)
        result.orders.push_back({i, log_log_fit(result.deltas, result.sup_errors[i - 1])});
    return result;
}

Comparison compare_results(const Scenario& baseline, const RunResult& baseline_run, const Scenario& two_step,
                           const RunResult& two_step_run) {
    if (!(baseline.signal == two_step.signal)) throw ConfigError("signal", "compared scenarios use different signals");
    if (baseline.integrator.t_end != two_step.integrator.t_end)
        throw ConfigError("integrator.t_end", "compared scenarios use different horizons");
    if (!(baseline.window == two_step.window))
        throw ConfigError("metrics_window", "compared scenarios use different windows");
    if (two_step.differentiator.method != Method::two_step)
        throw ConfigError("differentiator.method", "second scenario must use the two-step differentiator");
    if (baseline.differentiator.order() != two_step.differentiator.order())
        throw ConfigError("differentiator.k", "compared scenarios have different orders");

    const auto* sine = std::get_if<Sine>(&baseline.signal.form);
    Comparison cmp;
    for (std::size_t i = 1; i < baseline.differentiator.order(); ++i) {
        ComparisonRow row;
        row.index = i;
        const auto& b = baseline_run.report.get(i, 1, Reference::undelayed);
        const auto& w = two_step_run.report.get(i, 2, Reference::undelayed);
        row.baseline_sup = b.sup;
        row.baseline_rms = b.rms;
        row.two_step_sup = w.sup;
        row.two_step_rms = w.rms;
        row.sup_ratio = w.sup / b.sup;
        row.rms_ratio = w.rms / b.rms;
        row.delayed_tracking_amplitude =
            sine ? std::abs(sine->amplitude) * std::pow(std::abs(sine->frequency), static_cast<double>(i - 1)) * 2.0 *
                       std::abs(std::sin(sine->frequency * baseline.signal.delay / 2.0))
                 : kNaN;
        cmp.rows.push_back(row);
    }
    return cmp;
}

Comparison compare(const Scenario& baseline, const Scenario& two_step) {
    RunResult runs[2];
    const Scenario* scenarios[2] = {&baseline, &two_step};
    parallel_for(2, default_worker_count(), [&](std::size_t q) { runs[q] = run(*scenarios[q]); });
    return compare_results(baseline, runs[0], two_step, runs[1]);
}

csv::Table figure_table(const Trace& trace, int figure) {
    if (figure < 1 || figure > 10) throw Error(ErrorKind::invalid_input, "figure must be in 1..10");
    std::vector<std::string> names{"t"};
    if (figure == 7) {
        names.insert(names.end(), {"v_delayed", "m"});
    } else {
        // Figures 1-3: baseline stage; 4-6 and 8-10: predicting stage.
        const int stage = figure <= 3 ? 1 : 2;
        const std::size_t i = static_cast<std::size_t>(figure <= 3 ? figure : figure <= 6 ? figure - 3 : figure - 7);
        names.push_back(Trace::truth_name(i - 1));
        if (figure == 1) names.push_back("v_delayed");
        names.push_back(Trace::state_name(i, stage));
    }
    csv::Table table;
    for (const auto& name : names) {
        table.header.push_back(name);
        table.columns.push_back(trace.column(name));
    }
    return table;
}

void emit_trace(const Trace& trace, const std::filesystem::path& path) { write_trace_csv(trace, path); }

void emit_figure(const Trace& trace, int figure, const std::filesystem::path& path) {
    emit_table(figure_table(trace, figure), path);
}

void emit_table(const csv::Table& table, const std::filesystem::path& path) { write_text(path, csv::to_string(table)); }

void emit_report(const ErrorReport& report, const std::filesystem::path& path) {
    write_text(path, report_to_json(report));
}

csv::Table read_table(const std::filesystem::path& path) { return csv::parse(read_text(path)); }

std::string report_to_json(const ErrorReport& report) {
    json doc;
    doc["scenario"] = report.scenario;
    doc["window"] = {report.window.start, report.window.end};
    doc["samples"] = report.samples;
    doc["entries"] = json::array();
    for (const auto& e : report.entries)
        doc["entries"].push_back({{"index", e.index},
                                  {"stage", e.stage},
                                  {"reference", reference_name(e.reference)},
                                  {"sup", e.sup},
                                  {"rms", e.rms}});
    return doc.dump(2) + "\n";
}

ErrorReport report_from_json(std::string_view text) {
    try {
        const auto doc = json::parse(text);
        ErrorReport report;
        report.scenario = doc.at("scenario").get<std::string>();
        report.window = {doc.at("window").at(0).get<double>(), doc.at("window").at(1).get<double>()};
        report.samples = doc.at("samples").get<std::size_t>();
        for (const auto& e : doc.at("entries")) {
            const auto ref = e.at("reference").get<std::string>();
            if (ref != "delayed" && ref != "undelayed") throw Error(ErrorKind::invalid_input, "bad reference " + ref);
            report.entries.push_back({e.at("index").get<std::size_t>(), e.at("stage").get<int>(),
                                      ref == "delayed" ? Reference::delayed : Reference::undelayed,
                                      e.at("sup").get<double>(), e.at("rms").get<double>()});
        }
        return report;
    } catch (const json::exception& e) {
        throw Error(ErrorKind::invalid_input, std::string("malformed report: ") + e.what());
    }
}

csv::Table sweep_table(const SweepResult& sweep) {
    csv::Table table;
    table.header.push_back("delta");
    table.columns.push_back(sweep.deltas);
    for (std::size_t i = 1; i <= sweep.sup_errors.size(); ++i) {
        table.header.push_back("sup_error_" + std::to_string(i));
        table.columns.push_back(sweep.sup_errors[i - 1]);
    }
    return table;
}

csv::Table comparison_table(const Comparison& comparison) {
    csv::Table table;
    table.header = {"index",        "baseline_sup", "baseline_rms", "two_step_sup",
                    "two_step_rms", "sup_ratio",    "rms_ratio",    "delayed_tracking_amplitude"};
    table.columns.assign(table.header.size(), {});
    for (const auto& r : comparison.rows) {
        const double values[] = {static_cast<double>(r.index), r.baseline_sup, r.baseline_rms, r.two_step_sup,
                                 r.two_step_rms, r.sup_ratio, r.rms_ratio, r.delayed_tracking_amplitude};
        for (std::size_t c = 0; c < table.columns.size(); ++c) table.columns[c].push_back(values[c]);
    }
    return table;
}

}  // namespace tsdiff
