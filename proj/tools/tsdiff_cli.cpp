// Command-line front end: scenario runs, delay sweeps, Bode grids and gain checks.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "tsdiff/error.hpp"
#include "tsdiff/frequency.hpp"
#include "tsdiff/gains.hpp"
#include "tsdiff/harness.hpp"

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

/// One JSON object per line on stderr so callers can parse failures.
int fail(std::string_view kind, const std::string& message, const std::string& field = {}) {
    json line{{"error", kind}, {"message", message}};
    if (!field.empty()) line["field"] = field;
    std::cerr << line.dump() << '\n';
    return 1;
}

std::vector<double> parse_list(const std::string& text) {
    std::vector<double> out;
    for (auto field : tsdiff::csv::split_fields(text)) out.push_back(tsdiff::csv::parse_double(field));
    return out;
}

void print_report(const tsdiff::ErrorReport& report) {
    std::printf("%-10s %-6s %-10s %-14s %-14s\n", "output", "stage", "reference", "sup", "rms");
    for (const auto& e : report.entries)
        std::printf("x_%-8zu %-6d %-10s %-14.6e %-14.6e\n", e.index, e.stage,
                    std::string(tsdiff::reference_name(e.reference)).c_str(), e.sup, e.rms);
}

int cmd_run(const std::string& scenario_path, const std::string& out_dir, bool write_trace) {
    const auto scenario = tsdiff::load_scenario(scenario_path);
    const auto result = tsdiff::run(scenario);
    for (const auto& w : result.trace.warnings) std::cerr << "warning: " << w << '\n';

    std::printf("scenario %s: %zu rows, window [%g, %g] (%zu samples)\n", scenario.name.c_str(), result.trace.rows(),
                scenario.window.start, scenario.window.end, result.report.samples);
    print_report(result.report);

    if (!out_dir.empty()) {
        const fs::path dir(out_dir);
        std::error_code ec;
        fs::create_directories(dir, ec);
        if (ec) throw tsdiff::Error(tsdiff::ErrorKind::io, "cannot create " + dir.string() + ": " + ec.message());
        if (write_trace) tsdiff::emit_trace(result.trace, dir / (scenario.name + ".trace.csv"));
        tsdiff::emit_report(result.report, dir / (scenario.name + ".report.json"));
        for (int f : scenario.figures)
            tsdiff::emit_figure(result.trace, f, dir / (scenario.name + ".fig" + std::to_string(f) + ".csv"));
        std::printf("wrote outputs to %s\n", dir.string().c_str());
    }
    return 0;
}

int cmd_sweep(const std::string& base_path, const std::string& deltas_text, const std::string& out, std::size_t workers) {
    const auto base = tsdiff::load_scenario(base_path);
    const auto deltas = parse_list(deltas_text);
    const auto sweep = tsdiff::sweep_delta(base, deltas, workers);

    std::printf("%-10s", "delta");
    for (std::size_t i = 1; i <= sweep.sup_errors.size(); ++i) std::printf(" sup_x%zu_2      ", i);
    std::printf("\n");
    for (std::size_t q = 0; q < sweep.deltas.size(); ++q) {
        std::printf("%-10g", sweep.deltas[q]);
        for (const auto& errs : sweep.sup_errors) std::printf(" %-14.6e", errs[q]);
        std::printf("\n");
    }
    const std::size_t n = base.differentiator.order();
    for (const auto& o : sweep.orders)
        std::printf("order x_%zu,2: slope %.4f (expected %zu), R^2 %.5f\n", o.index, o.fit.slope, n - o.index + 1,
                    o.fit.r_squared);
    if (!out.empty()) tsdiff::emit_table(tsdiff::sweep_table(sweep), out);
    return 0;
}

int cmd_bode(const std::string& spec_path, const std::string& outputs_text, double w_min, double w_max,
             std::size_t points, const std::string& out) {
    const auto scenario = tsdiff::load_scenario(spec_path);
    std::vector<std::size_t> outputs;
    for (double v : parse_list(outputs_text)) {
        if (v < 1 || v != static_cast<double>(static_cast<std::size_t>(v)))
            throw tsdiff::Error(tsdiff::ErrorKind::invalid_input, "outputs must be positive integers");
        outputs.push_back(static_cast<std::size_t>(v));
    }
    const auto table = tsdiff::bode_grid(scenario.differentiator, outputs, w_min, w_max, points);
    if (out.empty()) std::cout << tsdiff::csv::to_string(table);
    else tsdiff::emit_table(table, out);
    return 0;
}

int cmd_check_gains(const std::string& k_text) {
    const tsdiff::GainVector k(parse_list(k_text));
    const auto report = tsdiff::verify_hurwitz(k);
    std::printf("hurwitz: %s\n", report.stable ? "yes" : "no");
    for (const auto& r : report.roots) std::printf("root: %.12g %+.12gj\n", r.real(), r.imag());
    if (!report.stable) return fail("not-hurwitz", "characteristic polynomial has a root with Re >= -1e-9");
    return 0;
}

int cmd_compare(const std::string& baseline_path, const std::string& two_step_path, const std::string& out) {
    const auto baseline = tsdiff::load_scenario(baseline_path);
    const auto two_step = tsdiff::load_scenario(two_step_path);
    const auto cmp = tsdiff::compare(baseline, two_step);
    std::printf("%-8s %-14s %-14s %-12s %-14s\n", "output", "baseline_sup", "two_step_sup", "sup_ratio",
                "anchor");
    for (const auto& r : cmp.rows)
        std::printf("x_%-6zu %-14.6e %-14.6e %-12.4e %-14.6e\n", r.index, r.baseline_sup, r.two_step_sup, r.sup_ratio,
                    r.delayed_tracking_amplitude);
    if (!out.empty()) tsdiff::emit_table(tsdiff::comparison_table(cmp), out);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Delay-compensating high-gain differentiator toolkit"};
    app.require_subcommand(1);

    std::string scenario_path, out_dir;
    bool no_trace = false;
    auto* run = app.add_subcommand("run", "Integrate a scenario and report errors");
    run->add_option("scenario", scenario_path, "Scenario JSON")->required();
    run->add_option("--out", out_dir, "Directory for trace, report and figure CSVs");
    run->add_flag("--no-trace", no_trace, "Skip the full trace CSV");

    std::string base_path, deltas_text = "0.05,0.1,0.2,0.4", sweep_out;
    std::size_t workers = 0;
    auto* sweep = app.add_subcommand("sweep", "Empirical order in delta of the predicting stage");
    sweep->add_option("--base", base_path, "Base scenario JSON")->required();
    sweep->add_option("--deltas", deltas_text, "Comma-separated delays in (0, 1)");
    sweep->add_option("--out", sweep_out, "CSV of sup errors per delta");
    sweep->add_option("--workers", workers, "Parallel runs (default: TSDIFF_WORKERS or core count)");

    std::string spec_path, outputs_text = "1,2,3", bode_out;
    double w_min = 0.01, w_max = 1000.0;
    std::size_t points = 200;
    auto* bode = app.add_subcommand("bode", "Frequency response of the predicting stage");
    bode->add_option("--spec", spec_path, "Scenario JSON")->required();
    bode->add_option("--outputs", outputs_text, "Comma-separated output indices");
    bode->add_option("--wmin", w_min, "Lowest frequency [rad/s]");
    bode->add_option("--wmax", w_max, "Highest frequency [rad/s]");
    bode->add_option("--points", points, "Log-spaced grid size");
    bode->add_option("--out", bode_out, "CSV path (stdout when omitted)");

    std::string k_text;
    auto* check = app.add_subcommand("check-gains", "Hurwitz test of k_1..k_n");
    check->add_option("--k", k_text, "Comma-separated gains")->required();

    std::string cmp_baseline, cmp_two_step, cmp_out;
    auto* cmp = app.add_subcommand("compare", "Baseline vs two-step errors against the undelayed signal");
    cmp->add_option("--baseline", cmp_baseline, "Baseline scenario JSON")->required();
    cmp->add_option("--two-step", cmp_two_step, "Two-step scenario JSON")->required();
    cmp->add_option("--out", cmp_out, "CSV path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return fail("usage", e.what());
    }

    try {
        if (*run) return cmd_run(scenario_path, out_dir, !no_trace);
        if (*sweep) return cmd_sweep(base_path, deltas_text, sweep_out, workers);
        if (*bode) return cmd_bode(spec_path, outputs_text, w_min, w_max, points, bode_out);
        if (*check) return cmd_check_gains(k_text);
        if (*cmp) return cmd_compare(cmp_baseline, cmp_two_step, cmp_out);
    } catch (const tsdiff::ConfigError& e) {
        return fail(tsdiff::kind_name(e.kind()), e.what(), e.field());
    } catch (const tsdiff::Error& e) {
        return fail(tsdiff::kind_name(e.kind()), e.what());
    } catch (const std::exception& e) {
        return fail("internal", e.what());
    }
    return 0;
}
